#pragma once
// Projection of a database event log onto a classic, case-grouped event log
// for a chosen object class (the perspective).
//
// For every object o1 of the perspective class with at least one event:
//   level 0:  case(o1) = g(o1) ∪ ⋃ { g(o2) : o2 any object, sim(g(o1), g(o2)) >= omega }
//   level i:  case(o1) = g(o1) ∪ ⋃ { s : s a level i-1 case, sim(g(o1), s) >= omega }
// where sim(A, B) = |A ∩ B| / max(|A|, |B|). `window` is the number of
// level-i rounds applied after level 0.

#include "starstar/model.hpp"

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace starstar {

inline constexpr double kDefaultOmega = 0.05;
inline constexpr std::size_t kDefaultWindow = 2;

struct ProjectionParams {
    ObjectClass perspective;
    double omega = kDefaultOmega;  // (0, 1]
    std::size_t window = kDefaultWindow;
};

// Throws InvalidArgument when omega is outside (0, 1] or the class is empty.
void check_params(const ProjectionParams& params);

// Throws Undefined when both sets are empty.
double similarity(const std::set<EventId>& a, const std::set<EventId>& b);

struct ProjectionLimits {
    // Checked between objects; exceeding it throws Timeout.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// One case per perspective object with events, id "c:<object id>", sorted by
// case id. Throws EmptyPerspective when the class has no such object.
std::vector<Case> case_notion(const DbEventLog& log, const ProjectionParams& params,
                              const ProjectionLimits& limits = {});

// Keeps the first case of each id. Case events are re-sorted into the log's
// total order. Throws DanglingRef for events missing from the log.
ClassicEventLog project(const DbEventLog& log, const std::vector<Case>& cases);

// XES 1.0 with the concept and time extensions; one trace per case sorted by
// case id, events in total order.
std::string export_xes(const ClassicEventLog& clog);

// case_id,event_id,activity,timestamp rows sorted by (case id, total order).
std::string export_csv(const ClassicEventLog& clog);

struct ProjectionSummary {
    std::size_t cases = 0;
    std::size_t events = 0; // distinct events
    double mean_case_size = 0.0;
};

ProjectionSummary summarize(const ClassicEventLog& clog);

} // namespace starstar
