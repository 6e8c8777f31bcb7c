#include "starstar/projection.hpp"
#include "starstar/timefmt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace starstar {

void check_params(const ProjectionParams& params) {
    if (params.perspective.empty()) {
        throw Error(ErrorCode::InvalidArgument, "perspective class must not be empty");
    }
    if (!(params.omega > 0.0 && params.omega <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("omega must lie in (0, 1], got {}", params.omega));
    }
}

double similarity(const std::set<EventId>& a, const std::set<EventId>& b) {
    if (a.empty() && b.empty()) {
        throw Error(ErrorCode::Undefined, "similarity of two empty event sets");
    }
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(shared) / static_cast<double>(std::max(a.size(), b.size()));
}

namespace {

using EventSet = std::vector<std::size_t>; // sorted event positions

// Accumulates the union of several sorted sets over a fixed event universe.
class UnionBuilder {
public:
    explicit UnionBuilder(std::size_t universe) : mark_(universe, 0) {}

    void begin() { ++stamp_; members_.clear(); }

    template <typename Range>
    void add(const Range& set) {
        for (auto e : set) {
            if (mark_[e] != stamp_) {
                mark_[e] = stamp_;
                members_.push_back(e);
            }
        }
    }

    EventSet finish() {
        std::sort(members_.begin(), members_.end());
        return members_;
    }

private:
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    EventSet members_;
};

// Counts |source ∩ candidate| for every candidate via an inverted index.
class OverlapCounter {
public:
    explicit OverlapCounter(std::size_t candidates) : shared_(candidates, 0) {}

    template <typename Index>
    const std::vector<std::size_t>& count(std::span<const std::size_t> source, const Index& index) {
        for (auto c : touched_) {
            shared_[c] = 0;
        }
        touched_.clear();
        for (auto e : source) {
            for (auto c : index(e)) {
                if (shared_[c]++ == 0) {
                    touched_.push_back(c);
                }
            }
        }
        std::sort(touched_.begin(), touched_.end());
        return touched_;
    }

    std::size_t shared(std::size_t candidate) const { return shared_[candidate]; }

private:
    std::vector<std::size_t> shared_;
    std::vector<std::size_t> touched_;
};

bool similar(std::size_t shared, std::size_t a, std::size_t b, double omega) {
    return static_cast<double>(shared) / static_cast<double>(std::max(a, b)) >= omega;
}

void check_deadline(const ProjectionLimits& limits) {
    if (limits.deadline && std::chrono::steady_clock::now() > *limits.deadline) {
        throw Error(ErrorCode::Timeout, "projection exceeded its time budget");
    }
}

} // namespace

std::vector<Case> case_notion(const DbEventLog& log, const ProjectionParams& params,
                              const ProjectionLimits& limits) {
    check_params(params);
    const auto objects = log.objects();
    const auto events = log.events();

    std::vector<std::size_t> perspective;
    for (std::size_t o = 0; o < objects.size(); ++o) {
        if (objects[o].object_class == params.perspective && !log.events_of(o).empty()) {
            perspective.push_back(o);
        }
    }
    if (perspective.empty()) {
        throw Error(ErrorCode::EmptyPerspective,
                    "class '" + params.perspective.str() + "' has no object with events");
    }

    UnionBuilder unite(events.size());

    // Level 0: neighbours are objects of any class.
    std::vector<EventSet> level(perspective.size());
    {
        OverlapCounter overlap(objects.size());
        auto index = [&](std::size_t e) { return log.objects_of(e); };
        for (std::size_t p = 0; p < perspective.size(); ++p) {
            check_deadline(limits);
            auto g1 = log.events_of(perspective[p]);
            unite.begin();
            unite.add(g1);
            for (auto o2 : overlap.count(g1, index)) {
                auto g2 = log.events_of(o2);
                if (similar(overlap.shared(o2), g1.size(), g2.size(), params.omega)) {
                    unite.add(g2);
                }
            }
            level[p] = unite.finish();
        }
    }

    // Level i: neighbours are the previous level's cases.
    for (std::size_t round = 0; round < params.window; ++round) {
        std::vector<std::vector<std::size_t>> containing(events.size());
        for (std::size_t p = 0; p < level.size(); ++p) {
            for (auto e : level[p]) {
                containing[e].push_back(p);
            }
        }
        auto index = [&](std::size_t e) -> const std::vector<std::size_t>& {
            return containing[e];
        };
        OverlapCounter overlap(level.size());
        std::vector<EventSet> next(level.size());
        for (std::size_t p = 0; p < perspective.size(); ++p) {
            check_deadline(limits);
            auto g1 = log.events_of(perspective[p]);
            unite.begin();
            unite.add(g1);
            for (auto q : overlap.count(g1, index)) {
                if (similar(overlap.shared(q), g1.size(), level[q].size(), params.omega)) {
                    unite.add(level[q]);
                }
            }
            next[p] = unite.finish();
        }
        level = std::move(next);
    }

    std::vector<Case> cases;
    cases.reserve(perspective.size());
    for (std::size_t p = 0; p < perspective.size(); ++p) {
        const auto& source = objects[perspective[p]].id;
        Case c{CaseId("c:" + source.str()), {}, source};
        c.events.reserve(level[p].size());
        for (auto e : level[p]) {
            c.events.push_back(events[e].id);
        }
        cases.push_back(std::move(c));
    }
    std::sort(cases.begin(), cases.end(),
              [](const Case& a, const Case& b) { return a.id < b.id; });
    return cases;
}

ClassicEventLog project(const DbEventLog& log, const std::vector<Case>& cases) {
    ClassicEventLog clog;
    std::unordered_set<CaseId> seen;
    std::vector<bool> used(log.events().size(), false);
    for (const auto& c : cases) {
        if (!seen.insert(c.id).second) {
            continue;
        }
        std::vector<std::size_t> positions;
        for (const auto& e : c.events) {
            auto pos = log.event_position(e);
            if (!pos) {
                throw Error(ErrorCode::DanglingRef,
                            "case '" + c.id.str() + "' references unknown event '" + e.str() + "'");
            }
            positions.push_back(*pos);
        }
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

        Case out{c.id, {}, c.source_object};
        for (auto p : positions) {
            out.events.push_back(log.events()[p].id);
            used[p] = true;
        }
        clog.cases.push_back(std::move(out));
    }
    for (std::size_t p = 0; p < used.size(); ++p) {
        if (used[p]) {
            clog.events.push_back(log.events()[p]);
        }
    }
    return clog;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string shortest(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// Cases sorted by id, each paired with its events in total order.
std::vector<std::pair<const Case*, std::vector<const Event*>>> ordered_traces(
    const ClassicEventLog& clog) {
    std::unordered_map<EventId, const Event*> by_id;
    for (const auto& e : clog.events) {
        by_id.emplace(e.id, &e);
    }
    std::vector<std::pair<const Case*, std::vector<const Event*>>> traces;
    for (const auto& c : clog.cases) {
        std::vector<const Event*> events;
        for (const auto& id : c.events) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw Error(ErrorCode::DanglingRef,
                            "case '" + c.id.str() + "' references unknown event '" + id.str() + "'");
            }
            events.push_back(it->second);
        }
        std::sort(events.begin(), events.end(),
                  [](const Event* a, const Event* b) { return compare_events(*a, *b) < 0; });
        traces.emplace_back(&c, std::move(events));
    }
    std::stable_sort(traces.begin(), traces.end(),
                     [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
    return traces;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string export_xes(const ClassicEventLog& clog) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          "<log xes.version=\"1.0\" xmlns=\"http://www.xes-standard.org/\">\n"
          "  <extension name=\"Concept\" prefix=\"concept\" "
          "uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
          "  <extension name=\"Time\" prefix=\"time\" "
          "uri=\"http://www.xes-standard.org/time.xesext\"/>\n"
          "  <global scope=\"trace\">\n"
          "    <string key=\"concept:name\" value=\"__INVALID__\"/>\n"
          "  </global>\n"
          "  <global scope=\"event\">\n"
          "    <string key=\"concept:name\" value=\"__INVALID__\"/>\n"
          "    <date key=\"time:timestamp\" value=\"1970-01-01T00:00:00.000Z\"/>\n"
          "  </global>\n"
          "  <classifier name=\"Activity\" keys=\"concept:name\"/>\n";
    for (const auto& [c, events] : ordered_traces(clog)) {
        os << "  <trace>\n    <string key=\"concept:name\" value=\"" << xml_escape(c->id.str())
           << "\"/>\n";
        for (const Event* e : events) {
            os << "    <event>\n"
               << "      <string key=\"concept:name\" value=\"" << xml_escape(e->activity.str())
               << "\"/>\n"
               << "      <date key=\"time:timestamp\" value=\"" << format_iso8601(e->timestamp)
               << "\"/>\n"
               << "      <string key=\"eventId\" value=\"" << xml_escape(e->id.str()) << "\"/>\n";
            for (const auto& [key, value] : e->attributes) {
                if (key == "concept:name" || key == "time:timestamp" || key == "eventId") {
                    continue;
                }
                std::string tag;
                std::string text;
                if (auto s = std::get_if<std::string>(&value)) {
                    tag = "string";
                    text = *s;
                } else if (auto n = std::get_if<std::int64_t>(&value)) {
                    tag = "int";
                    text = std::to_string(*n);
                } else if (auto d = std::get_if<double>(&value)) {
                    tag = "float";
                    text = shortest(*d);
                } else {
                    tag = "boolean";
                    text = std::get<bool>(value) ? "true" : "false";
                }
                os << "      <" << tag << " key=\"" << xml_escape(key) << "\" value=\""
                   << xml_escape(text) << "\"/>\n";
            }
            os << "    </event>\n";
        }
        os << "  </trace>\n";
    }
    os << "</log>\n";
    return os.str();
}

std::string export_csv(const ClassicEventLog& clog) {
    std::string out = "case_id,event_id,activity,timestamp\n";
    for (const auto& [c, events] : ordered_traces(clog)) {
        for (const Event* e : events) {
            out += csv_field(c->id.str());
            out += ',';
            out += csv_field(e->id.str());
            out += ',';
            out += csv_field(e->activity.str());
            out += ',';
            out += format_iso8601(e->timestamp);
            out += '\n';
        }
    }
    return out;
}

ProjectionSummary summarize(const ClassicEventLog& clog) {
    ProjectionSummary s;
    s.cases = clog.cases.size();
    s.events = clog.events.size();
    std::size_t total = 0;
    for (const auto& c : clog.cases) {
        total += c.events.size();
    }
    s.mean_case_size = s.cases == 0 ? 0.0 : static_cast<double>(total) / s.cases;
    return s;
}

} // namespace starstar
