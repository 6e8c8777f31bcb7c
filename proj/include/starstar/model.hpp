#pragma once
// Event data extracted from a database: events, objects, the event-object
// relation and the total order over events. Everything here is immutable
// once a DbEventLog has been constructed.

#include "starstar/error.hpp"
#include "starstar/ids.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace starstar {

// Integer time units; milliseconds since the Unix epoch unless the producer
// of the log says otherwise. One unit per log.
using Timestamp = std::int64_t;

using AttributeValue = std::variant<std::string, std::int64_t, double, bool>;
using Attributes = std::map<std::string, AttributeValue>;

struct Event {
    EventId id;
    Activity activity;
    Timestamp timestamp = 0;
    Attributes attributes;

    friend bool operator==(const Event&, const Event&) = default;
};

struct ObjectEntry {
    ObjectId id;
    ObjectClass object_class;

    friend bool operator==(const ObjectEntry&, const ObjectEntry&) = default;
};

struct EventObjectPair {
    EventId event;
    ObjectId object;

    friend auto operator<=>(const EventObjectPair&, const EventObjectPair&) = default;
    friend bool operator==(const EventObjectPair&, const EventObjectPair&) = default;
};

// An event as read from an input, before validation. The timestamp may be
// missing here; a DbEventLog never holds such an event.
struct EventRecord {
    EventId id;
    Activity activity;
    std::optional<Timestamp> timestamp;
    Attributes attributes;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Unvalidated content of a log, in input order.
struct LogData {
    std::vector<EventRecord> events;
    std::vector<ObjectEntry> objects;
    std::vector<EventObjectPair> eo;
};

struct Issue {
    std::string code;
    std::string message;
    std::string location;
};

// Structural errors in `data`: empty identifiers, missing timestamp or
// activity, duplicate ids, references to undeclared events or objects.
std::vector<Issue> structural_errors(const LogData& data);

// Total order on events: ascending timestamp, then EventId.
std::strong_ordering compare_events(const Event& a, const Event& b);

class DbEventLog {
public:
    DbEventLog() = default;

    // Throws Error with the code of the first structural error found.
    // Repeated (event, object) pairs collapse into one.
    explicit DbEventLog(LogData data);

    // Events in total order; an event's position is its rank.
    std::span<const Event> events() const noexcept { return events_; }
    // Objects sorted by id.
    std::span<const ObjectEntry> objects() const noexcept { return objects_; }
    // Pairs sorted by (event rank, object id).
    std::span<const EventObjectPair> eo() const noexcept { return eo_; }

    std::optional<std::size_t> event_position(const EventId& id) const;
    std::optional<std::size_t> object_position(const ObjectId& id) const;

    // Positions of the events related to the object at `object_pos`, ascending.
    std::span<const std::size_t> events_of(std::size_t object_pos) const;
    // Positions of the objects related to the event at `event_pos`, ascending.
    std::span<const std::size_t> objects_of(std::size_t event_pos) const;

    bool empty() const noexcept { return events_.empty() && objects_.empty(); }

    LogData records() const;

    friend bool operator==(const DbEventLog& a, const DbEventLog& b) {
        return a.events_ == b.events_ && a.objects_ == b.objects_ && a.eo_ == b.eo_;
    }

private:
    std::vector<Event> events_;
    std::vector<ObjectEntry> objects_;
    std::vector<EventObjectPair> eo_;

    std::unordered_map<EventId, std::size_t> event_index_;
    std::unordered_map<ObjectId, std::size_t> object_index_;

    // CSR adjacency in both directions.
    std::vector<std::size_t> object_offsets_;
    std::vector<std::size_t> object_events_;
    std::vector<std::size_t> event_offsets_;
    std::vector<std::size_t> event_objects_;
};

// g(o): related events in total order. Throws NotFound for unknown objects.
std::vector<EventId> related_events(const DbEventLog& log, const ObjectId& object);

// w(o) = 1 / (|g(o)| + 1).
double object_weight(const DbEventLog& log, const ObjectId& object);

// The k-th (1-based) element of g(o). Throws OutOfRange or NotFound.
EventId kth_event(const DbEventLog& log, const ObjectId& object, std::size_t k);

struct Case {
    CaseId id;
    std::vector<EventId> events; // total order
    std::optional<ObjectId> source_object;

    friend bool operator==(const Case&, const Case&) = default;
};

// Case-grouped event log. An event may sit in several cases.
struct ClassicEventLog {
    std::vector<Case> cases;
    std::vector<Event> events; // total order

    friend bool operator==(const ClassicEventLog&, const ClassicEventLog&) = default;
};

} // namespace starstar
