#include "starstar/model.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace starstar {

std::vector<Issue> structural_errors(const LogData& data) {
    std::vector<Issue> errors;
    auto add = [&](ErrorCode code, std::string message, std::string location) {
        errors.push_back({std::string(to_string(code)), std::move(message), std::move(location)});
    };

    std::unordered_set<EventId> event_ids;
    for (std::size_t i = 0; i < data.events.size(); ++i) {
        const auto& e = data.events[i];
        std::string where = "event #" + std::to_string(i + 1);
        if (e.id.empty()) {
            add(ErrorCode::SchemaError, "event without id", where);
            continue;
        }
        where = "event " + e.id.str();
        if (!event_ids.insert(e.id).second) {
            add(ErrorCode::DuplicateId, "duplicate event id '" + e.id.str() + "'", where);
        }
        if (e.activity.empty()) {
            add(ErrorCode::SchemaError, "event '" + e.id.str() + "' has no activity", where);
        }
        if (!e.timestamp) {
            add(ErrorCode::SchemaError, "event '" + e.id.str() + "' has no timestamp", where);
        }
    }

    std::unordered_set<ObjectId> object_ids;
    for (std::size_t i = 0; i < data.objects.size(); ++i) {
        const auto& o = data.objects[i];
        if (o.id.empty()) {
            add(ErrorCode::SchemaError, "object without id", "object #" + std::to_string(i + 1));
            continue;
        }
        std::string where = "object " + o.id.str();
        if (!object_ids.insert(o.id).second) {
            add(ErrorCode::DuplicateId, "duplicate object id '" + o.id.str() + "'", where);
        }
        if (o.object_class.empty()) {
            add(ErrorCode::SchemaError, "object '" + o.id.str() + "' has no class", where);
        }
    }

    for (const auto& [e, o] : data.eo) {
        std::string where = "reference " + e.str() + " -> " + o.str();
        if (!event_ids.contains(e)) {
            add(ErrorCode::DanglingRef, "reference from undeclared event '" + e.str() + "'", where);
        }
        if (!object_ids.contains(o)) {
            add(ErrorCode::DanglingRef, "reference to undeclared object '" + o.str() + "'", where);
        }
    }
    return errors;
}

std::strong_ordering compare_events(const Event& a, const Event& b) {
    if (auto c = a.timestamp <=> b.timestamp; c != 0) {
        return c;
    }
    return a.id <=> b.id;
}

namespace {

ErrorCode code_from_name(const std::string& name) {
    for (auto code : {ErrorCode::SchemaError, ErrorCode::DuplicateId, ErrorCode::DanglingRef}) {
        if (name == to_string(code)) {
            return code;
        }
    }
    return ErrorCode::SchemaError;
}

// Builds CSR offsets/targets from (row, column) pairs already sorted by row.
void build_csr(std::size_t rows, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
               std::vector<std::size_t>& offsets, std::vector<std::size_t>& targets) {
    offsets.assign(rows + 1, 0);
    for (const auto& [r, c] : pairs) {
        ++offsets[r + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    targets.resize(pairs.size());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [r, c] : pairs) {
        targets[cursor[r]++] = c;
    }
}

} // namespace

DbEventLog::DbEventLog(LogData data) {
    if (auto errors = structural_errors(data); !errors.empty()) {
        const auto& first = errors.front();
        throw Error(code_from_name(first.code), first.message + " at " + first.location);
    }

    events_.reserve(data.events.size());
    for (auto& r : data.events) {
        events_.push_back({std::move(r.id), std::move(r.activity), *r.timestamp,
                           std::move(r.attributes)});
    }
    std::sort(events_.begin(), events_.end(),
              [](const Event& a, const Event& b) { return compare_events(a, b) < 0; });

    objects_ = std::move(data.objects);
    std::sort(objects_.begin(), objects_.end(),
              [](const ObjectEntry& a, const ObjectEntry& b) { return a.id < b.id; });

    event_index_.reserve(events_.size());
    for (std::size_t i = 0; i < events_.size(); ++i) {
        event_index_.emplace(events_[i].id, i);
    }
    object_index_.reserve(objects_.size());
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        object_index_.emplace(objects_[i].id, i);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (event, object)
    pairs.reserve(data.eo.size());
    for (const auto& [e, o] : data.eo) {
        pairs.emplace_back(event_index_.at(e), object_index_.at(o));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    eo_.reserve(pairs.size());
    for (const auto& [e, o] : pairs) {
        eo_.push_back({events_[e].id, objects_[o].id});
    }
    build_csr(events_.size(), pairs, event_offsets_, event_objects_);

    // Sorting by (object, event) keeps each object's events in total order.
    for (auto& p : pairs) {
        std::swap(p.first, p.second);
    }
    std::sort(pairs.begin(), pairs.end());
    build_csr(objects_.size(), pairs, object_offsets_, object_events_);
}

std::optional<std::size_t> DbEventLog::event_position(const EventId& id) const {
    if (auto it = event_index_.find(id); it != event_index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::optional<std::size_t> DbEventLog::object_position(const ObjectId& id) const {
    if (auto it = object_index_.find(id); it != object_index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::span<const std::size_t> DbEventLog::events_of(std::size_t object_pos) const {
    return std::span(object_events_).subspan(object_offsets_[object_pos],
                                              object_offsets_[object_pos + 1] -
                                                  object_offsets_[object_pos]);
}

std::span<const std::size_t> DbEventLog::objects_of(std::size_t event_pos) const {
    return std::span(event_objects_).subspan(event_offsets_[event_pos],
                                             event_offsets_[event_pos + 1] -
                                                 event_offsets_[event_pos]);
}

LogData DbEventLog::records() const {
    LogData data;
    data.events.reserve(events_.size());
    for (const auto& e : events_) {
        data.events.push_back({e.id, e.activity, e.timestamp, e.attributes});
    }
    data.objects = objects_;
    data.eo = eo_;
    return data;
}

namespace {

std::size_t require_object(const DbEventLog& log, const ObjectId& object) {
    auto pos = log.object_position(object);
    if (!pos) {
        throw Error(ErrorCode::NotFound, "unknown object '" + object.str() + "'");
    }
    return *pos;
}

} // namespace

std::vector<EventId> related_events(const DbEventLog& log, const ObjectId& object) {
    std::vector<EventId> out;
    for (auto e : log.events_of(require_object(log, object))) {
        out.push_back(log.events()[e].id);
    }
    return out;
}

double object_weight(const DbEventLog& log, const ObjectId& object) {
    auto n = log.events_of(require_object(log, object)).size();
    return 1.0 / static_cast<double>(n + 1);
}

EventId kth_event(const DbEventLog& log, const ObjectId& object, std::size_t k) {
    auto related = log.events_of(require_object(log, object));
    if (k < 1 || k > related.size()) {
        throw Error(ErrorCode::OutOfRange, "k=" + std::to_string(k) + " outside 1.." +
                                               std::to_string(related.size()) + " for object '" +
                                               object.str() + "'");
    }
    return log.events()[related[k - 1]].id;
}

} // namespace starstar
