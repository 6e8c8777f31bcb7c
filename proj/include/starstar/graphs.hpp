#pragma once
// The three graphs of a StarStar model.
//
//   E2O  events <-> objects, straight from the event-object relation.
//   E2E  for every object o and 2 <= i <= |g(o)|, an edge from the (i-1)-th to
//        the i-th related event, weighted by w(o) and annotated with the
//        elapsed time.
//   A2A  E2E edges grouped by (class of object, source activity, target
//        activity): count, summed weight, mean elapsed time.

#include "starstar/model.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace starstar {

// Both directions in compressed rows. Events keep the log's total order,
// objects are sorted by id.
class E2OGraph {
public:
    E2OGraph() = default;

    // Every event and object of the log, related or not.
    const std::vector<EventId>& events() const noexcept { return events_; }
    const std::vector<ObjectId>& objects() const noexcept { return objects_; }
    std::size_t pair_count() const noexcept { return event_targets_.size(); }

    // Throw NotFound for unknown ids. Objects by id, events in total order.
    std::span<const ObjectId> objects_of(const EventId& event) const;
    std::span<const EventId> events_of(const ObjectId& object) const;

    friend bool operator==(const E2OGraph& a, const E2OGraph& b) {
        return a.events_ == b.events_ && a.event_offsets_ == b.event_offsets_ &&
               a.event_targets_ == b.event_targets_ && a.objects_ == b.objects_ &&
               a.object_offsets_ == b.object_offsets_ && a.object_targets_ == b.object_targets_;
    }

private:
    friend E2OGraph build_e2o(const DbEventLog& log);

    // Event positions sorted by id, built on first lookup.
    struct IdIndex {
        std::once_flag built;
        std::vector<std::size_t> order;
    };

    std::vector<EventId> events_;
    std::vector<std::size_t> event_offsets_{0};
    std::vector<ObjectId> event_targets_;
    std::vector<ObjectId> objects_;
    std::vector<std::size_t> object_offsets_{0};
    std::vector<EventId> object_targets_;
    std::shared_ptr<IdIndex> index_ = std::make_shared<IdIndex>();
};

struct E2EEdge {
    ObjectId object;
    std::size_t index = 0; // i >= 2
    EventId source;        // i-1 th related event
    EventId target;        // i-th related event
    double weight = 0.0;
    double perf = 0.0;

    friend bool operator==(const E2EEdge&, const E2EEdge&) = default;
};

class E2EMultigraph {
public:
    E2EMultigraph() = default;
    explicit E2EMultigraph(std::vector<E2EEdge> edges);

    // Sorted by (object, index).
    const std::vector<E2EEdge>& edges() const noexcept { return edges_; }

    // R_E(source, target)
    std::vector<const E2EEdge*> between(const EventId& source, const EventId& target) const;

    friend bool operator==(const E2EMultigraph& a, const E2EMultigraph& b) {
        return a.edges_ == b.edges_;
    }

private:
    // Edge positions sorted by (source, target), built on first use.
    struct PairIndex {
        std::once_flag built;
        std::vector<std::size_t> order;
    };

    std::vector<E2EEdge> edges_;
    std::shared_ptr<PairIndex> index_ = std::make_shared<PairIndex>();
};

struct A2AEdgeKey {
    ObjectClass object_class;
    Activity source;
    Activity target;

    friend auto operator<=>(const A2AEdgeKey&, const A2AEdgeKey&) = default;
    friend bool operator==(const A2AEdgeKey&, const A2AEdgeKey&) = default;
};

struct A2AEdge {
    A2AEdgeKey key;
    std::size_t count = 0;
    double weight = 0.0;
    // weight divided by the largest weight among edges of the same class
    double weight_norm = 0.0;
    double perf = 0.0; // mean over contributing E2E edges

    friend bool operator==(const A2AEdge&, const A2AEdge&) = default;
};

class A2AMultigraph {
public:
    A2AMultigraph() = default;
    A2AMultigraph(std::map<Activity, std::size_t> nodes, std::vector<A2AEdge> edges);

    // Activity -> number of events with that activity.
    const std::map<Activity, std::size_t>& nodes() const noexcept { return nodes_; }
    // Only edges with count >= 1, sorted by key.
    const std::vector<A2AEdge>& edges() const noexcept { return edges_; }

    const A2AEdge* find(const A2AEdgeKey& key) const;
    // R_A(source, target): one edge per class.
    std::vector<const A2AEdge*> between(const Activity& source, const Activity& target) const;

    friend bool operator==(const A2AMultigraph&, const A2AMultigraph&) = default;

private:
    std::map<Activity, std::size_t> nodes_;
    std::vector<A2AEdge> edges_;
};

E2OGraph build_e2o(const DbEventLog& log);
E2EMultigraph build_e2e(const DbEventLog& log);
A2AMultigraph build_a2a(const DbEventLog& log, const E2EMultigraph& e2e);
// Same result as build_a2a(log, build_e2e(log)) without materialising E2E.
A2AMultigraph build_a2a(const DbEventLog& log);

// AE(f): the E2E edges aggregated into the A2A edge with this key.
std::vector<const E2EEdge*> contributing_edges(const DbEventLog& log, const E2EMultigraph& e2e,
                                               const A2AEdgeKey& key);

// Immutable (log, E2O, E2E, A2A) quadruple. Copies share the same data.
class ModelSnapshot {
public:
    // Builds all three graphs from `log`.
    explicit ModelSnapshot(DbEventLog log);

    // Content address of the log: equal logs give equal ids.
    const std::string& id() const noexcept { return data_->id; }
    const DbEventLog& log() const noexcept { return data_->log; }
    const E2OGraph& e2o() const noexcept { return data_->e2o; }
    const E2EMultigraph& e2e() const noexcept { return data_->e2e; }
    const A2AMultigraph& a2a() const noexcept { return data_->a2a; }

private:
    struct Data {
        std::string id;
        DbEventLog log;
        E2OGraph e2o;
        E2EMultigraph e2e;
        A2AMultigraph a2a;
    };
    std::shared_ptr<const Data> data_;
};

// E2E edges reachable from `event` within `radius` hops, ignoring direction.
// An edge is kept when one of its endpoints is fewer than `radius` hops away.
// Throws NotFound for unknown events.
E2EMultigraph e2e_neighborhood(const ModelSnapshot& snapshot, const EventId& event,
                               std::size_t radius);

// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view bytes);

} // namespace starstar
