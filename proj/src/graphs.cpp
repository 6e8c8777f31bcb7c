#include "starstar/graphs.hpp"
#include "starstar/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace starstar {

E2EMultigraph::E2EMultigraph(std::vector<E2EEdge> edges) : edges_(std::move(edges)) {
    auto by_object = [](const E2EEdge& a, const E2EEdge& b) {
        return std::tie(a.object, a.index) < std::tie(b.object, b.index);
    };
    if (!std::is_sorted(edges_.begin(), edges_.end(), by_object)) {
        std::sort(edges_.begin(), edges_.end(), by_object);
    }
}

std::vector<const E2EEdge*> E2EMultigraph::between(const EventId& source,
                                                    const EventId& target) const {
    auto& index = *index_;
    std::call_once(index.built, [&] {
        index.order.resize(edges_.size());
        std::iota(index.order.begin(), index.order.end(), std::size_t{0});
        std::stable_sort(index.order.begin(), index.order.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(edges_[a].source, edges_[a].target) <
                   std::tie(edges_[b].source, edges_[b].target);
        });
    });
    auto key = std::tie(source, target);
    auto lo = std::partition_point(index.order.begin(), index.order.end(), [&](std::size_t i) {
        return std::tie(edges_[i].source, edges_[i].target) < key;
    });
    std::vector<const E2EEdge*> out;
    for (auto it = lo; it != index.order.end() && std::tie(edges_[*it].source, edges_[*it].target) == key;
         ++it) {
        out.push_back(&edges_[*it]);
    }
    return out;
}

A2AMultigraph::A2AMultigraph(std::map<Activity, std::size_t> nodes, std::vector<A2AEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(),
              [](const A2AEdge& a, const A2AEdge& b) { return a.key < b.key; });
}

const A2AEdge* A2AMultigraph::find(const A2AEdgeKey& key) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                               [](const A2AEdge& e, const A2AEdgeKey& k) { return e.key < k; });
    return it != edges_.end() && it->key == key ? &*it : nullptr;
}

std::vector<const A2AEdge*> A2AMultigraph::between(const Activity& source,
                                                    const Activity& target) const {
    std::vector<const A2AEdge*> out;
    for (const auto& e : edges_) {
        if (e.key.source == source && e.key.target == target) {
            out.push_back(&e);
        }
    }
    return out;
}

std::span<const ObjectId> E2OGraph::objects_of(const EventId& event) const {
    auto& index = *index_;
    std::call_once(index.built, [&] {
        index.order.resize(events_.size());
        std::iota(index.order.begin(), index.order.end(), std::size_t{0});
        std::sort(index.order.begin(), index.order.end(),
                  [&](std::size_t a, std::size_t b) { return events_[a] < events_[b]; });
    });
    auto it = std::partition_point(index.order.begin(), index.order.end(),
                                   [&](std::size_t i) { return events_[i] < event; });
    if (it == index.order.end() || events_[*it] != event) {
        throw Error(ErrorCode::NotFound, "unknown event '" + event.str() + "'");
    }
    auto i = *it;
    return std::span(event_targets_).subspan(event_offsets_[i], event_offsets_[i + 1] - event_offsets_[i]);
}

std::span<const EventId> E2OGraph::events_of(const ObjectId& object) const {
    auto it = std::lower_bound(objects_.begin(), objects_.end(), object);
    if (it == objects_.end() || *it != object) {
        throw Error(ErrorCode::NotFound, "unknown object '" + object.str() + "'");
    }
    auto i = static_cast<std::size_t>(it - objects_.begin());
    return std::span(object_targets_).subspan(object_offsets_[i],
                                              object_offsets_[i + 1] - object_offsets_[i]);
}

E2OGraph build_e2o(const DbEventLog& log) {
    E2OGraph g;
    const auto events = log.events();
    const auto objects = log.objects();

    g.objects_.reserve(objects.size());
    for (const auto& o : objects) g.objects_.push_back(o.id);
    g.events_.reserve(events.size());
    for (const auto& e : events) g.events_.push_back(e.id);

    g.event_offsets_.reserve(events.size() + 1);
    g.event_targets_.reserve(log.eo().size());
    for (std::size_t e = 0; e < events.size(); ++e) {
        for (auto o : log.objects_of(e)) g.event_targets_.push_back(g.objects_[o]);
        g.event_offsets_.push_back(g.event_targets_.size());
    }
    g.object_offsets_.reserve(objects.size() + 1);
    g.object_targets_.reserve(log.eo().size());
    for (std::size_t o = 0; o < objects.size(); ++o) {
        for (auto e : log.events_of(o)) g.object_targets_.push_back(g.events_[e]);
        g.object_offsets_.push_back(g.object_targets_.size());
    }
    return g;
}

E2EMultigraph build_e2e(const DbEventLog& log) {
    const auto events = log.events();
    // Compact copies keep the random accesses below inside cache.
    std::vector<const EventId*> id(events.size());
    std::vector<Timestamp> time(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        id[i] = &events[i].id;
        time[i] = events[i].timestamp;
    }
    std::vector<E2EEdge> edges;
    edges.reserve(log.eo().size());
    for (std::size_t o = 0; o < log.objects().size(); ++o) {
        auto related = log.events_of(o);
        if (related.size() < 2) {
            continue;
        }
        const auto& object = log.objects()[o].id;
        double weight = 1.0 / static_cast<double>(related.size() + 1);
        for (std::size_t i = 1; i < related.size(); ++i) {
            auto in = related[i - 1];
            auto out = related[i];
            edges.push_back({object, i + 1, *id[in], *id[out], weight,
                             static_cast<double>(time[out] - time[in])});
        }
    }
    return E2EMultigraph(std::move(edges));
}

namespace {

// Activities and classes interned to dense codes; edges grouped on
// (class, source, target) codes.
class A2AGrouping {
public:
    explicit A2AGrouping(const DbEventLog& log) {
        const auto events = log.events();
        const auto objects = log.objects();
        for (const auto& e : events) ++nodes_[e.activity];
        std::map<Activity, std::uint32_t> activity_code;
        for (const auto& [a, _] : nodes_) {
            activity_code.emplace_hint(activity_code.end(), a, activities_.size());
            activities_.push_back(&a);
        }
        event_activity_.resize(events.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            event_activity_[i] = activity_code.find(events[i].activity)->second;
        }
        for (const auto& o : objects) class_code_.emplace(o.object_class, 0);
        for (auto& [c, code] : class_code_) {
            code = static_cast<std::uint32_t>(classes_.size());
            classes_.push_back(&c);
        }
        object_class_.resize(objects.size());
        for (std::size_t i = 0; i < objects.size(); ++i) {
            object_class_[i] = class_code_.find(objects[i].object_class)->second;
        }
        n_act_ = activities_.size();
        if (classes_.size() * n_act_ * n_act_ <= kDenseLimit) {
            dense_.resize(classes_.size() * n_act_ * n_act_);
        }
    }

    void add(std::size_t object_pos, std::size_t in, std::size_t out, double weight, double perf) {
        auto code = (object_class_[object_pos] * n_act_ + event_activity_[in]) * n_act_ +
                    event_activity_[out];
        auto& s = dense_.empty() ? sparse_[code] : dense_[code];
        ++s.count;
        s.weight += weight;
        s.perf += perf;
    }

    A2AMultigraph finish() && {
        std::vector<std::pair<std::uint64_t, Sums>> groups;
        if (dense_.empty()) {
            groups.assign(sparse_.begin(), sparse_.end());
        } else {
            for (std::uint64_t code = 0; code < dense_.size(); ++code) {
                if (dense_[code].count > 0) groups.emplace_back(code, dense_[code]);
            }
        }
        const auto square = n_act_ * n_act_;
        std::vector<double> max_weight(classes_.size(), 0.0);
        for (const auto& [code, s] : groups) {
            auto& m = max_weight[code / square];
            m = std::max(m, s.weight);
        }
        std::vector<A2AEdge> edges;
        edges.reserve(groups.size());
        for (const auto& [code, s] : groups) {
            auto cls = code / square;
            edges.push_back({{*classes_[cls], *activities_[(code / n_act_) % n_act_],
                              *activities_[code % n_act_]},
                             s.count,
                             s.weight,
                             s.weight / max_weight[cls],
                             s.perf / static_cast<double>(s.count)});
        }
        return A2AMultigraph(std::move(nodes_), std::move(edges));
    }

private:
    struct Sums {
        std::size_t count = 0;
        double weight = 0.0;
        double perf = 0.0;
    };
    static constexpr std::uint64_t kDenseLimit = 1 << 16;

    std::map<Activity, std::size_t> nodes_;
    std::map<ObjectClass, std::uint32_t> class_code_;
    std::vector<const Activity*> activities_;
    std::vector<const ObjectClass*> classes_;
    std::vector<std::uint32_t> event_activity_;
    std::vector<std::uint64_t> object_class_;
    std::uint64_t n_act_ = 0;
    std::vector<Sums> dense_;
    std::unordered_map<std::uint64_t, Sums> sparse_;
};

} // namespace

A2AMultigraph build_a2a(const DbEventLog& log, const E2EMultigraph& e2e) {
    const auto events = log.events();
    A2AGrouping grouping(log);

    // Edges arrive grouped by object; resolve each object once and match
    // endpoints against its related events before falling back to lookups.
    std::optional<std::size_t> object_pos;
    const ObjectId* current = nullptr;
    for (const auto& f : e2e.edges()) {
        if (!current || f.object != *current) {
            current = &f.object;
            object_pos = log.object_position(f.object);
            if (!object_pos) throw Error(ErrorCode::DanglingRef, "E2E edge does not belong to this log");
        }
        auto related = log.events_of(*object_pos);
        std::optional<std::size_t> in;
        std::optional<std::size_t> out;
        if (f.index >= 2 && f.index <= related.size() && events[related[f.index - 2]].id == f.source &&
            events[related[f.index - 1]].id == f.target) {
            in = related[f.index - 2];
            out = related[f.index - 1];
        } else {
            in = log.event_position(f.source);
            out = log.event_position(f.target);
        }
        if (!in || !out) throw Error(ErrorCode::DanglingRef, "E2E edge does not belong to this log");
        grouping.add(*object_pos, *in, *out, f.weight, f.perf);
    }
    return std::move(grouping).finish();
}

A2AMultigraph build_a2a(const DbEventLog& log) {
    const auto events = log.events();
    std::vector<Timestamp> time(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) time[i] = events[i].timestamp;

    A2AGrouping grouping(log);
    for (std::size_t o = 0; o < log.objects().size(); ++o) {
        auto related = log.events_of(o);
        if (related.size() < 2) continue;
        double weight = 1.0 / static_cast<double>(related.size() + 1);
        for (std::size_t i = 1; i < related.size(); ++i) {
            grouping.add(o, related[i - 1], related[i], weight,
                         static_cast<double>(time[related[i]] - time[related[i - 1]]));
        }
    }
    return std::move(grouping).finish();
}

std::vector<const E2EEdge*> contributing_edges(const DbEventLog& log, const E2EMultigraph& e2e,
                                               const A2AEdgeKey& key) {
    std::vector<const E2EEdge*> out;
    for (const auto& f : e2e.edges()) {
        auto o = log.object_position(f.object);
        auto in = log.event_position(f.source);
        auto target = log.event_position(f.target);
        if (o && in && target && log.objects()[*o].object_class == key.object_class &&
            log.events()[*in].activity == key.source &&
            log.events()[*target].activity == key.target) {
            out.push_back(&f);
        }
    }
    return out;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ModelSnapshot::ModelSnapshot(DbEventLog log) {
    auto data = std::make_shared<Data>();
    data->id = "s" + content_hash(write_jsonl(log));
    data->e2o = build_e2o(log);
    data->e2e = build_e2e(log);
    data->a2a = build_a2a(log);
    data->log = std::move(log);
    data_ = std::move(data);
}

E2EMultigraph e2e_neighborhood(const ModelSnapshot& snapshot, const EventId& event,
                               std::size_t radius) {
    if (!snapshot.log().event_position(event)) {
        throw Error(ErrorCode::NotFound, "unknown event '" + event.str() + "'");
    }
    // Undirected incidence lists over edge indices.
    const auto& edges = snapshot.e2e().edges();
    std::unordered_map<EventId, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        incident[edges[i].source].push_back(i);
        incident[edges[i].target].push_back(i);
    }

    std::unordered_map<EventId, std::size_t> distance{{event, 0}};
    std::deque<EventId> frontier{event};
    std::vector<bool> keep(edges.size(), false);
    while (!frontier.empty()) {
        auto current = frontier.front();
        frontier.pop_front();
        auto d = distance.at(current);
        if (d >= radius) {
            continue;
        }
        for (auto i : incident[current]) {
            keep[i] = true;
            const auto& other = edges[i].source == current ? edges[i].target : edges[i].source;
            if (distance.emplace(other, d + 1).second) {
                frontier.push_back(other);
            }
        }
    }

    std::vector<E2EEdge> kept;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (keep[i]) {
            kept.push_back(edges[i]);
        }
    }
    return E2EMultigraph(std::move(kept));
}

} // namespace starstar
