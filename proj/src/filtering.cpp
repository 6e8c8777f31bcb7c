#include "starstar/filtering.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace starstar {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorCode::InvalidArgument, message);
}

std::size_t count_param(const json& doc) {
    auto it = doc.find("n");
    if (it == doc.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
        invalid("'n' must be a non-negative integer");
    }
    return it->get<std::size_t>();
}

std::string text_param(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
        invalid(std::string("edge key needs a non-empty string '") + key + "'");
    }
    return it->get<std::string>();
}

} // namespace

FilterSpec filter_spec_from_json(const json& doc) {
    if (!doc.is_object()) {
        invalid("filter spec must be a JSON object");
    }
    auto kind_it = doc.find("kind");
    if (kind_it == doc.end() || !kind_it->is_string()) {
        invalid("filter spec needs a string 'kind'");
    }
    const auto& kind = kind_it->get_ref<const std::string&>();
    if (kind == "minActivityCount") {
        return MinActivityCount{count_param(doc)};
    }
    if (kind == "minPathCount") {
        return MinPathCount{count_param(doc)};
    }
    if (kind == "weightThreshold") {
        auto it = doc.find("tau");
        if (it == doc.end() || !it->is_number()) {
            invalid("'tau' must be a number");
        }
        double tau = it->get<double>();
        if (!(tau >= 0.0 && tau <= 1.0)) {
            invalid("'tau' must lie in [0, 1]");
        }
        return WeightThreshold{tau};
    }
    if (kind == "edgeDrill") {
        auto it = doc.find("edges");
        if (it == doc.end() || !it->is_array() || it->empty()) {
            invalid("'edges' must be a non-empty array");
        }
        EdgeDrill drill;
        for (const auto& e : *it) {
            if (!e.is_object()) {
                invalid("edge keys must be objects");
            }
            drill.edges.push_back({ObjectClass(text_param(e, "class")),
                                   Activity(text_param(e, "source")),
                                   Activity(text_param(e, "target"))});
        }
        return drill;
    }
    invalid("unknown filter kind '" + kind + "'");
}

ordered_json to_json(const FilterSpec& spec) {
    ordered_json doc;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, MinActivityCount>) {
                doc["kind"] = "minActivityCount";
                doc["n"] = f.n;
            } else if constexpr (std::is_same_v<T, MinPathCount>) {
                doc["kind"] = "minPathCount";
                doc["n"] = f.n;
            } else if constexpr (std::is_same_v<T, WeightThreshold>) {
                doc["kind"] = "weightThreshold";
                doc["tau"] = f.tau;
            } else {
                doc["kind"] = "edgeDrill";
                auto& edges = doc["edges"] = ordered_json::array();
                for (const auto& k : f.edges) {
                    edges.push_back({{"class", k.object_class.str()},
                                     {"source", k.source.str()},
                                     {"target", k.target.str()}});
                }
            }
        },
        spec);
    return doc;
}

A2AMultigraph apply_view(const A2AMultigraph& a2a, const ViewSettings& settings) {
    std::map<Activity, std::size_t> nodes;
    for (const auto& [activity, count] : a2a.nodes()) {
        if (count >= settings.min_activity_count) {
            nodes.emplace(activity, count);
        }
    }
    std::vector<A2AEdge> edges;
    for (const auto& e : a2a.edges()) {
        if (e.count >= settings.min_path_count && e.weight_norm >= settings.weight_threshold &&
            nodes.contains(e.key.source) && nodes.contains(e.key.target)) {
            edges.push_back(e);
        }
    }
    return A2AMultigraph(std::move(nodes), std::move(edges));
}

A2AMultigraph apply_view_filter(const A2AMultigraph& a2a, const ViewFilter& filter) {
    ViewSettings settings{0, 0, 0.0};
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, MinActivityCount>) {
                settings.min_activity_count = f.n;
            } else if constexpr (std::is_same_v<T, MinPathCount>) {
                settings.min_path_count = f.n;
            } else {
                settings.weight_threshold = f.tau;
            }
        },
        filter);
    return apply_view(a2a, settings);
}

ModelSnapshot edge_drill_filter(const ModelSnapshot& snapshot,
                                const std::vector<A2AEdgeKey>& selected) {
    if (selected.empty()) {
        invalid("edge drill filter needs at least one edge");
    }
    for (const auto& key : selected) {
        if (snapshot.a2a().find(key) == nullptr) {
            throw Error(ErrorCode::NotFound, "no edge (" + key.object_class.str() + ", " +
                                                 key.source.str() + " -> " + key.target.str() +
                                                 ") in snapshot " + snapshot.id());
        }
    }
    std::set<std::pair<ObjectClass, Activity>> wanted;
    for (const auto& key : selected) {
        wanted.emplace(key.object_class, key.source);
    }

    const auto& log = snapshot.log();
    const auto events = log.events();
    const auto objects = log.objects();

    std::vector<bool> in_set(objects.size(), false);
    for (std::size_t o = 0; o < objects.size(); ++o) {
        for (auto e : log.events_of(o)) {
            if (wanted.contains({objects[o].object_class, events[e].activity})) {
                in_set[o] = true;
                break;
            }
        }
    }

    std::vector<bool> keep_event(events.size(), false);
    for (std::size_t o = 0; o < objects.size(); ++o) {
        if (in_set[o]) {
            for (auto e : log.events_of(o)) {
                keep_event[e] = true;
            }
        }
    }

    LogData data;
    std::vector<bool> keep_object(objects.size(), false);
    for (std::size_t e = 0; e < events.size(); ++e) {
        if (!keep_event[e]) {
            continue;
        }
        const auto& ev = events[e];
        data.events.push_back({ev.id, ev.activity, ev.timestamp, ev.attributes});
        for (auto o : log.objects_of(e)) {
            data.eo.push_back({ev.id, objects[o].id});
            keep_object[o] = true;
        }
    }
    for (std::size_t o = 0; o < objects.size(); ++o) {
        if (keep_object[o]) {
            data.objects.push_back(objects[o]);
        }
    }
    return ModelSnapshot(DbEventLog(std::move(data)));
}

void CheckpointStore::save(const std::string& name, const ModelSnapshot& snapshot) {
    if (name.empty()) {
        invalid("checkpoint name must not be empty");
    }
    checkpoints_.insert_or_assign(name, snapshot);
}

ModelSnapshot CheckpointStore::reset(const std::string& name) const {
    auto it = checkpoints_.find(name);
    if (it == checkpoints_.end()) {
        throw Error(ErrorCode::NotFound, "no checkpoint named '" + name + "'");
    }
    return it->second;
}

bool CheckpointStore::contains(const std::string& name) const {
    return checkpoints_.contains(name);
}

std::vector<std::string> CheckpointStore::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : checkpoints_) {
        out.push_back(name);
    }
    return out;
}

} // namespace starstar
