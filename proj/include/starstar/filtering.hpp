#pragma once
// Interactive filters over a model.
//
// View filters (the sliders) only thin out what is displayed and never touch
// the snapshot. The edge drill filter recomputes the whole model from the
// events of the objects behind the selected edges.

#include "starstar/graphs.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace starstar {

inline constexpr double kDefaultWeightThreshold = 0.5;

struct MinActivityCount {
    std::size_t n = 0;
};
struct MinPathCount {
    std::size_t n = 0;
};
// Keeps edges with weightNorm >= tau.
struct WeightThreshold {
    double tau = 0.0;
};
struct EdgeDrill {
    std::vector<A2AEdgeKey> edges;
};

using ViewFilter = std::variant<MinActivityCount, MinPathCount, WeightThreshold>;
using FilterSpec = std::variant<MinActivityCount, MinPathCount, WeightThreshold, EdgeDrill>;

// {"kind":"minActivityCount","n":2}, {"kind":"minPathCount","n":2},
// {"kind":"weightThreshold","tau":0.5},
// {"kind":"edgeDrill","edges":[{"class":..,"source":..,"target":..}]}
// Throws InvalidArgument on anything malformed.
FilterSpec filter_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const FilterSpec& spec);

A2AMultigraph apply_view_filter(const A2AMultigraph& a2a, const ViewFilter& filter);

// The three sliders at once. Defaults reproduce the initial view.
struct ViewSettings {
    std::size_t min_activity_count = 0;
    std::size_t min_path_count = 0;
    double weight_threshold = kDefaultWeightThreshold;
};

A2AMultigraph apply_view(const A2AMultigraph& a2a, const ViewSettings& settings);

// Objects of each selected edge's class touching an event of its source
// activity, united over the selection; keeps every event related to one of
// them. Throws NotFound for edges absent from the snapshot and
// InvalidArgument for an empty selection.
ModelSnapshot edge_drill_filter(const ModelSnapshot& snapshot,
                                const std::vector<A2AEdgeKey>& selected);

class CheckpointStore {
public:
    // Overwrites an existing checkpoint of the same name.
    void save(const std::string& name, const ModelSnapshot& snapshot);
    // Throws NotFound.
    ModelSnapshot reset(const std::string& name) const;

    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, ModelSnapshot> checkpoints_;
};

} // namespace starstar
