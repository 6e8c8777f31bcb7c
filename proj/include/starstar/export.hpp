#pragma once
// Serialised views of the graphs: A2A as JSON or Graphviz DOT, E2E as JSON.

#include "starstar/graphs.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace starstar {

enum class Metric { Count, Weight, Perf };

std::optional<Metric> metric_from_name(std::string_view name);
std::string_view to_string(Metric metric) noexcept;
double metric_value(const A2AEdge& edge, Metric metric) noexcept;

// {"nodes":[{"activity","count"}],"edges":[{"class","source","target","count",
// "weight","weightNorm","perf"}]} with keys in exactly that order and edges
// sorted by (class, source, target).
nlohmann::ordered_json a2a_to_json(const A2AMultigraph& a2a);

// {"edges":[{"object","index","source","target","weight","perf"}]}
nlohmann::ordered_json e2e_to_json(const E2EMultigraph& e2e);

// One DOT edge per A2A edge labelled "<class> (<value>)"; pen width grows
// with the chosen metric, node fill darkens with activity count.
std::string a2a_to_dot(const A2AMultigraph& a2a, Metric metric);

} // namespace starstar
