#include "starstar/export.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace starstar {

using ordered_json = nlohmann::ordered_json;

std::optional<Metric> metric_from_name(std::string_view name) {
    if (name == "count") return Metric::Count;
    if (name == "weight") return Metric::Weight;
    if (name == "perf" || name == "performance") return Metric::Perf;
    return std::nullopt;
}

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
    case Metric::Count: return "count";
    case Metric::Weight: return "weight";
    case Metric::Perf: return "perf";
    }
    return "count";
}

double metric_value(const A2AEdge& edge, Metric metric) noexcept {
    switch (metric) {
    case Metric::Count: return static_cast<double>(edge.count);
    case Metric::Weight: return edge.weight;
    case Metric::Perf: return edge.perf;
    }
    return 0.0;
}

ordered_json a2a_to_json(const A2AMultigraph& a2a) {
    ordered_json doc;
    auto& nodes = doc["nodes"] = ordered_json::array();
    for (const auto& [activity, count] : a2a.nodes()) {
        ordered_json n;
        n["activity"] = activity.str();
        n["count"] = count;
        nodes.push_back(std::move(n));
    }
    auto& edges = doc["edges"] = ordered_json::array();
    for (const auto& e : a2a.edges()) {
        ordered_json j;
        j["class"] = e.key.object_class.str();
        j["source"] = e.key.source.str();
        j["target"] = e.key.target.str();
        j["count"] = e.count;
        j["weight"] = e.weight;
        j["weightNorm"] = e.weight_norm;
        j["perf"] = e.perf;
        edges.push_back(std::move(j));
    }
    return doc;
}

ordered_json e2e_to_json(const E2EMultigraph& e2e) {
    ordered_json doc;
    auto& edges = doc["edges"] = ordered_json::array();
    for (const auto& f : e2e.edges()) {
        ordered_json j;
        j["object"] = f.object.str();
        j["index"] = f.index;
        j["source"] = f.source.str();
        j["target"] = f.target.str();
        j["weight"] = f.weight;
        j["perf"] = f.perf;
        edges.push_back(std::move(j));
    }
    return doc;
}

namespace {

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c == '\n' ? ' ' : c;
    }
    out += '"';
    return out;
}

std::string format_value(double v, Metric metric) {
    if (metric == Metric::Count) {
        return fmt::format("{}", static_cast<long long>(v));
    }
    return fmt::format("{:.2f}", v);
}

} // namespace

std::string a2a_to_dot(const A2AMultigraph& a2a, Metric metric) {
    std::size_t max_count = 0;
    for (const auto& [_, count] : a2a.nodes()) {
        max_count = std::max(max_count, count);
    }
    double max_value = 0.0;
    for (const auto& e : a2a.edges()) {
        max_value = std::max(max_value, metric_value(e, metric));
    }

    std::string out = "digraph a2a {\n  rankdir=TB;\n  node [shape=box, style=\"rounded,filled\"];\n";
    for (const auto& [activity, count] : a2a.nodes()) {
        double share = max_count == 0 ? 0.0 : static_cast<double>(count) / max_count;
        int gray = 90 - static_cast<int>(share * 60.0);
        out += fmt::format("  {} [label={}, fillcolor=\"gray{}\", fontcolor=\"{}\"];\n",
                           dot_quote(activity.str()),
                           dot_quote(fmt::format("{} ({})", activity.str(), count)), gray,
                           gray < 55 ? "white" : "black");
    }
    for (const auto& e : a2a.edges()) {
        double value = metric_value(e, metric);
        double width = 1.0 + (max_value > 0.0 ? 4.0 * value / max_value : 0.0);
        out += fmt::format("  {} -> {} [label={}, penwidth={:.2f}];\n", dot_quote(e.key.source.str()),
                           dot_quote(e.key.target.str()),
                           dot_quote(fmt::format("{} ({})", e.key.object_class.str(),
                                              format_value(value, metric))),
                           width);
    }
    out += "}\n";
    return out;
}

} // namespace starstar
