#pragma once
// Scaling harness: builds the graphs for synthetic logs of growing size and
// reports how build time grows when the number of event-object pairs doubles.

#include "starstar/model.hpp"

#include <cstdint>
#include <vector>

namespace starstar {

struct BenchConfig {
    std::vector<std::size_t> sizes{10'000, 20'000, 40'000}; // event-object pairs
    std::size_t degree = 8;                                  // events per object
    std::size_t repeats = 7;                                 // at least this many
    double min_seconds = 0.3;                                // and this long per size
    std::uint64_t seed = 42;
    double max_ratio = 2.5;
};

struct BenchRow {
    std::size_t eo_pairs = 0;
    std::size_t events = 0;
    std::size_t objects = 0;
    double seconds = 0.0; // fastest repeat
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<double> ratios; // time(size[i+1]) / time(size[i])
    double total_seconds = 0.0;
    bool within_bound = false;
};

// Every object relates to `degree` distinct events; roughly two objects per
// event. Deterministic for a given seed.
DbEventLog synthetic_log(std::size_t eo_pairs, std::size_t degree, std::uint64_t seed);

BenchResult run_bench(const BenchConfig& config);

} // namespace starstar
