#include "starstar/bench.hpp"
#include "starstar/graphs.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <random>
#include <string>

namespace starstar {

DbEventLog synthetic_log(std::size_t eo_pairs, std::size_t degree, std::uint64_t seed) {
    degree = std::max<std::size_t>(degree, 1);
    const std::size_t n_objects = std::max<std::size_t>(eo_pairs / degree, 1);
    const std::size_t n_events = std::max<std::size_t>(eo_pairs / 2, degree);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_event(0, n_events - 1);
    std::uniform_int_distribution<int> pick_activity(0, 11);
    std::uniform_int_distribution<Timestamp> pick_time(0, 10'000'000);

    LogData data;
    data.events.reserve(n_events);
    for (std::size_t e = 0; e < n_events; ++e) {
        data.events.push_back({EventId("e" + std::to_string(e)),
                               Activity("act" + std::to_string(pick_activity(rng))),
                               pick_time(rng), {}});
    }
    data.objects.reserve(n_objects);
    data.eo.reserve(n_objects * degree);
    std::vector<std::size_t> chosen;
    for (std::size_t o = 0; o < n_objects; ++o) {
        ObjectId id("o" + std::to_string(o));
        data.objects.push_back({id, ObjectClass("class" + std::to_string(o % 3))});
        chosen.clear();
        while (chosen.size() < degree) {
            auto e = pick_event(rng);
            if (std::find(chosen.begin(), chosen.end(), e) == chosen.end()) {
                chosen.push_back(e);
            }
        }
        for (auto e : chosen) {
            data.eo.push_back({data.events[e].id, id});
        }
    }
    return DbEventLog(std::move(data));
}

BenchResult run_bench(const BenchConfig& config) {
    using clock = std::chrono::steady_clock;
    auto started = clock::now();
    BenchResult result;

    std::vector<DbEventLog> logs;
    for (auto size : config.sizes) {
        logs.push_back(synthetic_log(size, config.degree, config.seed));
        const auto& log = logs.back();
        result.rows.push_back({log.eo().size(), log.events().size(), log.objects().size(),
                               std::numeric_limits<double>::infinity()});
    }

    // Sizes take turns so that drift in machine state hits all of them alike.
    const double budget = config.min_seconds * static_cast<double>(logs.size());
    for (std::size_t round = 0;
         round < std::max<std::size_t>(config.repeats, 1) ||
         std::chrono::duration<double>(clock::now() - started).count() < budget;
         ++round) {
        for (std::size_t i = 0; i < logs.size(); ++i) {
            auto t0 = clock::now();
            [[maybe_unused]] auto e2o = build_e2o(logs[i]);
            [[maybe_unused]] auto e2e = build_e2e(logs[i]);
            [[maybe_unused]] auto a2a = build_a2a(logs[i]);
            auto t1 = clock::now();
            auto& best = result.rows[i].seconds;
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        }
    }

    result.within_bound = true;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        double ratio = result.rows[i].seconds / result.rows[i - 1].seconds;
        result.ratios.push_back(ratio);
        result.within_bound = result.within_bound && ratio <= config.max_ratio;
    }
    result.total_seconds = std::chrono::duration<double>(clock::now() - started).count();
    return result;
}

} // namespace starstar
