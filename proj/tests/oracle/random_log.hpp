#pragma once

#include "starstar/model.hpp"

#include <random>
#include <string>

namespace oracle {

struct RandomLogShape {
    std::size_t max_events = 30;
    std::size_t max_objects = 10;
    std::size_t max_classes = 3;
    std::size_t activities = 4;
    // Small time range so that equal timestamps are common.
    long long time_range = 20;
    double link_probability = 0.25;
    // Every event relates to exactly one object.
    bool single_object_per_event = false;
};

inline starstar::LogData random_log(std::mt19937_64& rng, const RandomLogShape& shape = {}) {
    using namespace starstar;
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::bernoulli_distribution link(shape.link_probability);

    std::size_t n_events = uniform(0, shape.max_events);
    std::size_t n_objects = uniform(1, shape.max_objects);
    std::size_t n_classes = uniform(1, shape.max_classes);

    LogData data;
    for (std::size_t i = 0; i < n_events; ++i) {
        data.events.push_back({EventId("e" + std::to_string(i)),
                               Activity(std::string(1, static_cast<char>('A' + uniform(0, shape.activities - 1)))),
                               static_cast<Timestamp>(uniform(0, shape.time_range)),
                               {}});
    }
    for (std::size_t i = 0; i < n_objects; ++i) {
        data.objects.push_back({ObjectId("o" + std::to_string(i)),
                                ObjectClass("c" + std::to_string(uniform(0, n_classes - 1)))});
    }
    for (const auto& e : data.events) {
        if (shape.single_object_per_event) {
            data.eo.push_back({e.id, data.objects[uniform(0, n_objects - 1)].id});
            continue;
        }
        for (const auto& o : data.objects) {
            if (link(rng)) {
                data.eo.push_back({e.id, o.id});
            }
        }
    }
    return data;
}

} // namespace oracle
