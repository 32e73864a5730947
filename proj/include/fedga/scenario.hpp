#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedga/model.hpp"
#include "fedga/rng.hpp"

namespace fedga {

// Raised for invalid or unknown configuration values; the message names the
// offending key and the accepted range.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioConfig {
    int worker_count = 5;
    double low_end_fraction = 0.2;
    std::array<double, 2> distance_range_m{10.0, 500.0};
    std::array<int, 2> samples_range{800, 1200};
    double deadline_s = 13.0;
    ChannelParams channel{};
    ModelProfile profile{};
    double local_target = 0.5;    // per-worker training target (eta)
    double global_target = 0.04;  // process-level target (epsilon_0)
    std::uint64_t seed = 42;

    void validate() const {
        if (worker_count < 1 || worker_count > 40)
            throw ConfigError("scenario.workers: expected 1..40, got " +
                              std::to_string(worker_count));
        if (!(low_end_fraction >= 0.0 && low_end_fraction <= 1.0))
            throw ConfigError("scenario.low_end_fraction: expected 0..1, got " +
                              std::to_string(low_end_fraction));
        if (!(distance_range_m[0] <= distance_range_m[1]) || distance_range_m[0] < 10.0 ||
            distance_range_m[1] > 500.0)
            throw ConfigError("scenario.distance_range: expected a non-empty subrange of "
                              "[10, 500] meters");
        if (samples_range[0] > samples_range[1] || samples_range[0] < 800 ||
            samples_range[1] > 1200)
            throw ConfigError("scenario.samples_range: expected a non-empty subrange of "
                              "[800, 1200]");
        if (!(deadline_s > 0.0))
            throw ConfigError("scenario.deadline_s: expected > 0, got " +
                              std::to_string(deadline_s));
        if (!(channel.bandwidth_hz > 0.0))
            throw ConfigError("scenario.bandwidth_hz: expected > 0");
        if (!(channel.noise_density_w_hz > 0.0))
            throw ConfigError("scenario.noise_density: expected > 0 W/Hz");
        if (!(profile.size_bits > 0.0))
            throw ConfigError("scenario.model_size_bits: expected > 0");
        if (!(profile.flops_per_sample > 0.0))
            throw ConfigError("scenario.model_flops_per_sample: expected > 0");
        if (!(local_target > 0.0))
            throw ConfigError("scenario.local_target: expected > 0");
        if (!(global_target > 0.0))
            throw ConfigError("scenario.global_target: expected > 0");
    }
};

// Immutable network instance: workers plus precomputed channel gains. Safe to
// share across threads.
struct Scenario {
    std::vector<WorkerSpec> workers;
    ChannelParams channel{};
    ModelProfile profile{};
    double deadline_s = 13.0;
    std::vector<double> gains;
    double local_target = 0.5;
    double global_target = 0.04;

    int size() const { return static_cast<int>(workers.size()); }
};

// Deterministic scenario generation: floor(fraction * K) low-end workers
// placed by a seeded shuffle, then per worker a uniform distance, integer
// sample count and heterogeneity score. Same config => byte-identical result.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Rng rng(substream(cfg.seed, "scenario"));

    const int k = cfg.worker_count;
    const int low_end = static_cast<int>(std::floor(cfg.low_end_fraction * k));
    std::vector<WorkerClass> classes(static_cast<std::size_t>(k), WorkerClass::HighEnd);
    for (int i = 0; i < low_end; ++i) classes[static_cast<std::size_t>(i)] = WorkerClass::LowEnd;
    shuffle(classes, rng);

    Scenario sc;
    sc.channel = cfg.channel;
    sc.profile = cfg.profile;
    sc.deadline_s = cfg.deadline_s;
    sc.local_target = cfg.local_target;
    sc.global_target = cfg.global_target;
    sc.workers.reserve(static_cast<std::size_t>(k));
    sc.gains.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double distance = rng.uniform(cfg.distance_range_m[0], cfg.distance_range_m[1]);
        const int samples =
            static_cast<int>(rng.uniform_int(cfg.samples_range[0], cfg.samples_range[1]));
        const double heterogeneity = rng.uniform();
        sc.workers.push_back(classes[static_cast<std::size_t>(i)] == WorkerClass::LowEnd
                                 ? WorkerSpec::low_end(i, distance, samples, heterogeneity)
                                 : WorkerSpec::high_end(i, distance, samples, heterogeneity));
        sc.gains.push_back(channel_gain(distance, sc.channel));
    }
    return sc;
}

}  // namespace fedga
