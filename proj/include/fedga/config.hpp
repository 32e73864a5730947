#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fedga/ga.hpp"
#include "fedga/scenario.hpp"

namespace fedga {

// Experiment configuration file handling. JSON with two sections plus a master
// seed; every key optional, missing keys take the defaults baked into the
// types. dBm/dB values are converted to SI here and nowhere else.

struct ExperimentConfig {
    ScenarioConfig scenario{};
    GAConfig ga{};
    bool ga_explicit = false;  // ga section present; otherwise sized from worker count
    std::uint64_t seed = 42;

    void resolve() {
        if (!ga_explicit) {
            const GAConfig sized = GAConfig::defaults_for(scenario.worker_count);
            GAConfig cfg = ga;  // keep any explicitly-set fields? ga defaults only
            cfg.population_size = sized.population_size;
            cfg.elites = sized.elites;
            cfg.mutation_rate = sized.mutation_rate;
            cfg.memory_size = sized.memory_size;
            cfg.trigger_threshold = sized.trigger_threshold;
            ga = cfg;
        }
        scenario.seed = seed;
        ga.seed = seed;
        scenario.validate();
        ga.validate();
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

// Accepts a plain number (already in the SI unit) or a string with a unit
// suffix: "28 dBm", "0.63 W", "-158 dBm/Hz", "1.6e-19 W/Hz".
inline double parse_power(const nlohmann::json& value, const std::string& key) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string())
        throw ConfigError(key + ": expected a number in Watts or a string like \"28 dBm\"");
    std::string text = trim(value.get<std::string>());
    double magnitude = 0.0;
    std::size_t consumed = 0;
    try {
        magnitude = std::stod(text, &consumed);
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse \"" + text + "\"");
    }
    const std::string unit = trim(text.substr(consumed));
    if (unit == "dBm" || unit == "dBm/Hz") return dbm_to_watts(magnitude);
    if (unit == "W" || unit == "W/Hz" || unit.empty()) return magnitude;
    throw ConfigError(key + ": unknown unit \"" + unit + "\" (expected dBm, dBm/Hz, W or W/Hz)");
}

inline void reject_unknown_keys(const nlohmann::json& section, const std::string& prefix,
                                std::initializer_list<std::string_view> known) {
    for (const auto& [key, _] : section.items()) {
        bool found = false;
        for (const auto k : known)
            if (key == k) { found = true; break; }
        if (!found) throw ConfigError(prefix + key + ": unknown configuration key");
    }
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("configuration root must be a JSON object");
    detail::reject_unknown_keys(root, "", {"scenario", "ga", "seed"});

    ExperimentConfig cfg;
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
            throw ConfigError("seed: expected an unsigned 64-bit integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }

    if (root.contains("scenario")) {
        const auto& s = root["scenario"];
        if (!s.is_object()) throw ConfigError("scenario: expected an object");
        detail::reject_unknown_keys(
            s, "scenario.",
            {"workers", "low_end_fraction", "distance_range", "samples_range", "deadline_s",
             "bandwidth_hz", "noise_density", "pathloss_intercept_db", "pathloss_slope_db",
             "model_size_bits", "model_flops_per_sample", "local_target", "global_target"});
        ScenarioConfig& sc = cfg.scenario;
        if (s.contains("workers")) sc.worker_count = s["workers"].get<int>();
        if (s.contains("low_end_fraction")) sc.low_end_fraction = s["low_end_fraction"].get<double>();
        if (s.contains("distance_range")) {
            const auto& r = s["distance_range"];
            if (!r.is_array() || r.size() != 2)
                throw ConfigError("scenario.distance_range: expected [min, max] in meters");
            sc.distance_range_m = {r[0].get<double>(), r[1].get<double>()};
        }
        if (s.contains("samples_range")) {
            const auto& r = s["samples_range"];
            if (!r.is_array() || r.size() != 2)
                throw ConfigError("scenario.samples_range: expected [min, max] sample counts");
            sc.samples_range = {r[0].get<int>(), r[1].get<int>()};
        }
        if (s.contains("deadline_s")) sc.deadline_s = s["deadline_s"].get<double>();
        if (s.contains("bandwidth_hz")) sc.channel.bandwidth_hz = s["bandwidth_hz"].get<double>();
        if (s.contains("noise_density"))
            sc.channel.noise_density_w_hz =
                detail::parse_power(s["noise_density"], "scenario.noise_density");
        if (s.contains("pathloss_intercept_db"))
            sc.channel.pathloss_intercept_db = s["pathloss_intercept_db"].get<double>();
        if (s.contains("pathloss_slope_db"))
            sc.channel.pathloss_slope_db = s["pathloss_slope_db"].get<double>();
        if (s.contains("model_size_bits")) sc.profile.size_bits = s["model_size_bits"].get<double>();
        if (s.contains("model_flops_per_sample"))
            sc.profile.flops_per_sample = s["model_flops_per_sample"].get<double>();
        if (s.contains("local_target")) sc.local_target = s["local_target"].get<double>();
        if (s.contains("global_target")) sc.global_target = s["global_target"].get<double>();
    }

    cfg.ga = GAConfig::defaults_for(cfg.scenario.worker_count);
    if (root.contains("ga")) {
        const auto& g = root["ga"];
        if (!g.is_object()) throw ConfigError("ga: expected an object");
        detail::reject_unknown_keys(
            g, "ga.",
            {"population", "elites", "crossover_rate", "mutation_rate", "max_generations",
             "early_stop_patience", "hypermutation_factor", "hypermutation_duration",
             "memory_size", "trigger_threshold", "drop_probability", "penalty_mu1",
             "penalty_mu2"});
        cfg.ga_explicit = true;
        GAConfig& ga = cfg.ga;
        if (g.contains("population")) ga.population_size = g["population"].get<int>();
        if (g.contains("elites")) ga.elites = g["elites"].get<int>();
        if (g.contains("crossover_rate")) ga.crossover_rate = g["crossover_rate"].get<double>();
        if (g.contains("mutation_rate")) ga.mutation_rate = g["mutation_rate"].get<double>();
        if (g.contains("max_generations")) ga.max_generations = g["max_generations"].get<int>();
        if (g.contains("early_stop_patience"))
            ga.early_stop_patience = g["early_stop_patience"].get<int>();
        if (g.contains("hypermutation_factor"))
            ga.hypermutation_factor = g["hypermutation_factor"].get<double>();
        if (g.contains("hypermutation_duration"))
            ga.hypermutation_duration = g["hypermutation_duration"].get<int>();
        if (g.contains("memory_size")) ga.memory_size = g["memory_size"].get<int>();
        if (g.contains("trigger_threshold"))
            ga.trigger_threshold = g["trigger_threshold"].get<double>();
        if (g.contains("drop_probability"))
            ga.drop_probability = g["drop_probability"].get<double>();
        if (g.contains("penalty_mu1")) ga.penalty.deadline_weight = g["penalty_mu1"].get<double>();
        if (g.contains("penalty_mu2")) ga.penalty.idle_weight = g["penalty_mu2"].get<double>();
    }

    cfg.resolve();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

// Canonical JSON rendering of a configuration; used for the config hash in
// run metadata.
inline std::string canonical_config(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["scenario"] = {
        {"workers", cfg.scenario.worker_count},
        {"low_end_fraction", cfg.scenario.low_end_fraction},
        {"distance_range", {cfg.scenario.distance_range_m[0], cfg.scenario.distance_range_m[1]}},
        {"samples_range", {cfg.scenario.samples_range[0], cfg.scenario.samples_range[1]}},
        {"deadline_s", cfg.scenario.deadline_s},
        {"bandwidth_hz", cfg.scenario.channel.bandwidth_hz},
        {"noise_density", cfg.scenario.channel.noise_density_w_hz},
        {"pathloss_intercept_db", cfg.scenario.channel.pathloss_intercept_db},
        {"pathloss_slope_db", cfg.scenario.channel.pathloss_slope_db},
        {"model_size_bits", cfg.scenario.profile.size_bits},
        {"model_flops_per_sample", cfg.scenario.profile.flops_per_sample},
        {"local_target", cfg.scenario.local_target},
        {"global_target", cfg.scenario.global_target},
    };
    j["ga"] = {
        {"population", cfg.ga.population_size},
        {"elites", cfg.ga.elites},
        {"crossover_rate", cfg.ga.crossover_rate},
        {"mutation_rate", cfg.ga.mutation_rate},
        {"max_generations", cfg.ga.max_generations},
        {"early_stop_patience", cfg.ga.early_stop_patience},
        {"hypermutation_factor", cfg.ga.hypermutation_factor},
        {"hypermutation_duration", cfg.ga.hypermutation_duration},
        {"memory_size", cfg.ga.memory_size},
        {"trigger_threshold", cfg.ga.trigger_threshold},
        {"drop_probability", cfg.ga.drop_probability},
        {"penalty_mu1", cfg.ga.penalty.deadline_weight},
        {"penalty_mu2", cfg.ga.penalty.idle_weight},
    };
    return j.dump();
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : canonical_config(cfg)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace fedga
