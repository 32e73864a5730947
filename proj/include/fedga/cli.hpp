#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedga/config.hpp"
#include "fedga/csv.hpp"
#include "fedga/fedtoy.hpp"
#include "fedga/ga.hpp"
#include "fedga/scenario.hpp"
#include "fedga/schedulers.hpp"
#include "fedga/simenv.hpp"

namespace fedga {

// Experiment harness behind the command-line tool. Each command is a plain
// function so the test suite can drive it directly; the binary only parses
// flags. Exit codes: 0 success, 1 usage/configuration error, 2 runtime error.

enum class Learner { Sim, Toy };

namespace detail {

inline const std::vector<std::string>& trace_header() {
    static const std::vector<std::string> header{
        "generation",       "best_fitness",          "mean_fitness",
        "best_total_energy_j", "best_computation_energy_j", "best_transmission_energy_j",
        "best_violations",  "hypermutation"};
    return header;
}

inline const std::vector<std::string>& comparison_header() {
    static const std::vector<std::string> header{"policy", "metric", "mean",
                                                 "std",    "reduction_vs_rss_pct",
                                                 "reduction_vs_gss_pct"};
    return header;
}

inline void write_strategy(const std::filesystem::path& path, const Scenario& sc,
                           const std::vector<ResourceAssignment>& genes,
                           const FitnessReport& report, std::uint64_t seed) {
    nlohmann::json j;
    j["workers"] = sc.size();
    j["seed"] = seed;
    j["fitness"] = report.fitness;
    j["round_energy_j"] = report.round_energy;
    j["process_energy_j"] = report.process_energy;
    j["violations"] = report.violations;
    nlohmann::json gene_array = nlohmann::json::array();
    for (const ResourceAssignment& g : genes)
        gene_array.push_back({{"frequency_hz", g.frequency_hz}, {"power_w", g.power_w}});
    j["genes"] = gene_array;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline std::vector<ResourceAssignment> read_strategy(const std::filesystem::path& path,
                                                     int expected_workers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open strategy file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
    if (!j.contains("genes") || !j["genes"].is_array())
        throw ConfigError(path.string() + ": missing \"genes\" array");
    std::vector<ResourceAssignment> genes;
    for (const auto& g : j["genes"])
        genes.push_back({g.at("frequency_hz").get<double>(), g.at("power_w").get<double>()});
    if (static_cast<int>(genes.size()) != expected_workers)
        throw ConfigError(path.string() + ": strategy has " + std::to_string(genes.size()) +
                          " genes but the scenario has " + std::to_string(expected_workers) +
                          " workers");
    return genes;
}

inline void write_meta(const std::filesystem::path& path, const ExperimentConfig& cfg,
                       int runs = 0, const std::string& learner = "") {
    nlohmann::json j;
    j["workers"] = cfg.scenario.worker_count;
    j["seed"] = cfg.seed;
    j["config_hash"] = config_hash(cfg);
    if (runs > 0) j["runs"] = runs;
    if (!learner.empty()) j["learner"] = learner;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// Shared summary shape for sim and toy online evaluation.
struct PolicyStats {
    std::string name;
    MeanStd total_energy, computation_energy, transmission_energy, round_time,
        global_iterations, violations;
    double violation_free_fraction = 0.0;
    std::vector<RunRecord> per_run;
};

inline PolicyStats stats_from_summary(const std::string& name, const OnlineSummary& s) {
    return {name,
            s.total_energy,
            s.computation_energy,
            s.transmission_energy,
            s.round_time,
            s.global_iterations,
            s.violations,
            s.violation_free_fraction,
            s.per_run};
}

// Toy-learner analogue of run_online: independent data draws per run, paired
// across policies through the run-indexed substream.
inline PolicyStats run_online_toy(const SchedulerPolicy& base_policy, const Scenario& sc,
                                  int runs, std::uint64_t seed) {
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);
    std::vector<double> total, comp, trans, rtime, iters, viols;
    std::vector<RunRecord> records;
    int violation_free = 0;
    for (int r = 0; r < runs; ++r) {
        const ToyTask task = make_toy_task(sc, substream(seed, "toy.task",
                                                         static_cast<std::uint64_t>(r)));
        SchedulerPolicy policy = base_policy;
        policy.reset();
        Rng rng(substream(seed, policy_name(policy.kind), static_cast<std::uint64_t>(r)));
        const FLProcessOutcome out = run_toy_fl(
            sc, task,
            [&](int round) { return next_assignment(policy, sc, frozen, round, rng); },
            sc.local_target, sc.global_target, sc.deadline_s);
        total.push_back(out.total_energy_j);
        comp.push_back(out.computation_energy_j);
        trans.push_back(out.transmission_energy_j);
        rtime.push_back(out.mean_round_time_s);
        iters.push_back(out.global_iterations);
        viols.push_back(out.violations);
        if (out.violations == 0) ++violation_free;
        records.push_back({r, out.total_energy_j, out.computation_energy_j,
                           out.transmission_energy_j, out.mean_round_time_s,
                           out.global_iterations, out.violations});
    }
    PolicyStats stats;
    stats.name = policy_name(base_policy.kind);
    stats.total_energy = mean_std(total);
    stats.computation_energy = mean_std(comp);
    stats.transmission_energy = mean_std(trans);
    stats.round_time = mean_std(rtime);
    stats.global_iterations = mean_std(iters);
    stats.violations = mean_std(viols);
    stats.violation_free_fraction = static_cast<double>(violation_free) / runs;
    stats.per_run = std::move(records);
    return stats;
}

inline CsvWriter runs_csv(const std::vector<PolicyStats>& stats) {
    CsvWriter csv({"policy", "run", "total_energy_j", "computation_energy_j",
                   "transmission_energy_j", "round_time_s", "global_iterations", "violations"});
    for (const PolicyStats& p : stats)
        for (const RunRecord& r : p.per_run)
            csv.add_row({p.name, std::to_string(r.run), format_double(r.total_energy_j),
                         format_double(r.computation_energy_j),
                         format_double(r.transmission_energy_j), format_double(r.round_time_s),
                         std::to_string(r.global_iterations), std::to_string(r.violations)});
    return csv;
}

inline CsvWriter comparison_csv(const std::vector<PolicyStats>& stats) {
    const PolicyStats* rss = nullptr;
    const PolicyStats* gss = nullptr;
    for (const PolicyStats& p : stats) {
        if (p.name == "RSS") rss = &p;
        if (p.name == "GSS") gss = &p;
    }
    auto reduction = [](double base, double value) {
        return base != 0.0 ? 100.0 * (base - value) / base : 0.0;
    };
    CsvWriter csv(comparison_header());
    for (const PolicyStats& p : stats) {
        const std::vector<std::pair<std::string, const MeanStd*>> metrics{
            {"total_energy_j", &p.total_energy},
            {"computation_energy_j", &p.computation_energy},
            {"transmission_energy_j", &p.transmission_energy},
            {"round_time_s", &p.round_time},
            {"global_iterations", &p.global_iterations},
            {"violations", &p.violations}};
        for (const auto& [metric, ms] : metrics) {
            std::vector<std::string> row{p.name, metric, format_double(ms->mean),
                                         format_double(ms->std)};
            const auto same_metric = [&](const PolicyStats& other) -> double {
                if (metric == "total_energy_j") return other.total_energy.mean;
                if (metric == "computation_energy_j") return other.computation_energy.mean;
                if (metric == "transmission_energy_j") return other.transmission_energy.mean;
                if (metric == "round_time_s") return other.round_time.mean;
                if (metric == "global_iterations") return other.global_iterations.mean;
                return other.violations.mean;
            };
            row.push_back(format_double(rss ? reduction(same_metric(*rss), ms->mean) : 0.0));
            row.push_back(format_double(gss ? reduction(same_metric(*gss), ms->mean) : 0.0));
            csv.add_row(std::move(row));
        }
    }
    return csv;
}

}  // namespace detail

// Offline search: writes trace.csv (one row per generation), the winning
// strategy as best_strategy.json, and run_meta.json.
inline void do_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Scenario sc = generate_scenario(cfg.scenario);
    const OfflineResult result = run_offline(sc, cfg.ga);

    CsvWriter trace(detail::trace_header());
    for (const GenerationTrace& t : result.traces)
        trace.add_row({std::to_string(t.generation), format_double(t.best_fitness),
                       format_double(t.mean_fitness), format_double(t.best_round_energy),
                       format_double(t.best_computation_energy),
                       format_double(t.best_transmission_energy),
                       std::to_string(t.best_violations),
                       t.hypermutation_active ? "1" : "0"});
    trace.save((out_dir / "trace.csv").string());
    detail::write_strategy(out_dir / "best_strategy.json", sc, result.best.genes,
                           *result.best.report, cfg.seed);
    detail::write_meta(out_dir / "run_meta.json", cfg);
}

// Online comparison of the optimized strategy against the random and greedy
// baselines over paired runs; writes comparison.csv in long form plus
// reduction columns.
inline void do_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& strategy_path,
                        int runs, Learner learner, const std::filesystem::path& out_dir) {
    if (runs < 1) throw ConfigError("runs: expected >= 1, got " + std::to_string(runs));
    std::filesystem::create_directories(out_dir);
    const Scenario sc = generate_scenario(cfg.scenario);
    const auto strategy = detail::read_strategy(strategy_path, sc.size());

    const std::vector<SchedulerPolicy> policies{SchedulerPolicy::fixed_strategy(strategy),
                                                SchedulerPolicy::random(),
                                                SchedulerPolicy::greedy()};
    std::vector<detail::PolicyStats> stats;
    for (const SchedulerPolicy& policy : policies) {
        if (learner == Learner::Sim)
            stats.push_back(detail::stats_from_summary(policy_name(policy.kind),
                                                       run_online(policy, sc, runs, cfg.seed)));
        else
            stats.push_back(detail::run_online_toy(policy, sc, runs, cfg.seed));
    }
    detail::comparison_csv(stats).save((out_dir / "comparison.csv").string());
    detail::runs_csv(stats).save((out_dir / "runs.csv").string());
    detail::write_meta(out_dir / "run_meta.json", cfg, runs,
                       learner == Learner::Sim ? "sim" : "toy");
}

// Optimize + evaluate across several network sizes; each count gets its own
// subdirectory plus one sweep_summary.csv with a per-worker energy column.
inline void do_sweep(const std::vector<int>& worker_counts, ExperimentConfig base, int runs,
                     Learner learner, const std::filesystem::path& out_dir) {
    if (worker_counts.empty()) throw ConfigError("sweep: worker count list is empty");
    std::filesystem::create_directories(out_dir);

    CsvWriter summary({"workers", "policy", "total_energy_mean", "total_energy_std",
                       "computation_energy_mean", "computation_energy_std",
                       "transmission_energy_mean", "transmission_energy_std", "round_time_mean",
                       "round_time_std", "global_iterations_mean", "global_iterations_std",
                       "violations_mean", "violations_std", "per_worker_round_energy_j",
                       "reduction_vs_rss_pct", "reduction_vs_gss_pct"});

    for (const int count : worker_counts) {
        ExperimentConfig cfg = base;
        cfg.scenario.worker_count = count;
        cfg.resolve();
        const std::filesystem::path dir = out_dir / ("K" + std::to_string(count));
        do_optimize(cfg, dir);
        do_evaluate(cfg, dir / "best_strategy.json", runs, learner, dir);

        const CsvTable comparison = read_csv((dir / "comparison.csv").string());
        const int c_policy = comparison.column("policy");
        const int c_metric = comparison.column("metric");
        const int c_mean = comparison.column("mean");
        const int c_std = comparison.column("std");
        const int c_rss = comparison.column("reduction_vs_rss_pct");
        const int c_gss = comparison.column("reduction_vs_gss_pct");
        for (const std::string policy : {"GA", "RSS", "GSS"}) {
            std::vector<std::string> row{std::to_string(count), policy};
            double total_mean = 0.0, iters_mean = 1.0, rss_red = 0.0, gss_red = 0.0;
            std::vector<std::string> tail;
            for (const std::string metric :
                 {"total_energy_j", "computation_energy_j", "transmission_energy_j",
                  "round_time_s", "global_iterations", "violations"}) {
                for (const auto& r : comparison.rows) {
                    if (r[static_cast<std::size_t>(c_policy)] != policy ||
                        r[static_cast<std::size_t>(c_metric)] != metric)
                        continue;
                    tail.push_back(r[static_cast<std::size_t>(c_mean)]);
                    tail.push_back(r[static_cast<std::size_t>(c_std)]);
                    if (metric == "total_energy_j") {
                        total_mean = std::stod(r[static_cast<std::size_t>(c_mean)]);
                        rss_red = std::stod(r[static_cast<std::size_t>(c_rss)]);
                        gss_red = std::stod(r[static_cast<std::size_t>(c_gss)]);
                    }
                    if (metric == "global_iterations")
                        iters_mean = std::stod(r[static_cast<std::size_t>(c_mean)]);
                }
            }
            for (std::string& cell : tail) row.push_back(std::move(cell));
            row.push_back(format_double(total_mean / (iters_mean * count)));
            row.push_back(format_double(rss_red));
            row.push_back(format_double(gss_red));
            summary.add_row(std::move(row));
        }
    }
    summary.save((out_dir / "sweep_summary.csv").string());
}

// Renders result directories as aligned text and emits plain
// "generation energy" pairs for plotting.
inline void do_report(const std::filesystem::path& in_dir, std::ostream& out = std::cout) {
    const std::filesystem::path trace_path = in_dir / "trace.csv";
    const std::filesystem::path comparison_path = in_dir / "comparison.csv";
    const bool has_trace = std::filesystem::exists(trace_path);
    const bool has_comparison = std::filesystem::exists(comparison_path);
    if (!has_trace && !has_comparison)
        throw ConfigError("report: " + in_dir.string() +
                          " contains neither trace.csv nor comparison.csv");

    if (has_trace) {
        const CsvTable trace = read_csv(trace_path.string());
        const int c_gen = trace.column("generation");
        const int c_energy = trace.column("best_total_energy_j");
        const int c_fitness = trace.column("best_fitness");
        const int c_violations = trace.column("best_violations");
        if (trace.rows.empty()) throw std::runtime_error(trace_path.string() + ": no data rows");

        const double first_energy = std::stod(trace.rows.front()[static_cast<std::size_t>(c_energy)]);
        const double final_energy = std::stod(trace.rows.back()[static_cast<std::size_t>(c_energy)]);
        const double reduction =
            first_energy != 0.0 ? 100.0 * (first_energy - final_energy) / first_energy : 0.0;
        char line[160];
        out << "offline search (" << trace.rows.size() << " generations)\n";
        std::snprintf(line, sizeof(line), "  generation 0 best energy : %.6g J\n", first_energy);
        out << line;
        std::snprintf(line, sizeof(line), "  final best energy        : %.6g J\n", final_energy);
        out << line;
        std::snprintf(line, sizeof(line), "  energy reduction         : %.1f%%\n", reduction);
        out << line;
        std::snprintf(line, sizeof(line), "  final best fitness       : %.6g\n",
                      std::stod(trace.rows.back()[static_cast<std::size_t>(c_fitness)]));
        out << line;
        std::snprintf(line, sizeof(line), "  final best violations    : %s\n",
                      trace.rows.back()[static_cast<std::size_t>(c_violations)].c_str());
        out << line;

        std::ofstream chart(in_dir / "trace_energy.dat", std::ios::binary);
        if (!chart) throw std::runtime_error("cannot write trace_energy.dat");
        for (const auto& row : trace.rows)
            chart << row[static_cast<std::size_t>(c_gen)] << ' '
                  << row[static_cast<std::size_t>(c_energy)] << '\n';
    }

    if (has_comparison) {
        const CsvTable cmp = read_csv(comparison_path.string());
        const int c_policy = cmp.column("policy");
        const int c_metric = cmp.column("metric");
        const int c_mean = cmp.column("mean");
        const int c_std = cmp.column("std");
        out << "scheduler comparison (mean +/- std)\n";
        char line[200];
        std::snprintf(line, sizeof(line), "  %-26s %16s %16s %16s\n", "metric", "GA", "RSS", "GSS");
        out << line;
        for (const std::string metric :
             {"total_energy_j", "computation_energy_j", "transmission_energy_j", "round_time_s",
              "global_iterations", "violations"}) {
            std::string cells[3];
            for (const auto& row : cmp.rows) {
                if (row[static_cast<std::size_t>(c_metric)] != metric) continue;
                const std::string& policy = row[static_cast<std::size_t>(c_policy)];
                char cell[64];
                std::snprintf(cell, sizeof(cell), "%.4g (%.3g)",
                              std::stod(row[static_cast<std::size_t>(c_mean)]),
                              std::stod(row[static_cast<std::size_t>(c_std)]));
                if (policy == "GA") cells[0] = cell;
                if (policy == "RSS") cells[1] = cell;
                if (policy == "GSS") cells[2] = cell;
            }
            std::snprintf(line, sizeof(line), "  %-26s %16s %16s %16s\n", metric.c_str(),
                          cells[0].c_str(), cells[1].c_str(), cells[2].c_str());
            out << line;
        }
    }
}

// Exception-to-exit-code boundary shared by the binary and the tests.
template <typename F>
int run_command(F&& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
}

inline int cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    return run_command([&] { do_optimize(cfg, out_dir); });
}

inline int cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& strategy_path,
                        int runs, Learner learner, const std::filesystem::path& out_dir) {
    return run_command([&] { do_evaluate(cfg, strategy_path, runs, learner, out_dir); });
}

inline int cmd_sweep(const std::vector<int>& worker_counts, const ExperimentConfig& base,
                     int runs, Learner learner, const std::filesystem::path& out_dir) {
    return run_command([&] { do_sweep(worker_counts, base, runs, learner, out_dir); });
}

inline int cmd_report(const std::filesystem::path& in_dir) {
    return run_command([&] { do_report(in_dir); });
}

}  // namespace fedga
