#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedga/cli.hpp"
#include "fedga/config.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out_dir = "results";
};

fedga::ExperimentConfig load_config(const CommonOptions& opts) {
    fedga::ExperimentConfig cfg = opts.config_path.empty()
                                      ? fedga::parse_config_text("{}")
                                      : fedga::parse_config_file(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.workers) cfg.scenario.worker_count = *opts.workers;
    cfg.resolve();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file");
    cmd->add_option("--seed", opts.seed, "master seed for all random streams");
    cmd->add_option("--workers", opts.workers, "override the scenario worker count");
    cmd->add_option("--out", opts.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedga: energy-aware resource planning for synchronized federated learning"};
    app.require_subcommand(1);

    CommonOptions optimize_opts;
    CLI::App* optimize = app.add_subcommand("optimize", "run the offline genetic search");
    add_common(optimize, optimize_opts);

    CommonOptions evaluate_opts;
    std::string strategy_path;
    int runs = 100;
    std::string learner = "sim";
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "compare a strategy against the baseline schedulers");
    add_common(evaluate, evaluate_opts);
    evaluate->add_option("--strategy", strategy_path, "strategy JSON produced by optimize");
    evaluate->add_option("--runs", runs, "number of independent runs");
    evaluate->add_option("--learner", learner, "online evaluation mode: sim or toy")
        ->check(CLI::IsMember({"sim", "toy"}));

    CommonOptions sweep_opts;
    std::vector<int> counts{5, 10, 20, 40};
    int sweep_runs = 100;
    std::string sweep_learner = "sim";
    CLI::App* sweep = app.add_subcommand("sweep", "optimize + evaluate across network sizes");
    add_common(sweep, sweep_opts);
    sweep->add_option("--counts", counts, "worker counts to sweep");
    sweep->add_option("--runs", sweep_runs, "number of independent runs per count");
    sweep->add_option("--learner", sweep_learner, "online evaluation mode: sim or toy")
        ->check(CLI::IsMember({"sim", "toy"}));

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "summarize a result directory");
    report->add_option("--in", report_dir, "directory with trace.csv / comparison.csv")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (optimize->parsed())
        return fedga::run_command(
            [&] { fedga::do_optimize(load_config(optimize_opts), optimize_opts.out_dir); });

    if (evaluate->parsed())
        return fedga::run_command([&] {
            const fedga::ExperimentConfig cfg = load_config(evaluate_opts);
            const std::filesystem::path strategy =
                strategy_path.empty()
                    ? std::filesystem::path(evaluate_opts.out_dir) / "best_strategy.json"
                    : std::filesystem::path(strategy_path);
            fedga::do_evaluate(cfg, strategy, runs,
                               learner == "toy" ? fedga::Learner::Toy : fedga::Learner::Sim,
                               evaluate_opts.out_dir);
        });

    if (sweep->parsed())
        return fedga::run_command([&] {
            fedga::do_sweep(counts, load_config(sweep_opts), sweep_runs,
                            sweep_learner == "toy" ? fedga::Learner::Toy : fedga::Learner::Sim,
                            sweep_opts.out_dir);
        });

    if (report->parsed()) return fedga::cmd_report(report_dir);

    return 1;
}
