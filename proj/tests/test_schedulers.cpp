#include <doctest.h>

#include <vector>

#include "fedga/ga.hpp"
#include "fedga/scenario.hpp"
#include "fedga/schedulers.hpp"

using namespace fedga;

namespace {

Scenario scenario_for(std::uint64_t seed, int workers = 5) {
    ScenarioConfig cfg;
    cfg.worker_count = workers;
    cfg.seed = seed;
    return generate_scenario(cfg);
}

}  // namespace

TEST_CASE("random scheduler always stays within bounds") {
    const Scenario sc = scenario_for(1);
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);
    SchedulerPolicy policy = SchedulerPolicy::random();
    Rng rng(9);
    for (int round = 0; round < 10000; ++round) {
        const auto a = next_assignment(policy, sc, frozen, round, rng);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].frequency_hz >= 0.0);
            CHECK(a[k].frequency_hz <= sc.workers[k].max_frequency_hz);
            CHECK(a[k].power_w >= 0.0);
            CHECK(a[k].power_w <= sc.workers[k].max_power_w);
        }
    }
}

TEST_CASE("greedy scheduler's incumbent energy never increases") {
    const Scenario sc = scenario_for(2);
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);
    SchedulerPolicy policy = SchedulerPolicy::greedy();
    Rng rng(10);
    double prev = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 200; ++round) {
        const auto played = next_assignment(policy, sc, frozen, round, rng);
        const double energy =
            round_outcome(played, frozen.local_iterations, sc.workers, sc.gains, sc.channel,
                          sc.profile, sc.deadline_s)
                .total_energy_j;
        CHECK(energy <= prev + 1e-12);
        CHECK(energy == doctest::Approx(policy.incumbent_energy).epsilon(1e-12));
        prev = energy;
        for (std::size_t k = 0; k < played.size(); ++k) {
            CHECK(played[k].frequency_hz <= sc.workers[k].max_frequency_hz);
            CHECK(played[k].power_w <= sc.workers[k].max_power_w);
        }
    }
}

TEST_CASE("fixed strategy replays identically and validates its length") {
    const Scenario sc = scenario_for(3);
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);
    std::vector<ResourceAssignment> genes;
    for (const WorkerSpec& w : sc.workers) genes.push_back({w.max_frequency_hz / 2, w.max_power_w / 2});

    SchedulerPolicy policy = SchedulerPolicy::fixed_strategy(genes);
    Rng rng(4);
    for (int round = 0; round < 50; ++round)
        CHECK(next_assignment(policy, sc, frozen, round, rng) == genes);

    SchedulerPolicy bad = SchedulerPolicy::fixed_strategy({{1e9, 0.5}});
    CHECK_THROWS_AS(next_assignment(bad, sc, frozen, 0, rng), std::invalid_argument);
}

TEST_CASE("online draws are policy-independent, pairing the comparison") {
    const Scenario sc = scenario_for(4);
    for (int run = 0; run < 20; ++run) {
        const SimDraws a = online_draws(sc, 42, run);
        const SimDraws b = online_draws(sc, 42, run);
        CHECK(a.local_iterations == b.local_iterations);
        CHECK(a.global_iterations == b.global_iterations);
    }
    CHECK(online_draws(sc, 42, 0).local_iterations != online_draws(sc, 43, 0).local_iterations);
}

TEST_CASE("run_online summaries are reproducible and internally consistent") {
    const Scenario sc = scenario_for(5);
    const OnlineSummary a = run_online(SchedulerPolicy::random(), sc, 40, 42);
    const OnlineSummary b = run_online(SchedulerPolicy::random(), sc, 40, 42);
    CHECK(a.total_energy.mean == b.total_energy.mean);
    CHECK(a.total_energy.std == b.total_energy.std);
    CHECK(a.round_time.mean == b.round_time.mean);
    CHECK(a.violations.mean == b.violations.mean);

    CHECK(a.total_energy.mean ==
          doctest::Approx(a.computation_energy.mean + a.transmission_energy.mean).epsilon(1e-9));
    CHECK(a.round_time.mean <= sc.deadline_s);
    CHECK(a.global_iterations.mean >= 10.0);
    CHECK(a.global_iterations.mean <= 22.0);
    CHECK(a.runs == 40);
}

TEST_CASE("single-run summaries have zero spread") {
    const Scenario sc = scenario_for(6);
    const OnlineSummary s = run_online(SchedulerPolicy::greedy(), sc, 1, 7);
    CHECK(s.total_energy.std == 0.0);
    CHECK(s.round_time.std == 0.0);
    CHECK(s.global_iterations.std == 0.0);
}

TEST_CASE("an optimized strategy beats burning maximum resources") {
    const Scenario sc = scenario_for(42);
    GAConfig cfg = GAConfig::defaults_for(5);
    cfg.max_generations = 250;
    cfg.early_stop_patience = 80;
    cfg.seed = 42;
    const OfflineResult offline = run_offline(sc, cfg);

    std::vector<ResourceAssignment> maxed;
    for (const WorkerSpec& w : sc.workers) maxed.push_back({w.max_frequency_hz, w.max_power_w});

    const OnlineSummary tuned =
        run_online(SchedulerPolicy::fixed_strategy(offline.best.genes), sc, 60, 42);
    const OnlineSummary brute = run_online(SchedulerPolicy::fixed_strategy(maxed), sc, 60, 42);
    CHECK(tuned.total_energy.mean < brute.total_energy.mean);
}
