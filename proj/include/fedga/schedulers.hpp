#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedga/model.hpp"
#include "fedga/rng.hpp"
#include "fedga/scenario.hpp"
#include "fedga/simenv.hpp"

namespace fedga {

// Online-phase schedulers: the random and greedy baselines plus replay of a
// fixed (optimized) strategy, all evaluated through one loop so comparisons
// stay paired.

enum class PolicyKind { Random, Greedy, Fixed };

inline const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Random: return "RSS";
        case PolicyKind::Greedy: return "GSS";
        case PolicyKind::Fixed: return "GA";
    }
    return "?";
}

struct SchedulerPolicy {
    PolicyKind kind = PolicyKind::Random;
    std::vector<ResourceAssignment> fixed;  // Fixed only
    // Greedy state, confined to one run.
    std::optional<std::vector<ResourceAssignment>> incumbent;
    double incumbent_energy = std::numeric_limits<double>::infinity();

    static SchedulerPolicy random() { return {PolicyKind::Random, {}, std::nullopt, 0.0}; }
    static SchedulerPolicy greedy() { return {PolicyKind::Greedy, {}, std::nullopt, 0.0}; }
    static SchedulerPolicy fixed_strategy(std::vector<ResourceAssignment> genes) {
        return {PolicyKind::Fixed, std::move(genes), std::nullopt, 0.0};
    }

    void reset() {
        incumbent.reset();
        incumbent_energy = std::numeric_limits<double>::infinity();
    }
};

namespace detail {

inline std::vector<ResourceAssignment> uniform_assignment(const Scenario& sc, Rng& rng) {
    std::vector<ResourceAssignment> a;
    a.reserve(sc.workers.size());
    for (const WorkerSpec& w : sc.workers)
        a.push_back({rng.uniform(0.0, w.max_frequency_hz), rng.uniform(0.0, w.max_power_w)});
    return a;
}

inline double frozen_round_energy(const std::vector<ResourceAssignment>& a, const Scenario& sc,
                                  const SimDraws& frozen) {
    return round_outcome(a, frozen.local_iterations, sc.workers, sc.gains, sc.channel, sc.profile,
                         sc.deadline_s)
        .total_energy_j;
}

}  // namespace detail

// One round's assignment. Random draws fresh uniforms every round. Greedy
// draws one fresh candidate per round and plays whichever of candidate and
// incumbent has the lower frozen-draw round energy (wasted energy included),
// keeping that one. Fixed replays its strategy verbatim.
inline std::vector<ResourceAssignment> next_assignment(SchedulerPolicy& policy, const Scenario& sc,
                                                       const SimDraws& frozen, int round,
                                                       Rng& rng) {
    switch (policy.kind) {
        case PolicyKind::Random:
            return detail::uniform_assignment(sc, rng);
        case PolicyKind::Greedy: {
            auto candidate = detail::uniform_assignment(sc, rng);
            const double energy = detail::frozen_round_energy(candidate, sc, frozen);
            if (!policy.incumbent || energy < policy.incumbent_energy) {
                policy.incumbent = candidate;
                policy.incumbent_energy = energy;
            }
            return *policy.incumbent;
        }
        case PolicyKind::Fixed:
            if (static_cast<int>(policy.fixed.size()) != sc.size())
                throw std::invalid_argument("next_assignment: fixed strategy has " +
                                            std::to_string(policy.fixed.size()) +
                                            " genes for " + std::to_string(sc.size()) +
                                            " workers");
            return policy.fixed;
    }
    throw std::logic_error("next_assignment: unreachable");
    (void)round;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation; zero for a single run
};

inline MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    if (xs.empty()) return m;
    for (const double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    double sq = 0.0;
    for (const double x : xs) sq += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(sq / static_cast<double>(xs.size()));
    return m;
}

struct RunRecord {
    int run = 0;
    double total_energy_j = 0.0;
    double computation_energy_j = 0.0;
    double transmission_energy_j = 0.0;
    double round_time_s = 0.0;
    int global_iterations = 0;
    int violations = 0;
};

struct OnlineSummary {
    MeanStd total_energy;
    MeanStd computation_energy;
    MeanStd transmission_energy;
    MeanStd round_time;
    MeanStd global_iterations;
    MeanStd violations;
    double violation_free_fraction = 0.0;  // runs with zero deadline misses
    int runs = 0;
    std::vector<RunRecord> per_run;
};

// SimDraws presented to every policy for run `r`; derived from the master
// seed only, so policies compared under one seed see identical draws.
inline SimDraws online_draws(const Scenario& sc, std::uint64_t seed, int run) {
    return draw_sim(sc, DrawMode::Jittered,
                    substream(seed, "online.draws", static_cast<std::uint64_t>(run)));
}

// Simulated online evaluation: each run draws jittered statistics, sizes the
// process from the policy's opening assignment, then plays N synchronized
// rounds. Round wall time is max(tau + tr) over participants clipped at the
// deadline (the coordinator waits out H when everyone misses it).
inline OnlineSummary run_online(const SchedulerPolicy& base_policy, const Scenario& sc, int runs,
                                std::uint64_t seed) {
    if (runs < 1) throw std::invalid_argument("run_online: runs must be >= 1");
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);

    std::vector<double> total, comp, trans, round_time, iters, violations;
    std::vector<RunRecord> records;
    int violation_free_runs = 0;
    for (int r = 0; r < runs; ++r) {
        const SimDraws draws = online_draws(sc, seed, r);
        SchedulerPolicy policy = base_policy;
        policy.reset();
        Rng rng(substream(seed, policy_name(policy.kind),
                          static_cast<std::uint64_t>(r)));

        auto assignment = next_assignment(policy, sc, frozen, 0, rng);
        std::vector<bool> mask(assignment.size());
        for (std::size_t k = 0; k < assignment.size(); ++k) mask[k] = participates(assignment[k]);
        const int rounds = global_iteration_count(draws.local_iterations, mask);

        double e = 0.0, ec = 0.0, et = 0.0, time_sum = 0.0;
        int viol = 0;
        for (int n = 0; n < rounds; ++n) {
            if (n > 0) assignment = next_assignment(policy, sc, frozen, n, rng);
            const RoundOutcome out =
                round_outcome(assignment, draws.local_iterations, sc.workers, sc.gains, sc.channel,
                              sc.profile, sc.deadline_s);
            e += out.total_energy_j;
            ec += out.computation_energy_j;
            et += out.transmission_energy_j;
            viol += out.violations;
            time_sum += out.idle_round ? sc.deadline_s : std::min(out.span_s, sc.deadline_s);
        }
        total.push_back(e);
        comp.push_back(ec);
        trans.push_back(et);
        round_time.push_back(time_sum / rounds);
        iters.push_back(static_cast<double>(rounds));
        violations.push_back(static_cast<double>(viol));
        if (viol == 0) ++violation_free_runs;
        records.push_back({r, e, ec, et, time_sum / rounds, rounds, viol});
    }

    OnlineSummary summary;
    summary.total_energy = mean_std(total);
    summary.computation_energy = mean_std(comp);
    summary.transmission_energy = mean_std(trans);
    summary.round_time = mean_std(round_time);
    summary.global_iterations = mean_std(iters);
    summary.violations = mean_std(violations);
    summary.violation_free_fraction = static_cast<double>(violation_free_runs) / runs;
    summary.runs = runs;
    summary.per_run = std::move(records);
    return summary;
}

}  // namespace fedga
