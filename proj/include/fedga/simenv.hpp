#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedga/model.hpp"
#include "fedga/rng.hpp"
#include "fedga/scenario.hpp"

namespace fedga {

// Cheap statistical stand-in for a real FL process, used by the offline
// search. Local iteration counts follow the worker's heterogeneity score and
// the process length follows the mean local effort.

struct SimDraws {
    std::vector<int> local_iterations;  // I_k in [2, 11]
    int global_iterations = 0;          // N in [10, 22], all-workers mean
};

enum class DrawMode { Frozen, Jittered };

// Rounding rule used for all statistics mappings: half away from zero.
inline int round_half_away(double x) { return static_cast<int>(std::llround(x)); }

inline int clamp_int(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Affine heterogeneity-to-effort map: h = 0 -> 2 iterations, h = 1 -> 11.
inline int frozen_local_iterations(double heterogeneity) {
    return clamp_int(round_half_away(2.0 + 9.0 * heterogeneity), 2, 11);
}

// Process length from the mean local effort over `mask` (participating
// workers); falls back to the all-workers mean when nobody participates so N
// stays defined for infeasible strategies. N = 22 at mean effort 2, 10 at 11.
inline int global_iteration_count(std::span<const int> local_iterations,
                                  const std::vector<bool>& mask = {}) {
    double sum = 0.0;
    int count = 0;
    if (!mask.empty()) {
        for (std::size_t k = 0; k < local_iterations.size(); ++k) {
            if (!mask[k]) continue;
            sum += local_iterations[k];
            ++count;
        }
    }
    if (count == 0) {
        for (const int i : local_iterations) sum += i;
        count = static_cast<int>(local_iterations.size());
    }
    const double mean = sum / count;
    return clamp_int(round_half_away(22.0 - (12.0 / 9.0) * (mean - 2.0)), 10, 22);
}

// Frozen mode is seedless and fully determined by the scenario, which keeps
// offline fitness a pure function of the chromosome. Jittered mode perturbs
// each I_k by one of {-1, 0, +1} per draw and models run-to-run variability
// of the online phase.
inline SimDraws draw_sim(const Scenario& sc, DrawMode mode, std::uint64_t seed = 0) {
    SimDraws draws;
    draws.local_iterations.reserve(sc.workers.size());
    for (const WorkerSpec& w : sc.workers)
        draws.local_iterations.push_back(frozen_local_iterations(w.heterogeneity));
    if (mode == DrawMode::Jittered) {
        Rng rng(substream(seed, "simenv.jitter"));
        for (int& i : draws.local_iterations)
            i = clamp_int(i + static_cast<int>(rng.uniform_int(-1, 1)), 2, 11);
    }
    draws.global_iterations = global_iteration_count(draws.local_iterations);
    return draws;
}

struct PenaltyWeights {
    // mu_1 per deadline miss. It has to clear the worst per-worker feasible
    // energy (a distant low-end worker costs ~1.5 J even at its optimum),
    // otherwise "violate cheaply" beats "comply" and evolved strategies keep
    // deliberate stragglers.
    double deadline_weight = 3.0;
    double idle_weight = 10.0;  // mu_2 for an idle round
};

struct PenaltyResult {
    double penalty = 0.0;          // v
    double process_energy = 0.0;   // E_FL = N * round energy
    double process_term = 0.0;     // P3 component of v
    int global_iterations = 0;     // N used for E_FL
};

// Penalty v = sum_k(E^W_k + mu1 * P1_k) + mu2 * P2 + P3.
//   P1_k: 1 when a participating worker misses the deadline.
//   P2:   1 when no worker contributes CPU time.
//   P3:   relative change of the process energy against the previous
//         reference; negative (a bonus) when the process got cheaper. Zero
//         when no reference exists yet. When a branch denominator vanishes the
//         other quantity is used instead, capping P3 at +/-1; 0/0 maps to 0.
inline PenaltyResult penalty(const RoundOutcome& outcome, const SimDraws& draws,
                             const PenaltyWeights& weights,
                             std::optional<double> previous_process_energy) {
    std::vector<bool> mask(outcome.workers.size());
    for (std::size_t k = 0; k < outcome.workers.size(); ++k)
        mask[k] = outcome.workers[k].participates;

    PenaltyResult res;
    res.global_iterations = global_iteration_count(draws.local_iterations, mask);
    res.process_energy = res.global_iterations * outcome.total_energy_j;

    double p3 = 0.0;
    if (previous_process_energy) {
        const double cur = res.process_energy;
        const double prev = *previous_process_energy;
        if (cur < prev)
            p3 = cur > 0.0 ? -(prev - cur) / cur : -1.0;
        else if (cur > prev)
            p3 = prev > 0.0 ? (cur - prev) / prev : 1.0;
    }

    double v = 0.0;
    for (const WorkerRound& wr : outcome.workers)
        v += wr.wasted_energy_j + weights.deadline_weight * (wr.violated ? 1.0 : 0.0);
    v += weights.idle_weight * (outcome.idle_round ? 1.0 : 0.0);
    v += p3;
    res.process_term = p3;
    res.penalty = v;
    return res;
}

struct FitnessReport {
    double fitness = 0.0;               // FF = -(round energy + penalty)
    double round_energy = 0.0;          // E^gr
    double computation_energy = 0.0;
    double transmission_energy = 0.0;
    double wasted_energy = 0.0;
    double penalty = 0.0;               // v
    double process_energy = 0.0;        // E_FL
    int global_iterations = 0;
    int violations = 0;                 // sum P1 + P2
    bool idle = false;
};

// Scores one candidate strategy against the given draws. With frozen draws
// this is a pure function of (genes, scenario, previous_process_energy).
inline FitnessReport evaluate_chromosome(std::span<const ResourceAssignment> genes,
                                         const Scenario& sc, const SimDraws& draws,
                                         const PenaltyWeights& weights,
                                         std::optional<double> previous_process_energy) {
    if (genes.size() != sc.workers.size())
        throw std::invalid_argument("evaluate_chromosome: gene count must equal worker count");

    const RoundOutcome outcome =
        round_outcome(genes, draws.local_iterations, sc.workers, sc.gains, sc.channel, sc.profile,
                      sc.deadline_s);
    const PenaltyResult pen = penalty(outcome, draws, weights, previous_process_energy);

    FitnessReport report;
    report.round_energy = outcome.total_energy_j;
    report.computation_energy = outcome.computation_energy_j;
    report.transmission_energy = outcome.transmission_energy_j;
    report.wasted_energy = outcome.wasted_energy_j;
    report.penalty = pen.penalty;
    report.process_energy = pen.process_energy;
    report.global_iterations = pen.global_iterations;
    report.violations = outcome.violations + (outcome.idle_round ? 1 : 0);
    report.idle = outcome.idle_round;
    report.fitness = -(outcome.total_energy_j + pen.penalty);
    return report;
}

// Frozen-draw convenience overload used by the offline phase.
inline FitnessReport evaluate_chromosome(std::span<const ResourceAssignment> genes,
                                         const Scenario& sc, const PenaltyWeights& weights,
                                         std::optional<double> previous_process_energy) {
    return evaluate_chromosome(genes, sc, draw_sim(sc, DrawMode::Frozen), weights,
                               previous_process_energy);
}

}  // namespace fedga
