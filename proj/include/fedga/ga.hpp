#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fedga/rng.hpp"
#include "fedga/scenario.hpp"
#include "fedga/simenv.hpp"

namespace fedga {

// Safety-penalized genetic search over per-worker (frequency, power)
// strategies: rank roulette selection, uniform crossover with atomic genes,
// resampling mutation, elitism, and a triggered hyper-mutation + fixed-memory
// hybrid with early stopping.

struct Chromosome {
    std::vector<ResourceAssignment> genes;
    std::optional<FitnessReport> report;
};

struct GAConfig {
    int population_size = 40;
    int elites = 10;
    double crossover_rate = 0.3;
    double mutation_rate = 0.1;
    int max_generations = 5000;
    int early_stop_patience = 100;
    double hypermutation_factor = 1.5;
    int hypermutation_duration = 10;
    int memory_size = 15;
    double trigger_threshold = 0.4;  // relative best-fitness jump that fires the hybrid op
    // Probability that a mutated gene excludes its worker outright. Exclusion
    // stays reachable through configuration but defaults to off: the fitness
    // otherwise sheds workers wholesale, which is never the intended strategy
    // shape (see mutate()).
    double drop_probability = 0.0;
    PenaltyWeights penalty{};
    std::uint64_t seed = 42;

    // Tuned configuration per network size; worker counts between the tuned
    // columns use the nearest one (ties toward the smaller).
    static GAConfig defaults_for(int worker_count) {
        static constexpr int counts[] = {5, 10, 20, 40};
        static constexpr int population[] = {40, 120, 210, 220};
        static constexpr int elites[] = {10, 20, 30, 60};
        static constexpr double mutation[] = {0.1, 0.05, 0.1, 0.05};
        static constexpr int memory[] = {15, 35, 55, 85};
        static constexpr double threshold[] = {0.4, 0.3, 0.25, 0.2};

        int best = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(worker_count - counts[i]) < std::abs(worker_count - counts[best]))
                best = i;
        GAConfig cfg;
        cfg.population_size = population[best];
        cfg.elites = elites[best];
        cfg.mutation_rate = mutation[best];
        cfg.memory_size = memory[best];
        cfg.trigger_threshold = threshold[best];
        return cfg;
    }

    void validate() const {
        if (population_size < 2)
            throw ConfigError("ga.population: expected >= 2, got " +
                              std::to_string(population_size));
        if (elites < 0 || elites >= population_size)
            throw ConfigError("ga.elites: expected 0 <= elites < population, got " +
                              std::to_string(elites));
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
            throw ConfigError("ga.crossover_rate: expected 0..1");
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
            throw ConfigError("ga.mutation_rate: expected 0..1");
        if (max_generations < 1) throw ConfigError("ga.max_generations: expected >= 1");
        if (early_stop_patience < 1) throw ConfigError("ga.early_stop_patience: expected >= 1");
        if (!(hypermutation_factor >= 0.0)) throw ConfigError("ga.hypermutation_factor: expected >= 0");
        if (hypermutation_duration < 0) throw ConfigError("ga.hypermutation_duration: expected >= 0");
        if (memory_size < 1) throw ConfigError("ga.memory_size: expected >= 1");
        if (!(trigger_threshold >= 0.0)) throw ConfigError("ga.trigger_threshold: expected >= 0");
        if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
            throw ConfigError("ga.drop_probability: expected 0..1");
        if (!(penalty.deadline_weight >= 0.0)) throw ConfigError("ga.penalty_mu1: expected >= 0");
        if (!(penalty.idle_weight >= 0.0)) throw ConfigError("ga.penalty_mu2: expected >= 0");
    }
};

struct GenerationTrace {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double best_round_energy = 0.0;
    double best_computation_energy = 0.0;
    double best_transmission_energy = 0.0;
    int best_violations = 0;
    bool hypermutation_active = false;
};

inline std::vector<Chromosome> init_population(const Scenario& sc, const GAConfig& cfg) {
    cfg.validate();
    Rng rng(substream(cfg.seed, "ga.init"));
    std::vector<Chromosome> population(static_cast<std::size_t>(cfg.population_size));
    for (Chromosome& chrom : population) {
        chrom.genes.reserve(sc.workers.size());
        for (const WorkerSpec& w : sc.workers)
            chrom.genes.push_back({rng.uniform(0.0, w.max_frequency_hz),
                                   rng.uniform(0.0, w.max_power_w)});
    }
    return population;
}

// Rank roulette over fitness. Chromosomes sorted by fitness ascending get
// ranks 1..P; tied fitness values share their mean rank so equal scores draw
// equal weight. Sampling is with replacement.
inline std::vector<std::pair<int, int>> select_parents(const std::vector<Chromosome>& population,
                                                       int pair_count, Rng& rng) {
    const int n = static_cast<int>(population.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (const Chromosome& c : population)
        if (!c.report)
            throw std::invalid_argument("select_parents: population must be fully evaluated");
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double fa = population[static_cast<std::size_t>(a)].report->fitness;
        const double fb = population[static_cast<std::size_t>(b)].report->fitness;
        if (fa != fb) return fa < fb;
        return a < b;  // stable tie order by insertion index
    });

    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    int i = 0;
    while (i < n) {
        int j = i;
        const double fi = population[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]
                              .report->fitness;
        while (j < n && population[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]
                                .report->fitness == fi)
            ++j;
        const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (int t = i; t < j; ++t)
            weight[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = mean_rank;
        i = j;
    }

    std::vector<double> cumulative(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        total += weight[static_cast<std::size_t>(k)];
        cumulative[static_cast<std::size_t>(k)] = total;
    }
    auto sample = [&]() {
        const double x = rng.uniform() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), n - 1));
    };

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(pair_count));
    for (int p = 0; p < pair_count; ++p) {
        const int a = sample();
        const int b = sample();
        pairs.emplace_back(a, b);
    }
    return pairs;
}

// Uniform crossover with probability `rate`; genes move atomically as (f, p)
// pairs, each position swapping with probability 1/2. Otherwise the children
// are plain copies.
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& parent_a,
                                                   const Chromosome& parent_b, double rate,
                                                   Rng& rng) {
    if (parent_a.genes.size() != parent_b.genes.size())
        throw std::invalid_argument("crossover: parents must have equal gene counts");
    Chromosome child_a{parent_a.genes, std::nullopt};
    Chromosome child_b{parent_b.genes, std::nullopt};
    if (rng.chance(rate)) {
        for (std::size_t k = 0; k < child_a.genes.size(); ++k)
            if (rng.chance(0.5)) std::swap(child_a.genes[k], child_b.genes[k]);
    }
    return {std::move(child_a), std::move(child_b)};
}

// Each gene independently mutates with probability `rate`: either the worker
// is dropped to (0, 0) or both components are resampled uniformly within the
// worker's bounds, so constraints are preserved by construction.
inline void mutate(Chromosome& chrom, double rate, double drop_probability, const Scenario& sc,
                   Rng& rng) {
    for (std::size_t k = 0; k < chrom.genes.size(); ++k) {
        if (!rng.chance(rate)) continue;
        if (rng.chance(drop_probability)) {
            chrom.genes[k] = {0.0, 0.0};
        } else {
            const WorkerSpec& w = sc.workers[k];
            chrom.genes[k] = {rng.uniform(0.0, w.max_frequency_hz),
                              rng.uniform(0.0, w.max_power_w)};
        }
        chrom.report.reset();
    }
}

// Hybrid-op trigger: the best fitness of two consecutive generations moved by
// more than threshold D, relatively; absolute difference when the reference
// is exactly zero.
inline bool hybrid_trigger(double best_now, double best_prev, double threshold) {
    const double diff = std::abs(best_now - best_prev);
    if (best_prev == 0.0) return diff > threshold;
    return diff / std::abs(best_prev) > threshold;
}

// Bounded best-so-far archive feeding the fixed-memory half of the hybrid
// operation. Keeps the highest-fitness unique strategies; ties resolve by
// insertion order.
class MemoryArchive {
public:
    explicit MemoryArchive(int capacity) : capacity_(capacity) {}

    void offer(const std::vector<ResourceAssignment>& genes, double fitness) {
        for (const Entry& e : entries_)
            if (e.genes == genes) return;
        entries_.push_back({genes, fitness, next_stamp_++});
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            if (a.fitness != b.fitness) return a.fitness > b.fitness;
            return a.stamp < b.stamp;
        });
        if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
    }

    bool empty() const { return entries_.empty(); }
    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<ResourceAssignment>& best() const { return entries_.front().genes; }
    double fitness_at(int i) const { return entries_[static_cast<std::size_t>(i)].fitness; }

private:
    struct Entry {
        std::vector<ResourceAssignment> genes;
        double fitness;
        std::uint64_t stamp;
    };
    int capacity_;
    std::uint64_t next_stamp_ = 0;
    std::vector<Entry> entries_;
};

struct OfflineResult {
    Chromosome best;
    std::vector<GenerationTrace> traces;
    int generations = 0;
    bool early_stopped = false;
};

// Full offline search. Per generation: evaluate fresh chromosomes against the
// frozen simulated environment (the process-energy reference is the previous
// generation best's), trace, early-stop bookkeeping, hybrid trigger, then
// elites plus selection/crossover/mutation refill. Elites carry their cached
// report, which keeps the best-fitness trace non-decreasing.
inline OfflineResult run_offline(const Scenario& sc, const GAConfig& cfg) {
    cfg.validate();
    const SimDraws frozen = draw_sim(sc, DrawMode::Frozen);

    std::vector<Chromosome> population = init_population(sc, cfg);
    MemoryArchive memory(cfg.memory_size);
    OfflineResult result;

    std::optional<double> reference_energy;  // E_FL of the previous generation's best
    double best_ever = -std::numeric_limits<double>::infinity();
    int stale = 0;
    int hyper_remaining = 0;

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        for (Chromosome& chrom : population)
            if (!chrom.report)
                chrom.report =
                    evaluate_chromosome(chrom.genes, sc, frozen, cfg.penalty, reference_energy);

        int best_idx = 0;
        int worst_idx = 0;
        double mean_fitness = 0.0;
        for (int i = 0; i < static_cast<int>(population.size()); ++i) {
            const double f = population[static_cast<std::size_t>(i)].report->fitness;
            mean_fitness += f;
            if (f > population[static_cast<std::size_t>(best_idx)].report->fitness) best_idx = i;
            if (f < population[static_cast<std::size_t>(worst_idx)].report->fitness) worst_idx = i;
        }
        mean_fitness /= static_cast<double>(population.size());

        const Chromosome& gen_best = population[static_cast<std::size_t>(best_idx)];
        GenerationTrace trace;
        trace.generation = gen;
        trace.best_fitness = gen_best.report->fitness;
        trace.mean_fitness = mean_fitness;
        trace.best_round_energy = gen_best.report->round_energy;
        trace.best_computation_energy = gen_best.report->computation_energy;
        trace.best_transmission_energy = gen_best.report->transmission_energy;
        trace.best_violations = gen_best.report->violations;
        trace.hypermutation_active = hyper_remaining > 0;
        result.traces.push_back(trace);

        for (const Chromosome& chrom : population)
            memory.offer(chrom.genes, chrom.report->fitness);

        const double traced_process_energy = gen_best.report->process_energy;
        if (gen_best.report->fitness > best_ever) {
            best_ever = gen_best.report->fitness;
            result.best = gen_best;
            stale = 0;
        } else {
            ++stale;
        }
        result.generations = gen + 1;
        if (stale >= cfg.early_stop_patience) {
            result.early_stopped = true;
            break;
        }
        if (gen + 1 >= cfg.max_generations) break;

        if (gen >= 1 && hybrid_trigger(result.traces[static_cast<std::size_t>(gen)].best_fitness,
                                       result.traces[static_cast<std::size_t>(gen - 1)].best_fitness,
                                       cfg.trigger_threshold)) {
            hyper_remaining = cfg.hypermutation_duration;
            if (!memory.empty()) {
                Chromosome& worst = population[static_cast<std::size_t>(worst_idx)];
                worst.genes = memory.best();
                worst.report =
                    evaluate_chromosome(worst.genes, sc, frozen, cfg.penalty, reference_energy);
            }
        }
        // the flag reports whether this generation breeds under hyper-mutation
        result.traces.back().hypermutation_active = hyper_remaining > 0;

        const double effective_mutation =
            cfg.mutation_rate * (hyper_remaining > 0 ? cfg.hypermutation_factor : 1.0);
        if (hyper_remaining > 0) --hyper_remaining;
        const std::optional<double> next_reference = traced_process_energy;

        // Elites: top-fitness chromosomes carried over unaltered, cached
        // report included; ties resolve by insertion index.
        std::vector<int> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double fa = population[static_cast<std::size_t>(a)].report->fitness;
            const double fb = population[static_cast<std::size_t>(b)].report->fitness;
            if (fa != fb) return fa > fb;
            return a < b;
        });
        std::vector<Chromosome> next;
        next.reserve(population.size());
        for (int e = 0; e < cfg.elites; ++e)
            next.push_back(population[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

        const int children = cfg.population_size - cfg.elites;
        const int pair_count = (children + 1) / 2;
        Rng select_rng(substream(cfg.seed, "ga.select", static_cast<std::uint64_t>(gen)));
        const auto pairs = select_parents(population, pair_count, select_rng);
        for (int p = 0; p < pair_count; ++p) {
            Rng vary_rng(substream(cfg.seed, "ga.vary", static_cast<std::uint64_t>(gen),
                                   static_cast<std::uint64_t>(p)));
            auto [child_a, child_b] =
                crossover(population[static_cast<std::size_t>(pairs[static_cast<std::size_t>(p)].first)],
                          population[static_cast<std::size_t>(pairs[static_cast<std::size_t>(p)].second)],
                          cfg.crossover_rate, vary_rng);
            mutate(child_a, effective_mutation, cfg.drop_probability, sc, vary_rng);
            mutate(child_b, effective_mutation, cfg.drop_probability, sc, vary_rng);
            child_a.report.reset();
            child_b.report.reset();
            next.push_back(std::move(child_a));
            if (static_cast<int>(next.size()) < cfg.population_size)
                next.push_back(std::move(child_b));
        }
        population = std::move(next);
        reference_energy = next_reference;
    }
    return result;
}

}  // namespace fedga
