#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedga/model.hpp"
#include "fedga/rng.hpp"
#include "fedga/scenario.hpp"

namespace fedga {

// Minimal synchronized FedAvg learner on synthetic linear-regression data.
// It realizes the same round protocol the simulator assumes (broadcast, local
// training to a target, deadline-gated upload, weighted aggregation) with
// real gradient-descent dynamics, so the statistical environment can be
// cross-checked against measured iteration counts.

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelVector {
    std::vector<double> values;
};

struct ToyWorkerData {
    std::vector<double> features;  // row-major, samples x dimension
    std::vector<double> targets;
};

struct ToyTask {
    int dimension = 16;
    // The small step and per-round iteration cap pace the process so that a
    // synchronized run spans a realistic number of rounds instead of
    // collapsing into one giant local descent.
    double learning_rate = 0.01;
    int local_iteration_cap = 8;
    int max_rounds = 60;
    std::vector<ToyWorkerData> data;       // one dataset per worker
    std::vector<double> reference_model;   // shared ground-truth direction
};

namespace detail {

// Box-Muller normal deviate; 1 - uniform() keeps the log argument positive.
inline double gaussian(Rng& rng) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline double toy_mse(const ToyWorkerData& data, const std::vector<double>& w, int dim) {
    const std::size_t rows = data.targets.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double pred = 0.0;
        const double* row = data.features.data() + i * static_cast<std::size_t>(dim);
        for (int j = 0; j < dim; ++j) pred += row[j] * w[static_cast<std::size_t>(j)];
        const double err = pred - data.targets[i];
        loss += err * err;
    }
    return loss / static_cast<double>(rows);
}

}  // namespace detail

// Synthetic per-worker regression datasets. Heterogeneity h_k drives how far
// the worker's local optimum drifts from the shared model and its label-noise
// floor; the noise floor narrows the gap to the local target, so more
// heterogeneous workers measurably grind through more local iterations.
inline ToyTask make_toy_task(const Scenario& sc, std::uint64_t seed) {
    ToyTask task;
    const int dim = task.dimension;

    Rng model_rng(substream(seed, "toy.model"));
    task.reference_model.resize(static_cast<std::size_t>(dim));
    double norm = 0.0;
    for (double& v : task.reference_model) {
        v = model_rng.uniform(-1.0, 1.0);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : task.reference_model) v *= 4.0 / norm;  // |w*|^2 = 16

    task.data.resize(sc.workers.size());
    for (std::size_t k = 0; k < sc.workers.size(); ++k) {
        const WorkerSpec& worker = sc.workers[k];
        Rng rng(substream(seed, "toy.data", static_cast<std::uint64_t>(k)));

        std::vector<double> local_optimum = task.reference_model;
        const double drift = 0.2 + 0.2 * worker.heterogeneity;
        std::vector<double> direction(static_cast<std::size_t>(dim));
        double dn = 0.0;
        for (double& v : direction) {
            v = detail::gaussian(rng);
            dn += v * v;
        }
        dn = std::sqrt(dn);
        for (int j = 0; j < dim; ++j)
            local_optimum[static_cast<std::size_t>(j)] +=
                drift * direction[static_cast<std::size_t>(j)] / dn;

        const double noise = 0.1 + 0.5 * worker.heterogeneity;

        ToyWorkerData& data = task.data[k];
        const auto rows = static_cast<std::size_t>(worker.samples);
        data.features.resize(rows * static_cast<std::size_t>(dim));
        data.targets.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double target = 0.0;
            for (int j = 0; j < dim; ++j) {
                const double x = detail::gaussian(rng);
                data.features[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] = x;
                target += x * local_optimum[static_cast<std::size_t>(j)];
            }
            data.targets[i] = target + noise * detail::gaussian(rng);
        }
    }
    return task;
}

struct LocalTrainResult {
    ModelVector model;
    int iterations = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

// Full-batch gradient descent on the worker's MSE until it reaches the local
// target or the iteration cap. The returned iteration count is what the
// energy model charges as I_{k,n}.
inline LocalTrainResult local_train(int worker_index, const ModelVector& global_model,
                                    const ToyTask& task, double local_target,
                                    std::vector<double>* loss_trace = nullptr) {
    const ToyWorkerData& data = task.data[static_cast<std::size_t>(worker_index)];
    const int dim = task.dimension;
    const auto rows = static_cast<std::size_t>(data.targets.size());

    LocalTrainResult result;
    result.model = global_model;
    std::vector<double>& w = result.model.values;
    result.initial_loss = detail::toy_mse(data, w, dim);
    double loss = result.initial_loss;
    if (loss_trace) loss_trace->push_back(loss);

    std::vector<double> gradient(static_cast<std::size_t>(dim));
    std::vector<double> residual(rows);
    while (loss > local_target && result.iterations < task.local_iteration_cap) {
        for (std::size_t i = 0; i < rows; ++i) {
            double pred = 0.0;
            const double* row = data.features.data() + i * static_cast<std::size_t>(dim);
            for (int j = 0; j < dim; ++j) pred += row[j] * w[static_cast<std::size_t>(j)];
            residual[i] = pred - data.targets[i];
        }
        std::fill(gradient.begin(), gradient.end(), 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = data.features.data() + i * static_cast<std::size_t>(dim);
            for (int j = 0; j < dim; ++j)
                gradient[static_cast<std::size_t>(j)] += residual[i] * row[j];
        }
        const double step = 2.0 * task.learning_rate / static_cast<double>(rows);
        for (int j = 0; j < dim; ++j)
            w[static_cast<std::size_t>(j)] -= step * gradient[static_cast<std::size_t>(j)];
        ++result.iterations;
        loss = detail::toy_mse(data, w, dim);
        if (loss_trace) loss_trace->push_back(loss);
        if (!std::isfinite(loss))
            throw TrainingError("local training diverged at worker " +
                                std::to_string(worker_index));
    }
    result.final_loss = loss;
    return result;
}

// Sample-count weighted average over the received updates.
inline ModelVector aggregate(const std::vector<ModelVector>& updates,
                             const std::vector<double>& weights) {
    ModelVector out;
    if (updates.empty()) return out;
    out.values.assign(updates.front().values.size(), 0.0);
    double total = 0.0;
    for (const double w : weights) total += w;
    for (std::size_t u = 0; u < updates.size(); ++u)
        for (std::size_t j = 0; j < out.values.size(); ++j)
            out.values[j] += weights[u] * updates[u].values[j] / total;
    return out;
}

struct FLProcessOutcome {
    int global_iterations = 0;
    bool converged = false;
    double total_energy_j = 0.0;
    double computation_energy_j = 0.0;
    double transmission_energy_j = 0.0;
    double wasted_energy_j = 0.0;
    int violations = 0;
    double mean_round_time_s = 0.0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> mean_local_iterations;  // measured, per worker
    ModelVector final_model;
};

// Synchronized toy FL process under a per-round assignment policy. Each round
// broadcasts the model, trains participating workers to the local target,
// accounts energy and timing from the measured iteration counts through the
// same round arithmetic the simulator uses, drops late updates, aggregates
// the rest, and stops once the global loss falls to global_target relative to
// its starting value. The process target is relative because the absolute
// local target bounds how far any aggregate can descend; a round that
// receives no update keeps the previous model and still counts.
inline FLProcessOutcome run_toy_fl(
    const Scenario& sc, const ToyTask& task,
    const std::function<std::vector<ResourceAssignment>(int)>& assignment_for_round,
    double local_target, double global_target, double deadline_s) {
    const int dim = task.dimension;
    const int worker_count = sc.size();

    ModelVector global;
    global.values.assign(static_cast<std::size_t>(dim), 0.0);

    auto global_loss = [&](const ModelVector& m) {
        double weighted = 0.0, total = 0.0;
        for (int k = 0; k < worker_count; ++k) {
            const double dk = sc.workers[static_cast<std::size_t>(k)].samples;
            weighted += dk * detail::toy_mse(task.data[static_cast<std::size_t>(k)], m.values, dim);
            total += dk;
        }
        return weighted / total;
    };

    FLProcessOutcome outcome;
    outcome.initial_loss = global_loss(global);
    const double target_loss = global_target * outcome.initial_loss;
    outcome.mean_local_iterations.assign(static_cast<std::size_t>(worker_count), 0.0);
    std::vector<int> trained_rounds(static_cast<std::size_t>(worker_count), 0);

    double time_sum = 0.0;
    for (int round = 0; round < task.max_rounds; ++round) {
        const std::vector<ResourceAssignment> assignment = assignment_for_round(round);
        if (static_cast<int>(assignment.size()) != worker_count)
            throw std::invalid_argument("run_toy_fl: assignment size mismatch");

        std::vector<int> iterations(static_cast<std::size_t>(worker_count), 0);
        std::vector<ModelVector> local_models(static_cast<std::size_t>(worker_count));
        for (int k = 0; k < worker_count; ++k) {
            if (!participates(assignment[static_cast<std::size_t>(k)])) continue;
            LocalTrainResult trained = local_train(k, global, task, local_target);
            iterations[static_cast<std::size_t>(k)] = trained.iterations;
            local_models[static_cast<std::size_t>(k)] = std::move(trained.model);
            outcome.mean_local_iterations[static_cast<std::size_t>(k)] += trained.iterations;
            ++trained_rounds[static_cast<std::size_t>(k)];
        }

        // Same energy/deadline arithmetic as the simulated environment, fed
        // with the measured iteration counts.
        const RoundOutcome round_result =
            round_outcome(assignment, iterations, sc.workers, sc.gains, sc.channel, sc.profile,
                          deadline_s);
        outcome.total_energy_j += round_result.total_energy_j;
        outcome.computation_energy_j += round_result.computation_energy_j;
        outcome.transmission_energy_j += round_result.transmission_energy_j;
        outcome.wasted_energy_j += round_result.wasted_energy_j;
        outcome.violations += round_result.violations;
        time_sum += round_result.idle_round ? deadline_s
                                            : std::min(round_result.span_s, deadline_s);

        std::vector<ModelVector> received;
        std::vector<double> weights;
        for (int k = 0; k < worker_count; ++k) {
            const WorkerRound& wr = round_result.workers[static_cast<std::size_t>(k)];
            if (!wr.participates || wr.violated) continue;
            received.push_back(local_models[static_cast<std::size_t>(k)]);
            weights.push_back(sc.workers[static_cast<std::size_t>(k)].samples);
        }
        if (!received.empty()) global = aggregate(received, weights);

        ++outcome.global_iterations;
        outcome.final_loss = global_loss(global);
        if (outcome.final_loss <= target_loss) {
            outcome.converged = true;
            break;
        }
    }
    outcome.mean_round_time_s =
        outcome.global_iterations > 0 ? time_sum / outcome.global_iterations : 0.0;
    for (int k = 0; k < worker_count; ++k)
        if (trained_rounds[static_cast<std::size_t>(k)] > 0)
            outcome.mean_local_iterations[static_cast<std::size_t>(k)] /=
                trained_rounds[static_cast<std::size_t>(k)];
    outcome.final_model = std::move(global);
    return outcome;
}

// Fixed-strategy convenience overload: the same assignment replayed in every
// round.
inline FLProcessOutcome run_toy_fl(const Scenario& sc, const ToyTask& task,
                                   const std::vector<ResourceAssignment>& strategy,
                                   double local_target, double global_target, double deadline_s) {
    return run_toy_fl(
        sc, task, [&](int) { return strategy; }, local_target, global_target, deadline_s);
}

}  // namespace fedga
