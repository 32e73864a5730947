#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedga {

// Arithmetic core of the simulator. Unit convention: every quantity below is
// SI (Hz, Watts, bits, seconds, Joules, meters). dB / dBm values are converted
// at configuration boundaries, never inside the model.

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

enum class WorkerClass { LowEnd, HighEnd };

// Static capabilities and placement of one worker device.
struct WorkerSpec {
    int id = 0;
    WorkerClass cls = WorkerClass::HighEnd;
    double max_frequency_hz = 3.0e9;   // CPU frequency cap
    double max_power_w = 0.0;          // transmit power cap
    double flops_per_cycle = 2.0;      // FLOPs retired per CPU cycle
    double capacitance = 1.0e-28;      // effective switched capacitance, W/Hz^3
    double distance_m = 100.0;         // distance to the coordinator
    int samples = 1000;                // local dataset size
    double heterogeneity = 0.5;        // data heterogeneity score in [0, 1]

    // Class parameter coupling: low-end devices run 1 GHz / 4 FLOPs per cycle
    // with a 28 dBm power cap; high-end devices 3 GHz / 2 FLOPs per cycle and
    // 33 dBm.
    static WorkerSpec low_end(int id, double distance_m, int samples, double heterogeneity) {
        WorkerSpec w;
        w.id = id;
        w.cls = WorkerClass::LowEnd;
        w.max_frequency_hz = 1.0e9;
        w.flops_per_cycle = 4.0;
        w.max_power_w = dbm_to_watts(28.0);
        w.distance_m = distance_m;
        w.samples = samples;
        w.heterogeneity = heterogeneity;
        return w;
    }

    static WorkerSpec high_end(int id, double distance_m, int samples, double heterogeneity) {
        WorkerSpec w;
        w.id = id;
        w.cls = WorkerClass::HighEnd;
        w.max_frequency_hz = 3.0e9;
        w.flops_per_cycle = 2.0;
        w.max_power_w = dbm_to_watts(33.0);
        w.distance_m = distance_m;
        w.samples = samples;
        w.heterogeneity = heterogeneity;
        return w;
    }
};

// Uplink channel constants shared by all workers.
struct ChannelParams {
    double noise_density_w_hz = std::pow(10.0, -18.8);  // -158 dBm/Hz
    double bandwidth_hz = 2.0e7;
    double pathloss_intercept_db = 127.0;
    double pathloss_slope_db = 30.0;  // dB per decade of distance in km
};

// Size and per-sample training cost of the global model.
struct ModelProfile {
    double size_bits = 2.51e6 * 8.0;       // 2.51 MB (decimal) in bits
    double flops_per_sample = 1800348.0;   // FLOPs per sample per local iteration
};

// One (frequency, power) decision for one worker in one round.
struct ResourceAssignment {
    double frequency_hz = 0.0;
    double power_w = 0.0;

    bool operator==(const ResourceAssignment&) const = default;
};

// Pathloss model PL(d) = intercept + slope * log10(d / 1 km), returned as the
// linear power gain 10^(-PL/10). Strictly decreasing in distance.
inline double channel_gain(double distance_m, const ChannelParams& ch) {
    if (!(distance_m > 0.0))
        throw std::domain_error("channel_gain: distance must be positive, got " +
                                std::to_string(distance_m));
    const double pathloss_db =
        ch.pathloss_intercept_db + ch.pathloss_slope_db * std::log10(distance_m / 1000.0);
    return std::pow(10.0, -pathloss_db / 10.0);
}

// Shannon rate r = b * log2(1 + g*p / (b*N0)) in bits/second; zero iff p = 0.
inline double data_rate(const ResourceAssignment& a, double gain, const ChannelParams& ch) {
    if (a.power_w <= 0.0) return 0.0;
    const double snr = gain * a.power_w / (ch.bandwidth_hz * ch.noise_density_w_hz);
    return ch.bandwidth_hz * std::log2(1.0 + snr);
}

// Upload time for `size_bits` at rate r; +infinity sentinel when the worker
// cannot transmit (r = 0).
inline double transmission_time(double size_bits, double rate) {
    if (rate <= 0.0) return kInfiniteTime;
    return size_bits / rate;
}

// Transmit energy m*p / r(p). Zero by convention for an excluded worker
// (p = 0); equals transmission_time * p otherwise.
inline double transmission_energy(const ResourceAssignment& a, double size_bits, double gain,
                                  const ChannelParams& ch) {
    if (a.power_w <= 0.0) return 0.0;
    return transmission_time(size_bits, data_rate(a, gain, ch)) * a.power_w;
}

// Local training time I * alpha * D / (c * f); zero when no iterations run,
// +infinity sentinel for a stalled worker (f = 0 with work pending).
inline double computation_time(const ResourceAssignment& a, double local_iterations,
                               const ModelProfile& profile, const WorkerSpec& w) {
    if (local_iterations <= 0.0) return 0.0;
    if (a.frequency_hz <= 0.0) return kInfiniteTime;
    return local_iterations * profile.flops_per_sample * static_cast<double>(w.samples) /
           (w.flops_per_cycle * a.frequency_hz);
}

// Local training energy ς * I * alpha * D * f^2 / c. Quadratic in f, linear in
// each of I, D, ς, alpha and 1/c.
inline double computation_energy(const ResourceAssignment& a, double local_iterations,
                                 const ModelProfile& profile, const WorkerSpec& w) {
    return w.capacitance * local_iterations * profile.flops_per_sample *
           static_cast<double>(w.samples) * a.frequency_hz * a.frequency_hz / w.flops_per_cycle;
}

// Indicator gating local training on transmit power: 1 iff p > 0.
inline int omega(const ResourceAssignment& a) { return a.power_w > 0.0 ? 1 : 0; }

// A worker takes part in a round only with both a CPU share and transmit
// power; anything else contributes neither energy nor a model update.
inline bool participates(const ResourceAssignment& a) {
    return a.frequency_hz > 0.0 && a.power_w > 0.0;
}

struct WorkerRound {
    bool participates = false;
    double computation_time_s = 0.0;
    double transmission_time_s = 0.0;
    double computation_energy_j = 0.0;
    double transmission_energy_j = 0.0;
    double total_energy_j = 0.0;   // E^C * Omega + E^T
    bool violated = false;         // participating and tau + tr >= H
    double wasted_energy_j = 0.0;  // full energy of a violated worker
};

struct RoundOutcome {
    std::vector<WorkerRound> workers;
    double total_energy_j = 0.0;
    double computation_energy_j = 0.0;
    double transmission_energy_j = 0.0;
    double wasted_energy_j = 0.0;
    int violations = 0;      // deadline misses among participants
    bool idle_round = false; // no participating worker contributes CPU time
    double span_s = 0.0;     // max tau + tr over participants, unclipped
};

// Evaluates one synchronized round under deadline H. A participating worker is
// violated when tau + tr >= H; its whole energy is then wasted. Workers with
// f = 0 or p = 0 are excluded entirely.
inline RoundOutcome round_outcome(std::span<const ResourceAssignment> assignments,
                                  std::span<const int> iterations,
                                  std::span<const WorkerSpec> workers,
                                  std::span<const double> gains, const ChannelParams& ch,
                                  const ModelProfile& profile, double deadline_s) {
    if (assignments.size() != workers.size() || iterations.size() != workers.size() ||
        gains.size() != workers.size())
        throw std::invalid_argument("round_outcome: assignments, iterations, gains and workers "
                                    "must have equal lengths");

    RoundOutcome out;
    out.workers.resize(workers.size());
    double participating_frequency = 0.0;
    for (std::size_t k = 0; k < workers.size(); ++k) {
        WorkerRound& wr = out.workers[k];
        const ResourceAssignment& a = assignments[k];
        if (!participates(a)) continue;

        wr.participates = true;
        participating_frequency += a.frequency_hz;
        wr.computation_time_s = computation_time(a, iterations[k], profile, workers[k]);
        wr.transmission_time_s = transmission_time(profile.size_bits, data_rate(a, gains[k], ch));
        wr.computation_energy_j =
            computation_energy(a, iterations[k], profile, workers[k]) * omega(a);
        wr.transmission_energy_j = transmission_energy(a, profile.size_bits, gains[k], ch);
        wr.total_energy_j = wr.computation_energy_j + wr.transmission_energy_j;
        const double elapsed = wr.computation_time_s + wr.transmission_time_s;
        wr.violated = elapsed >= deadline_s;
        if (wr.violated) wr.wasted_energy_j = wr.total_energy_j;

        out.total_energy_j += wr.total_energy_j;
        out.computation_energy_j += wr.computation_energy_j;
        out.transmission_energy_j += wr.transmission_energy_j;
        out.wasted_energy_j += wr.wasted_energy_j;
        out.violations += wr.violated ? 1 : 0;
        if (elapsed > out.span_s) out.span_s = elapsed;
    }
    out.idle_round = participating_frequency <= 0.0;
    return out;
}

}  // namespace fedga
