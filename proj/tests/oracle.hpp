#pragma once

#include <cmath>

// Independent long-double reimplementation of the energy/time/rate formulas,
// written straight from their definitions and kept free of any production
// header. The unit and acceptance suites check the double-precision
// implementation against these.

namespace oracle {

inline long double channel_gain(long double distance_m, long double intercept_db,
                                long double slope_db) {
    const long double pathloss = intercept_db + slope_db * std::log10(distance_m / 1000.0L);
    return std::exp(-pathloss / 10.0L * std::log(10.0L));
}

inline long double data_rate(long double power_w, long double gain, long double bandwidth_hz,
                             long double noise_w_hz) {
    if (power_w <= 0.0L) return 0.0L;
    const long double snr = gain * power_w / (bandwidth_hz * noise_w_hz);
    return bandwidth_hz * (std::log1p(snr) / std::log(2.0L));
}

inline long double transmission_time(long double size_bits, long double rate) {
    return size_bits / rate;
}

inline long double transmission_energy(long double power_w, long double size_bits,
                                       long double gain, long double bandwidth_hz,
                                       long double noise_w_hz) {
    if (power_w <= 0.0L) return 0.0L;
    return size_bits * power_w / data_rate(power_w, gain, bandwidth_hz, noise_w_hz);
}

inline long double computation_time(long double iterations, long double flops_per_sample,
                                    long double samples, long double flops_per_cycle,
                                    long double frequency_hz) {
    if (iterations <= 0.0L) return 0.0L;
    return iterations * flops_per_sample * samples / (flops_per_cycle * frequency_hz);
}

inline long double computation_energy(long double capacitance, long double iterations,
                                      long double flops_per_sample, long double samples,
                                      long double frequency_hz, long double flops_per_cycle) {
    return capacitance * iterations * flops_per_sample * samples * frequency_hz * frequency_hz /
           flops_per_cycle;
}

}  // namespace oracle
