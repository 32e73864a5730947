#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace fedga {

// All randomness in the project flows through this generator so that runs are
// reproducible bit-for-bit across platforms. <random> distributions are
// implementation-defined, hence the hand-rolled versions below.

// SplitMix64 step (Steele, Lea, Flood). Used for seed expansion and stream
// derivation only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna 2019), seeded through SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 bits of entropy.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool chance(double p) { return uniform() < p; }

    // Unbiased integer in [0, bound) via Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

// FNV-1a over the tag; mixed with the master seed and two indices through
// SplitMix64. Every subsystem (scenario generation, GA operators, online
// runs, toy data) derives its own stream so experiments stay paired when the
// master seed is shared.
inline std::uint64_t substream(std::uint64_t master, std::string_view tag,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    std::uint64_t s = master;
    std::uint64_t out = splitmix64(s);
    s ^= h;
    out ^= splitmix64(s);
    s ^= a + 0x9E3779B97F4A7C15ULL;
    out ^= splitmix64(s);
    s ^= b + 0xD1B54A32D192ED03ULL;
    out ^= splitmix64(s);
    return out;
}

// Fisher-Yates shuffle driven by Rng::below, back-to-front.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace fedga
