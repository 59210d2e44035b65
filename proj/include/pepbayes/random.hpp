#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pepbayes/error.hpp"

// Self-contained deterministic randomness. Everything downstream of a
// 64-bit seed is reproducible bit-for-bit across platforms, which the
// std::<random> distributions do not guarantee. Streams are derived from
// (seed, name, counters) so independent pipeline stages never share state.

namespace pepbayes::rng {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// xoshiro256** generator with helper draws used throughout the library.
class Stream {
public:
    explicit Stream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double u01_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (two draws per call, no cached spare).
    double normal(double mean = 0.0, double sd = 1.0) {
        const double u = u01_open();
        const double v = u01();
        const double r = std::sqrt(-2.0 * std::log(u));
        return mean + sd * r * std::cos(6.283185307179586476925286766559 * v);
    }

    /// Uniform integer in [0, n). Unbiased (Lemire rejection).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw Error("uniform_int: empty range");
        __uint128_t m = static_cast<__uint128_t>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = static_cast<__uint128_t>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Index drawn proportionally to nonnegative weights (need not sum to 1).
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw Error("categorical: weights sum to zero");
        const double target = u01() * total;
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            cum += weights[i];
            if (target < cum) return i;
        }
        return weights.size() - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

/// Derive an independent stream from a master seed, a stage name, and up to
/// two counters (sweep index, item index).
inline Stream derive(std::uint64_t seed, std::string_view name,
                     std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t state = seed;
    state = detail::splitmix64(state) ^ detail::fnv1a(name);
    state = detail::splitmix64(state) ^ a;
    state = detail::splitmix64(state) ^ b;
    return Stream(detail::splitmix64(state));
}

} // namespace pepbayes::rng
