#pragma once
/**
 * @file rng.hpp
 * @brief Counter-based random streams (Philox4x32-10) and the variate
 * generators used by the simulators.
 *
 * Every replicate, particle batch or splitting branch draws from its own
 * stream, addressed by (master seed, stream key). Streams are independent of
 * the order in which they are consumed, so results do not depend on the
 * number of worker threads.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace supergrowth {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t key, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          counter_{0u, 0u, static_cast<std::uint32_t>(stream),
                   static_cast<std::uint32_t>(stream >> 32)} {}

    /// Next 128-bit output block; advances the 64-bit block counter.
    Block next_block() {
        Block ctr = counter_;
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        if (++counter_[0] == 0) ++counter_[1];
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::array<std::uint32_t, 2> key_;
    Block counter_;
};

/// SplitMix64 finalizer; used to fold stream keys into a 64-bit stream id.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_id(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6A09E667F3BCC908ull;
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
    return h;
}

namespace detail {

// Ziggurat tables for the standard normal (128 layers, Doornik's ZIGNOR).
struct ZigguratTables {
    static constexpr int kLayers = 128;
    static constexpr double kR = 3.442619855899;
    static constexpr double kV = 9.91256303526217e-3;

    std::array<double, kLayers + 1> x{};
    std::array<double, kLayers> ratio{};

    ZigguratTables() {
        const double f = std::exp(-0.5 * kR * kR);
        x[0] = kV / f;
        x[1] = kR;
        x[kLayers] = 0.0;
        for (int i = 2; i < kLayers; ++i)
            x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1])));
        for (int i = 0; i < kLayers; ++i) ratio[i] = x[i + 1] / x[i];
    }
};

inline const ZigguratTables& ziggurat() {
    static const ZigguratTables tables;
    return tables;
}

}  // namespace detail

/**
 * @brief Random stream with the variates needed by the simulators.
 *
 * All generators are implemented here (not via <random> distributions) so
 * that outputs are bit-identical across standard library implementations.
 */
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
        : engine_(seed, stream_id(keys)) {}

    std::uint64_t next_u64() {
        if (pos_ == 2) {
            block_ = engine_.next_block();
            pos_ = 0;
        }
        const std::uint64_t v = (std::uint64_t{block_[2 * pos_ + 1]} << 32) | block_[2 * pos_];
        ++pos_;
        return v;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        const auto& z = detail::ziggurat();
        for (;;) {
            const std::uint64_t bits = next_u64();
            const int layer = static_cast<int>(bits & 0x7F);
            const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
            if (std::abs(u) < z.ratio[layer]) return u * z.x[layer];
            if (layer == 0) {
                double xt, yt;
                do {
                    xt = -std::log(uniform_pos()) / detail::ZigguratTables::kR;
                    yt = -std::log(uniform_pos());
                } while (yt + yt < xt * xt);
                return u < 0 ? -(detail::ZigguratTables::kR + xt) : detail::ZigguratTables::kR + xt;
            }
            const double x = u * z.x[layer];
            const double f0 = std::exp(-0.5 * (z.x[layer] * z.x[layer] - x * x));
            const double f1 = std::exp(-0.5 * (z.x[layer + 1] * z.x[layer + 1] - x * x));
            if (f1 + uniform() * (f0 - f1) < 1.0) return x;
        }
    }

    double exponential() { return -std::log(uniform_pos()); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Poisson variate: inversion for small means, PTRS (Hormann 1993) otherwise.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            double prod = uniform_pos();
            std::uint64_t k = 0;
            while (prod > limit) {
                prod *= uniform_pos();
                ++k;
            }
            return k;
        }
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform_pos();
            const double us = 0.5 - std::abs(u);
            const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
                -mean + k * loglam - std::lgamma(k + 1.0))
                return static_cast<std::uint64_t>(k);
        }
    }

    /**
     * @brief Geometric variate on {1, 2, ...}: P(k) = (1 - q) q^(k-1).
     * @param log_q log of the continuation probability q (<= 0).
     */
    std::uint64_t geometric_from_log(double log_q) {
        if (log_q == -std::numeric_limits<double>::infinity()) return 1;
        if (log_q >= 0.0) return std::numeric_limits<std::uint64_t>::max();
        const double k = std::floor(std::log(uniform_pos()) / log_q);
        if (k >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
        return 1 + static_cast<std::uint64_t>(k);
    }

    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    Philox4x32 engine_;
    Philox4x32::Block block_{};
    int pos_ = 2;
};

}  // namespace supergrowth
