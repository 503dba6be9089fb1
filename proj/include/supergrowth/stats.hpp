#pragma once
/**
 * @file stats.hpp
 * @brief Order-independent reductions, two-sample tests, least squares and
 * the exact Poisson distribution helpers used as oracles.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "supergrowth/rng.hpp"

namespace supergrowth::stats {

/// Pairwise (cascade) summation; result depends only on the element order.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

inline MeanStderr mean_stderr(std::span<const double> v) {
    MeanStderr r;
    r.count = v.size();
    if (v.empty()) return r;
    r.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - r.mean) * (v[i] - r.mean);
        r.variance = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
        r.stderr_ = std::sqrt(r.variance / static_cast<double>(v.size()));
    }
    return r;
}

/// Linear-interpolated empirical quantile, q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Kolmogorov limiting distribution tail: P(K > lambda).
inline double kolmogorov_tail(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the Stephens small-sample correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    return {d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d)};
}

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t bins = 0;
    std::vector<std::uint64_t> bin_upper;  ///< inclusive upper count per bin (last bin open)
};

namespace detail {

inline double chi_square_two_sample(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                    std::span<const std::uint64_t> edges) {
    const std::size_t nbins = edges.size();
    std::vector<double> ca(nbins, 0.0), cb(nbins, 0.0);
    auto bin_of = [&](std::uint64_t v) {
        return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end() - 1, v) - edges.begin());
    };
    for (auto v : a) ca[bin_of(v)] += 1.0;
    for (auto v : b) cb[bin_of(v)] += 1.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ka = std::sqrt(nb / na);
    const double kb = std::sqrt(na / nb);
    double chi = 0.0;
    for (std::size_t k = 0; k < nbins; ++k) {
        const double tot = ca[k] + cb[k];
        if (tot > 0.0) chi += (ka * ca[k] - kb * cb[k]) * (ka * ca[k] - kb * cb[k]) / tot;
    }
    return chi;
}

}  // namespace detail

/**
 * @brief Two-sample chi-square distance on count data with a permutation
 * p-value.
 *
 * Bins are consecutive count values, merged from the left until each pooled
 * bin holds at least @p min_pooled observations; the tail is one open bin.
 */
inline ChiSquareResult chi_square_permutation(const std::vector<std::uint64_t>& a,
                                              const std::vector<std::uint64_t>& b, int permutations,
                                              std::uint64_t seed, double min_pooled = 10.0) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chi-square test needs nonempty samples");
    std::vector<std::uint64_t> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());

    ChiSquareResult r;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && (static_cast<double>(j - i) < min_pooled || pooled[j] == pooled[j - 1])) ++j;
        const std::size_t remaining = pooled.size() - j;
        if (static_cast<double>(remaining) < min_pooled) j = pooled.size();
        r.bin_upper.push_back(pooled[j - 1]);
        i = j;
    }
    r.bin_upper.back() = std::numeric_limits<std::uint64_t>::max();
    r.bins = r.bin_upper.size();
    r.statistic = detail::chi_square_two_sample(a, b, r.bin_upper);

    Rng rng(seed, {0x5045524Dull});
    std::vector<std::uint64_t> perm(pooled.begin(), pooled.end());
    std::copy(a.begin(), a.end(), perm.begin());
    std::copy(b.begin(), b.end(), perm.begin() + static_cast<std::ptrdiff_t>(a.size()));
    int exceed = 0;
    for (int p = 0; p < permutations; ++p) {
        for (std::size_t k = perm.size() - 1; k > 0; --k) std::swap(perm[k], perm[rng.index(k + 1)]);
        const double chi = detail::chi_square_two_sample(
            std::span<const std::uint64_t>(perm.data(), a.size()),
            std::span<const std::uint64_t>(perm.data() + a.size(), b.size()), r.bin_upper);
        if (chi >= r.statistic) ++exceed;
    }
    r.p_value = (1.0 + exceed) / (1.0 + permutations);
    return r;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_norm = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = pairwise_sum(x) / n;
    const double my = pairwise_sum(y) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        rss += e * e;
    }
    f.residual_norm = std::sqrt(rss);
    if (x.size() > 2) f.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
    return f;
}

/// P(Y <= y) for Y ~ Poisson(lambda), by direct summation in log space.
inline double poisson_cdf(double lambda, double y) {
    if (y < 0.0) return 0.0;
    const auto kmax = static_cast<long>(std::floor(y));
    double s = 0.0;
    for (long j = 0; j <= kmax; ++j)
        s += std::exp(-lambda + static_cast<double>(j) * std::log(lambda) - std::lgamma(static_cast<double>(j) + 1.0));
    return std::min(s, 1.0);
}

/// P(Y >= y) for Y ~ Poisson(lambda), summing the upper tail directly.
inline double poisson_upper_tail(double lambda, double y) {
    const auto kmin = static_cast<long>(std::ceil(std::max(y, 0.0)));
    double s = 0.0;
    for (long j = kmin;; ++j) {
        const double term =
            std::exp(-lambda + static_cast<double>(j) * std::log(lambda) - std::lgamma(static_cast<double>(j) + 1.0));
        s += term;
        if (static_cast<double>(j) > lambda && term < 1e-20 * std::max(s, 1e-300)) break;
        if (j > kmin + 100000) break;
    }
    return std::min(s, 1.0);
}

/// Two-sided normal-approximation z score for an observed binomial count.
inline double binomial_z(std::uint64_t successes, std::uint64_t trials, double p) {
    const double n = static_cast<double>(trials);
    return (static_cast<double>(successes) - n * p) / std::sqrt(n * p * (1.0 - p));
}

}  // namespace supergrowth::stats
