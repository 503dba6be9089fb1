#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "supergrowth/parallel.hpp"
#include "supergrowth/rng.hpp"
#include "supergrowth/stats.hpp"

using namespace supergrowth;

TEST(Philox, KnownAnswerZeroKeyZeroCounter) {
    // Reference output of Philox4x32-10 for counter 0 and key 0.
    Philox4x32 p(0, 0);
    const auto b = p.next_block();
    EXPECT_EQ(b[0], 0x6627e8d5u);
    EXPECT_EQ(b[1], 0xe169c58du);
    EXPECT_EQ(b[2], 0xbc57ac4cu);
    EXPECT_EQ(b[3], 0x9b00dbd8u);
}

TEST(Rng, SameKeysSameStream) {
    Rng a(42, {1, 2, 3}), b(42, {1, 2, 3}), c(42, {1, 2, 4}), d(43, {1, 2, 3});
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        EXPECT_NE(va, c.next_u64());
        EXPECT_NE(va, d.next_u64());
    }
}

TEST(Rng, StreamIdDependsOnOrder) {
    EXPECT_NE(stream_id({1, 2}), stream_id({2, 1}));
    EXPECT_NE(stream_id({0}), stream_id({0, 0}));
}

TEST(Rng, UniformRanges) {
    Rng r(7, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        const double v = r.uniform_pos();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(Rng, NormalMoments) {
    Rng r(11, 5);
    const int n = 400000;
    std::vector<double> x(n);
    for (auto& v : x) v = r.normal();
    const auto ms = stats::mean_stderr(x);
    EXPECT_NEAR(ms.mean, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(ms.variance, 1.0, 4.0 * std::sqrt(2.0 / n));
    double tail = 0.0;
    for (double v : x) tail += v > 2.0 ? 1.0 : 0.0;
    const double p = 0.5 * std::erfc(2.0 / std::sqrt(2.0));
    EXPECT_NEAR(tail / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Rng, PoissonMeanAndVariance) {
    for (double mean : {0.3, 4.0, 37.5}) {
        Rng r(3, {static_cast<std::uint64_t>(mean * 10)});
        const int n = 200000;
        std::vector<double> x(n);
        for (auto& v : x) v = static_cast<double>(r.poisson(mean));
        const auto ms = stats::mean_stderr(x);
        EXPECT_NEAR(ms.mean, mean, 5.0 * std::sqrt(mean / n)) << mean;
        EXPECT_NEAR(ms.variance / mean, 1.0, 0.03) << mean;
    }
}

TEST(Rng, GeometricFromLog) {
    // P(N = k) = (1 - q) q^{k-1}; mean 1 / (1 - q).
    const double q = 0.6;
    Rng r(9, 1);
    const int n = 200000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += static_cast<double>(r.geometric_from_log(std::log(q)));
    EXPECT_NEAR(s / n, 1.0 / (1.0 - q), 0.02);
    EXPECT_EQ(r.geometric_from_log(-std::numeric_limits<double>::infinity()), 1u);
}

TEST(Parallel, ResultIndependentOfWorkers) {
    auto run = [](unsigned workers) {
        std::vector<double> v(1000);
        parallel_for(v.size(), workers, [&](std::size_t i) {
            Rng r(5, {i});
            v[i] = r.normal();
        });
        return stats::pairwise_sum(v);
    };
    const double a = run(1);
    EXPECT_EQ(a, run(3));
    EXPECT_EQ(a, run(8));
}

TEST(Stats, PairwiseSumExactOnIntegers) {
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    EXPECT_EQ(stats::pairwise_sum(v), 1000.0 * 1001.0 / 2.0);
}

TEST(Stats, PoissonTailsSumToOne) {
    for (double lambda : {0.5, 3.0, 12.0})
        for (double y : {0.0, 2.0, 7.5})
            EXPECT_NEAR(stats::poisson_cdf(lambda, y) + stats::poisson_upper_tail(lambda, std::floor(y) + 1.0), 1.0,
                        1e-12);
}

TEST(Stats, LineFitRecoversSlope) {
    std::vector<double> x{0, 1, 2, 3, 4}, y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    const auto f = stats::fit_line(x, y);
    EXPECT_NEAR(f.slope, 2.5, 1e-12);
    EXPECT_NEAR(f.intercept, -1.0, 1e-12);
}
