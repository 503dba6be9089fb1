#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "supergrowth/schroedinger.hpp"

using namespace supergrowth;

TEST(FeynmanKac, ZeroPotentialGivesOne) {
    ModelSpec m;
    const auto e = fk_estimate(m, coef::Constant{1.0}, 0.0, 1.0, 1e-2, 1000, 1);
    EXPECT_DOUBLE_EQ(e.mean, 1.0);
    EXPECT_DOUBLE_EQ(e.stderr_, 0.0);
    EXPECT_EQ(e.truncation_fraction, 0.0);
}

TEST(FeynmanKac, ConstantPotentialIsExponential) {
    ModelSpec m;
    m.beta = coef::Constant{0.8};
    const auto e = fk_estimate(m, coef::Constant{2.0}, 0.5, 1.5, 1e-2, 500, 2);
    EXPECT_NEAR(e.mean, 2.0 * std::exp(1.2), 1e-12);
}

TEST(FeynmanKac, IndicatorIsGaussianProbability) {
    ModelSpec m;
    const double t = 2.0;
    const auto e = fk_estimate(m, coef::Indicator{1.0, 0.5, 2.0}, 0.0, t, 1e-2, 50000, 3);
    const auto cdf = [&](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * t)); };
    EXPECT_NEAR(e.mean, cdf(2.0) - cdf(0.5), 4.0 * e.stderr_);
}

TEST(FeynmanKac, SignedLinearPotentialLogNormal) {
    // E exp(s int_0^t B) = exp(s^2 t^3 / 6).
    ModelSpec m;
    const double s = 0.7, t = 1.0;
    m.beta = coef::SignedLinear{s};
    const auto e = fk_estimate(m, coef::Constant{1.0}, 0.0, t, 1e-3, 40000, 4);
    EXPECT_NEAR(e.mean, std::exp(s * s * t * t * t / 6.0), 4.0 * e.stderr_);
}

TEST(FeynmanKac, KilledPathsContributeZero) {
    ModelSpec m;
    m.domain = domain::Interval{-0.1, 0.1};
    const auto e = fk_estimate(m, coef::Constant{1.0}, 0.0, 5.0, 1e-2, 2000, 5);
    EXPECT_LT(e.mean, 1e-3);
}

TEST(FeynmanKac, WeightCapReportsTruncation) {
    ModelSpec m;
    m.beta = coef::Constant{3.0};
    FkOptions o;
    o.weight_cap = 10.0;
    const auto e = fk_estimate(m, coef::Constant{1.0}, 0.0, 1.0, 1e-2, 100, 6, o);
    EXPECT_DOUBLE_EQ(e.truncation_fraction, 1.0);
    EXPECT_TRUE(e.divergence_suspected);
    EXPECT_DOUBLE_EQ(e.mean, 10.0);
}

TEST(FeynmanKac, WorkerCountDoesNotChangeEstimate) {
    ModelSpec m;
    m.beta = coef::Power{0.0, 1.0, 1.0};
    FkOptions a, b;
    a.workers = 1;
    b.workers = 4;
    const auto ea = fk_estimate(m, coef::Constant{1.0}, 0.0, 1.0, 1e-2, 3000, 7, a);
    const auto eb = fk_estimate(m, coef::Constant{1.0}, 0.0, 1.0, 1e-2, 3000, 7, b);
    EXPECT_EQ(ea.mean, eb.mean);
    EXPECT_EQ(ea.stderr_, eb.stderr_);
}

TEST(FeynmanKac, RejectsBadArguments) {
    ModelSpec m;
    EXPECT_THROW(fk_estimate(m, coef::Constant{1.0}, 0.0, -1.0, 1e-2, 10, 1), ParameterError);
    EXPECT_THROW(fk_estimate(m, coef::Constant{1.0}, 0.0, 1.0, 1e-2, 0, 1), ParameterError);
    m.domain = domain::Interval{-1.0, 1.0};
    EXPECT_THROW(fk_estimate(m, coef::Constant{1.0}, 3.0, 1.0, 1e-2, 10, 1), DomainError);
}

TEST(Tails, SplittingAgreesWithNaiveAtModerateThreshold) {
    TailOptions o;
    o.dt = 1e-2;
    o.batches = 10;
    const auto naive = tail_probability(1.0, 1.5, 200000, TailMethod::Naive, 1, o);
    const auto split = tail_probability(1.0, 1.5, 20000, TailMethod::Splitting, 2, o);
    ASSERT_GT(naive.prob, 0.0);
    EXPECT_NEAR(split.prob, naive.prob, 4.0 * std::hypot(naive.stderr_, split.stderr_));
}

TEST(Tails, BelowReflectionBound) {
    TailOptions o;
    o.dt = 1e-2;
    for (double K : {1.0, 2.0}) {
        const auto e = tail_probability(1.0, K, 20000, TailMethod::Splitting, 3, o);
        EXPECT_LE(e.prob, reflection_tail_bound(1.0, K));
    }
}

TEST(Tails, ZeroThresholdIsCertain) {
    const auto e = tail_probability(1.0, 0.0, 10, TailMethod::Naive, 1);
    EXPECT_EQ(e.prob, 1.0);
}

TEST(Tails, NaiveUnderflowIsFlagged) {
    TailOptions o;
    o.dt = 1e-2;
    const auto e = tail_probability(1.0, 6.0, 1000, TailMethod::Naive, 1, o);
    EXPECT_TRUE(e.underflow);
    EXPECT_TRUE(std::isinf(e.log_prob));
}

TEST(Schilder, FitRecoversSlopeFromExactData) {
    const std::vector<double> K{2.0, 3.0, 4.0};
    for (double ell : {1.0, 0.5}) {
        std::vector<double> lp;
        for (double k : K) lp.push_back(-0.5 * 3.0 * std::pow(k, 2.0 / ell) + 0.25);
        const auto f = fit_schilder(ell, K, lp);
        EXPECT_NEAR(f.c, 3.0, 1e-10);
    }
}

TEST(Schilder, FitRejectsNonIncreasingThresholds) {
    const std::vector<double> K{2.0, 2.0, 4.0}, lp{-1, -2, -3};
    EXPECT_THROW(fit_schilder(1.0, K, lp), ParameterError);
}
