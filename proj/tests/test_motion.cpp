#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "supergrowth/motion.hpp"
#include "supergrowth/stats.hpp"

using namespace supergrowth;

namespace {

// P(|B_s| < a for s <= t) from 0, eigenfunction series.
double stay_probability(double a, double t) {
    double s = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 2.0 * k + 1.0;
        s += (k % 2 ? -1.0 : 1.0) * 4.0 / (std::numbers::pi * m) *
             std::exp(-m * m * std::numbers::pi * std::numbers::pi * t / (8.0 * a * a));
    }
    return s;
}

}  // namespace

TEST(BetaIntegral, AbsoluteValueMean) {
    // E int_0^1 |B_s| ds = int_0^1 sqrt(2 s / pi) ds = (2/3) sqrt(2/pi).
    const auto s = sample_beta_integral(1.0, 1.0, 1e-3, 40000, 1, 0);
    const auto ms = stats::mean_stderr(s);
    EXPECT_NEAR(ms.mean, 2.0 / 3.0 * std::sqrt(2.0 / std::numbers::pi), 4.0 * ms.stderr_);
}

TEST(BetaIntegral, SquareMean) {
    const auto s = sample_beta_integral(2.0, 2.0, 1e-2, 40000, 2, 0);
    const auto ms = stats::mean_stderr(s);
    EXPECT_NEAR(ms.mean, 2.0, 4.0 * ms.stderr_);  // int_0^2 s ds
}

TEST(BetaIntegral, SignedVarianceScalesAsCube) {
    const auto s = sample_beta_integral(1.0, 2.0, 1e-2, 100000, 3, 0, BrownianFunctional::Signed);
    const auto ms = stats::mean_stderr(s);
    EXPECT_NEAR(ms.mean, 0.0, 4.0 * ms.stderr_);
    EXPECT_NEAR(ms.variance / (8.0 / 3.0), 1.0, 0.03);
}

TEST(BetaIntegral, RejectsBadArguments) {
    EXPECT_THROW(sample_beta_integral(1.0, 1.0, 0.0, 10, 1), ParameterError);
    EXPECT_THROW(sample_beta_integral(1.0, 1.0, 2.0, 10, 1), ParameterError);
}

TEST(Path, ConstantBetaIntegralIsExact) {
    ModelSpec m;
    m.beta = coef::Constant{1.7};
    Rng rng(1, 0);
    const auto p = simulate_path(m, 0.3, 1.25, 0.01, rng);
    EXPECT_TRUE(p.alive);
    EXPECT_NEAR(p.beta_integral, 1.7 * 1.25, 1e-12);
    EXPECT_DOUBLE_EQ(p.time, 1.25);
}

TEST(Path, OrnsteinUhlenbeckMoments) {
    ModelSpec m;
    m.drift = drift::Linear{-1.0};
    const double t = 1.0, x0 = 2.0;
    std::vector<double> x(20000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Rng rng(4, {i});
        x[i] = simulate_path(m, x0, t, 1e-3, rng).position[0];
    }
    const auto ms = stats::mean_stderr(x);
    EXPECT_NEAR(ms.mean, x0 * std::exp(-t), 4.0 * ms.stderr_ + 2e-3);
    EXPECT_NEAR(ms.variance, (1.0 - std::exp(-2.0 * t)) / 2.0, 0.02);
}

TEST(Path, MatrixDiffusionCovariance) {
    ModelSpec m;
    m.dim = 2;
    m.diffusion = diffusion::ConstantMatrix{{2.0, 0.6, 0.6, 1.0}};
    const std::vector<double> x0{0.0, 0.0};
    double sxx = 0, sxy = 0, syy = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        Rng rng(6, {static_cast<std::uint64_t>(i)});
        const auto p = simulate_path(m, x0, 1.0, 0.1, rng);
        sxx += p.position[0] * p.position[0];
        sxy += p.position[0] * p.position[1];
        syy += p.position[1] * p.position[1];
    }
    EXPECT_NEAR(sxx / n, 2.0, 0.06);
    EXPECT_NEAR(sxy / n, 0.6, 0.03);
    EXPECT_NEAR(syy / n, 1.0, 0.03);
}

TEST(Killing, MatchesSeriesWithDiscreteMonitoringShift) {
    // Discrete monitoring at step dt behaves like a barrier moved out by 0.5826 sqrt(dt).
    ModelSpec m;
    m.domain = domain::Interval{-1.0, 1.0};
    const double dt = 1e-3, t = 0.5;
    const double killed = killed_fraction(m, 0.0, t, dt, 40000, 8);
    const double a = 1.0 + 0.5826 * std::sqrt(dt);
    const double p = 1.0 - stay_probability(a, t);
    EXPECT_NEAR(killed, p, 4.0 * std::sqrt(p * (1 - p) / 40000) + 2e-3);
}

TEST(Killing, StartOutsideDomainIsRejected) {
    ModelSpec m;
    m.domain = domain::Interval{-1.0, 1.0};
    Rng rng(1, 0);
    EXPECT_THROW(simulate_path(m, 2.0, 1.0, 0.01, rng), DomainError);
}
