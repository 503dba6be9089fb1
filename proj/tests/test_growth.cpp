#include <gtest/gtest.h>

#include <cmath>

#include "supergrowth/growth.hpp"

using namespace supergrowth;

namespace {

StatisticSeries synthetic(const std::function<double(double)>& log_mass, double horizon, double step,
                          std::uint64_t replicate = 0) {
    StatisticSeries s;
    s.replicate = replicate;
    for (const double t : record_grid(horizon, step, false)) {
        StatRecord r;
        r.t = t;
        r.total_mass = std::exp(log_mass(t));
        s.records.push_back(r);
    }
    return s;
}

ModelSpec constant_model(double beta, double alpha) {
    ModelSpec m;
    m.beta = coef::Constant{beta};
    m.alpha = coef::Constant{alpha};
    return m;
}

double bump(double x) { return evaluate(coef::Bump{1.0, 1.0, 0.0}, x); }

}  // namespace

TEST(GrowthFit, RecoversPowerExponent) {
    std::vector<StatisticSeries> runs;
    for (int i = 0; i < 3; ++i)
        runs.push_back(synthetic([i](double t) { return t + 2.0 * std::pow(t, 3.0) + 0.1 * i; }, 3.0, 0.05));
    GrowthFitOptions o;
    o.known_rate = 1.0;
    const auto f = growth_fit(runs, GrowthLaw::PowerExp, o);
    EXPECT_NEAR(f.q, 3.0, 1e-4);
    EXPECT_NEAR(f.K, 2.0, 1e-3);
    EXPECT_EQ(f.replicates_used, 3u);
    EXPECT_GT(f.t_lo, 0.0);
}

TEST(GrowthFit, RecoversDoubleExponentialRate) {
    std::vector<StatisticSeries> runs{synthetic([](double t) { return std::exp(2.0 * t - 0.5); }, 3.0, 0.05)};
    const auto f = growth_fit(runs, GrowthLaw::DoubleExp);
    EXPECT_NEAR(f.r, 2.0, 1e-10);
}

TEST(GrowthFit, InvariantUnderMassScaling) {
    // Multiplying every mass by a constant shifts log m; q and K are unchanged.
    auto base = [](double t) { return 1.5 * std::pow(t, 2.5); };
    std::vector<StatisticSeries> a{synthetic(base, 4.0, 0.05)};
    std::vector<StatisticSeries> b{synthetic([&](double t) { return base(t) + std::log(40.0); }, 4.0, 0.05)};
    GrowthFitOptions o;
    o.threshold = 1.0;
    const auto fa = growth_fit(a, GrowthLaw::PowerExp, o);
    const auto fb = growth_fit(b, GrowthLaw::PowerExp, o);
    EXPECT_NEAR(fa.q, fb.q, 1e-3);
    EXPECT_NEAR(fa.K, fb.K, 1e-3);
}

TEST(GrowthFit, TimeRescalingScalesKOnly) {
    // m(c t) has the same q and K multiplied by c^q.
    const double c = 1.5, q = 2.0;
    std::vector<StatisticSeries> a{synthetic([&](double t) { return std::pow(t, q); }, 4.0, 0.02)};
    std::vector<StatisticSeries> b{synthetic([&](double t) { return std::pow(c * t, q); }, 4.0, 0.02)};
    GrowthFitOptions o;
    o.threshold = 1.0;
    const auto fa = growth_fit(a, GrowthLaw::PowerExp, o);
    const auto fb = growth_fit(b, GrowthLaw::PowerExp, o);
    EXPECT_NEAR(fb.q, fa.q, 1e-3);
    EXPECT_NEAR(fb.K / fa.K, std::pow(c, q), 1e-2);
}

TEST(GrowthFit, FixedExponent) {
    std::vector<StatisticSeries> runs{synthetic([](double t) { return 3.0 * t * t; }, 3.0, 0.05)};
    GrowthFitOptions o;
    o.q_fixed = 2.0;
    const auto f = growth_fit(runs, GrowthLaw::PowerExp, o);
    EXPECT_DOUBLE_EQ(f.q, 2.0);
    EXPECT_NEAR(f.K, 3.0, 1e-9);
}

TEST(GrowthFit, TooFewRecordsThrows) {
    std::vector<StatisticSeries> runs{synthetic([](double t) { return t; }, 3.0, 0.05)};
    EXPECT_THROW(growth_fit(runs, GrowthLaw::PowerExp), InsufficientData);
}

TEST(GrowthFit, CountsCappedReplicates) {
    auto s = synthetic([](double t) { return t * t * t; }, 3.0, 0.05);
    s.caps_hit = true;
    std::vector<StatisticSeries> runs{s, synthetic([](double t) { return t * t * t; }, 3.0, 0.05)};
    const auto f = growth_fit(runs, GrowthLaw::PowerExp);
    EXPECT_EQ(f.replicates_capped, 1u);
    EXPECT_EQ(f.replicates_used, 2u);
}

TEST(Pgpe, ConstantRateCrossoverAtBeta) {
    const std::vector<double> grid{0.5, 0.9, 1.1, 1.5};
    const auto e = pgpe_estimate(constant_model(1.0, 1.0), 1.0, bump, {-1.0, 1.0}, grid, 8.0);
    EXPECT_LE(e.lambda_lo, 1.0);
    EXPECT_GE(e.lambda_hi, 1.0);
    EXPECT_EQ(e.lambda_lo, 0.9);
    EXPECT_EQ(e.lambda_hi, 1.1);
}

TEST(Pgpe, RefiningTheGridNarrowsTheBracket) {
    const auto m = constant_model(1.0, 1.0);
    const std::vector<double> coarse{0.25, 0.5, 1.5, 2.0};
    const std::vector<double> fine{0.25, 0.5, 0.8, 0.95, 1.05, 1.2, 1.5, 2.0};
    const auto c = pgpe_estimate(m, 1.0, bump, {-1.0, 1.0}, coarse, 8.0);
    const auto f = pgpe_estimate(m, 1.0, bump, {-1.0, 1.0}, fine, 8.0);
    EXPECT_GE(f.lambda_lo, c.lambda_lo);
    EXPECT_LE(f.lambda_hi, c.lambda_hi);
    EXPECT_LT(f.lambda_hi - f.lambda_lo, c.lambda_hi - c.lambda_lo);
}

TEST(Pgpe, ZeroRateHasNonPositiveEigenvalue) {
    const std::vector<double> grid{-0.1, -0.01, 0.01, 0.1};
    const auto e = pgpe_estimate(ModelSpec{}, 2.0, bump, {-1.0, 1.0}, grid, 6.0);
    EXPECT_LE(e.lambda_hi, 0.01);
}

TEST(Pgpe, RejectsBadGrids) {
    const std::vector<double> bad{1.0, 0.5};
    EXPECT_THROW(pgpe_estimate(ModelSpec{}, 1.0, bump, {-1.0, 1.0}, bad, 2.0), ParameterError);
    const std::vector<double> ok{1.0};
    EXPECT_THROW(pgpe_estimate(ModelSpec{}, 0.5, bump, {-1.0, 1.0}, ok, 2.0), ParameterError);
}

TEST(PgpeBound, ExplicitValues) {
    const auto b = pgpe_upper_bound(1.0, 3.0);
    EXPECT_DOUBLE_EQ(b.p, 3.0);
    EXPECT_NEAR(b.c1, 2.0, 1e-12);
    EXPECT_NEAR(b.bound, std::exp(4.0), 1e-9);
    const auto h = pgpe_upper_bound(0.5, 3.0);
    EXPECT_NEAR(h.p, 5.0 / 3.0, 1e-12);
    EXPECT_THROW(pgpe_upper_bound(2.0, 3.0), DomainError);
    EXPECT_THROW(pgpe_upper_bound(0.0, 3.0), ParameterError);
}

TEST(Supermartingale, FamilyHoldsAboveTheGrowthRate) {
    const std::vector<double> tg{0.0, 0.5, 1.0};
    const auto fam = supermartingale_family(constant_model(2.0, 1.0), bump, Theta{3.0, 1.0, 0.0}, tg, 20.0);
    EXPECT_TRUE(fam.assumption_holds) << fam.max_violation;
    ASSERT_EQ(fam.f.size(), 3u);
    // f^{(-t)} = e^{-3t} f^{(0)} for theta linear in t.
    EXPECT_NEAR(fam.f[2].at(0.0), std::exp(-3.0) * fam.f[0].at(0.0), 1e-6 * fam.f[0].at(0.0));
}

TEST(Supermartingale, CubicWeightForAbsoluteRate) {
    // beta = |x| grows like e^{t^3/2} at most; theta = t^3/2 + eps t keeps the family finite and ordered.
    ModelSpec m;
    m.beta = coef::Power{0.0, 1.0, 1.0};
    const std::vector<double> tg{0.0, 0.5, 1.0};
    SupermartingaleOptions o;
    o.R = 15.0;
    const auto fam = supermartingale_family(m, bump, Theta{0.5, 3.0, 0.1}, tg, 6.0, o);
    EXPECT_TRUE(fam.assumption_holds) << fam.max_violation;
    for (const auto& f : fam.f) EXPECT_TRUE(std::isfinite(f.at(0.0)));
}

TEST(Supermartingale, MonteCarloMeansDoNotIncrease) {
    const std::vector<double> tg{0.0, 0.5, 1.0};
    const auto m = constant_model(2.0, 2.0);
    const auto fam = supermartingale_family(m, bump, Theta{3.0, 1.0, 0.0}, tg, 20.0);
    const auto mc = supermartingale_mc(m, fam, 20, 400, 3);
    EXPECT_TRUE(mc.nonincreasing);
    EXPECT_GT(mc.mean[0], mc.mean[2]);
}

TEST(LocalGrowth, ProbeBelowAndAboveTheRate) {
    LocalGrowthOptions o;
    o.n = 1;
    o.horizon = 3.0;
    o.caps.max_particles = 200'000;
    const std::vector<double> probes{0.0, 6.0};
    const auto r = local_growth_experiment(constant_model(2.0, 2.0), Window{-1.0, 1.0}, probes, 20, 4, o);
    ASSERT_GT(r.surviving, 0u);
    EXPECT_GT(r.exceed_fraction[0], 0.5);
    EXPECT_EQ(r.exceed_fraction[1], 0.0);
}

TEST(Spread, ConstantRateRunsAreSmall) {
    SpreadOptions o;
    o.caps.max_particles = 100'000;
    const auto r = spread_check(constant_model(1.0, 1.0), 3.0, 30, 5, o);
    ASSERT_GT(r.surviving, 0u);
    EXPECT_EQ(r.per_replicate.size(), r.surviving);
    EXPECT_LT(r.p99, 2.0);
    for (std::size_t i = 1; i < r.exceed_fraction.size(); ++i)
        EXPECT_LE(r.exceed_fraction[i], r.exceed_fraction[i - 1]);
}

TEST(Spread, SingleParticleSystemOption) {
    SpreadOptions o;
    o.system = SpreadSystem::SingleParticleBbm;
    o.caps.max_particles = 20'000;
    const auto r = spread_check(constant_model(1.0, 1.0), 2.0, 10, 6, o);
    EXPECT_EQ(r.surviving, 10u);  // pure birth never dies out
}
