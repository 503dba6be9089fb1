#include <gtest/gtest.h>

#include <cmath>

#include "supergrowth/branching.hpp"
#include "supergrowth/schroedinger.hpp"
#include "supergrowth/stats.hpp"

using namespace supergrowth;

namespace {

ModelSpec constant_beta(double b) {
    ModelSpec m;
    m.beta = coef::Constant{b};
    return m;
}

double final_mass(const BbmResult& r) { return r.series.records.back().total_mass; }

}  // namespace

TEST(Bbm, YuleLawFromOneParticle) {
    // Pure-birth rate b: N_t is geometric with success probability e^{-bt}.
    const double b = 1.0, t = 1.0;
    const auto m = constant_beta(b);
    const auto rec = record_grid(t, 0.5, false);
    const int reps = 4000;
    std::vector<double> n(reps), one(reps);
    for (int i = 0; i < reps; ++i) {
        ParticleRunOptions o;
        o.replicate = static_cast<std::uint64_t>(i);
        n[i] = final_mass(simulate_bbm(m, InitialCondition::fixed_at({0.0}, 1), t, rec, 11, o));
        one[i] = n[i] == 1.0 ? 1.0 : 0.0;
    }
    const auto ms = stats::mean_stderr(n);
    EXPECT_NEAR(ms.mean, std::exp(b * t), 4.0 * ms.stderr_);
    // Var = (1 - p) / p^2 with p = e^{-bt}.
    const double p = std::exp(-b * t);
    EXPECT_NEAR(ms.variance / ((1 - p) / (p * p)), 1.0, 0.15);
    const auto m1 = stats::mean_stderr(one);
    EXPECT_NEAR(m1.mean, p, 4.0 * m1.stderr_);
}

TEST(Bbm, ManyToOneAgainstFeynmanKac) {
    // E Z_t(R) from one particle equals E exp(int_0^t beta(B_s) ds).
    ModelSpec m;
    m.beta = coef::Power{0.0, 1.0, 1.0};
    const double t = 1.0;
    const auto rec = record_grid(t, 0.25, false);
    const int reps = 4000;
    std::vector<double> n(reps);
    for (int i = 0; i < reps; ++i) {
        ParticleRunOptions o;
        o.replicate = static_cast<std::uint64_t>(i);
        n[i] = final_mass(simulate_bbm(m, InitialCondition::fixed_at({0.0}, 1), t, rec, 12, o));
    }
    const auto ms = stats::mean_stderr(n);
    const auto fk = fk_estimate(m, coef::Constant{1.0}, 0.0, t, 1e-3, 100000, 13);
    EXPECT_NEAR(ms.mean, fk.mean, 4.0 * std::hypot(ms.stderr_, fk.stderr_));
}

TEST(Bbm, PoissonStartExtinctionAndMean) {
    const auto m = constant_beta(0.5);
    const auto rec = record_grid(1.0, 1.0, false);
    const int reps = 4000;
    std::vector<double> n(reps), empty(reps);
    for (int i = 0; i < reps; ++i) {
        ParticleRunOptions o;
        o.replicate = static_cast<std::uint64_t>(i);
        n[i] = final_mass(simulate_bbm(m, InitialCondition::poisson_at({0.0}), 1.0, rec, 14, o));
        empty[i] = n[i] == 0.0 ? 1.0 : 0.0;
    }
    const auto ms = stats::mean_stderr(n);
    EXPECT_NEAR(ms.mean, std::exp(0.5), 4.0 * ms.stderr_);
    const auto me = stats::mean_stderr(empty);
    EXPECT_NEAR(me.mean, std::exp(-1.0), 4.0 * me.stderr_);
}

TEST(Bbm, ZeroRateMovesLikeBrownianMotion) {
    ModelSpec m;
    const auto rec = record_grid(2.0, 2.0, false);
    const int reps = 4000;
    std::vector<double> x(reps);
    for (int i = 0; i < reps; ++i) {
        ParticleRunOptions o;
        o.replicate = static_cast<std::uint64_t>(i);
        x[i] = simulate_bbm(m, InitialCondition::fixed_at({0.0}, 1), 2.0, rec, 15, o).series.records[0].rightmost;
    }
    const auto ms = stats::mean_stderr(x);
    EXPECT_NEAR(ms.mean, 0.0, 4.0 * ms.stderr_);
    EXPECT_NEAR(ms.variance, 2.0, 0.15);
}

TEST(Bbm, CouplingIsMonotoneInRate) {
    const auto rec = record_grid(2.0, 0.5, false);
    for (std::uint64_t i = 0; i < 50; ++i) {
        ParticleRunOptions o;
        o.replicate = i;
        const auto a = simulate_bbm(constant_beta(1.0), InitialCondition::fixed_at({0.0}, 1), 2.0, rec, 16, o);
        const auto b = simulate_bbm(constant_beta(2.0), InitialCondition::fixed_at({0.0}, 1), 2.0, rec, 16, o);
        for (std::size_t k = 0; k < rec.size(); ++k)
            EXPECT_LE(a.series.records[k].total_mass, b.series.records[k].total_mass) << i << " " << k;
    }
}

TEST(Bbm, CapStopsTheRunAndTruncatesRecords) {
    ParticleRunOptions o;
    o.caps.max_particles = 500;
    const auto rec = record_grid(10.0, 0.5, false);
    const auto r = simulate_bbm(constant_beta(2.0), InitialCondition::fixed_at({0.0}, 1), 10.0, rec, 17, o);
    EXPECT_TRUE(r.series.caps_hit);
    EXPECT_LT(r.series.cap_time, 10.0);
    EXPECT_LT(r.series.records.size(), rec.size());
    for (const auto& s : r.series.records) EXPECT_LE(s.total_mass, 500.0);
}

TEST(Bbm, SameSeedSameSeries) {
    ModelSpec m;
    m.beta = coef::Power{1.0, 1.0, 1.0};
    const auto rec = record_grid(3.0, 0.1, false);
    ParticleRunOptions o;
    o.replicate = 3;
    const auto a = simulate_bbm(m, InitialCondition::poisson_at({0.0}, 3.0), 3.0, rec, 18, o);
    const auto b = simulate_bbm(m, InitialCondition::poisson_at({0.0}, 3.0), 3.0, rec, 18, o);
    const std::vector<StatisticSeries> sa{a.series}, sb{b.series};
    EXPECT_EQ(series_csv(sa).render(), series_csv(sb).render());
}

TEST(Bbm, KillingAtTheBoundary) {
    ModelSpec m = constant_beta(0.0);
    m.domain = domain::Interval{-0.2, 0.2};
    const auto rec = record_grid(5.0, 1.0, false);
    const auto r = simulate_bbm(m, InitialCondition::fixed_at({0.0}, 50), 5.0, rec, 19);
    EXPECT_EQ(final_mass(r), 0.0);
    EXPECT_EQ(r.population.deaths, 50u);
}

TEST(Bbm, LocalMassCountsTheWindow) {
    ModelSpec m;
    ParticleRunOptions o;
    o.window = Window{-0.5, 0.5};
    const std::vector<double> rec{1e-9};
    const auto r = simulate_bbm(m, InitialCondition::fixed_at({0.0}, 10), 1.0, rec, 20, o);
    EXPECT_EQ(r.series.records[0].local_mass, 10.0);
}

TEST(RecordGrid, Spacing) {
    const auto g = record_grid(1.0, 0.25);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.back(), 1.0);
    EXPECT_THROW(record_grid(1.0, 0.0), ParameterError);
}

TEST(Bbm, RejectsBadRecordTimes) {
    const std::vector<double> rec{0.5, 0.4};
    EXPECT_THROW(simulate_bbm(constant_beta(1.0), InitialCondition::fixed_at({0.0}, 1), 1.0, rec, 1),
                 ParameterError);
}
