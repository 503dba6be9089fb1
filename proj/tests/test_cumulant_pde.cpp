#include <gtest/gtest.h>

#include <cmath>

#include "supergrowth/cumulant_pde.hpp"

using namespace supergrowth;

namespace {

ModelSpec constant_model(double beta, double alpha) {
    ModelSpec m;
    m.beta = coef::Constant{beta};
    m.alpha = coef::Constant{alpha};
    return m;
}

// Logistic ODE u' = b u - a u^2 in closed form.
double logistic(double u0, double b, double a, double t) {
    if (b == 0.0) return u0 / (1.0 + a * u0 * t);
    const double e = std::exp(b * t);
    return b * u0 * e / (b + a * u0 * (e - 1.0));
}

}  // namespace

TEST(ReactionFlow, MatchesLogisticClosedForm) {
    for (double b : {-1.0, 0.0, 0.5, 3.0})
        for (double u0 : {0.1, 1.0, 7.0})
            EXPECT_NEAR(detail::reaction_flow(u0, b, 2.0, 0.3), logistic(u0, b, 2.0, 0.3), 1e-12 * std::max(1.0, u0));
    EXPECT_EQ(detail::reaction_flow(0.0, 1.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(detail::reaction_flow(2.0, 1.0, 0.0, 1.0), 2.0 * std::exp(1.0), 1e-12);
}

TEST(ReactionFlow, SemigroupProperty) {
    const double a = detail::reaction_flow(detail::reaction_flow(1.5, 2.0, 0.7, 0.2), 2.0, 0.7, 0.3);
    EXPECT_NEAR(a, detail::reaction_flow(1.5, 2.0, 0.7, 0.5), 1e-13);
}

TEST(Linear, HeatKernelOnGaussian) {
    // T_t of exp(-x^2 / 2) under (1/2) u'' is (1 + t)^{-1/2} exp(-x^2 / (2 (1 + t))).
    PDEProblem p;
    p.initial = [](double x) { return std::exp(-0.5 * x * x); };
    p.radii = {10, 20};
    p.window = {-2.0, 2.0};
    p.tol = 1e-6;
    const double t = 1.0;
    const auto r = solve_linear(p, t);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.0})
        EXPECT_NEAR(r.at(x), std::exp(-x * x / (2.0 * (1.0 + t))) / std::sqrt(1.0 + t), 2e-3) << x;
}

TEST(Linear, ConstantPotentialMultiplies) {
    PDEProblem p;
    p.model = constant_model(0.7, 1.0);
    p.initial = [](double x) { return std::exp(-0.5 * x * x); };
    p.radii = {10, 20};
    p.tol = 1e-6;
    PDEProblem q = p;
    q.model = constant_model(0.0, 1.0);
    const auto a = solve_linear(p, 1.0), b = solve_linear(q, 1.0);
    for (double x : {-1.0, 0.0, 0.5}) EXPECT_NEAR(a.at(x), std::exp(0.7) * b.at(x), 1e-9);
}

TEST(Cumulant, ConstantDataFollowsLogisticAwayFromBoundary) {
    PDEProblem p;
    p.model = constant_model(1.0, 2.0);
    p.initial = [](double) { return 3.0; };
    p.radii = {5, 10, 20};
    const auto r = solve_cumulant(p, 1.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.at(0.0), logistic(3.0, 1.0, 2.0, 1.0), 1e-6);
}

TEST(Cumulant, ExhaustionIsMonotoneInRadius) {
    PDEProblem p;
    p.model = constant_model(1.0, 1.0);
    p.initial = [](double x) { return std::exp(-x * x); };
    p.radii = {2, 3, 5, 10};
    const auto r = solve_cumulant(p, 1.0);
    EXPECT_GE(r.monotonicity_slack, -1e-10);
    EXPECT_GE(r.iterations, 2u);
}

TEST(Cumulant, BelowLinearSolution) {
    PDEProblem p;
    p.model = constant_model(1.0, 1.0);
    p.initial = [](double x) { return 2.0 * std::exp(-x * x); };
    p.radii = {10, 20};
    const auto s = solve_cumulant(p, 1.0);
    const auto t = solve_linear(p, 1.0);
    for (double x : {-1.0, 0.0, 1.0}) EXPECT_LT(s.at(x), t.at(x));
}

TEST(Cumulant, RejectsNegativeInitialData) {
    PDEProblem p;
    p.initial = [](double x) { return x; };
    EXPECT_THROW(solve_cumulant(p, 1.0), ParameterError);
}

TEST(SteadyState, RatioForConstantCoefficients) {
    const auto r = steady_state_w(constant_model(2.0, 0.5));
    EXPECT_TRUE(r.converged);
    for (double v : r.window.values) EXPECT_NEAR(v, 4.0, 1e-6);
}

TEST(SteadyState, ResidualSmallForVariableRate) {
    ModelSpec m;
    m.beta = coef::Power{1.0, 1.0, 1.0};
    m.alpha = m.beta;
    SteadyStateOptions o;
    o.R = 20.0;
    const auto r = steady_state_w(m, o);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.residual, 1e-8);
    for (double v : r.window.values) EXPECT_NEAR(v, 1.0, 1e-3);
}

TEST(MaximumPrinciple, OrderedDataStayOrdered) {
    PDEProblem p;
    p.model = constant_model(2.0, 1.0);
    const auto rep = maximum_principle_check(
        p, 6.0, [](double x) { return 2.0 * std::exp(-x * x); }, [](double x) { return std::exp(-x * x); }, 0.5);
    EXPECT_TRUE(rep.ordered);
    EXPECT_GE(rep.min_difference, 0.0);
}

TEST(MaximumPrinciple, ReversedDataAreReported) {
    PDEProblem p;
    const auto rep = maximum_principle_check(
        p, 4.0, [](double x) { return std::exp(-x * x); }, [](double x) { return 2.0 * std::exp(-x * x); }, 0.1);
    EXPECT_FALSE(rep.ordered);
}

TEST(Csp, HoldsForConstantRates) {
    CspOptions o;
    o.radii = {5, 10, 20};
    o.dt = 5e-3;
    const auto r = csp_check(constant_model(1.0, 1.0), 1.0, o);
    EXPECT_EQ(r.verdict, CspVerdict::Holds);
    EXPECT_EQ(r.radii.size(), 3u);
}

TEST(Csp, SmallRadiusIsNotHolds) {
    CspOptions o;
    o.radii = {1.5, 2.0};
    o.dt = 5e-3;
    const auto r = csp_check(constant_model(1.0, 1.0), 1.0, o);
    EXPECT_NE(r.verdict, CspVerdict::Holds);
}

TEST(HTransform, IdentityEigenAndRoundTrip) {
    ModelSpec m;
    m.beta = coef::Power{1.0, 1.0, 2.0};
    m.alpha = coef::Constant{2.0};
    const Grid1D g = Grid1D::symmetric(3.0, 0.1);
    const auto c = GridCoefficients::from(m, g);
    const auto id = h_transform(c, HFunction::one(), 1.0);
    EXPECT_EQ(id.beta, c.beta);
    EXPECT_EQ(id.alpha, c.alpha);
    EXPECT_EQ(id.drift, c.drift);

    const auto H = HFunction::cosh_space();
    const auto t = h_transform(c, H, 0.0);
    // drift += tanh x, beta += (1/2) cosh'' / cosh = 1/2, alpha *= cosh.
    for (std::size_t i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        EXPECT_NEAR(t.drift[i], std::tanh(x), 1e-12);
        EXPECT_NEAR(t.beta[i], c.beta[i] + 0.5, 1e-12);
        EXPECT_NEAR(t.alpha[i], c.alpha[i] * std::cosh(x), 1e-12);
    }
    const auto back = h_transform(t, H.reciprocal(), 0.0);
    EXPECT_LT(max_abs_diff(back.beta, c.beta), 1e-10);
    EXPECT_LT(max_abs_diff(back.drift, c.drift), 1e-12);
}

TEST(HTransform, NonPositiveHIsRejected) {
    const Grid1D g = Grid1D::symmetric(1.0, 0.1);
    const auto c = GridCoefficients::from(ModelSpec{}, g);
    HFunction bad = HFunction::one();
    bad.h = [](double x, double) { return x; };
    EXPECT_THROW(h_transform(c, bad, 0.0), DomainError);
}

TEST(Grid, SymmetricSpacingAndInterpolation) {
    const auto g = Grid1D::symmetric(1.0, 0.3);
    EXPECT_LE(g.dx(), 0.3);
    const auto f = GridFunction::sample(g, [](double x) { return 2.0 * x + 1.0; });
    EXPECT_NEAR(f.at(0.123), 1.246, 1e-12);
    EXPECT_EQ(f.at(5.0), 0.0);
}
