#pragma once
/**
 * @file cumulant_pde.hpp
 * @brief One-dimensional solver for u_t = L u + beta u - alpha u^2 with
 * Dirichlet data, built from order-preserving pieces so the discrete
 * solution inherits the parabolic maximum principle:
 *
 *  - diffusion and drift by backward Euler (second-difference diffusion,
 *    upwind drift; the matrix is an M-matrix),
 *  - reaction by its exact pointwise flow
 *    u(h) = u0 e^{beta h} / (1 + alpha u0 (e^{beta h} - 1) / beta),
 *
 * combined by Strang splitting. Minimal solutions come from exhaustion of
 * the line by intervals (-R_k, R_k) with zero boundary data; maximal ones
 * from large boundary data.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supergrowth/io.hpp"
#include "supergrowth/model.hpp"

namespace supergrowth {

struct Grid1D {
    double x_lo = -1.0;
    double x_hi = 1.0;
    std::size_t nx = 3;

    Grid1D() = default;
    Grid1D(double lo, double hi, std::size_t n) : x_lo(lo), x_hi(hi), nx(n) {
        if (n < 3) throw ParameterError("grid needs nx >= 3");
        if (!(hi > lo)) throw ParameterError("grid needs x_hi > x_lo");
    }
    /// Symmetric grid (-R, R) with spacing as close to dx as possible from below.
    static Grid1D symmetric(double R, double dx) {
        const auto cells = static_cast<std::size_t>(std::ceil(2.0 * R / dx - 1e-9));
        return Grid1D(-R, R, std::max<std::size_t>(cells, 2) + 1);
    }
    double dx() const { return (x_hi - x_lo) / static_cast<double>(nx - 1); }
    double x(std::size_t i) const { return x_lo + static_cast<double>(i) * dx(); }
};

struct GridFunction {
    Grid1D grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.nx) throw ParameterError("grid function size mismatch");
    }
    static GridFunction sample(const Grid1D& g, const std::function<double(double)>& f) {
        std::vector<double> v(g.nx);
        for (std::size_t i = 0; i < g.nx; ++i) v[i] = f(g.x(i));
        return {g, std::move(v)};
    }
    /// Piecewise-linear interpolation; 0 outside the grid.
    double at(double x) const {
        if (x < grid.x_lo || x > grid.x_hi) return 0.0;
        const double pos = (x - grid.x_lo) / grid.dx();
        const auto i = std::min(static_cast<std::size_t>(std::floor(pos)), grid.nx - 2);
        const double w = pos - static_cast<double>(i);
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
    double max_on(double lo, double hi) const {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.nx; ++i)
            if (grid.x(i) >= lo - 1e-12 && grid.x(i) <= hi + 1e-12) m = std::max(m, values[i]);
        return m;
    }
};

inline CsvTable grid_csv(const GridFunction& f) {
    CsvTable t{{"x", "value"}, {}};
    for (std::size_t i = 0; i < f.grid.nx; ++i) t.add(f.grid.x(i), f.values[i]);
    return t;
}

inline CsvTable slab_csv(std::span<const double> r, std::span<const GridFunction> slab) {
    CsvTable t{{"r", "x", "value"}, {}};
    for (std::size_t k = 0; k < slab.size(); ++k)
        for (std::size_t i = 0; i < slab[k].grid.nx; ++i) t.add(r[k], slab[k].grid.x(i), slab[k].values[i]);
    return t;
}

/// Reporting window [lo, hi].
struct Interval1D {
    double lo = -1.0;
    double hi = 1.0;
};

struct PDEProblem {
    ModelSpec model;
    std::function<double(double)> initial = [](double) { return 0.0; };
    double boundary = 0.0;  ///< Dirichlet value at +-R
    std::vector<double> radii{5, 10, 20, 40, 80, 160, 320};
    double dx = 0.05;
    double dt = 1e-3;
    Interval1D window{-1.0, 1.0};
    double tol = 1e-8;
    double alpha_scale = 1.0;  ///< 0 turns the equation linear
};

namespace detail {

/// Backward-Euler operator (I - h A) for one grid, factored once (Thomas).
class ImplicitDiffusion {
public:
    ImplicitDiffusion(const ModelSpec& model, const Grid1D& grid, double h) : n_(grid.nx) {
        if (model.dim != 1) throw ParameterError("PDE engine supports d = 1");
        const double s2 = model.sigma2();
        const double dx = grid.dx();
        lower_.assign(n_, 0.0);
        diag_.assign(n_, 1.0);
        upper_.assign(n_, 0.0);
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            const double x = grid.x(i);
            double b = 0.0;
            if (const auto* c = std::get_if<drift::ConstantVector>(&model.drift)) b = c->value[0];
            if (const auto* l = std::get_if<drift::Linear>(&model.drift)) b = l->rate * x;
            const double diff = 0.5 * s2 / (dx * dx);
            const double up = std::max(b, 0.0) / dx;
            const double dn = std::max(-b, 0.0) / dx;
            lower_[i] = -h * (diff + dn);
            upper_[i] = -h * (diff + up);
            diag_[i] = 1.0 + h * (2.0 * diff + up + dn);
        }
        // Forward elimination coefficients.
        cprime_.assign(n_, 0.0);
        denom_.assign(n_, 1.0);
        for (std::size_t i = 1; i < n_; ++i) {
            denom_[i] = diag_[i] - lower_[i] * cprime_[i - 1];
            cprime_[i] = upper_[i] / denom_[i];
        }
    }

    /// Solves in place; boundary rows are identity (Dirichlet values kept).
    void solve(std::vector<double>& u) const {
        std::vector<double>& d = u;
        d[0] = d[0] / denom_[0];
        for (std::size_t i = 1; i < n_; ++i) d[i] = (d[i] - lower_[i] * d[i - 1]) / denom_[i];
        for (std::size_t i = n_ - 1; i-- > 0;) d[i] -= cprime_[i] * d[i + 1];
    }

private:
    std::size_t n_;
    std::vector<double> lower_, diag_, upper_, cprime_, denom_;
};

/// Exact flow of u' = beta u - alpha u^2 over time h.
inline double reaction_flow(double u0, double beta, double alpha, double h) {
    if (u0 == 0.0) return 0.0;
    const double bh = beta * h;
    const double e1 = beta == 0.0 ? h : std::expm1(bh) / beta;
    if (alpha == 0.0) return u0 * std::exp(bh);
    if (bh > 0.0) {
        // Divide through by e^{bh} to keep large rates finite.
        return u0 / (std::exp(-bh) + alpha * u0 * (-std::expm1(-bh)) / beta);
    }
    return u0 * std::exp(bh) / (1.0 + alpha * u0 * e1);
}

/// Point-wise coefficient tables for one grid.
struct Coefficients {
    std::vector<double> beta, alpha;
    Coefficients(const ModelSpec& m, const Grid1D& g, double alpha_scale) : beta(g.nx), alpha(g.nx) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            beta[i] = m.beta_at(x);
            alpha[i] = alpha_scale == 0.0 ? 0.0 : alpha_scale * m.alpha_at(x);
            if (!std::isfinite(beta[i]) || !std::isfinite(alpha[i])) throw ModelError("non-finite coefficient on grid");
            if (alpha_scale != 0.0 && !(alpha[i] > 0.0)) throw ModelError("alpha must be > 0 on the grid");
        }
    }
};

/**
 * @brief Strang-split march on one grid. Boundary nodes hold the Dirichlet
 * value. on_step(time, u) is called after every step; records are taken at
 * exact multiples of dt (the last step is shortened to land on t).
 */
template <class OnStep>
void march(const ModelSpec& model, const Grid1D& grid, std::vector<double>& u, double boundary, double t, double dt,
           double alpha_scale, OnStep&& on_step) {
    if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
    if (t == 0.0) return;
    if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
    const Coefficients c(model, grid, alpha_scale);
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-9));
    const double h_last = t - static_cast<double>(steps - 1) * dt;
    ImplicitDiffusion full(model, grid, dt);
    std::optional<ImplicitDiffusion> last;
    if (std::abs(h_last - dt) > 1e-15) last.emplace(model, grid, h_last);
    const std::size_t n = grid.nx;
    u.front() = boundary;
    u.back() = boundary;
    for (std::int64_t k = 0; k < steps; ++k) {
        const bool is_last = k + 1 == steps;
        const double h = is_last ? h_last : dt;
        for (std::size_t i = 1; i + 1 < n; ++i) u[i] = reaction_flow(u[i], c.beta[i], c.alpha[i], 0.5 * h);
        (is_last && last ? *last : full).solve(u);
        for (std::size_t i = 1; i + 1 < n; ++i) u[i] = reaction_flow(u[i], c.beta[i], c.alpha[i], 0.5 * h);
        on_step(is_last ? t : static_cast<double>(k + 1) * dt, u);
    }
}

}  // namespace detail

/// One solve on (-R, R) with Dirichlet value problem.boundary.
inline GridFunction solve_on_interval(const PDEProblem& p, double R, double t,
                                      const std::function<void(double, const GridFunction&)>& on_step = {}) {
    const Grid1D grid = Grid1D::symmetric(R, p.dx);
    auto u = GridFunction::sample(grid, p.initial);
    for (double v : u.values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("initial data must be finite and >= 0");
    detail::march(p.model, grid, u.values, p.boundary, t, p.dt, p.alpha_scale, [&](double time, const auto&) {
        if (on_step) on_step(time, u);
    });
    return u;
}

struct PdeResult {
    GridFunction solution;  ///< on the last interval solved
    GridFunction window;    ///< restriction to the reporting window
    bool converged = false;
    bool blow_up_suspected = false;
    double radius = 0.0;
    std::size_t iterations = 0;
    double last_change = std::numeric_limits<double>::infinity();
    double monotonicity_slack = 0.0;  ///< most negative (u_k - u_{k-1}) seen on the window

    double at(double x) const { return solution.at(x); }
};

namespace detail {

inline GridFunction restrict_to(const GridFunction& f, const Interval1D& w) {
    std::vector<double> xs, vs;
    for (std::size_t i = 0; i < f.grid.nx; ++i) {
        const double x = f.grid.x(i);
        if (x >= w.lo - 1e-9 && x <= w.hi + 1e-9) vs.push_back(f.values[i]);
    }
    if (vs.size() < 3) throw ParameterError("reporting window holds fewer than 3 grid points");
    const double lo = f.grid.x_lo + std::ceil((w.lo - f.grid.x_lo) / f.grid.dx() - 1e-9) * f.grid.dx();
    return {Grid1D(lo, lo + static_cast<double>(vs.size() - 1) * f.grid.dx(), vs.size()), vs};
}

}  // namespace detail

/**
 * @brief Minimal nonnegative solution by exhaustion: solve on (-R_k, R_k)
 * with zero boundary for increasing k until the window values change by
 * less than tol. Throws ModelError if an iterate drops below its
 * predecessor by more than 1e-10 (relative to its size).
 */
inline PdeResult solve_cumulant(const PDEProblem& p, double t) {
    if (p.radii.empty()) throw ParameterError("no exhaustion radii");
    PdeResult r;
    std::vector<double> prev;
    for (std::size_t k = 0; k < p.radii.size(); ++k) {
        if (k > 0 && !(p.radii[k] > p.radii[k - 1])) throw ParameterError("radii must increase");
        if (p.radii[k] < std::max(std::abs(p.window.lo), std::abs(p.window.hi)) + p.dx)
            continue;
        auto u = solve_on_interval(p, p.radii[k], t);
        for (double v : u.values)
            if (!std::isfinite(v)) throw ModelError("solution overflowed");
        auto w = detail::restrict_to(u, p.window);
        r.iterations++;
        r.radius = p.radii[k];
        if (!prev.empty()) {
            double change = 0.0;
            for (std::size_t i = 0; i < w.values.size(); ++i) {
                const double dlt = w.values[i] - prev[i];
                r.monotonicity_slack = std::min(r.monotonicity_slack, dlt);
                if (dlt < -1e-10 * std::max(1.0, std::abs(prev[i])))
                    throw ModelError("exhaustion iterates lost monotonicity");
                change = std::max(change, std::abs(dlt));
            }
            r.last_change = change;
        }
        prev = w.values;
        r.solution = std::move(u);
        r.window = std::move(w);
        if (r.last_change < p.tol) {
            r.converged = true;
            break;
        }
    }
    r.blow_up_suspected = !r.converged;
    return r;
}

/// T_t g by the same machinery with alpha removed.
inline PdeResult solve_linear(PDEProblem p, double t) {
    p.alpha_scale = 0.0;
    return solve_cumulant(p, t);
}

/**
 * @brief H(., r) for r in r_values (each in [0, t]): solution of
 * -d_r H = L H + beta H with H(., t) = h, computed on a fixed interval
 * (-R, R) as the linear forward flow over t - r.
 */
inline std::vector<GridFunction> solve_backward(PDEProblem p, double R, double t, std::span<const double> r_values) {
    p.alpha_scale = 0.0;
    for (double r : r_values)
        if (r < 0.0 || r > t + 1e-12) throw ParameterError("r outside [0, t]");
    std::vector<GridFunction> slab(r_values.size());
    const Grid1D grid = Grid1D::symmetric(R, p.dx);
    auto u = GridFunction::sample(grid, p.initial);
    for (double v : u.values)
        if (!(v > 0.0)) throw ParameterError("terminal data must be > 0");
    auto take = [&](double elapsed) {
        for (std::size_t k = 0; k < r_values.size(); ++k)
            if (std::abs((t - r_values[k]) - elapsed) < 1e-9) slab[k] = u;
    };
    take(0.0);
    // March through the required durations in increasing order, landing exactly on each.
    std::vector<double> durations;
    for (double r : r_values) durations.push_back(t - r);
    std::sort(durations.begin(), durations.end());
    double elapsed = 0.0;
    for (double target : durations) {
        if (target - elapsed <= 1e-12) continue;
        detail::march(p.model, grid, u.values, p.boundary, target - elapsed, std::min(p.dt, target - elapsed), 0.0,
                      [](double, const auto&) {});
        elapsed = target;
        for (double v : u.values)
            if (!std::isfinite(v)) throw ModelError("backward solution overflowed");
        take(elapsed);
    }
    return slab;
}

/**
 * @brief Coefficients of L + beta and alpha tabulated on a grid at time s:
 * sigma^2, drift b(x), beta(x), alpha(x).
 */
struct GridCoefficients {
    Grid1D grid;
    double sigma2 = 1.0;
    std::vector<double> drift, beta, alpha;

    static GridCoefficients from(const ModelSpec& m, const Grid1D& g) {
        if (m.dim != 1) throw ParameterError("h_transform supports d = 1");
        GridCoefficients c;
        c.grid = g;
        c.sigma2 = m.sigma2();
        c.drift.resize(g.nx);
        c.beta.resize(g.nx);
        c.alpha.resize(g.nx);
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            double b = 0.0;
            if (const auto* v = std::get_if<drift::ConstantVector>(&m.drift)) b = v->value[0];
            if (const auto* l = std::get_if<drift::Linear>(&m.drift)) b = l->rate * x;
            c.drift[i] = b;
            c.beta[i] = m.beta_at(x);
            c.alpha[i] = m.alpha_at(x);
        }
        return c;
    }
};

/// H(x, s) with its derivatives in closed form.
struct HFunction {
    std::function<double(double, double)> h, hx, hxx, hs;

    static HFunction one() {
        auto z = [](double, double) { return 0.0; };
        return {[](double, double) { return 1.0; }, z, z, z};
    }
    /// e^{-lambda s}
    static HFunction exp_time(double lambda) {
        auto z = [](double, double) { return 0.0; };
        return {[=](double, double s) { return std::exp(-lambda * s); }, z, z,
                [=](double, double s) { return -lambda * std::exp(-lambda * s); }};
    }
    /// cosh(x)
    static HFunction cosh_space() {
        auto z = [](double, double) { return 0.0; };
        return {[](double x, double) { return std::cosh(x); }, [](double x, double) { return std::sinh(x); },
                [](double x, double) { return std::cosh(x); }, z};
    }
    /// Pointwise product of two closed-form functions.
    static HFunction product(const HFunction& a, const HFunction& b) {
        return {[=](double x, double s) { return a.h(x, s) * b.h(x, s); },
                [=](double x, double s) { return a.hx(x, s) * b.h(x, s) + a.h(x, s) * b.hx(x, s); },
                [=](double x, double s) {
                    return a.hxx(x, s) * b.h(x, s) + 2.0 * a.hx(x, s) * b.hx(x, s) + a.h(x, s) * b.hxx(x, s);
                },
                [=](double x, double s) { return a.hs(x, s) * b.h(x, s) + a.h(x, s) * b.hs(x, s); }};
    }
    /// 1 / H with exact derivatives.
    HFunction reciprocal() const {
        const HFunction a = *this;
        return {[=](double x, double s) { return 1.0 / a.h(x, s); },
                [=](double x, double s) { return -a.hx(x, s) / (a.h(x, s) * a.h(x, s)); },
                [=](double x, double s) {
                    const double v = a.h(x, s);
                    return -a.hxx(x, s) / (v * v) + 2.0 * a.hx(x, s) * a.hx(x, s) / (v * v * v);
                },
                [=](double x, double s) { return -a.hs(x, s) / (a.h(x, s) * a.h(x, s)); }};
    }
};

/**
 * @brief Nonlinear h-transform at time s: drift += sigma^2 H_x / H,
 * beta += (H_s + L H) / H, alpha *= H. Throws DomainError if H <= 0.
 */
inline GridCoefficients h_transform(const GridCoefficients& c, const HFunction& H, double s) {
    GridCoefficients out = c;
    for (std::size_t i = 0; i < c.grid.nx; ++i) {
        const double x = c.grid.x(i);
        const double h = H.h(x, s);
        if (!(h > 0.0)) throw DomainError("h_transform requires H > 0");
        const double lh = 0.5 * c.sigma2 * H.hxx(x, s) + c.drift[i] * H.hx(x, s);
        out.drift[i] = c.drift[i] + c.sigma2 * H.hx(x, s) / h;
        out.beta[i] = c.beta[i] + (H.hs(x, s) + lh) / h;
        out.alpha[i] = c.alpha[i] * h;
    }
    return out;
}

/**
 * @brief Grid version: H and, optionally, its time derivative given as grid
 * values; spatial derivatives by centered differences. The two boundary
 * nodes use one-sided differences.
 */
inline GridCoefficients h_transform(const GridCoefficients& c, const GridFunction& H,
                                    const GridFunction* H_s = nullptr) {
    if (H.grid.nx != c.grid.nx) throw ParameterError("grid mismatch");
    GridCoefficients out = c;
    const double dx = c.grid.dx();
    const auto& v = H.values;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0)) throw DomainError("h_transform requires H > 0");
        const std::size_t l = i == 0 ? 0 : i - 1;
        const std::size_t r = i + 1 == n ? n - 1 : i + 1;
        const std::size_t m = std::clamp<std::size_t>(i, 1, n - 2);
        const double hx = (v[r] - v[l]) / (static_cast<double>(r - l) * dx);
        const double hxx = (v[m + 1] - 2.0 * v[m] + v[m - 1]) / (dx * dx);
        const double hs = H_s ? H_s->values[i] : 0.0;
        out.drift[i] = c.drift[i] + c.sigma2 * hx / v[i];
        out.beta[i] = c.beta[i] + (hs + 0.5 * c.sigma2 * hxx + c.drift[i] * hx) / v[i];
        out.alpha[i] = c.alpha[i] * v[i];
    }
    return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b, std::size_t skip_edges = 0) {
    double m = 0.0;
    for (std::size_t i = skip_edges; i + skip_edges < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct SteadyStateOptions {
    double R = 40.0;
    double dx = 0.05;
    Interval1D window{-5.0, 5.0};
    double start_value = 0.0;  ///< 0 picks 10 * max(beta/alpha, 1) over the grid
    double dt0 = 1e-3;
    double dt_max = 50.0;
    double t_max = 1e6;
    double tol = 1e-8;
};

struct SteadyStateResult {
    GridFunction w;
    GridFunction window;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();  ///< max |L w + beta w - alpha w^2|
    double time = 0.0;
};

namespace detail {

/// max over interior nodes of |L w + beta w - alpha w^2| with the solver's stencil.
inline double steady_residual(const ModelSpec& m, const Grid1D& g, const Coefficients& c, const std::vector<double>& w) {
    const double dx = g.dx();
    const double s2 = m.sigma2();
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
        double b = 0.0;
        if (const auto* v = std::get_if<drift::ConstantVector>(&m.drift)) b = v->value[0];
        if (const auto* l = std::get_if<drift::Linear>(&m.drift)) b = l->rate * g.x(i);
        const double lw = 0.5 * s2 * (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dx * dx) +
                          std::max(b, 0.0) * (w[i + 1] - w[i]) / dx + std::min(b, 0.0) * (w[i] - w[i - 1]) / dx;
        r = std::max(r, std::abs(lw + c.beta[i] * w[i] - c.alpha[i] * w[i] * w[i]));
    }
    return r;
}

/// Newton iterations on the discrete steady equation, zero boundary values.
inline void newton_polish(const ModelSpec& m, const Grid1D& g, const Coefficients& c, std::vector<double>& w,
                          int max_iter = 50) {
    const std::size_t n = g.nx;
    const double dx = g.dx();
    const double s2 = m.sigma2();
    std::vector<double> lo(n), di(n), up(n), rhs(n);
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double b = 0.0;
            if (const auto* v = std::get_if<drift::ConstantVector>(&m.drift)) b = v->value[0];
            if (const auto* l = std::get_if<drift::Linear>(&m.drift)) b = l->rate * g.x(i);
            const double diff = 0.5 * s2 / (dx * dx);
            const double bp = std::max(b, 0.0) / dx, bm = std::max(-b, 0.0) / dx;
            lo[i] = diff + bm;
            up[i] = diff + bp;
            di[i] = -2.0 * diff - bp - bm + c.beta[i] - 2.0 * c.alpha[i] * w[i];
            const double f = lo[i] * w[i - 1] + up[i] * w[i + 1] + (-2.0 * diff - bp - bm) * w[i] + c.beta[i] * w[i] -
                             c.alpha[i] * w[i] * w[i];
            rhs[i] = -f;
        }
        // Boundary rows: delta = 0.
        lo[0] = up[0] = 0.0;
        di[0] = 1.0;
        rhs[0] = 0.0;
        lo[n - 1] = up[n - 1] = 0.0;
        di[n - 1] = 1.0;
        rhs[n - 1] = 0.0;
        std::vector<double> cp(n), dp(n);
        cp[0] = up[0] / di[0];
        dp[0] = rhs[0] / di[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double den = di[i] - lo[i] * cp[i - 1];
            cp[i] = up[i] / den;
            dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / den;
        }
        std::vector<double> delta(n);
        delta[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) delta[i] = dp[i] - cp[i] * delta[i + 1];
        double dmax = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            w[i] = std::max(w[i] + delta[i], 0.0);
            dmax = std::max(dmax, std::abs(delta[i]));
        }
        if (dmax < 1e-14) break;
    }
}

}  // namespace detail

/**
 * @brief Extinction function w on (-R, R): long-time limit of the cumulant
 * flow started from a large constant with zero boundary data (time steps
 * growing geometrically), followed by Newton polishing of the discrete
 * steady equation. Converged when max |L w + beta w - alpha w^2| < tol.
 */
inline SteadyStateResult steady_state_w(const ModelSpec& model, const SteadyStateOptions& opt = {}) {
    const Grid1D grid = Grid1D::symmetric(opt.R, opt.dx);
    const detail::Coefficients c(model, grid, 1.0);
    double start = opt.start_value;
    if (start == 0.0) {
        double ratio = 1.0;
        for (std::size_t i = 0; i < grid.nx; ++i) ratio = std::max(ratio, c.beta[i] / c.alpha[i]);
        start = 10.0 * ratio;
    }
    std::vector<double> u(grid.nx, start);
    u.front() = u.back() = 0.0;
    SteadyStateResult r;
    double h = opt.dt0;
    while (r.time < opt.t_max) {
        std::vector<double> before = u;
        detail::march(model, grid, u, 0.0, h, h, 1.0, [](double, const auto&) {});
        r.time += h;
        double rate = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) rate = std::max(rate, std::abs(u[i] - before[i]) / h);
        if (rate < 1e-6) break;
        h = std::min(h * 1.2, opt.dt_max);
    }
    // The split flow's fixed point carries an O(h) splitting error; Newton removes it.
    detail::newton_polish(model, grid, c, u);
    r.residual = detail::steady_residual(model, grid, c, u);
    r.converged = r.residual < opt.tol;
    r.w = GridFunction(grid, u);
    r.window = detail::restrict_to(r.w, opt.window);
    return r;
}

enum class CspVerdict { Holds, Fails, Inconclusive };

inline const char* to_string(CspVerdict v) {
    switch (v) {
        case CspVerdict::Holds: return "holds";
        case CspVerdict::Fails: return "fails";
        default: return "inconclusive";
    }
}

struct CspOptions {
    std::vector<double> boundary_values{10.0, 1e2, 1e3, 1e4};
    std::vector<double> radii{5, 10, 20, 40, 80};
    Interval1D window{-1.0, 1.0};
    double dx = 0.05;
    double dt = 1e-3;
    double threshold = 1e-6;
};

struct CspReport {
    CspVerdict verdict = CspVerdict::Inconclusive;
    std::vector<double> radii;
    std::vector<double> window_max;        ///< at the largest boundary value, per radius
    std::vector<double> boundary_effect;   ///< change between the two largest boundary values, per radius
};

/**
 * @brief Compact support check through maximal solutions: zero initial data,
 * boundary value M on (-R, R), M increasing, R increasing. Holds when the
 * window maximum at the largest M drops below threshold as R grows; fails
 * when it settles at a positive level.
 */
inline CspReport csp_check(const ModelSpec& model, double t, const CspOptions& opt = {}) {
    CspReport r;
    for (double R : opt.radii) {
        double prev_max = 0.0, last_max = 0.0;
        for (std::size_t k = 0; k < opt.boundary_values.size(); ++k) {
            PDEProblem p;
            p.model = model;
            p.boundary = opt.boundary_values[k];
            p.dx = opt.dx;
            p.dt = opt.dt;
            const auto u = solve_on_interval(p, R, t);
            prev_max = last_max;
            last_max = detail::restrict_to(u, opt.window).max_on(opt.window.lo, opt.window.hi);
        }
        r.radii.push_back(R);
        r.window_max.push_back(last_max);
        r.boundary_effect.push_back(std::abs(last_max - prev_max));
    }
    const auto n = r.window_max.size();
    bool decreasing = true;
    for (std::size_t i = 1; i < n; ++i) decreasing = decreasing && r.window_max[i] <= r.window_max[i - 1] + 1e-12;
    if (n > 0 && r.window_max.back() < opt.threshold && decreasing) {
        r.verdict = CspVerdict::Holds;
    } else if (n >= 2 && r.window_max.back() > opt.threshold &&
               std::abs(r.window_max[n - 1] - r.window_max[n - 2]) < 1e-3 * r.window_max.back()) {
        r.verdict = CspVerdict::Fails;
    }
    return r;
}

struct OrderReport {
    bool ordered = true;
    double min_difference = std::numeric_limits<double>::infinity();
};

/**
 * @brief Solves from v1 and v2 on (-R, R) with the same data otherwise and
 * checks v1 >= v2 - 1e-10 at every node after every step.
 */
inline OrderReport maximum_principle_check(const PDEProblem& p, double R, const std::function<double(double)>& v1,
                                           const std::function<double(double)>& v2, double t) {
    const Grid1D grid = Grid1D::symmetric(R, p.dx);
    auto a = GridFunction::sample(grid, v1).values;
    auto b = GridFunction::sample(grid, v2).values;
    OrderReport rep;
    auto compare = [&] {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            rep.min_difference = std::min(rep.min_difference, d);
            if (d < -1e-10) rep.ordered = false;
        }
    };
    a.front() = a.back() = b.front() = b.back() = p.boundary;
    compare();
    // March both in lockstep, comparing after every step.
    const auto steps = static_cast<std::int64_t>(std::ceil(t / p.dt - 1e-9));
    double done = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double h = std::min(p.dt, t - done);
        detail::march(p.model, grid, a, p.boundary, h, h, p.alpha_scale, [](double, const auto&) {});
        detail::march(p.model, grid, b, p.boundary, h, h, p.alpha_scale, [](double, const auto&) {});
        done += h;
        compare();
    }
    return rep;
}

}  // namespace supergrowth
