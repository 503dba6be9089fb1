#pragma once
/**
 * @file growth.hpp
 * @brief Growth-law fits, the p-generalized principal eigenvalue and its
 * explicit upper bound, supermartingale families f^{(-t)}, and the local
 * growth and spread experiments.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "supergrowth/branching.hpp"
#include "supergrowth/cumulant_pde.hpp"
#include "supergrowth/io.hpp"
#include "supergrowth/model.hpp"
#include "supergrowth/parallel.hpp"
#include "supergrowth/stats.hpp"
#include "supergrowth/superprocess.hpp"

namespace supergrowth {

/// Too few usable records for a growth fit; the message carries the caps report.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Verdicts across the lambda grid are not a single divergent-to-finite crossover.
class InconsistentGrid : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GrowthLaw { PowerExp, DoubleExp };

inline const char* to_string(GrowthLaw l) { return l == GrowthLaw::PowerExp ? "power-exp" : "double-exp"; }

struct GrowthFitOptions {
    double threshold = 1e3;           ///< only records with mass above this are used
    std::optional<double> q_fixed;    ///< power-exp exponent held fixed
    double known_rate = 0.0;          ///< c0: log m - c0 t is fitted (constant part of beta)
    double q_lo = 0.5;
    double q_hi = 10.0;
    std::size_t min_records = 5;
};

struct GrowthFit {
    GrowthLaw law = GrowthLaw::PowerExp;
    double K = 0.0;
    double q = 0.0;
    double r = 0.0;
    double residual_norm = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t replicates_used = 0;
    std::size_t replicates_capped = 0;
    std::vector<double> per_replicate;  ///< q (power-exp) or r (double-exp)
};

namespace detail {

struct PowerFit {
    double K = 0.0, c = 0.0, rss = 0.0;
};

/// y = K t^q + c by least squares for fixed q.
inline PowerFit power_fit(std::span<const double> t, std::span<const double> y, double q) {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::pow(t[i], q);
    const auto f = stats::fit_line(x, y);
    return {f.slope, f.intercept, f.residual_norm * f.residual_norm};
}

/// Minimizes the power-fit residual over q in [lo, hi]: scan then golden section.
inline double best_q(std::span<const double> t, std::span<const double> y, double lo, double hi) {
    const int n = 200;
    double best = lo, best_rss = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
        const double q = lo + (hi - lo) * k / n;
        const double rss = power_fit(t, y, q).rss;
        if (rss < best_rss) {
            best_rss = rss;
            best = q;
        }
    }
    double a = std::max(lo, best - (hi - lo) / n), b = std::min(hi, best + (hi - lo) / n);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = power_fit(t, y, c).rss, fd = power_fit(t, y, d).rss;
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = power_fit(t, y, c).rss;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = power_fit(t, y, d).rss;
        }
    }
    return 0.5 * (a + b);
}

inline double median(std::vector<double> v) { return stats::quantile(std::move(v), 0.5); }

}  // namespace detail

/**
 * @brief Fits log m(t) = K t^q (+ c) or log log m(t) = r t (+ c) per replicate
 * over records with m > threshold (all records precede any cap), and reports
 * the median across replicates with at least min_records usable points.
 */
inline GrowthFit growth_fit(std::span<const StatisticSeries> runs, GrowthLaw law, const GrowthFitOptions& opt = {}) {
    GrowthFit out;
    out.law = law;
    out.t_lo = std::numeric_limits<double>::infinity();
    out.t_hi = -std::numeric_limits<double>::infinity();
    std::vector<double> Ks, qs, rs, res;
    for (const auto& s : runs) {
        if (s.caps_hit) ++out.replicates_capped;
        std::vector<double> t, y;
        for (const auto& rec : s.records) {
            if (!(rec.total_mass > opt.threshold) || !std::isfinite(rec.total_mass) || rec.t <= 0.0) continue;
            t.push_back(rec.t);
            const double lm = std::log(rec.total_mass);
            y.push_back(law == GrowthLaw::PowerExp ? lm - opt.known_rate * rec.t : std::log(lm));
        }
        if (t.size() < opt.min_records) continue;
        out.t_lo = std::min(out.t_lo, t.front());
        out.t_hi = std::max(out.t_hi, t.back());
        if (law == GrowthLaw::PowerExp) {
            const double q = opt.q_fixed ? *opt.q_fixed : detail::best_q(t, y, opt.q_lo, opt.q_hi);
            const auto f = detail::power_fit(t, y, q);
            qs.push_back(q);
            Ks.push_back(f.K);
            res.push_back(std::sqrt(f.rss));
        } else {
            const auto f = stats::fit_line(t, y);
            rs.push_back(f.slope);
            res.push_back(f.residual_norm);
        }
    }
    out.replicates_used = res.size();
    if (res.empty())
        throw InsufficientData("growth_fit: no replicate has " + std::to_string(opt.min_records) +
                               " usable records (" + std::to_string(runs.size()) + " replicates, " +
                               std::to_string(out.replicates_capped) + " capped)");
    out.residual_norm = detail::median(res);
    if (law == GrowthLaw::PowerExp) {
        out.q = detail::median(qs);
        out.K = detail::median(Ks);
        out.per_replicate = qs;
    } else {
        out.r = detail::median(rs);
        out.per_replicate = rs;
    }
    return out;
}

enum class PgpeVerdict { Finite, Divergent };

struct PgpeEstimate {
    double p = 1.0;
    std::vector<double> lambda_grid;
    std::vector<PgpeVerdict> verdicts;
    std::vector<double> log_slopes;  ///< d/ds log(e^{-lambda s^p} max_B T_s g) at s_max
    std::vector<double> integrals;   ///< truncated trapezoid integrals on [0, s_max]
    double lambda_lo = -std::numeric_limits<double>::infinity();  ///< largest divergent lambda
    double lambda_hi = std::numeric_limits<double>::infinity();   ///< smallest finite lambda
    double s_max = 0.0;
    bool truncated = false;  ///< s_max reduced because T_s g overflowed
};

struct PgpeOptions {
    double R = 20.0;
    double dx = 0.05;
    double ds = 1e-3;          ///< time step of the linear solve and of the quadrature
    double slope_span = 0.05;  ///< backward difference width for the log-slope at s_max
};

/// max over the window of T_s g on a time grid s_k = k ds, k = 0..n.
inline std::vector<double> window_max_series(const ModelSpec& model, const std::function<double(double)>& g,
                                             const Interval1D& B, double s_max, const PgpeOptions& opt,
                                             double* reached = nullptr) {
    std::vector<double> m;
    const Grid1D grid = Grid1D::symmetric(opt.R, opt.dx);
    auto u = GridFunction::sample(grid, g);
    m.push_back(u.max_on(B.lo, B.hi));
    bool overflow = false;
    try {
        detail::march(model, grid, u.values, 0.0, s_max, opt.ds, 0.0, [&](double, const std::vector<double>& v) {
            if (overflow) return;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < grid.nx; ++i) {
                const double x = grid.x(i);
                if (x >= B.lo - 1e-12 && x <= B.hi + 1e-12) mx = std::max(mx, v[i]);
            }
            if (!std::isfinite(mx) || mx > 1e300) {
                overflow = true;
                return;
            }
            m.push_back(mx);
        });
    } catch (const ModelError&) {
        overflow = true;
    }
    if (reached) *reached = static_cast<double>(m.size() - 1) * opt.ds;
    return m;
}

/**
 * @brief Finite/divergent verdicts for int_0^inf e^{-lambda s^p} max_B T_s g ds
 * across lambda_grid. The verdict is divergent when the log of the integrand
 * is still increasing at s_max and finite otherwise; the bracket is (largest
 * divergent lambda, smallest finite lambda). Throws InconsistentGrid unless
 * the verdicts switch once, divergent to finite.
 */
inline PgpeEstimate pgpe_estimate(const ModelSpec& model, double p, const std::function<double(double)>& g,
                                  const Interval1D& B, std::span<const double> lambda_grid, double s_max,
                                  const PgpeOptions& opt = {}) {
    if (!(p >= 1.0)) throw ParameterError("p must be >= 1");
    if (lambda_grid.empty()) throw ParameterError("empty lambda grid");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i - 1])) throw ParameterError("lambda grid must increase");
    PgpeEstimate e;
    e.p = p;
    e.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    double reached = 0.0;
    const auto m = window_max_series(model, g, B, s_max, opt, &reached);
    e.truncated = reached + 1e-9 < s_max;
    e.s_max = reached;
    const std::size_t n = m.size() - 1;
    const auto back = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.slope_span / opt.ds)));
    if (n < back) throw ParameterError("s_max too short for the slope estimate");
    const double s1 = static_cast<double>(n) * opt.ds, s0 = static_cast<double>(n - back) * opt.ds;
    const double log_m_slope = (std::log(m[n]) - std::log(m[n - back])) / (s1 - s0);
    for (double lam : lambda_grid) {
        const double slope = log_m_slope - lam * (std::pow(s1, p) - std::pow(s0, p)) / (s1 - s0);
        e.log_slopes.push_back(slope);
        e.verdicts.push_back(slope > 0.0 ? PgpeVerdict::Divergent : PgpeVerdict::Finite);
        double integral = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double sa = static_cast<double>(k) * opt.ds, sb = sa + opt.ds;
            integral += 0.5 * opt.ds * (std::exp(-lam * std::pow(sa, p)) * m[k] + std::exp(-lam * std::pow(sb, p)) * m[k + 1]);
        }
        e.integrals.push_back(integral);
    }
    bool seen_finite = false;
    for (std::size_t i = 0; i < e.verdicts.size(); ++i) {
        if (e.verdicts[i] == PgpeVerdict::Finite) {
            if (!seen_finite) e.lambda_hi = lambda_grid[i];
            seen_finite = true;
        } else {
            if (seen_finite) throw InconsistentGrid("pgpe verdicts are not monotone across the lambda grid");
            e.lambda_lo = lambda_grid[i];
        }
    }
    return e;
}

struct PgpeBound {
    double p = 0.0;
    double c1 = 0.0;
    double bound = 0.0;
};

/**
 * @brief Explicit bound lambda_c^{(p)} <= e^{c1 2^ell} for beta = |x|^ell,
 * with c = c_ell / 2, c1 = ((2^ell + 1) / c)^{ell / (2 - ell)}, p = (2 + ell)/(2 - ell).
 */
inline PgpeBound pgpe_upper_bound(double ell, double c_ell) {
    if (ell >= 2.0) throw DomainError("ell must be < 2");
    if (!(ell > 0.0)) throw ParameterError("ell must be > 0");
    if (!(c_ell > 0.0)) throw ParameterError("c_ell must be > 0");
    const double c = c_ell / 2.0;
    PgpeBound b;
    b.p = (2.0 + ell) / (2.0 - ell);
    b.c1 = std::pow((std::pow(2.0, ell) + 1.0) / c, ell / (2.0 - ell));
    b.bound = std::exp(b.c1 * std::pow(2.0, ell));
    return b;
}

/// theta(t) = lambda t^p + eps t; gamma = e^{-theta}.
struct Theta {
    double lambda = 1.0;
    double p = 1.0;
    double eps = 0.0;
    double operator()(double t) const { return lambda * std::pow(t, p) + eps * t; }
    double gamma(double t) const { return std::exp(-(*this)(t)); }
};

struct SupermartingaleOptions {
    double R = 20.0;
    double dx = 0.05;
    double ds = 1e-2;
    double tol = 1e-6;
};

struct SupermartingaleFamily {
    std::vector<double> t_grid;
    std::vector<GridFunction> f;  ///< f^{(-t)} for each t in t_grid
    bool assumption_holds = true;
    double max_violation = 0.0;   ///< max of T_t f^{(-t-s)} - f^{(-s)} over pairs and nodes
    double violation_x = 0.0;
    double violation_t = 0.0;
    double violation_s = 0.0;
};

/**
 * @brief f^{(-t)} = int_0^{s_max} gamma(s + t) T_s g ds by trapezoid
 * quadrature over the discrete linear flow, and the check
 * T_t f^{(-t-s)} <= f^{(-s)} + tol for all t, s in t_grid with t + s also
 * in t_grid. t_grid values must be multiples of ds.
 */
inline SupermartingaleFamily supermartingale_family(const ModelSpec& model, const std::function<double(double)>& g,
                                                    const Theta& theta, std::span<const double> t_grid, double s_max,
                                                    const SupermartingaleOptions& opt = {}) {
    const Grid1D grid = Grid1D::symmetric(opt.R, opt.dx);
    auto on_grid = [&](double t) {
        const double k = t / opt.ds;
        if (std::abs(k - std::round(k)) > 1e-9) throw ParameterError("t_grid values must be multiples of ds");
        return static_cast<std::size_t>(std::llround(k));
    };
    // T_s g for s = k ds, k = 0..n.
    const std::size_t n = on_grid(s_max);
    std::vector<std::vector<double>> Ts;
    Ts.reserve(n + 1);
    auto u = GridFunction::sample(grid, g);
    Ts.push_back(u.values);
    detail::march(model, grid, u.values, 0.0, s_max, opt.ds, 0.0,
                  [&](double, const std::vector<double>& v) { Ts.push_back(v); });
    auto family_at = [&](double t) {
        std::vector<double> f(grid.nx, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n ? 0.5 : 1.0) * opt.ds * theta.gamma(static_cast<double>(k) * opt.ds + t);
            for (std::size_t i = 0; i < grid.nx; ++i) f[i] += w * Ts[k][i];
        }
        return f;
    };
    SupermartingaleFamily out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    for (double t : t_grid) {
        on_grid(t);
        out.f.emplace_back(grid, family_at(t));
    }
    for (std::size_t a = 0; a < t_grid.size(); ++a) {
        for (std::size_t b = 0; b < t_grid.size(); ++b) {
            const double t = t_grid[a], s = t_grid[b];
            if (t <= 0.0) continue;
            // T_t f^{(-t-s)}, by the same discrete flow.
            auto v = family_at(t + s);
            detail::march(model, grid, v, 0.0, t, opt.ds, 0.0, [](double, const auto&) {});
            const auto& fs = out.f[b].values;
            for (std::size_t i = 0; i < grid.nx; ++i) {
                const double viol = v[i] - fs[i];
                if (viol > out.max_violation) {
                    out.max_violation = viol;
                    out.violation_x = grid.x(i);
                    out.violation_t = t;
                    out.violation_s = s;
                }
            }
        }
    }
    out.assumption_holds = out.max_violation <= opt.tol;
    return out;
}

struct SupermartingaleMc {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> stderr_;
    bool nonincreasing = true;  ///< within 3 pooled stderr between consecutive times
};

/**
 * @brief Sample means of N_t = <f^{(-t)}, X_t> over level-n superprocess runs
 * from delta_{x0}, at the family's t_grid.
 */
inline SupermartingaleMc supermartingale_mc(const ModelSpec& model, const SupermartingaleFamily& fam, std::uint64_t n,
                                            std::size_t reps, std::uint64_t seed, double dt = 0.01,
                                            unsigned workers = 0, double x0 = 0.0) {
    std::vector<double> rec;
    for (double t : fam.t_grid)
        if (t > 0.0) rec.push_back(t);
    const double horizon = rec.empty() ? 0.0 : rec.back();
    std::vector<std::vector<double>> vals(rec.size(), std::vector<double>(reps, 0.0));
    parallel_for(reps, workers, [&](std::size_t i) {
        SuperOptions so;
        so.run.dt = dt;
        so.run.replicate = i;
        so.run.stream_tag = 0x5A11ull;
        so.run.caps.max_particles = std::numeric_limits<std::uint64_t>::max();
        std::size_t k = 0;
        so.run.on_record = [&](const ParticlePopulation& p) {
            const auto& f = fam.f[static_cast<std::size_t>(
                std::find(fam.t_grid.begin(), fam.t_grid.end(), rec[k]) - fam.t_grid.begin())];
            double s = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j) s += f.at(p.position(j)[0]);
            vals[k][i] = s / static_cast<double>(p.level);
            ++k;
        };
        simulate_superprocess(model, InitialCondition::fixed_at({x0}, n), SuperLevel{n}, horizon, rec, seed, so);
    });
    SupermartingaleMc out;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const auto ms = stats::mean_stderr(vals[k]);
        out.t.push_back(rec[k]);
        out.mean.push_back(ms.mean);
        out.stderr_.push_back(ms.stderr_);
        if (k > 0) {
            const double pooled = std::hypot(out.stderr_[k], out.stderr_[k - 1]);
            if (out.mean[k] > out.mean[k - 1] + 3.0 * pooled) out.nonincreasing = false;
        }
    }
    return out;
}

struct LocalGrowthOptions {
    std::uint64_t n = 10;
    double horizon = 4.0;
    double record_step = 0.05;
    double dt = 0.01;
    Caps caps{10'000'000, std::numeric_limits<double>::infinity()};
    double factor = 10.0;
    unsigned workers = 0;
};

struct LocalGrowthReport {
    std::vector<double> lambda_probe;
    std::vector<double> exceed_fraction;  ///< per lambda, among surviving replicates
    std::size_t surviving = 0;
    std::size_t capped = 0;
    std::vector<std::vector<double>> ratio;  ///< [lambda][replicate] running max over baseline (surviving only)
};

/**
 * @brief For each probe lambda, the fraction of surviving level-n replicates
 * whose running max of e^{-lambda t} X_t(B) after t = 1 exceeds factor times
 * the baseline max over t in [0.5, 1].
 */
inline LocalGrowthReport local_growth_experiment(const ModelSpec& model, const Window& B,
                                                 std::span<const double> lambda_probe, std::size_t reps,
                                                 std::uint64_t seed, const LocalGrowthOptions& opt = {}) {
    const auto rec = record_grid(opt.horizon, opt.record_step, false);
    std::vector<StatisticSeries> runs(reps);
    parallel_for(reps, opt.workers, [&](std::size_t i) {
        SuperOptions so;
        so.run.dt = opt.dt;
        so.run.replicate = i;
        so.run.stream_tag = 0x10CAull;
        so.run.caps = opt.caps;
        so.run.window = B;
        runs[i] = simulate_superprocess(model, InitialCondition::fixed_at({0.0}, opt.n), SuperLevel{opt.n},
                                        opt.horizon, rec, seed, so)
                      .series;
    });
    LocalGrowthReport out;
    out.lambda_probe.assign(lambda_probe.begin(), lambda_probe.end());
    out.ratio.resize(lambda_probe.size());
    std::vector<double> exceed(lambda_probe.size(), 0.0);
    for (const auto& s : runs) {
        if (s.caps_hit) ++out.capped;
        const bool alive = s.caps_hit || (!s.records.empty() && s.records.back().total_mass > 0.0);
        if (!alive) continue;
        ++out.surviving;
        for (std::size_t l = 0; l < lambda_probe.size(); ++l) {
            double base = 0.0, run_max = 0.0;
            for (const auto& r : s.records) {
                const double v = std::exp(-lambda_probe[l] * r.t) * r.local_mass;
                if (r.t >= 0.5 - 1e-9 && r.t <= 1.0 + 1e-9) base = std::max(base, v);
                if (r.t > 1.0 + 1e-9) run_max = std::max(run_max, v);
            }
            const double ratio = base > 0.0 ? run_max / base : (run_max > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            out.ratio[l].push_back(ratio);
            if (ratio >= opt.factor) exceed[l] += 1.0;
        }
    }
    for (double e : exceed) out.exceed_fraction.push_back(out.surviving ? e / static_cast<double>(out.surviving) : 0.0);
    return out;
}

enum class SpreadSystem { Superprocess, SingleParticleBbm };

struct SpreadOptions {
    SpreadSystem system = SpreadSystem::Superprocess;
    std::uint64_t n = 1;  ///< superprocess level; the run starts from delta_0
    double record_step = 0.05;
    double dt = 0.01;
    Caps caps{1'000'000, std::numeric_limits<double>::infinity()};
    std::vector<double> eps_sweep{0.0, 0.25, 0.5, 1.0};
    unsigned workers = 0;
};

struct SpreadReport {
    std::vector<double> per_replicate;  ///< max over t in [1, horizon] of log+(M_t)/t, surviving replicates
    double p99 = 0.0;
    std::vector<double> at_horizon;  ///< log+(M_T)/T at the last record, uncapped surviving replicates
    double p99_at_horizon = 0.0;
    std::size_t surviving = 0;
    std::size_t capped = 0;
    std::vector<double> eps;
    std::vector<double> exceed_fraction;  ///< fraction with M_t > exp((sqrt 2 + eps) t) for some recorded t >= 1
};

/**
 * @brief Rightmost-particle spread M_t: per surviving replicate the max over
 * recorded t in [1, horizon] of log+(M_t)/t (log+ = max(log, 0)), and its
 * 99th percentile. Runs are the level-n superprocess from delta_0 or a
 * branching system from one particle at 0. Records stop at the population cap.
 */
inline SpreadReport spread_check(const ModelSpec& model, double horizon, std::size_t reps, std::uint64_t seed,
                                 const SpreadOptions& opt = {}) {
    if (model.dim != 1) throw ParameterError("spread_check supports d = 1");
    const auto rec = record_grid(horizon, opt.record_step, false);
    std::vector<StatisticSeries> runs(reps);
    parallel_for(reps, opt.workers, [&](std::size_t i) {
        ParticleRunOptions po;
        po.dt = opt.dt;
        po.replicate = i;
        po.stream_tag = 0x5B2Eull;
        po.caps = opt.caps;
        if (opt.system == SpreadSystem::SingleParticleBbm) {
            runs[i] = simulate_bbm(model, InitialCondition::fixed_at({0.0}, 1), horizon, rec, seed, po).series;
        } else {
            SuperOptions so;
            so.run = po;
            runs[i] = simulate_superprocess(model, InitialCondition::fixed_at({0.0}, opt.n), SuperLevel{opt.n}, horizon,
                                            rec, seed, so)
                          .series;
        }
    });
    SpreadReport out;
    out.eps = opt.eps_sweep;
    std::vector<double> exceed(opt.eps_sweep.size(), 0.0);
    for (const auto& s : runs) {
        if (s.caps_hit) ++out.capped;
        bool alive = s.caps_hit;
        for (const auto& r : s.records)
            if (r.t >= 1.0 - 1e-9 && r.total_mass > 0.0) alive = true;
        if (!alive) continue;
        ++out.surviving;
        double best = 0.0;
        std::vector<bool> hit(opt.eps_sweep.size(), false);
        for (const auto& r : s.records) {
            if (r.t < 1.0 - 1e-9 || r.total_mass <= 0.0) continue;
            const double lp = r.rightmost > 1.0 ? std::log(r.rightmost) : 0.0;
            best = std::max(best, lp / r.t);
            for (std::size_t e = 0; e < opt.eps_sweep.size(); ++e)
                if (lp > (std::sqrt(2.0) + opt.eps_sweep[e]) * r.t) hit[e] = true;
        }
        out.per_replicate.push_back(best);
        if (!s.caps_hit && !s.records.empty() && s.records.back().total_mass > 0.0) {
            const auto& r = s.records.back();
            out.at_horizon.push_back((r.rightmost > 1.0 ? std::log(r.rightmost) : 0.0) / r.t);
        }
        for (std::size_t e = 0; e < hit.size(); ++e) exceed[e] += hit[e] ? 1.0 : 0.0;
    }
    if (!out.per_replicate.empty()) out.p99 = stats::quantile(out.per_replicate, 0.99);
    if (!out.at_horizon.empty()) out.p99_at_horizon = stats::quantile(out.at_horizon, 0.99);
    for (double e : exceed) out.exceed_fraction.push_back(out.surviving ? e / static_cast<double>(out.surviving) : 0.0);
    return out;
}

inline CsvTable growth_fit_csv(const GrowthFit& f) {
    CsvTable t{{"law", "K", "q", "r", "residual_norm", "t_lo", "t_hi", "replicates_used", "replicates_capped"}, {}};
    t.add(to_string(f.law), f.K, f.q, f.r, f.residual_norm, f.t_lo, f.t_hi,
          static_cast<std::uint64_t>(f.replicates_used), static_cast<std::uint64_t>(f.replicates_capped));
    return t;
}

inline CsvTable pgpe_csv(const PgpeEstimate& e) {
    CsvTable t{{"p", "lambda", "verdict", "log_slope", "integral", "s_max"}, {}};
    for (std::size_t i = 0; i < e.lambda_grid.size(); ++i)
        t.add(e.p, e.lambda_grid[i], e.verdicts[i] == PgpeVerdict::Finite ? "finite" : "divergent", e.log_slopes[i],
              e.integrals[i], e.s_max);
    return t;
}

}  // namespace supergrowth
