#pragma once
/**
 * @file schroedinger.hpp
 * @brief Monte Carlo for T_t g(x) = E_x[exp(int_0^t beta(Y_s) ds) g(Y_t); t < tau_D]
 * and for the upper tails of int_0^1 |B_s|^ell ds.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supergrowth/io.hpp"
#include "supergrowth/model.hpp"
#include "supergrowth/motion.hpp"
#include "supergrowth/parallel.hpp"
#include "supergrowth/rng.hpp"
#include "supergrowth/stats.hpp"

namespace supergrowth {

struct FkEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t reps = 0;
    double truncation_fraction = 0.0;
    bool divergence_suspected = false;
};

struct FkOptions {
    double weight_cap = std::numeric_limits<double>::infinity();
    unsigned workers = 0;
    std::uint64_t stream_tag = 0xF00Cull;
};

namespace detail {

/// Weight exp(I) * g(Y_t) for one path; sets clipped when exp(I) exceeded the cap.
inline double fk_weight(const PathSample& p, const Scalar& g, double cap, bool& clipped) {
    clipped = false;
    if (!p.alive) return 0.0;
    double w = std::exp(p.beta_integral);
    if (w > cap) {
        w = cap;
        clipped = true;
    }
    return w * evaluate(g, p.position);
}

/// One-dimensional path integral with scalar state; same law and stream usage as simulate_path.
inline PathSample path_1d(const ModelSpec& model, MotionStepper& stepper, double x0, double t, double dt,
                          Rng& rng) {
    PathSample out;
    out.position = {x0};
    if (t == 0.0) return out;
    const bool constant_beta = is_constant(model.beta);
    double x = x0;
    double beta_prev = model.beta_at(x);
    if (!std::isfinite(beta_prev)) throw ModelError("non-finite beta at the starting point");
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-12));
    double elapsed = 0.0, integral = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double h = (k + 1 == steps) ? t - elapsed : dt;
        x = stepper.step1(x, h, rng);
        elapsed = (k + 1 == steps) ? t : elapsed + h;
        if (!contains(model.domain, x)) {
            out.alive = false;
            out.time = elapsed;
            out.position[0] = x;
            out.beta_integral = integral;
            return out;
        }
        if (constant_beta) {
            integral += beta_prev * h;
        } else {
            const double b = model.beta_at(x);
            if (!std::isfinite(b)) throw ModelError("non-finite beta along the path");
            integral += 0.5 * (beta_prev + b) * h;
            beta_prev = b;
        }
    }
    out.time = t;
    out.position[0] = x;
    out.beta_integral = integral;
    return out;
}

}  // namespace detail

/**
 * @brief Sample mean of exp(beta integral) g(Y_t) 1{alive}, weights clipped at
 * weight_cap. Replicate i draws from stream (seed, stream_tag, i), so models
 * sharing a seed share their Brownian increments.
 */
inline FkEstimate fk_estimate(const ModelSpec& model, const Scalar& g, std::span<const double> x, double t,
                              double dt, std::size_t reps, std::uint64_t seed, const FkOptions& opt = {}) {
    if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
    if (reps < 1) throw ParameterError("reps must be >= 1");
    if (!(opt.weight_cap > 0.0)) throw ParameterError("weight_cap must be > 0");
    if (static_cast<int>(x.size()) != model.dim) throw ParameterError("x has the wrong dimension");
    if (!contains(model.domain, x)) throw DomainError("starting point outside the domain");
    if (t > 0.0) detail::require_step(t, dt);

    std::vector<double> w(reps, 0.0), clipped(reps, 0.0);
    const std::vector<double> x0(x.begin(), x.end());
    parallel_for(reps, opt.workers, [&](std::size_t i) {
        Rng rng(seed, {opt.stream_tag, i});
        MotionStepper stepper(model);
        const PathSample p = model.dim == 1 ? detail::path_1d(model, stepper, x0[0], t, dt, rng)
                                            : simulate_path(model, x0, t, dt, rng);
        bool c = false;
        w[i] = detail::fk_weight(p, g, opt.weight_cap, c);
        clipped[i] = c ? 1.0 : 0.0;
    });
    const auto ms = stats::mean_stderr(w);
    FkEstimate r;
    r.mean = ms.mean;
    r.stderr_ = ms.stderr_;
    r.reps = reps;
    r.truncation_fraction = stats::pairwise_sum(clipped) / static_cast<double>(reps);
    r.divergence_suspected = r.truncation_fraction > 0.01;
    return r;
}

inline FkEstimate fk_estimate(const ModelSpec& model, const Scalar& g, double x, double t, double dt,
                              std::size_t reps, std::uint64_t seed, const FkOptions& opt = {}) {
    return fk_estimate(model, g, std::span<const double>(&x, 1), t, dt, reps, seed, opt);
}

enum class TailMethod { Naive, Splitting };

inline const char* to_string(TailMethod m) { return m == TailMethod::Naive ? "naive" : "splitting"; }

struct TailEstimate {
    double K = 0.0;
    double prob = 0.0;
    double log_prob = -std::numeric_limits<double>::infinity();
    double stderr_ = 0.0;
    TailMethod method = TailMethod::Naive;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    bool underflow = false;
};

struct TailOptions {
    double dt = 1e-3;
    int levels = 10;
    std::size_t batches = 20;  ///< independent splitting runs; stderr from their spread
    unsigned workers = 0;
};

namespace detail {

struct SplitState {
    double s = 0.0;  ///< elapsed time in [0, 1]
    double b = 0.0;  ///< B_s
    double i = 0.0;  ///< running integral of |B|^ell
};

/**
 * @brief Advances one state until its score reaches level or s reaches 1.
 * Intermediate stages score I + |B|^ell (1 - s), the integral obtained if B
 * stayed at its current level; the final stage scores I itself. The score
 * is continuous along the path and dominates I, so the stage events are
 * nested and the last one is exactly {I_1 >= K}.
 */
inline bool split_advance(SplitState& st, double ell, double level, double dt, bool final_stage, Rng& rng) {
    auto f = [ell](double b) {
        const double a = std::abs(b);
        return ell == 1.0 ? a : (ell == 2.0 ? a * a : std::pow(a, ell));
    };
    double fprev = f(st.b);
    auto score = [&] { return final_stage ? st.i : st.i + fprev * (1.0 - st.s); };
    while (score() < level) {
        if (st.s >= 1.0 - 1e-12) return false;
        const double h = std::min(dt, 1.0 - st.s);
        st.b += std::sqrt(h) * rng.normal();
        const double fb = f(st.b);
        st.i += 0.5 * (fprev + fb) * h;
        fprev = fb;
        st.s += h;
    }
    return true;
}

/// One fixed-effort splitting estimate with n trajectories per stage.
inline double split_once(double ell, double K, std::size_t n, const TailOptions& opt, std::uint64_t seed,
                         std::uint64_t batch) {
    std::vector<SplitState> entrance(1), work(n);
    std::vector<unsigned char> hit(n);
    double p = 1.0;
    for (int j = 1; j <= opt.levels; ++j) {
        const double level = K * static_cast<double>(j) / static_cast<double>(opt.levels);
        Rng pick(seed, {0x5E1Eull, batch, static_cast<std::uint64_t>(j)});
        for (std::size_t i = 0; i < n; ++i) work[i] = entrance[entrance.size() == 1 ? 0 : pick.index(entrance.size())];
        parallel_for(n, opt.workers, [&](std::size_t i) {
            Rng rng(seed, {0x5B17ull, batch, static_cast<std::uint64_t>(j), i});
            hit[i] = split_advance(work[i], ell, level, opt.dt, j == opt.levels, rng) ? 1 : 0;
        });
        std::vector<SplitState> next;
        for (std::size_t i = 0; i < n; ++i)
            if (hit[i]) next.push_back(work[i]);
        if (next.empty()) return 0.0;
        p *= static_cast<double>(next.size()) / static_cast<double>(n);
        entrance = std::move(next);
    }
    return p;
}

}  // namespace detail

/**
 * @brief P(int_0^1 |B_s|^ell ds >= K) for standard one-dimensional Brownian motion.
 *
 * Naive: fraction of reps paths above K (flags underflow on zero hits).
 * Splitting: fixed-effort multilevel splitting with levels K j / m on the
 * score described at split_advance; each
 * stage restarts its trajectories from states drawn uniformly among the
 * previous stage's entrance states, and one run's estimate is the product
 * of the stage hit fractions. reps trajectories are spread over independent
 * batches whose spread gives the standard error (resampling makes the
 * per-stage binomial formula far too optimistic).
 */
inline TailEstimate tail_probability(double ell, double K, std::size_t reps, TailMethod method, std::uint64_t seed,
                                     const TailOptions& opt = {}) {
    if (!(ell > 0.0)) throw ParameterError("ell must be > 0");
    if (!(K >= 0.0)) throw ParameterError("K must be >= 0");
    if (reps < 1) throw ParameterError("reps must be >= 1");
    if (opt.levels < 1) throw ParameterError("levels must be >= 1");
    TailEstimate r;
    r.K = K;
    r.method = method;
    r.reps = reps;
    r.seed = seed;
    if (K == 0.0) {
        r.prob = 1.0;
        r.log_prob = 0.0;
        return r;
    }
    if (method == TailMethod::Naive) {
        const auto xs = sample_beta_integral(ell, 1.0, opt.dt, reps, seed, opt.workers,
                                             BrownianFunctional::AbsPower, 0x7A11ull);
        std::size_t hits = 0;
        for (double v : xs) hits += v >= K ? 1 : 0;
        const double n = static_cast<double>(reps);
        r.prob = static_cast<double>(hits) / n;
        r.stderr_ = std::sqrt(r.prob * (1.0 - r.prob) / n);
        r.underflow = hits == 0;
        r.log_prob = hits == 0 ? -std::numeric_limits<double>::infinity() : std::log(r.prob);
        return r;
    }

    const std::size_t batches = std::clamp<std::size_t>(opt.batches, 1, reps);
    const std::size_t per = reps / batches;
    std::vector<double> est(batches, 0.0);
    for (std::size_t bidx = 0; bidx < batches; ++bidx)
        est[bidx] = detail::split_once(ell, K, per, opt, seed, bidx);
    const auto ms = stats::mean_stderr(est);
    r.prob = ms.mean;
    r.stderr_ = ms.stderr_;
    r.underflow = !(r.prob > 0.0);
    r.log_prob = r.underflow ? -std::numeric_limits<double>::infinity() : std::log(r.prob);
    return r;
}

/// Upper bound (4/K) exp(-K^(2/ell)/2) from the reflection principle.
inline double reflection_tail_bound(double ell, double K) {
    if (!(K > 0.0)) throw ParameterError("K must be > 0");
    return 4.0 / K * std::exp(-0.5 * std::pow(K, 2.0 / ell));
}

struct SchilderFit {
    double c = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::vector<TailEstimate> tails;
    std::optional<double> failed_K;  ///< set when a tail estimate underflowed
};

/// Least-squares slope of -2 log P against K^(2/ell), 95% normal interval from the slope stderr.
inline SchilderFit fit_schilder(double ell, std::span<const double> Ks, std::span<const double> log_probs) {
    if (Ks.size() < 3 || Ks.size() != log_probs.size()) throw ParameterError("need >= 3 thresholds");
    for (std::size_t i = 1; i < Ks.size(); ++i)
        if (!(Ks[i] > Ks[i - 1])) throw ParameterError("thresholds must be increasing");
    std::vector<double> x(Ks.size()), y(Ks.size());
    for (std::size_t i = 0; i < Ks.size(); ++i) {
        if (!std::isfinite(log_probs[i])) throw ParameterError("non-finite log probability");
        x[i] = std::pow(Ks[i], 2.0 / ell);
        y[i] = -2.0 * log_probs[i];
    }
    const auto f = stats::fit_line(x, y);
    SchilderFit r;
    r.c = f.slope;
    r.ci_lo = f.slope - 1.96 * f.slope_stderr;
    r.ci_hi = f.slope + 1.96 * f.slope_stderr;
    return r;
}

/**
 * @brief Estimates c_ell from splitting tails at the given thresholds. Refuses
 * to fit (failed_K set, c = NaN) when any estimate underflows.
 */
inline SchilderFit schilder_constant_fit(double ell, std::span<const double> Ks, std::size_t reps,
                                         std::uint64_t seed, const TailOptions& opt = {}) {
    if (Ks.size() < 3) throw ParameterError("need >= 3 thresholds");
    std::vector<TailEstimate> tails;
    std::vector<double> lp;
    for (std::size_t i = 0; i < Ks.size(); ++i) {
        tails.push_back(tail_probability(ell, Ks[i], reps, TailMethod::Splitting, seed + i, opt));
        if (tails.back().underflow) {
            SchilderFit r;
            r.c = r.ci_lo = r.ci_hi = std::numeric_limits<double>::quiet_NaN();
            r.failed_K = Ks[i];
            r.tails = std::move(tails);
            return r;
        }
        lp.push_back(tails.back().log_prob);
    }
    auto r = fit_schilder(ell, Ks, lp);
    r.tails = std::move(tails);
    return r;
}

inline CsvTable tail_csv(std::span<const TailEstimate> tails) {
    CsvTable t{{"K", "prob", "log_prob", "stderr", "method", "reps", "seed"}, {}};
    for (const auto& e : tails)
        t.add(e.K, e.prob, e.log_prob, e.stderr_, to_string(e.method), static_cast<std::uint64_t>(e.reps), e.seed);
    return t;
}

}  // namespace supergrowth
