#pragma once
/**
 * @file motion.hpp
 * @brief Sample paths of the diffusion generated by L on D, killed on
 * leaving D, with the accumulated mass-creation integral along the path.
 */

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "supergrowth/model.hpp"
#include "supergrowth/parallel.hpp"
#include "supergrowth/rng.hpp"

namespace supergrowth {

struct PathSample {
    std::vector<double> position;
    double time = 0.0;
    bool alive = true;
    double beta_integral = 0.0;
};

/**
 * @brief Per-model stepping helper: lower Cholesky factor of a, drift
 * evaluation, and one Euler-Maruyama increment in place.
 */
class MotionStepper {
public:
    explicit MotionStepper(const ModelSpec& model) : model_(&model), dim_(model.dim) {
        if (const auto* s = std::get_if<diffusion::IdentityScalar>(&model.diffusion)) {
            scalar_sigma_ = std::sqrt(s->sigma2);
        } else {
            const auto& a = std::get<diffusion::ConstantMatrix>(model.diffusion).a;
            chol_.assign(a.size(), 0.0);
            for (int i = 0; i < dim_; ++i) {
                for (int j = 0; j <= i; ++j) {
                    double s = a[i * dim_ + j];
                    for (int k = 0; k < j; ++k) s -= chol_[i * dim_ + k] * chol_[j * dim_ + k];
                    if (i == j) {
                        if (!(s > 0.0)) throw ModelError("diffusion matrix is not positive definite");
                        chol_[i * dim_ + i] = std::sqrt(s);
                    } else {
                        chol_[i * dim_ + j] = s / chol_[j * dim_ + j];
                    }
                }
            }
        }
        noise_.resize(static_cast<std::size_t>(dim_));
    }

    int dim() const { return dim_; }

    /// x <- x + b(x) dt + sqrt(dt) * chol(a) * xi
    void step(std::span<double> x, double dt, Rng& rng) {
        const double sq = std::sqrt(dt);
        std::visit(
            [&](const auto& b) {
                using B = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<B, drift::ConstantVector>) {
                    for (int i = 0; i < dim_; ++i) x[i] += b.value[i] * dt;
                } else if constexpr (std::is_same_v<B, drift::Linear>) {
                    for (int i = 0; i < dim_; ++i) x[i] += b.rate * x[i] * dt;
                }
            },
            model_->drift);
        if (chol_.empty()) {
            for (int i = 0; i < dim_; ++i) x[i] += scalar_sigma_ * sq * rng.normal();
            return;
        }
        for (int i = 0; i < dim_; ++i) noise_[i] = rng.normal();
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int k = 0; k <= i; ++k) s += chol_[i * dim_ + k] * noise_[k];
            x[i] += sq * s;
        }
    }

    /// One-dimensional fast path (pure Brownian or general).
    double step1(double x, double dt, Rng& rng) {
        step(std::span<double>(&x, 1), dt, rng);
        return x;
    }

private:
    const ModelSpec* model_;
    int dim_;
    double scalar_sigma_ = 1.0;
    std::vector<double> chol_;
    std::vector<double> noise_;
};

namespace detail {

inline void require_step(double t, double dt) {
    if (!(t >= 0.0)) throw ParameterError("duration must be >= 0");
    if (t > 0.0 && !(dt > 0.0)) throw ParameterError("dt must be > 0");
    if (t > 0.0 && dt > t) throw ParameterError("dt must not exceed the duration");
}

}  // namespace detail

/**
 * @brief One path of Y on [0, t]: Euler-Maruyama steps (exact Gaussian
 * increments when b = 0 and a = sigma^2 Id), killing at the first step whose
 * endpoint leaves D, trapezoidal beta integral over alive steps.
 */
inline PathSample simulate_path(const ModelSpec& model, std::span<const double> x0, double t, double dt,
                                Rng& rng) {
    if (static_cast<int>(x0.size()) != model.dim) throw ParameterError("x0 has the wrong dimension");
    if (!contains(model.domain, x0)) throw DomainError("starting point outside the domain");
    detail::require_step(t, dt);

    PathSample out;
    out.position.assign(x0.begin(), x0.end());
    if (t == 0.0) return out;

    MotionStepper stepper(model);
    const bool constant_beta = is_constant(model.beta);
    double beta_prev = model.beta_at(out.position);
    if (!std::isfinite(beta_prev)) throw ModelError("non-finite beta at the starting point");

    std::vector<double> x = out.position;
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-12));
    double elapsed = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double h = (k + 1 == steps) ? t - elapsed : dt;
        stepper.step(x, h, rng);
        elapsed = (k + 1 == steps) ? t : elapsed + h;
        if (!contains(model.domain, x)) {
            out.alive = false;
            out.time = elapsed;
            out.position = x;
            return out;
        }
        if (constant_beta) {
            out.beta_integral += beta_prev * h;
        } else {
            const double b = model.beta_at(x);
            if (!std::isfinite(b)) throw ModelError("non-finite beta along the path");
            out.beta_integral += 0.5 * (beta_prev + b) * h;
            beta_prev = b;
        }
    }
    out.time = t;
    out.position = x;
    return out;
}

inline PathSample simulate_path(const ModelSpec& model, double x0, double t, double dt, Rng& rng) {
    return simulate_path(model, std::span<const double>(&x0, 1), t, dt, rng);
}

/// Functional of a one-dimensional standard Brownian path.
enum class BrownianFunctional {
    AbsPower,  ///< int_0^t |B_s|^ell ds
    Signed,    ///< int_0^t B_s ds
};

/**
 * @brief Independent samples of int_0^t |B_s|^ell ds (or the signed integral)
 * for standard one-dimensional Brownian motion, trapezoid rule on exact
 * Gaussian increments. Replicate i uses stream (seed, stream_tag, i).
 */
inline std::vector<double> sample_beta_integral(double ell, double t, double dt, std::size_t reps,
                                                std::uint64_t seed, unsigned workers = 0,
                                                BrownianFunctional kind = BrownianFunctional::AbsPower,
                                                std::uint64_t stream_tag = 0xB17Eull) {
    if (!(ell > 0.0)) throw ParameterError("ell must be > 0");
    if (reps < 1) throw ParameterError("reps must be >= 1");
    detail::require_step(t, dt);
    std::vector<double> out(reps, 0.0);
    if (t == 0.0) return out;
    const auto steps = static_cast<std::int64_t>(std::ceil(t / dt - 1e-12));
    const double h_last = t - static_cast<double>(steps - 1) * dt;
    auto f = [&](double b) {
        if (kind == BrownianFunctional::Signed) return b;
        const double a = std::abs(b);
        if (ell == 1.0) return a;
        if (ell == 2.0) return a * a;
        return std::pow(a, ell);
    };
    parallel_for(reps, workers, [&](std::size_t i) {
        Rng rng(seed, {stream_tag, i});
        double b = 0.0, fprev = 0.0, acc = 0.0;
        const double sq = std::sqrt(dt);
        for (std::int64_t k = 0; k < steps; ++k) {
            const double h = (k + 1 == steps) ? h_last : dt;
            b += (k + 1 == steps ? std::sqrt(h) : sq) * rng.normal();
            const double fb = f(b);
            acc += 0.5 * (fprev + fb) * h;
            fprev = fb;
        }
        out[i] = acc;
    });
    return out;
}

/**
 * @brief Fraction of paths killed before t for replicate streams
 * (seed, tag, i). Shares increments across models with the same seed.
 */
inline double killed_fraction(const ModelSpec& model, double x0, double t, double dt, std::size_t reps,
                              std::uint64_t seed, unsigned workers = 0) {
    std::vector<double> killed(reps, 0.0);
    parallel_for(reps, workers, [&](std::size_t i) {
        Rng rng(seed, {0xC111ull, i});
        killed[i] = simulate_path(model, x0, t, dt, rng).alive ? 0.0 : 1.0;
    });
    double s = 0.0;
    for (double k : killed) s += k;
    return s / static_cast<double>(reps);
}

}  // namespace supergrowth
