#pragma once
/**
 * @file model.hpp
 * @brief Model description: motion coefficients (drift, diffusion), the
 * mass-creation and intensity coefficients, and the spatial domain.
 *
 * Coefficients come from a closed catalog so that the simulators can take
 * exact shortcuts (constant rates, Gaussian increments).
 */

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace supergrowth {

/// Bad point or domain (e.g. starting point outside D).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Coefficient evaluated to a non-finite value or a model invariant failed.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter for an operation.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace coef {

struct Constant {
    double value = 0.0;
};

/// c0 + c1 |x|^p
struct Power {
    double c0 = 0.0;
    double c1 = 1.0;
    double p = 1.0;
};

/// First coordinate x_0 (signed; used for Gaussian functionals).
struct SignedLinear {
    double scale = 1.0;
};

/// height * exp(1 - 1/(1 - r^2)) for r = |x - center| / radius < 1, else 0.
struct Bump {
    double height = 1.0;
    double radius = 1.0;
    double center = 0.0;
};

/// height * exp(-|x - center|^2 / (2 width^2))
struct Gaussian {
    double height = 1.0;
    double width = 1.0;
    double center = 0.0;
};

/// height on [lo, hi] in the first coordinate, 0 elsewhere.
struct Indicator {
    double height = 1.0;
    double lo = -1.0;
    double hi = 1.0;
};

}  // namespace coef

/// Scalar coefficient: beta, alpha, or a test function g.
using Scalar = std::variant<coef::Constant, coef::Power, coef::SignedLinear, coef::Bump,
                            coef::Gaussian, coef::Indicator>;

inline double norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

namespace detail {

inline double distance_to(std::span<const double> x, double center) {
    if (x.size() == 1) return std::abs(x[0] - center);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = i == 0 ? center : 0.0;
        s += (x[i] - c) * (x[i] - c);
    }
    return std::sqrt(s);
}

}  // namespace detail

inline double evaluate(const Scalar& c, std::span<const double> x) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, coef::Constant>) {
                return k.value;
            } else if constexpr (std::is_same_v<K, coef::Power>) {
                const double r = x.size() == 1 ? std::abs(x[0]) : norm(x);
                if (k.p == 0.0) return k.c0 + k.c1;
                if (k.p == 1.0) return k.c0 + k.c1 * r;
                if (k.p == 2.0) return k.c0 + k.c1 * r * r;
                return k.c0 + k.c1 * std::pow(r, k.p);
            } else if constexpr (std::is_same_v<K, coef::SignedLinear>) {
                return k.scale * x[0];
            } else if constexpr (std::is_same_v<K, coef::Bump>) {
                const double r = detail::distance_to(x, k.center) / k.radius;
                if (r >= 1.0) return 0.0;
                return k.height * std::exp(1.0 - 1.0 / (1.0 - r * r));
            } else if constexpr (std::is_same_v<K, coef::Gaussian>) {
                const double r = detail::distance_to(x, k.center);
                return k.height * std::exp(-r * r / (2.0 * k.width * k.width));
            } else {
                return (x[0] >= k.lo && x[0] <= k.hi) ? k.height : 0.0;
            }
        },
        c);
}

inline double evaluate(const Scalar& c, double x) { return evaluate(c, std::span<const double>(&x, 1)); }

/// True when the coefficient does not depend on x.
inline bool is_constant(const Scalar& c) {
    if (std::holds_alternative<coef::Constant>(c)) return true;
    if (const auto* p = std::get_if<coef::Power>(&c)) return p->c1 == 0.0 || p->p == 0.0;
    return false;
}

/// Upper bound of |c| over the ball of the given radius around the origin.
inline double sup_on_ball(const Scalar& c, double radius) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, coef::Constant>) {
                return std::abs(k.value);
            } else if constexpr (std::is_same_v<K, coef::Power>) {
                return std::abs(k.c0) + std::abs(k.c1) * (k.p == 0.0 ? 1.0 : std::pow(radius, k.p));
            } else if constexpr (std::is_same_v<K, coef::SignedLinear>) {
                return std::abs(k.scale) * radius;
            } else {
                return std::abs(k.height);
            }
        },
        c);
}

namespace drift {
struct Zero {};
struct ConstantVector {
    std::vector<double> value;
};
/// b(x) = rate * x (linear restoring/repelling drift).
struct Linear {
    double rate = 0.0;
};
}  // namespace drift

using Drift = std::variant<drift::Zero, drift::ConstantVector, drift::Linear>;

namespace diffusion {
/// a = sigma2 * Id
struct IdentityScalar {
    double sigma2 = 1.0;
};
/// Constant symmetric positive definite matrix, row-major d x d.
struct ConstantMatrix {
    std::vector<double> a;
};
}  // namespace diffusion

using Diffusion = std::variant<diffusion::IdentityScalar, diffusion::ConstantMatrix>;

namespace domain {
struct WholeSpace {};
struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};
struct Ball {
    std::vector<double> center;
    double radius = 1.0;
};
}  // namespace domain

using Domain = std::variant<domain::WholeSpace, domain::Interval, domain::Ball>;

inline bool contains(const Domain& dom, std::span<const double> x) {
    return std::visit(
        [&](const auto& k) -> bool {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, domain::WholeSpace>) {
                return true;
            } else if constexpr (std::is_same_v<K, domain::Interval>) {
                return x[0] > k.lo && x[0] < k.hi;
            } else {
                double s = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    const double c = i < k.center.size() ? k.center[i] : 0.0;
                    s += (x[i] - c) * (x[i] - c);
                }
                return s < k.radius * k.radius;
            }
        },
        dom);
}

inline bool contains(const Domain& dom, double x) { return contains(dom, std::span<const double>(&x, 1)); }

/**
 * @brief The quadruple (L, beta, alpha; D) in dimension d, with
 * L = (1/2) div(a grad) + b . grad.
 */
struct ModelSpec {
    int dim = 1;
    Drift drift = drift::Zero{};
    Diffusion diffusion = diffusion::IdentityScalar{};
    Scalar beta = coef::Constant{0.0};
    Scalar alpha = coef::Constant{1.0};
    Domain domain = domain::WholeSpace{};

    /// beta from the power catalog with exponent 2: T_t 1 is finite only for small t.
    bool explosive_expectation() const {
        if (const auto* p = std::get_if<coef::Power>(&beta)) return p->p == 2.0 && p->c1 > 0.0;
        return false;
    }

    double beta_at(std::span<const double> x) const { return evaluate(beta, x); }
    double alpha_at(std::span<const double> x) const { return evaluate(alpha, x); }
    double beta_at(double x) const { return evaluate(beta, x); }
    double alpha_at(double x) const { return evaluate(alpha, x); }

    /// Scalar diffusion coefficient sigma^2 for the identity case; 0 otherwise.
    double sigma2() const {
        if (const auto* s = std::get_if<diffusion::IdentityScalar>(&diffusion)) return s->sigma2;
        const auto& m = std::get<diffusion::ConstantMatrix>(diffusion);
        return m.a.empty() ? 0.0 : m.a[0];
    }

    /// Exact Gaussian increments apply (b = 0, a = sigma^2 Id).
    bool pure_brownian() const {
        return std::holds_alternative<drift::Zero>(drift) &&
               std::holds_alternative<diffusion::IdentityScalar>(diffusion);
    }
};

/// Checks the structural invariants; throws ModelError with the offending field.
inline void validate(const ModelSpec& m) {
    if (m.dim < 1) throw ModelError("dimension must be positive");
    if (const auto* p = std::get_if<coef::Power>(&m.beta)) {
        if (p->p < 0.0 || p->p > 2.0) throw ModelError("beta: power exponent must lie in [0, 2]");
    }
    if (const auto* c = std::get_if<coef::Constant>(&m.alpha)) {
        if (!(c->value > 0.0)) throw ModelError("alpha: must be > 0 on D");
    }
    if (const auto* p = std::get_if<coef::Power>(&m.alpha)) {
        if (!(p->c0 > 0.0) || p->c1 < 0.0) throw ModelError("alpha: must be > 0 on D");
    }
    if (std::holds_alternative<coef::SignedLinear>(m.alpha) ||
        std::holds_alternative<coef::Bump>(m.alpha) ||
        std::holds_alternative<coef::Gaussian>(m.alpha) ||
        std::holds_alternative<coef::Indicator>(m.alpha))
        throw ModelError("alpha: must be > 0 on D");
    if (const auto* s = std::get_if<diffusion::IdentityScalar>(&m.diffusion)) {
        if (!(s->sigma2 > 0.0)) throw ModelError("diffusion: sigma2 must be > 0");
    } else {
        const auto& a = std::get<diffusion::ConstantMatrix>(m.diffusion).a;
        if (a.size() != static_cast<std::size_t>(m.dim * m.dim))
            throw ModelError("diffusion: matrix must be d x d");
    }
    if (const auto* v = std::get_if<drift::ConstantVector>(&m.drift)) {
        if (v->value.size() != static_cast<std::size_t>(m.dim))
            throw ModelError("drift: vector must have d entries");
    }
    if (std::holds_alternative<domain::Interval>(m.domain) && m.dim != 1)
        throw ModelError("domain: interval requires d = 1");
    if (const auto* iv = std::get_if<domain::Interval>(&m.domain)) {
        if (!(iv->lo < iv->hi)) throw ModelError("domain: interval must have lo < hi");
    }
}

/// Throws ModelError unless alpha(x) > 0 and both coefficients are finite at x.
inline void check_coefficients_at(const ModelSpec& m, std::span<const double> x) {
    const double a = m.alpha_at(x);
    const double b = m.beta_at(x);
    if (!std::isfinite(a) || !std::isfinite(b)) throw ModelError("non-finite coefficient evaluation");
    if (!(a > 0.0)) throw ModelError("alpha must be > 0 on D");
}

}  // namespace supergrowth
