#pragma once
/**
 * @file superprocess.hpp
 * @brief Particle approximation of the (L, beta, alpha; D)-superdiffusion at
 * level n, Poissonization of its snapshots, and the checks built on them:
 * Poisson coupling, branching property, extinction.
 *
 * Level-n particles carry mass 1/n and follow a binary birth-death law with
 * birth rate n alpha + beta/2 and death rate n alpha - beta/2, i.e. events at
 * rate 2 n alpha with split probability 1/2 + beta/(4 n alpha). Net growth is
 * beta and the limiting branching mechanism is -beta u + alpha u^2.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "supergrowth/branching.hpp"
#include "supergrowth/io.hpp"
#include "supergrowth/model.hpp"
#include "supergrowth/parallel.hpp"
#include "supergrowth/rng.hpp"
#include "supergrowth/stats.hpp"

namespace supergrowth {

struct SuperLevel {
    std::uint64_t n = 100;

    double event_rate(double alpha) const { return 2.0 * static_cast<double>(n) * alpha; }
    /// Unclipped split probability; valid runs keep it inside [0, 1].
    double raw_split_prob(double beta, double alpha) const {
        return 0.5 + beta / (4.0 * static_cast<double>(n) * alpha);
    }
    double split_prob(double beta, double alpha) const { return std::clamp(raw_split_prob(beta, alpha), 0.0, 1.0); }
    double birth_rate(double beta, double alpha) const { return event_rate(alpha) * split_prob(beta, alpha); }
    double death_rate(double beta, double alpha) const {
        return event_rate(alpha) * (1.0 - split_prob(beta, alpha));
    }
    double mass() const { return 1.0 / static_cast<double>(n); }
};

/**
 * @brief Offspring count after time h of a linear birth-death particle
 * (birth lambda, death mu): 0 with probability P0, otherwise geometric on
 * {1, 2, ...} with continuation probability B.
 */
inline std::uint64_t birth_death_offspring(double lambda, double mu, double h, Rng& rng) {
    const double rho = lambda - mu;
    double p0, b;
    if (rho == 0.0) {
        p0 = b = lambda * h / (1.0 + lambda * h);
    } else {
        const double em1 = std::expm1(rho * h);
        const double den = lambda * em1 + rho;
        p0 = mu * em1 / den;
        b = lambda * em1 / den;
    }
    if (rng.uniform() < p0) return 0;
    if (b <= 0.0) return 1;
    return rng.geometric_from_log(std::log(b));
}

/// Atoms with arbitrary positive masses.
struct MeasureSnapshot {
    int dim = 1;
    double time = 0.0;
    std::vector<double> coords;
    std::vector<double> masses;

    std::size_t size() const { return masses.size(); }
    double total_mass() const { return stats::pairwise_sum(masses); }

    static MeasureSnapshot from(const ParticlePopulation& pop) {
        MeasureSnapshot s;
        s.dim = pop.dim;
        s.time = pop.time;
        s.coords = pop.coords;
        s.masses.assign(pop.size(), pop.atom_mass());
        return s;
    }
};

/// Snapshot total mass for equal-mass atoms: count / n exactly.
inline double level_total_mass(const ParticlePopulation& pop) { return pop.total_mass(); }

struct SuperResult {
    StatisticSeries series;
    ParticlePopulation population;
    std::vector<MeasureSnapshot> snapshots;
    std::uint64_t clip_count = 0;
    bool valid() const { return clip_count == 0; }
};

struct SuperOptions {
    ParticleRunOptions run;
    bool keep_snapshots = false;
};

/// Level-n superprocess run from an explicit initial population (atoms of mass 1/n).
inline SuperResult simulate_superprocess(const ModelSpec& model, ParticlePopulation init, const SuperLevel& level,
                                         double horizon, std::span<const double> record_times, std::uint64_t seed,
                                         const SuperOptions& opt = {}) {
    if (level.n < 1) throw ParameterError("level n must be >= 1");
    SuperResult r;
    r.population = std::move(init);
    r.population.level = level.n;
    ParticleRunOptions run = opt.run;
    if (opt.keep_snapshots) {
        auto user = run.on_record;
        run.on_record = [&r, user](const ParticlePopulation& p) {
            r.snapshots.push_back(MeasureSnapshot::from(p));
            if (user) user(p);
        };
    }
    auto rate = [&](std::span<const double> x) { return std::abs(model.beta_at(x)); };
    auto offspring = [&](std::span<const double> x, double h, Rng& rng) -> std::uint64_t {
        const double a = model.alpha_at(x);
        const double b = model.beta_at(x);
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) throw ModelError("alpha must be finite and > 0");
        const double sp = level.raw_split_prob(b, a);
        if (sp < 0.0 || sp > 1.0) ++r.clip_count;
        return birth_death_offspring(level.birth_rate(b, a), level.death_rate(b, a), h, rng);
    };
    r.series = detail::run_particles(model, r.population, horizon, record_times, seed, run, rate, offspring);
    return r;
}

/// delta_x at level n (n atoms at x) or k atoms at x.
inline SuperResult simulate_superprocess(const ModelSpec& model, const InitialCondition& init, const SuperLevel& level,
                                         double horizon, std::span<const double> record_times, std::uint64_t seed,
                                         const SuperOptions& opt = {}) {
    auto pop = detail::initial_population(model, init, level.n, seed, opt.run.stream_tag, opt.run.replicate);
    return simulate_superprocess(model, std::move(pop), level, horizon, record_times, seed, opt);
}

/**
 * @brief Poisson point process with intensity given by the snapshot: N ~
 * Poisson(total mass) unit particles placed at atoms picked proportionally
 * to mass.
 */
inline ParticlePopulation poissonize(const MeasureSnapshot& snap, Rng& rng) {
    ParticlePopulation out;
    out.dim = snap.dim;
    out.time = snap.time;
    const double total = snap.total_mass();
    if (!(total > 0.0)) return out;
    if (total > 1e12) throw ParameterError("snapshot mass too large to poissonize");
    const std::uint64_t n = rng.poisson(total);
    std::vector<double> cum(snap.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < snap.size(); ++i) cum[i] = (acc += snap.masses[i]);
    const auto d = static_cast<std::size_t>(snap.dim);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double u = rng.uniform() * acc;
        auto idx = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        idx = std::min(idx, snap.size() - 1);
        out.push(std::span<const double>(snap.coords.data() + idx * d, d), k);
    }
    return out;
}

/// Same law as poissonize for an equal-mass population, without copying atoms.
inline std::uint64_t poisson_count(const ParticlePopulation& pop, Rng& rng) { return rng.poisson(pop.total_mass()); }

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t bins = 0;
    double censored_fraction = 0.0;
    bool inconclusive = false;
    double mean_a = 0.0;
    double mean_b = 0.0;
    std::size_t reps = 0;
};

inline std::string to_text(const TestReport& r) {
    return "name=" + r.name + " statistic=" + fmt(r.statistic) + " p_value=" + fmt(r.p_value) +
           " bins=" + std::to_string(r.bins) + " censored_fraction=" + fmt(r.censored_fraction) +
           " inconclusive=" + (r.inconclusive ? "true" : "false") + " mean_a=" + fmt(r.mean_a) +
           " mean_b=" + fmt(r.mean_b) + " reps=" + std::to_string(r.reps);
}

struct CouplingRule {
    enum class Kind { FixedTime, MassThreshold } kind = Kind::FixedTime;
    double t = 1.0;          ///< fixed time
    double threshold = 2.0;  ///< stop at the first time |X| >= threshold (or extinction)
    double horizon = 20.0;   ///< censoring cutoff for the threshold rule

    static CouplingRule fixed(double t) { return {Kind::FixedTime, t, 0.0, 0.0}; }
    static CouplingRule first_mass_at_least(double c, double horizon = 20.0) {
        return {Kind::MassThreshold, 0.0, c, horizon};
    }
};

struct CouplingOptions {
    std::uint64_t n = 1000;  ///< level for the superprocess arm
    double dt = 0.01;
    int permutations = 999;
    unsigned workers = 0;
    double x0 = 0.0;
};

namespace detail {

inline double constant_value(const Scalar& c) {
    if (const auto* k = std::get_if<coef::Constant>(&c)) return k->value;
    if (const auto* p = std::get_if<coef::Power>(&c)) return p->c0 + (p->p == 0.0 ? p->c1 : 0.0);
    throw ParameterError("coefficient is not constant");
}

struct StopOutcome {
    std::uint64_t count = 0;
    bool censored = false;
};

/**
 * @brief Count-level birth-death run with the backbone decomposition: each
 * initial particle is prolific (infinite line of descent) with probability
 * 1 - q, q = mu/lambda. Prolific particles split into two prolific at rate
 * lambda (1 - q) = beta, or into prolific + non-prolific at rate 2 lambda q;
 * non-prolific ones give birth at rate mu and die at rate lambda. The
 * prolific particles form the branching system Z. Stops when the total
 * reaches target or dies out; returns the prolific count.
 */
inline StopOutcome typed_stop(double lambda, double mu, std::uint64_t n0, std::uint64_t target, double horizon,
                              Rng& rng) {
    const double q = mu / lambda;
    std::uint64_t p = 0, m = 0;
    for (std::uint64_t k = 0; k < n0; ++k) (rng.uniform() < 1.0 - q ? p : m) += 1;
    double t = 0.0;
    while (p + m < target && p + m > 0) {
        const double rp = static_cast<double>(p) * lambda * (1.0 + q);
        const double rm = static_cast<double>(m) * (lambda + mu);
        t += rng.exponential() / (rp + rm);
        if (t > horizon) return {p, true};
        const double u = rng.uniform() * (rp + rm);
        if (u < rp) {
            if (rng.uniform() * (1.0 + q) < 1.0 - q) ++p; else ++m;
        } else {
            if (rng.uniform() * (lambda + mu) < mu) ++m; else --m;
        }
    }
    return {p, false};
}

/// Untyped birth-death count at the same stopping rule.
inline StopOutcome untyped_stop(double lambda, double mu, std::uint64_t n0, std::uint64_t target, double horizon,
                                Rng& rng) {
    std::uint64_t n = n0;
    double t = 0.0;
    while (n < target && n > 0) {
        t += rng.exponential() / (static_cast<double>(n) * (lambda + mu));
        if (t > horizon) return {n, true};
        if (rng.uniform() * (lambda + mu) < lambda) ++n; else --n;
    }
    return {n, false};
}

}  // namespace detail

/**
 * @brief Compares the law of the branching particle count against Poisson
 * draws from independent level-n superprocess runs (alpha = beta required).
 *
 * Fixed time: arm (a) runs simulate_bbm from Poisson(1) particles at x0; arm
 * (b) runs the superprocess from delta_{x0} and draws Poisson(|X_t|).
 * Threshold rule (constant coefficients only): arm (a) is the prolific count
 * of the typed construction stopped at the first time |X| >= c; arm (b) is a
 * Poisson(|X_T|) draw from an independent run stopped by the same rule.
 * Reports the chi-square statistic over pooled count bins and its
 * permutation p-value; more than 5% censored runs make it inconclusive.
 */
inline TestReport coupling_check(const ModelSpec& model, const CouplingRule& rule, std::size_t reps,
                                 std::uint64_t seed, const CouplingOptions& opt = {}) {
    if (model.dim != 1) throw ParameterError("coupling_check supports d = 1");
    if (reps < 2) throw ParameterError("reps must be >= 2");
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0})
        if (contains(model.domain, x) && std::abs(model.alpha_at(x) - model.beta_at(x)) > 1e-12)
            throw ParameterError("coupling requires alpha = beta");
    std::vector<std::uint64_t> a(reps), b(reps);
    std::vector<double> censored(reps, 0.0);
    const SuperLevel level{opt.n};
    TestReport r;
    r.reps = reps;

    if (rule.kind == CouplingRule::Kind::FixedTime) {
        r.name = "coupling-fixed-time";
        if (!(rule.t >= 0.0)) throw ParameterError("coupling time must be >= 0");
        const std::vector<double> rec{rule.t};
        parallel_for(reps, opt.workers, [&](std::size_t i) {
            if (rule.t == 0.0) {
                // Degenerate rule: both arms are Poisson(1) counts at the start.
                Rng ra(seed, {0xC0A1ull, i}), rb(seed, {0xC0C3ull, i});
                a[i] = ra.poisson(1.0);
                b[i] = rb.poisson(1.0);
                return;
            }
            ParticleRunOptions po;
            po.dt = opt.dt;
            po.caps.max_particles = std::numeric_limits<std::uint64_t>::max();
            po.replicate = i;
            po.stream_tag = 0xC0A1ull;
            const auto z = simulate_bbm(model, InitialCondition::poisson_at({opt.x0}), rule.t, rec, seed, po);
            a[i] = z.population.size();
            SuperOptions so;
            so.run = po;
            so.run.stream_tag = 0xC0B2ull;
            const auto x = simulate_superprocess(model, InitialCondition::fixed_at({opt.x0}, opt.n), level, rule.t,
                                                 rec, seed, so);
            Rng prng(seed, {0xC0C3ull, i});
            b[i] = poisson_count(x.population, prng);
        });
    } else {
        r.name = "coupling-threshold";
        const double beta = detail::constant_value(model.beta);
        const double alpha = detail::constant_value(model.alpha);
        if (!(beta > 0.0)) throw ParameterError("threshold coupling needs beta > 0");
        const double lambda = level.birth_rate(beta, alpha);
        const double mu = level.death_rate(beta, alpha);
        const auto target =
            static_cast<std::uint64_t>(std::ceil(rule.threshold * static_cast<double>(opt.n) - 1e-9));
        parallel_for(reps, opt.workers, [&](std::size_t i) {
            Rng ra(seed, {0xC1A1ull, i});
            const auto sa = detail::typed_stop(lambda, mu, opt.n, target, rule.horizon, ra);
            Rng rb(seed, {0xC1B2ull, i});
            const auto sb = detail::untyped_stop(lambda, mu, opt.n, target, rule.horizon, rb);
            a[i] = sa.count;
            b[i] = rb.poisson(static_cast<double>(sb.count) / static_cast<double>(opt.n));
            censored[i] = (sa.censored || sb.censored) ? 1.0 : 0.0;
        });
        r.censored_fraction = stats::pairwise_sum(censored) / static_cast<double>(reps);
        r.inconclusive = r.censored_fraction > 0.05;
    }
    const auto chi = stats::chi_square_permutation(a, b, opt.permutations, seed ^ 0x5A5Aull);
    r.statistic = chi.statistic;
    r.p_value = chi.p_value;
    r.bins = chi.bins;
    std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
    r.mean_a = stats::mean_stderr(da).mean;
    r.mean_b = stats::mean_stderr(db).mean;
    return r;
}

/**
 * @brief C_k^lambda with C_k = (e/k)^k / e, bounding P(Y <= k lambda) for
 * k < 1 and P(Y >= k lambda) for k > 1 when Y ~ Poisson(lambda).
 */
inline double poisson_tail_bound(double lambda, double k) {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
    if (!(k > 0.0)) throw ParameterError("k must be > 0");
    const double log_ck = k * (1.0 - std::log(k)) - 1.0;
    return std::exp(lambda * log_ck);
}

/// Exact counterpart of the bound: P(Y <= k lambda) for k < 1, P(Y >= k lambda) for k > 1, 1 for k = 1.
inline double poisson_exact_tail(double lambda, double k) {
    if (k < 1.0) return stats::poisson_cdf(lambda, k * lambda);
    if (k > 1.0) return stats::poisson_upper_tail(lambda, k * lambda);
    return 1.0;
}

struct BranchingPropertyOptions {
    std::uint64_t n = 100;
    double dt = 0.01;
    unsigned workers = 0;
};

/**
 * @brief KS comparison of <g, X_t> started from mu + nu against the sum of
 * independent runs started from mu and from nu. Measures are lists of atom
 * positions (d = 1), each atom of mass 1/n.
 */
inline TestReport branching_property_check(const ModelSpec& model, std::span<const double> mu,
                                           std::span<const double> nu, const Scalar& g, double t, std::size_t reps,
                                           std::uint64_t seed, const BranchingPropertyOptions& opt = {}) {
    if (model.dim != 1) throw ParameterError("branching_property_check supports d = 1");
    const SuperLevel level{opt.n};
    auto make = [&](std::span<const double> atoms, std::uint64_t tag, std::uint64_t i) {
        ParticlePopulation p;
        p.dim = 1;
        p.level = opt.n;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            if (!contains(model.domain, atoms[k])) throw DomainError("atom outside the domain");
            p.push(std::span<const double>(&atoms[k], 1), stream_id({tag, i, k}));
        }
        return p;
    };
    auto pair_g = [&](const ParticlePopulation& p) {
        double s = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) s += evaluate(g, p.position(k));
        return s / static_cast<double>(p.level);
    };
    std::vector<double> joint(reps), split(reps);
    std::vector<double> both(mu.begin(), mu.end());
    both.insert(both.end(), nu.begin(), nu.end());
    parallel_for(reps, opt.workers, [&](std::size_t i) {
        if (t == 0.0) {
            joint[i] = pair_g(make(both, 0xA0, i));
            split[i] = pair_g(make(mu, 0xA1, i)) + pair_g(make(nu, 0xA2, i));
            return;
        }
        const std::vector<double> rec{t};
        SuperOptions so;
        so.run.dt = opt.dt;
        so.run.caps.max_particles = std::numeric_limits<std::uint64_t>::max();
        so.run.replicate = i;
        auto run = [&](std::span<const double> atoms, std::uint64_t tag) {
            if (atoms.empty()) return 0.0;
            so.run.stream_tag = tag;
            return pair_g(simulate_superprocess(model, make(atoms, tag, i), level, t, rec, seed, so).population);
        };
        joint[i] = run(both, 0xB0);
        split[i] = run(mu, 0xB1) + run(nu, 0xB2);
    });
    const auto ks = stats::ks_two_sample(joint, split);
    TestReport r;
    r.name = "branching-property";
    r.statistic = ks.statistic;
    r.p_value = ks.p_value;
    r.reps = reps;
    r.mean_a = stats::mean_stderr(joint).mean;
    r.mean_b = stats::mean_stderr(split).mean;
    return r;
}

struct ExtinctionReport {
    double extinct_fraction = 0.0;       ///< extinct by the horizon
    double extinct_half_horizon = 0.0;   ///< extinct by horizon / 2
    double survival_fraction = 0.0;
    double stderr_ = 0.0;
    std::uint64_t clip_count = 0;
    std::size_t reps = 0;
    std::size_t mass_capped = 0;  ///< runs stopped once |X| reached the survival mass
};

struct ExtinctionOptions {
    std::uint64_t n = 100;
    double dt = 0.1;
    /// Runs reaching this total mass are counted as surviving; for alpha = beta
    /// the remaining extinction probability is about exp(-survival_mass).
    double survival_mass = 30.0;
    unsigned workers = 0;
    double x0 = 0.0;
};

/// Extinct fraction of level-n runs from delta_{x0} at horizon/2 and horizon.
inline ExtinctionReport extinction_fraction(const ModelSpec& model, double horizon, std::size_t reps,
                                            std::uint64_t seed, const ExtinctionOptions& opt = {}) {
    const SuperLevel level{opt.n};
    const std::vector<double> rec{horizon / 2.0, horizon};
    std::vector<double> ext(reps), ext_half(reps), capped(reps);
    std::vector<std::uint64_t> clips(reps);
    parallel_for(reps, opt.workers, [&](std::size_t i) {
        SuperOptions so;
        so.run.dt = opt.dt;
        so.run.replicate = i;
        so.run.stream_tag = 0xE1E1ull;
        so.run.caps.max_particles =
            static_cast<std::uint64_t>(std::ceil(opt.survival_mass * static_cast<double>(opt.n)));
        const auto r = simulate_superprocess(model, InitialCondition::fixed_at({opt.x0}, opt.n), level, horizon,
                                             rec, seed, so);
        clips[i] = r.clip_count;
        capped[i] = r.series.caps_hit ? 1.0 : 0.0;
        const bool dead = !r.series.caps_hit && r.population.empty();
        ext[i] = dead ? 1.0 : 0.0;
        ext_half[i] = (!r.series.records.empty() && r.series.records.front().total_mass == 0.0) ? 1.0 : 0.0;
    });
    ExtinctionReport out;
    out.reps = reps;
    const auto ms = stats::mean_stderr(ext);
    out.extinct_fraction = ms.mean;
    out.stderr_ = ms.stderr_;
    out.extinct_half_horizon = stats::pairwise_sum(ext_half) / static_cast<double>(reps);
    out.survival_fraction = 1.0 - out.extinct_fraction;
    for (auto c : clips) out.clip_count += c;
    out.mass_capped = static_cast<std::size_t>(stats::pairwise_sum(capped));
    return out;
}

struct LaplaceEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t reps = 0;
    std::uint64_t clip_count = 0;
};

/// Sample mean of exp(-<g, X_t>) over level-n runs from delta_{x0}.
inline LaplaceEstimate laplace_functional(const ModelSpec& model, const Scalar& g, double t, std::uint64_t n,
                                          std::size_t reps, std::uint64_t seed, double dt = 0.01,
                                          unsigned workers = 0, double x0 = 0.0) {
    std::vector<double> v(reps);
    std::vector<std::uint64_t> clips(reps);
    const std::vector<double> rec{t};
    parallel_for(reps, workers, [&](std::size_t i) {
        SuperOptions so;
        so.run.dt = dt;
        so.run.replicate = i;
        so.run.stream_tag = 0x1A91ull;
        so.run.caps.max_particles = std::numeric_limits<std::uint64_t>::max();
        const auto r = simulate_superprocess(model, InitialCondition::fixed_at({x0}, n), SuperLevel{n}, t, rec, seed, so);
        double s = 0.0;
        for (std::size_t j = 0; j < r.population.size(); ++j) s += evaluate(g, r.population.position(j));
        v[i] = std::exp(-s / static_cast<double>(n));
        clips[i] = r.clip_count;
    });
    const auto ms = stats::mean_stderr(v);
    LaplaceEstimate out{ms.mean, ms.stderr_, reps, 0};
    for (auto c : clips) out.clip_count += c;
    return out;
}

inline CsvTable snapshot_csv(std::span<const std::pair<std::uint64_t, MeasureSnapshot>> snaps) {
    CsvTable t{{"replicate", "t", "atom_index", "position", "mass"}, {}};
    for (const auto& [rep, s] : snaps)
        for (std::size_t i = 0; i < s.size(); ++i)
            t.add(rep, s.time, static_cast<std::uint64_t>(i), s.coords[i * static_cast<std::size_t>(s.dim)],
                  s.masses[i]);
    return t;
}

}  // namespace supergrowth
