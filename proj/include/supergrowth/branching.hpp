#pragma once
/**
 * @file branching.hpp
 * @brief Branching diffusion Z: dyadic splitting at rate beta(x), particles
 * moving by the motion of L on D.
 *
 * Each step of length h freezes every particle's rate at its current
 * position and replaces the particle by its Yule population after time h
 * (geometric with parameter exp(-beta h)); every child then moves
 * independently over the step. This is exact for constant beta and keeps
 * E|Z_t| unbiased, unlike a single Bernoulli split per step.
 *
 * Randomness is keyed by (seed, lineage id, step), so runs do not depend on
 * the processing order. The branching draw uses exactly one uniform and the
 * first child's motion continues that stream, so two runs on the same step
 * grid couple monotonically in beta.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "supergrowth/io.hpp"
#include "supergrowth/model.hpp"
#include "supergrowth/motion.hpp"
#include "supergrowth/rng.hpp"

namespace supergrowth {

/// Particles with equal masses 1/level; coordinates stored flat (count x dim).
struct ParticlePopulation {
    int dim = 1;
    std::vector<double> coords;
    std::vector<std::uint64_t> ids;  ///< lineage keys for the random streams
    std::uint64_t level = 1;         ///< atom mass is 1/level
    double time = 0.0;
    std::uint64_t births = 0;
    std::uint64_t deaths = 0;

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    double atom_mass() const { return 1.0 / static_cast<double>(level); }
    double total_mass() const { return static_cast<double>(size()) / static_cast<double>(level); }
    std::span<const double> position(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    void push(std::span<const double> x, std::uint64_t id) {
        coords.insert(coords.end(), x.begin(), x.end());
        ids.push_back(id);
    }
};

/// Interval [lo, hi] in the first coordinate.
struct Window {
    double lo = -1.0;
    double hi = 1.0;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct PopulationStats {
    double total_mass = 0.0;
    double rightmost = -std::numeric_limits<double>::infinity();
    double radius = 0.0;
    double local_mass = 0.0;
};

/// Exact aggregates: |Z|, rightmost first coordinate, support radius around 0, mass in B.
inline PopulationStats population_statistics(const ParticlePopulation& pop, const Window& b) {
    PopulationStats s;
    s.total_mass = pop.total_mass();
    std::size_t local = 0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto x = pop.position(i);
        s.rightmost = std::max(s.rightmost, x[0]);
        s.radius = std::max(s.radius, pop.dim == 1 ? std::abs(x[0]) : norm(x));
        if (b.contains(x[0])) ++local;
    }
    s.local_mass = static_cast<double>(local) / static_cast<double>(pop.level);
    return s;
}

struct StatRecord {
    double t = 0.0;
    double total_mass = 0.0;
    double rightmost = 0.0;
    double radius = 0.0;
    double local_mass = 0.0;
};

struct StatisticSeries {
    std::uint64_t replicate = 0;
    std::vector<StatRecord> records;
    bool caps_hit = false;
    double cap_time = std::numeric_limits<double>::infinity();
};

struct Caps {
    std::uint64_t max_particles = 10'000'000;
    double max_wall_seconds = std::numeric_limits<double>::infinity();
};

/// Initial condition: Poisson(mean) or a fixed count of atoms at x.
struct InitialCondition {
    bool poisson = true;
    double mean = 1.0;
    std::uint64_t count = 1;
    std::vector<double> x{0.0};

    static InitialCondition poisson_at(std::vector<double> x, double mean = 1.0) {
        return {true, mean, 0, std::move(x)};
    }
    static InitialCondition fixed_at(std::vector<double> x, std::uint64_t count) {
        return {false, 0.0, count, std::move(x)};
    }
};

struct ParticleRunOptions {
    double dt = 0.01;
    double rate_step = 0.1;  ///< step shrunk so that h * max rate <= rate_step
    Caps caps;
    Window window;
    std::uint64_t replicate = 0;
    std::uint64_t stream_tag = 0xBB11ull;
    /// Invoked at each record time with the population (before the record is appended).
    std::function<void(const ParticlePopulation&)> on_record;
};

namespace detail {

inline void check_record_times(std::span<const double> rec, double horizon) {
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (!(rec[i] >= 0.0) || rec[i] > horizon + 1e-12) throw ParameterError("record time outside [0, horizon]");
        if (i > 0 && !(rec[i] > rec[i - 1])) throw ParameterError("record times must be strictly increasing");
    }
}

inline ParticlePopulation initial_population(const ModelSpec& model, const InitialCondition& init,
                                             std::uint64_t level, std::uint64_t seed, std::uint64_t tag,
                                             std::uint64_t replicate) {
    if (static_cast<int>(init.x.size()) != model.dim) throw ParameterError("initial point has the wrong dimension");
    if (!contains(model.domain, init.x)) throw DomainError("initial point outside the domain");
    ParticlePopulation pop;
    pop.dim = model.dim;
    pop.level = level;
    std::uint64_t count = init.count;
    if (init.poisson) {
        Rng rng(seed, {tag, replicate, 0x1A17ull});
        count = rng.poisson(init.mean);
    }
    pop.coords.reserve(count * static_cast<std::size_t>(model.dim));
    for (std::uint64_t k = 0; k < count; ++k) pop.push(init.x, stream_id({tag, replicate, k}));
    return pop;
}

/**
 * @brief Generic particle engine. offspring(x, rate_scale, h, rng) returns the
 * number of particles replacing one at x after a step of length h; rate(x)
 * bounds the adaptive step.
 */
template <class Rate, class Offspring>
StatisticSeries run_particles(const ModelSpec& model, ParticlePopulation& pop, double horizon,
                              std::span<const double> record_times, std::uint64_t seed,
                              const ParticleRunOptions& opt, Rate&& rate, Offspring&& offspring) {
    if (!(horizon > 0.0)) throw ParameterError("horizon must be > 0");
    if (!(opt.dt > 0.0)) throw ParameterError("dt must be > 0");
    check_record_times(record_times, horizon);
    const auto start = std::chrono::steady_clock::now();
    const int d = model.dim;

    StatisticSeries series;
    series.replicate = opt.replicate;
    std::size_t next_rec = 0;
    auto record = [&] {
        if (opt.on_record) opt.on_record(pop);
        const auto s = population_statistics(pop, opt.window);
        series.records.push_back({pop.time, s.total_mass, s.rightmost, s.radius, s.local_mass});
        ++next_rec;
    };
    while (next_rec < record_times.size() && record_times[next_rec] <= pop.time + 1e-12) record();

    std::vector<double> rates, next_coords, xbuf(static_cast<std::size_t>(d));
    std::vector<std::uint64_t> next_ids;
    MotionStepper stepper(model);
    std::uint64_t step = 0;
    while (pop.time < horizon - 1e-12 && next_rec < record_times.size()) {
        if (pop.empty()) {
            while (next_rec < record_times.size()) {
                pop.time = record_times[next_rec];
                record();
            }
            break;
        }
        rates.resize(pop.size());
        double rmax = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            rates[i] = rate(pop.position(i));
            if (!std::isfinite(rates[i])) throw ModelError("non-finite rate at a particle position");
            rmax = std::max(rmax, rates[i]);
        }
        double h = std::min({opt.dt, horizon - pop.time, record_times[next_rec] - pop.time});
        if (rmax > 0.0) h = std::min(h, opt.rate_step / rmax);
        h = std::max(h, 1e-12);

        next_coords.clear();
        next_ids.clear();
        bool capped = false;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::uint64_t id = pop.ids[i];
            Rng brng(seed, {id, step, 0});
            const std::uint64_t n = offspring(pop.position(i), h, brng);
            if (n == 0) {
                ++pop.deaths;
                continue;
            }
            pop.births += n - 1;
            if (next_ids.size() + n > opt.caps.max_particles) {
                capped = true;
                break;
            }
            for (std::uint64_t k = 0; k < n; ++k) {
                const auto x = pop.position(i);
                std::copy(x.begin(), x.end(), xbuf.begin());
                // The first child continues the branching stream; the others get their own.
                const std::uint64_t cid = k == 0 ? id : stream_id({id, step, k});
                if (k == 0) {
                    stepper.step(xbuf, h, brng);
                } else {
                    Rng mrng(seed, {cid, step, 1});
                    stepper.step(xbuf, h, mrng);
                }
                if (!contains(model.domain, xbuf)) {
                    ++pop.deaths;
                    continue;
                }
                next_coords.insert(next_coords.end(), xbuf.begin(), xbuf.end());
                next_ids.push_back(cid);
            }
        }
        if (capped) {
            series.caps_hit = true;
            series.cap_time = pop.time;
            break;
        }
        pop.coords.swap(next_coords);
        pop.ids.swap(next_ids);
        pop.time += h;
        ++step;
        while (next_rec < record_times.size() && record_times[next_rec] <= pop.time + 1e-12) record();
        if (std::isfinite(opt.caps.max_wall_seconds)) {
            const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (el > opt.caps.max_wall_seconds) {
                series.caps_hit = true;
                series.cap_time = pop.time;
                break;
            }
        }
    }
    return series;
}

}  // namespace detail

struct BbmResult {
    StatisticSeries series;
    ParticlePopulation population;
};

/**
 * @brief One replicate of the branching diffusion with rate beta(x), recorded
 * at record_times. Stops early with caps_hit when the population would exceed
 * max_particles; records after the cap are not produced.
 */
inline BbmResult simulate_bbm(const ModelSpec& model, const InitialCondition& init, double horizon,
                              std::span<const double> record_times, std::uint64_t seed,
                              const ParticleRunOptions& opt = {}) {
    BbmResult r;
    r.population = detail::initial_population(model, init, 1, seed, opt.stream_tag, opt.replicate);
    auto rate = [&](std::span<const double> x) {
        const double b = model.beta_at(x);
        return b;
    };
    auto offspring = [&](std::span<const double> x, double h, Rng& rng) -> std::uint64_t {
        const double b = model.beta_at(x);
        if (b < 0.0) throw ModelError("branching rate must be >= 0");
        if (b == 0.0) return 1;
        // Yule population after time h: geometric with success probability exp(-b h),
        // by inversion from one uniform (N = 1 unless u <= 1 - exp(-b h)).
        const double q = -std::expm1(-b * h);
        const double u = rng.uniform_pos();
        if (u > q) return 1;
        const double k = std::floor(std::log(u) / std::log(q));
        return k >= 9.0e18 ? std::numeric_limits<std::uint64_t>::max() : 1 + static_cast<std::uint64_t>(k);
    };
    r.series = detail::run_particles(model, r.population, horizon, record_times, seed, opt, rate, offspring);
    return r;
}

/// Evenly spaced record times step, 2 step, ..., up to horizon (plus 0 when include_zero).
inline std::vector<double> record_grid(double horizon, double step, bool include_zero = true) {
    if (!(step > 0.0) || !(horizon > 0.0)) throw ParameterError("record grid needs positive horizon and step");
    std::vector<double> r;
    if (include_zero) r.push_back(0.0);
    const auto n = static_cast<std::int64_t>(std::floor(horizon / step + 1e-9));
    for (std::int64_t k = 1; k <= n; ++k) r.push_back(static_cast<double>(k) * step);
    return r;
}

inline CsvTable series_csv(std::span<const StatisticSeries> runs) {
    CsvTable t{{"replicate", "t", "total_mass", "rightmost", "radius", "local_mass", "caps_hit"}, {}};
    for (const auto& s : runs)
        for (const auto& r : s.records)
            t.add(s.replicate, r.t, r.total_mass, r.rightmost, r.radius, r.local_mass, s.caps_hit);
    return t;
}

}  // namespace supergrowth
