#pragma once
/**
 * @file runner.hpp
 * @brief Executes one campaign: dispatches on the config kind, writes CSVs
 * (header row, trailing manifest digest), plot data, a summary and the
 * manifest, and maps outcomes to exit codes.
 */

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "supergrowth/branching.hpp"
#include "supergrowth/config.hpp"
#include "supergrowth/cumulant_pde.hpp"
#include "supergrowth/growth.hpp"
#include "supergrowth/io.hpp"
#include "supergrowth/schroedinger.hpp"
#include "supergrowth/superprocess.hpp"

namespace supergrowth {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitValidation = 2, kExitInconclusive = 3 };

inline constexpr const char* kOutputRootEnv = "SUPERGROWTH_OUTPUT_ROOT";

/// Output root: $SUPERGROWTH_OUTPUT_ROOT when set, else ./supergrowth-out.
inline std::filesystem::path output_root() {
    if (const char* v = std::getenv(kOutputRootEnv); v && *v) return v;
    return "supergrowth-out";
}

/// Digest of the config without the worker count, which must not affect outputs.
inline std::string config_digest(const CampaignConfig& c) {
    auto j = to_json(c);
    j.erase("workers");
    return hex64(fnv1a(j.dump()));
}

struct RunOutcome {
    int exit_code = kExitOk;
    std::string message;
    json summary = json::object();
    RunManifest manifest;
    std::filesystem::path directory;
    std::map<std::string, std::string> files;  ///< name -> content, as written
};

namespace detail {

/// Collects outputs before they are written, so the manifest digest can be stamped on each CSV.
struct OutputSet {
    std::string digest;
    std::map<std::string, std::string> files;

    void csv(const std::string& name, const CsvTable& t) { files[name] = t.render(digest); }
    /// Whitespace-separated columns for offline plotting.
    void dat(const std::string& name, const CsvTable& t, std::initializer_list<const char*> cols) {
        std::vector<std::size_t> idx;
        for (const char* c : cols)
            for (std::size_t i = 0; i < t.header.size(); ++i)
                if (t.header[i] == c) idx.push_back(i);
        std::string s = "#";
        for (const char* c : cols) s += std::string(" ") + c;
        s += '\n';
        for (const auto& r : t.rows) {
            for (std::size_t k = 0; k < idx.size(); ++k) s += (k ? " " : "") + r[idx[k]];
            s += '\n';
        }
        files[name] = s;
    }
    void plot_stub(const std::string& dat, const std::string& xlabel, const std::string& ylabel, bool logy = false) {
        std::string s = "# gnuplot stub; edit freely\nset xlabel '" + xlabel + "'\nset ylabel '" + ylabel + "'\n";
        if (logy) s += "set logscale y\n";
        s += "plot '" + dat + "' using 1:2 with points notitle\n";
        files["plot.gp"] = s;
    }
};

inline Window window_of(const CampaignConfig& c) {
    const auto w = c.list("window");
    return {w[0], w[1]};
}

inline Caps caps_of(const CampaignConfig& c) {
    Caps caps;
    caps.max_particles = c.integer("max_particles");
    if (c.has("max_wall_seconds")) caps.max_wall_seconds = c.number("max_wall_seconds");
    return caps;
}

inline std::vector<double> start_point(const CampaignConfig& c, const char* key) {
    std::vector<double> x(static_cast<std::size_t>(c.model.dim), 0.0);
    x[0] = c.number(key);
    return x;
}

inline std::vector<StatisticSeries> particle_runs(const CampaignConfig& c, bool super, std::uint64_t n,
                                                  std::vector<std::pair<std::uint64_t, MeasureSnapshot>>* snaps,
                                                  std::uint64_t* clips) {
    const double horizon = c.number("horizon");
    const auto rec = record_grid(horizon, c.number("record_step"), true);
    const auto reps = c.integer("reps");
    std::vector<StatisticSeries> runs(reps);
    std::vector<std::vector<MeasureSnapshot>> keep(reps);
    std::vector<std::uint64_t> clip(reps, 0);
    parallel_for(reps, c.workers, [&](std::size_t i) {
        ParticleRunOptions po;
        po.dt = c.number("dt");
        po.caps = caps_of(c);
        po.window = window_of(c);
        po.replicate = i;
        if (!super) {
            runs[i] = simulate_bbm(c.model, InitialCondition::poisson_at(start_point(c, "x0")), horizon, rec, c.seed, po)
                          .series;
        } else {
            SuperOptions so;
            so.run = po;
            so.keep_snapshots = snaps != nullptr;
            auto r = simulate_superprocess(c.model, InitialCondition::fixed_at(start_point(c, "x0"), n), SuperLevel{n},
                                           horizon, rec, c.seed, so);
            runs[i] = std::move(r.series);
            keep[i] = std::move(r.snapshots);
            clip[i] = r.clip_count;
        }
    });
    if (snaps)
        for (std::size_t i = 0; i < reps; ++i)
            for (auto& s : keep[i]) snaps->emplace_back(i, std::move(s));
    if (clips)
        for (auto v : clip) *clips += v;
    return runs;
}

inline json caps_summary(std::span<const StatisticSeries> runs) {
    std::size_t hit = 0;
    for (const auto& s : runs) hit += s.caps_hit ? 1 : 0;
    return {{"replicates", runs.size()}, {"caps_hit", hit}};
}

/// Runs the campaign body; returns the exit code (0 or 3) and fills summary and outputs.
inline int dispatch(const CampaignConfig& c, OutputSet& out, json& summary, bool& caps_hit) {
    const auto& k = c.kind;
    if (k == "fk") {
        FkOptions o;
        o.workers = c.workers;
        if (c.has("weight_cap")) o.weight_cap = c.number("weight_cap");
        const auto g = parse_scalar(c.param("g"), "/params/g");
        const auto x = start_point(c, "x");
        const auto e = fk_estimate(c.model, g, x, c.number("t"), c.number("dt"), c.integer("reps"), c.seed, o);
        CsvTable t{{"t", "x", "mean", "stderr", "reps", "truncation_fraction", "divergence_suspected"}, {}};
        t.add(c.number("t"), x[0], e.mean, e.stderr_, static_cast<std::uint64_t>(e.reps), e.truncation_fraction,
              e.divergence_suspected);
        out.csv("fk.csv", t);
        summary = {{"mean", e.mean}, {"stderr", e.stderr_}, {"reps", e.reps},
                   {"truncation_fraction", e.truncation_fraction}, {"divergence_suspected", e.divergence_suspected}};
        return e.divergence_suspected ? kExitInconclusive : kExitOk;
    }
    if (k == "tail") {
        TailOptions o;
        o.dt = c.number("dt");
        o.levels = static_cast<int>(c.integer("levels"));
        o.batches = c.integer("batches");
        o.workers = c.workers;
        const auto Ks = c.list("K");
        const auto method = c.string("method") == "naive" ? TailMethod::Naive : TailMethod::Splitting;
        std::vector<TailEstimate> tails;
        std::vector<double> lp;
        bool underflow = false;
        for (std::size_t i = 0; i < Ks.size(); ++i) {
            tails.push_back(tail_probability(c.number("ell"), Ks[i], c.integer("reps"), method, c.seed + i, o));
            underflow = underflow || tails.back().underflow;
            lp.push_back(tails.back().log_prob);
        }
        const auto t = tail_csv(tails);
        out.csv("tails.csv", t);
        out.dat("tails.dat", t, {"K", "prob"});
        out.plot_stub("tails.dat", "K", "P(I > K)", true);
        summary["tails"] = json::array();
        for (const auto& e : tails) summary["tails"].push_back({{"K", e.K}, {"prob", e.prob}, {"stderr", e.stderr_}});
        if (Ks.size() >= 3 && !underflow) {
            const auto f = fit_schilder(c.number("ell"), Ks, lp);
            summary["schilder"] = {{"c", f.c}, {"ci_lo", f.ci_lo}, {"ci_hi", f.ci_hi}};
        }
        return underflow ? kExitInconclusive : kExitOk;
    }
    if (k == "bbm" || k == "sbm") {
        const bool super = k == "sbm";
        std::vector<std::pair<std::uint64_t, MeasureSnapshot>> snaps;
        std::uint64_t clips = 0;
        const auto runs = particle_runs(c, super, super ? c.integer("n") : 1,
                                        super && c.boolean("snapshots") ? &snaps : nullptr, &clips);
        const auto t = series_csv(runs);
        out.csv("series.csv", t);
        out.dat("series.dat", t, {"t", "total_mass", "replicate"});
        out.plot_stub("series.dat", "t", "total mass", true);
        if (!snaps.empty()) out.csv("snapshots.csv", snapshot_csv(snaps));
        summary = caps_summary(runs);
        if (super) summary["clip_count"] = clips;
        caps_hit = summary["caps_hit"].get<std::size_t>() > 0;
        return kExitOk;
    }
    if (k == "growth") {
        const bool super = c.string("system") == "sbm";
        const auto runs = particle_runs(c, super, c.integer("n"), nullptr, nullptr);
        const auto t = series_csv(runs);
        out.csv("series.csv", t);
        out.dat("series.dat", t, {"t", "total_mass", "replicate"});
        out.plot_stub("series.dat", "t", "total mass", true);
        summary = caps_summary(runs);
        caps_hit = summary["caps_hit"].get<std::size_t>() > 0;
        GrowthFitOptions o;
        o.threshold = c.number("threshold");
        o.known_rate = c.number("known_rate");
        if (c.has("q_fixed")) o.q_fixed = c.number("q_fixed");
        const auto law = c.string("law") == "double-exp" ? GrowthLaw::DoubleExp : GrowthLaw::PowerExp;
        try {
            const auto f = growth_fit(runs, law, o);
            out.csv("fit.csv", growth_fit_csv(f));
            summary["fit"] = {{"law", to_string(f.law)}, {"K", f.K}, {"q", f.q}, {"r", f.r},
                              {"residual_norm", f.residual_norm}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi},
                              {"replicates_used", f.replicates_used}};
        } catch (const InsufficientData& e) {
            summary["fit_error"] = e.what();
            return kExitInconclusive;
        }
        return kExitOk;
    }
    if (k == "couple") {
        CouplingOptions o;
        o.n = c.integer("n");
        o.dt = c.number("dt");
        o.permutations = static_cast<int>(c.integer("permutations"));
        o.workers = c.workers;
        const auto rule = c.string("rule") == "fixed"
                              ? CouplingRule::fixed(c.number("t"))
                              : CouplingRule::first_mass_at_least(c.number("threshold"), c.number("horizon"));
        const auto r = coupling_check(c.model, rule, c.integer("reps"), c.seed, o);
        CsvTable t{{"name", "statistic", "p_value", "bins", "censored_fraction", "inconclusive", "mean_a", "mean_b", "reps"}, {}};
        t.add(r.name, r.statistic, r.p_value, static_cast<std::uint64_t>(r.bins), r.censored_fraction, r.inconclusive,
              r.mean_a, r.mean_b, static_cast<std::uint64_t>(r.reps));
        out.csv("coupling.csv", t);
        summary = {{"p_value", r.p_value}, {"statistic", r.statistic}, {"censored_fraction", r.censored_fraction},
                   {"inconclusive", r.inconclusive}};
        return r.inconclusive ? kExitInconclusive : kExitOk;
    }
    if (k == "pde") {
        PDEProblem p;
        p.model = c.model;
        const auto g = parse_scalar(c.param("initial"), "/params/initial");
        p.initial = [g](double x) { return evaluate(g, x); };
        p.boundary = c.number("boundary");
        p.radii = c.list("radii");
        p.dx = c.number("dx");
        p.dt = c.number("dt");
        const auto w = c.list("window");
        p.window = {w[0], w[1]};
        p.tol = c.number("tol");
        const auto r = c.string("equation") == "linear" ? solve_linear(p, c.number("t")) : solve_cumulant(p, c.number("t"));
        const auto t = grid_csv(r.window);
        out.csv("solution.csv", t);
        out.dat("solution.dat", t, {"x", "value"});
        out.plot_stub("solution.dat", "x", "u");
        summary = {{"converged", r.converged}, {"blow_up_suspected", r.blow_up_suspected}, {"radius", r.radius},
                   {"value_at_0", r.at(0.0)}, {"last_change", r.last_change}};
        return r.converged && !r.blow_up_suspected ? kExitOk : kExitInconclusive;
    }
    if (k == "csp") {
        CspOptions o;
        o.boundary_values = c.list("boundary_values");
        o.radii = c.list("radii");
        const auto w = c.list("window");
        o.window = {w[0], w[1]};
        o.dx = c.number("dx");
        o.dt = c.number("dt");
        o.threshold = c.number("threshold");
        const auto r = csp_check(c.model, c.number("t"), o);
        CsvTable t{{"R", "window_max", "boundary_effect"}, {}};
        for (std::size_t i = 0; i < r.radii.size(); ++i) t.add(r.radii[i], r.window_max[i], r.boundary_effect[i]);
        out.csv("csp.csv", t);
        out.dat("csp.dat", t, {"R", "window_max"});
        out.plot_stub("csp.dat", "R", "max over window", true);
        summary = {{"verdict", to_string(r.verdict)}};
        return r.verdict == CspVerdict::Inconclusive ? kExitInconclusive : kExitOk;
    }
    if (k == "pgpe") {
        PgpeOptions o;
        o.R = c.number("R");
        o.dx = c.number("dx");
        o.ds = c.number("ds");
        const auto g = parse_scalar(c.param("g"), "/params/g");
        const auto w = c.list("window");
        const auto grid = c.list("lambda_grid");
        const auto e = pgpe_estimate(c.model, c.number("p"), [g](double x) { return evaluate(g, x); }, {w[0], w[1]},
                                     grid, c.number("s_max"), o);
        const auto t = pgpe_csv(e);
        out.csv("pgpe.csv", t);
        out.dat("pgpe.dat", t, {"lambda", "log_slope"});
        out.plot_stub("pgpe.dat", "lambda", "log-slope at s_max");
        summary = {{"lambda_lo", e.lambda_lo}, {"lambda_hi", e.lambda_hi}, {"s_max", e.s_max}, {"truncated", e.truncated}};
        return e.truncated ? kExitInconclusive : kExitOk;
    }
    if (k == "spread") {
        SpreadOptions o;
        o.system = c.string("system") == "bbm" ? SpreadSystem::SingleParticleBbm : SpreadSystem::Superprocess;
        o.n = c.integer("n");
        o.record_step = c.number("record_step");
        o.dt = c.number("dt");
        o.caps.max_particles = c.integer("max_particles");
        o.eps_sweep = c.list("eps_sweep");
        o.workers = c.workers;
        const auto r = spread_check(c.model, c.number("horizon"), c.integer("reps"), c.seed, o);
        CsvTable t{{"index", "max_log_rightmost_over_t"}, {}};
        for (std::size_t i = 0; i < r.per_replicate.size(); ++i) t.add(static_cast<std::uint64_t>(i), r.per_replicate[i]);
        out.csv("spread.csv", t);
        CsvTable e{{"eps", "exceed_fraction"}, {}};
        for (std::size_t i = 0; i < r.eps.size(); ++i) e.add(r.eps[i], r.exceed_fraction[i]);
        out.csv("exceedance.csv", e);
        out.dat("exceedance.dat", e, {"eps", "exceed_fraction"});
        out.plot_stub("exceedance.dat", "eps", "exceedance fraction");
        summary = {{"p99", r.p99}, {"p99_at_horizon", r.p99_at_horizon}, {"surviving", r.surviving}, {"capped", r.capped}};
        caps_hit = r.capped > 0;
        return kExitOk;
    }
    if (k == "local-growth") {
        LocalGrowthOptions o;
        o.n = c.integer("n");
        o.horizon = c.number("horizon");
        o.record_step = c.number("record_step");
        o.dt = c.number("dt");
        o.caps.max_particles = c.integer("max_particles");
        o.factor = c.number("factor");
        o.workers = c.workers;
        const auto probes = c.list("lambda_probe");
        const auto r = local_growth_experiment(c.model, window_of(c), probes, c.integer("reps"), c.seed, o);
        CsvTable t{{"lambda", "index", "ratio"}, {}};
        for (std::size_t l = 0; l < probes.size(); ++l)
            for (std::size_t i = 0; i < r.ratio[l].size(); ++i) t.add(probes[l], static_cast<std::uint64_t>(i), r.ratio[l][i]);
        out.csv("local.csv", t);
        out.dat("local.dat", t, {"lambda", "ratio"});
        out.plot_stub("local.dat", "lambda", "running max / baseline", true);
        summary = {{"lambda_probe", probes}, {"exceed_fraction", r.exceed_fraction}, {"surviving", r.surviving},
                   {"capped", r.capped}};
        caps_hit = r.capped > 0;
        return kExitOk;
    }
    throw ConfigError("/kind", "unknown kind '" + k + "'");
}

}  // namespace detail

/**
 * @brief Runs a parsed campaign and writes its outputs under root /
 * output_dir (default: kind-digest). Validation problems raised by the
 * modules map to exit 2; other exceptions to exit 1.
 */
inline RunOutcome run_campaign(const CampaignConfig& c, const std::filesystem::path& root, bool write = true) {
    RunOutcome o;
    const auto start = std::chrono::steady_clock::now();
    o.manifest.config_digest = config_digest(c);
    o.manifest.seed = c.seed;
    for (const char* key : {"max_particles", "max_wall_seconds", "weight_cap"})
        if (schema(c.kind).find(key)) o.manifest.caps[key] = c.param(key).dump();
    detail::OutputSet out;
    out.digest = o.manifest.digest();
    bool caps_hit = false;
    try {
        o.exit_code = detail::dispatch(c, out, o.summary, caps_hit);
    } catch (const ConfigError& e) {
        o.exit_code = kExitValidation;
        o.message = e.what();
    } catch (const ParameterError& e) {
        o.exit_code = kExitValidation;
        o.message = e.what();
    } catch (const DomainError& e) {
        o.exit_code = kExitValidation;
        o.message = e.what();
    } catch (const ModelError& e) {
        o.exit_code = kExitValidation;
        o.message = e.what();
    } catch (const std::exception& e) {
        o.exit_code = kExitInternal;
        o.message = e.what();
    }
    o.manifest.caps_hit = caps_hit;
    o.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& [name, text] : out.files) o.manifest.outputs[name] = hex64(fnv1a(text));
    o.summary["exit_code"] = o.exit_code;
    if (!o.message.empty()) o.summary["message"] = o.message;
    o.summary["manifest_digest"] = out.digest;
    o.files = out.files;
    o.files["summary.json"] = o.summary.dump(2) + "\n";
    const json manifest{{"config_digest", o.manifest.config_digest},
                        {"seed", o.manifest.seed},
                        {"tool_version", o.manifest.tool_version},
                        {"caps", o.manifest.caps},
                        {"outputs", o.manifest.outputs},
                        {"wall_seconds", o.manifest.wall_seconds},
                        {"caps_hit", o.manifest.caps_hit},
                        {"digest", out.digest},
                        {"config", to_json(c)}};
    o.files["manifest.json"] = manifest.dump(2) + "\n";
    o.directory = root / (c.output_dir.empty() ? c.kind + "-" + out.digest : c.output_dir);
    if (write)
        for (const auto& [name, text] : o.files) write_text(o.directory / name, text);
    return o;
}

}  // namespace supergrowth
