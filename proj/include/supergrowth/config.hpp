#pragma once
/**
 * @file config.hpp
 * @brief Campaign configuration: a JSON document with a top-level `kind`
 * discriminator, a model descriptor and kind-specific parameters.
 *
 * Unknown keys are rejected everywhere. Errors carry a JSON pointer to the
 * offending key. Parameters are kept as given (defaults are applied at use),
 * so serialize(parse(text)) has the same key set and values as the input.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "supergrowth/model.hpp"

namespace supergrowth {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string pointer, const std::string& what)
        : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

enum class ParamType { Number, Integer, Boolean, String, NumberList, Object };

inline const char* to_string(ParamType t) {
    switch (t) {
        case ParamType::Number: return "number";
        case ParamType::Integer: return "integer";
        case ParamType::Boolean: return "boolean";
        case ParamType::String: return "string";
        case ParamType::NumberList: return "number[]";
        case ParamType::Object: return "object";
    }
    return "?";
}

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Number;
    bool required = false;
    json default_value;
    std::string help;
    std::vector<std::string> choices;  ///< allowed values for strings
};

struct KindSchema {
    std::string kind;
    std::string summary;
    std::vector<ParamSpec> params;

    const ParamSpec* find(const std::string& name) const {
        for (const auto& p : params)
            if (p.name == name) return &p;
        return nullptr;
    }
};

inline const std::vector<std::string>& kinds() {
    static const std::vector<std::string> k{"fk",  "tail", "bbm",    "sbm",    "couple",      "pde",
                                            "csp", "pgpe", "growth", "spread", "local-growth"};
    return k;
}

namespace detail {

inline ParamSpec req(std::string n, ParamType t, std::string help) { return {std::move(n), t, true, nullptr, std::move(help), {}}; }
inline ParamSpec opt(std::string n, ParamType t, json d, std::string help, std::vector<std::string> choices = {}) {
    return {std::move(n), t, false, std::move(d), std::move(help), std::move(choices)};
}

inline std::vector<ParamSpec> particle_params() {
    using T = ParamType;
    return {req("horizon", T::Number, "final time"),
            opt("record_step", T::Number, 0.05, "spacing of the record times"),
            opt("dt", T::Number, 0.01, "maximal time step"),
            req("reps", T::Integer, "replicates"),
            opt("x0", T::Number, 0.0, "initial position (first coordinate; other coordinates 0)"),
            opt("max_particles", T::Integer, 10'000'000, "population cap"),
            opt("max_wall_seconds", T::Number, nullptr, "wall-clock cap per replicate (null: none)"),
            opt("window", T::NumberList, json::array({-1.0, 1.0}), "[lo, hi] for the local mass")};
}

}  // namespace detail

/// Parameter schema for a campaign kind; throws ConfigError for unknown kinds.
inline const KindSchema& schema(const std::string& kind) {
    using T = ParamType;
    using detail::opt;
    using detail::req;
    static const std::map<std::string, KindSchema> all = [] {
        std::map<std::string, KindSchema> m;
        m["fk"] = {"fk", "Feynman-Kac estimate of T_t g(x) by Monte Carlo",
                   {req("t", T::Number, "time"), opt("dt", T::Number, 1e-3, "path step"),
                    req("reps", T::Integer, "paths"), opt("x", T::Number, 0.0, "start point (first coordinate)"),
                    opt("g", T::Object, json{{"type", "constant"}, {"value", 1.0}}, "test function descriptor"),
                    opt("weight_cap", T::Number, nullptr, "truncate weights above this (null: none)")}};
        m["tail"] = {"tail", "tail probabilities P(int_0^1 |B_s|^ell ds > K) and the Schilder fit",
                     {req("ell", T::Number, "exponent"), req("K", T::NumberList, "thresholds"),
                      req("reps", T::Integer, "replicates per threshold"),
                      opt("method", T::String, "splitting", "estimator", {"naive", "splitting"}),
                      opt("dt", T::Number, 1e-3, "path step"), opt("levels", T::Integer, 10, "splitting levels"),
                      opt("batches", T::Integer, 20, "independent splitting batches")}};
        auto part = detail::particle_params();
        m["bbm"] = {"bbm", "branching diffusion Z from Poisson(1) particles at x0", part};
        auto sbm = part;
        sbm.push_back(opt("n", T::Integer, 100, "superprocess level (atom mass 1/n)"));
        sbm.push_back(opt("snapshots", T::Boolean, false, "write the atoms at every record time"));
        m["sbm"] = {"sbm", "level-n superprocess from delta_{x0}", sbm};
        m["couple"] = {"couple", "Poissonization coupling check (alpha = beta required)",
                       {opt("rule", T::String, "fixed", "fixed time or first |X| >= threshold", {"fixed", "threshold"}),
                        opt("t", T::Number, 1.0, "fixed time"), opt("threshold", T::Number, 2.0, "mass threshold"),
                        opt("horizon", T::Number, 20.0, "censoring horizon for the threshold rule"),
                        req("reps", T::Integer, "replicates per side"), opt("n", T::Integer, 1000, "superprocess level"),
                        opt("dt", T::Number, 0.01, "time step"), opt("permutations", T::Integer, 999, "permutations")}};
        m["pde"] = {"pde", "cumulant (S_t g) or linear (T_t g) equation by exhaustion of intervals",
                    {req("t", T::Number, "time"),
                     opt("equation", T::String, "cumulant", "which equation", {"cumulant", "linear"}),
                     opt("initial", T::Object, json{{"type", "constant"}, {"value", 1.0}}, "initial data descriptor"),
                     opt("boundary", T::Number, 0.0, "Dirichlet value"),
                     opt("radii", T::NumberList, json::array({5, 10, 20, 40, 80, 160, 320}), "exhaustion radii"),
                     opt("dx", T::Number, 0.05, "grid spacing"), opt("dt", T::Number, 1e-3, "time step"),
                     opt("window", T::NumberList, json::array({-1.0, 1.0}), "reporting window [lo, hi]"),
                     opt("tol", T::Number, 1e-8, "exhaustion tolerance")}};
        m["csp"] = {"csp", "compact support criterion from zero initial data and growing boundary data",
                    {req("t", T::Number, "time"),
                     opt("boundary_values", T::NumberList, json::array({10, 100, 1000, 10000}), "boundary data M"),
                     opt("radii", T::NumberList, json::array({5, 10, 20, 40, 80}), "interval radii"),
                     opt("window", T::NumberList, json::array({-1.0, 1.0}), "window [lo, hi]"),
                     opt("dx", T::Number, 0.05, "grid spacing"), opt("dt", T::Number, 1e-3, "time step"),
                     opt("threshold", T::Number, 1e-6, "holds when the window max falls below this")}};
        m["pgpe"] = {"pgpe", "p-generalized principal eigenvalue bracket",
                     {req("p", T::Number, "time exponent"), req("lambda_grid", T::NumberList, "increasing lambdas"),
                      req("s_max", T::Number, "quadrature horizon"),
                      opt("g", T::Object, json{{"type", "bump"}, {"height", 1.0}, {"radius", 1.0}, {"center", 0.0}},
                          "test function descriptor"),
                      opt("window", T::NumberList, json::array({-1.0, 1.0}), "window B [lo, hi]"),
                      opt("R", T::Number, 20.0, "half-width of the PDE interval"),
                      opt("dx", T::Number, 0.05, "grid spacing"), opt("ds", T::Number, 1e-3, "time step")}};
        auto gr = part;
        gr.push_back(opt("system", T::String, "bbm", "simulated system", {"bbm", "sbm"}));
        gr.push_back(opt("n", T::Integer, 1, "superprocess level when system = sbm"));
        gr.push_back(opt("law", T::String, "power-exp", "growth law", {"power-exp", "double-exp"}));
        gr.push_back(opt("threshold", T::Number, 1e3, "records with mass above this are fitted"));
        gr.push_back(opt("known_rate", T::Number, 0.0, "c0 in log m - c0 t"));
        gr.push_back(opt("q_fixed", T::Number, nullptr, "hold q fixed (null: fit)"));
        m["growth"] = {"growth", "growth-law fit over simulated replicates", gr};
        m["spread"] = {"spread", "rightmost-particle spread log+(M_t)/t",
                       {req("horizon", T::Number, "final time"), req("reps", T::Integer, "replicates"),
                        opt("system", T::String, "sbm", "simulated system", {"sbm", "bbm"}),
                        opt("n", T::Integer, 1, "superprocess level"), opt("record_step", T::Number, 0.05, "record spacing"),
                        opt("dt", T::Number, 0.01, "time step"), opt("max_particles", T::Integer, 1'000'000, "population cap"),
                        opt("eps_sweep", T::NumberList, json::array({0.0, 0.25, 0.5, 1.0}), "eps levels")}};
        m["local-growth"] = {"local-growth", "running max of exp(-lambda t) X_t(B) against its early baseline",
                             {req("lambda_probe", T::NumberList, "probe rates"), req("reps", T::Integer, "replicates"),
                              opt("window", T::NumberList, json::array({-1.0, 1.0}), "window B [lo, hi]"),
                              opt("horizon", T::Number, 4.0, "final time"), opt("n", T::Integer, 10, "superprocess level"),
                              opt("record_step", T::Number, 0.05, "record spacing"), opt("dt", T::Number, 0.01, "time step"),
                              opt("max_particles", T::Integer, 10'000'000, "population cap"),
                              opt("factor", T::Number, 10.0, "exceedance factor")}};
        return m;
    }();
    const auto it = all.find(kind);
    if (it == all.end()) throw ConfigError("/kind", "unknown kind '" + kind + "'");
    return it->second;
}

struct CampaignConfig {
    std::string kind;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string output_dir;
    ModelSpec model;
    std::set<std::string> model_keys;  ///< top-level model keys present in the input
    json params = json::object();      ///< as given, validated

    /// Parameter value, or its schema default.
    json param(const std::string& name) const {
        if (params.contains(name)) return params.at(name);
        const auto* p = schema(kind).find(name);
        if (!p) throw ConfigError("/params/" + name, "not a parameter of kind " + kind);
        return p->default_value;
    }
    double number(const std::string& name) const { return param(name).get<double>(); }
    std::uint64_t integer(const std::string& name) const { return param(name).get<std::uint64_t>(); }
    std::string string(const std::string& name) const { return param(name).get<std::string>(); }
    bool boolean(const std::string& name) const { return param(name).get<bool>(); }
    std::vector<double> list(const std::string& name) const { return param(name).get<std::vector<double>>(); }
    bool has(const std::string& name) const { return params.contains(name) && !params.at(name).is_null(); }
};

namespace detail {

inline void only_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            throw ConfigError(ptr + "/" + k, "unknown key");
    }
}

inline double need_number(const json& j, const std::string& ptr, const char* key) {
    if (!j.contains(key)) throw ConfigError(ptr + "/" + key, "missing");
    if (!j.at(key).is_number()) throw ConfigError(ptr + "/" + key, "expected a number");
    const double v = j.at(key).get<double>();
    if (!std::isfinite(v)) throw ConfigError(ptr + "/" + key, "must be finite");
    return v;
}

inline std::vector<double> need_list(const json& j, const std::string& ptr, const char* key) {
    if (!j.contains(key)) throw ConfigError(ptr + "/" + key, "missing");
    const auto& a = j.at(key);
    if (!a.is_array()) throw ConfigError(ptr + "/" + key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ConfigError(ptr + "/" + key + "/" + std::to_string(i), "expected a number");
        out.push_back(a[i].get<double>());
    }
    return out;
}

inline std::string need_type(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(ptr + "/type", "missing or not a string");
    return j.at("type").get<std::string>();
}

}  // namespace detail

/// Coefficient descriptor: {"type": constant|power|signed_linear|bump|gaussian|indicator, ...}.
inline Scalar parse_scalar(const json& j, const std::string& ptr) {
    using detail::need_number;
    using detail::only_keys;
    const auto type = detail::need_type(j, ptr);
    if (type == "constant") {
        only_keys(j, ptr, {"type", "value"});
        return coef::Constant{need_number(j, ptr, "value")};
    }
    if (type == "power") {
        only_keys(j, ptr, {"type", "c0", "c1", "p"});
        return coef::Power{need_number(j, ptr, "c0"), need_number(j, ptr, "c1"), need_number(j, ptr, "p")};
    }
    if (type == "signed_linear") {
        only_keys(j, ptr, {"type", "scale"});
        return coef::SignedLinear{need_number(j, ptr, "scale")};
    }
    if (type == "bump") {
        only_keys(j, ptr, {"type", "height", "radius", "center"});
        const coef::Bump b{need_number(j, ptr, "height"), need_number(j, ptr, "radius"), need_number(j, ptr, "center")};
        if (!(b.radius > 0.0)) throw ConfigError(ptr + "/radius", "must be > 0");
        return b;
    }
    if (type == "gaussian") {
        only_keys(j, ptr, {"type", "height", "width", "center"});
        const coef::Gaussian g{need_number(j, ptr, "height"), need_number(j, ptr, "width"), need_number(j, ptr, "center")};
        if (!(g.width > 0.0)) throw ConfigError(ptr + "/width", "must be > 0");
        return g;
    }
    if (type == "indicator") {
        only_keys(j, ptr, {"type", "height", "lo", "hi"});
        return coef::Indicator{need_number(j, ptr, "height"), need_number(j, ptr, "lo"), need_number(j, ptr, "hi")};
    }
    throw ConfigError(ptr + "/type", "unknown coefficient type '" + type + "'");
}

inline json scalar_to_json(const Scalar& s) {
    return std::visit(
        [](const auto& k) -> json {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, coef::Constant>) return {{"type", "constant"}, {"value", k.value}};
            else if constexpr (std::is_same_v<K, coef::Power>)
                return {{"type", "power"}, {"c0", k.c0}, {"c1", k.c1}, {"p", k.p}};
            else if constexpr (std::is_same_v<K, coef::SignedLinear>) return {{"type", "signed_linear"}, {"scale", k.scale}};
            else if constexpr (std::is_same_v<K, coef::Bump>)
                return {{"type", "bump"}, {"height", k.height}, {"radius", k.radius}, {"center", k.center}};
            else if constexpr (std::is_same_v<K, coef::Gaussian>)
                return {{"type", "gaussian"}, {"height", k.height}, {"width", k.width}, {"center", k.center}};
            else return {{"type", "indicator"}, {"height", k.height}, {"lo", k.lo}, {"hi", k.hi}};
        },
        s);
}

/// Model descriptor; missing keys take the ModelSpec defaults (d = 1, Brownian motion on R, beta 0, alpha 1).
inline ModelSpec parse_model(const json& j, std::set<std::string>* present = nullptr, const std::string& ptr = "/model") {
    using detail::need_number;
    using detail::only_keys;
    only_keys(j, ptr, {"dim", "beta", "alpha", "drift", "diffusion", "domain"});
    ModelSpec m;
    if (present)
        for (const auto& [k, v] : j.items()) present->insert(k);
    if (j.contains("dim")) {
        if (!j.at("dim").is_number_integer() || j.at("dim").get<int>() < 1)
            throw ConfigError(ptr + "/dim", "expected a positive integer");
        m.dim = j.at("dim").get<int>();
    }
    if (j.contains("beta")) m.beta = parse_scalar(j.at("beta"), ptr + "/beta");
    if (j.contains("alpha")) m.alpha = parse_scalar(j.at("alpha"), ptr + "/alpha");
    if (j.contains("drift")) {
        const auto& d = j.at("drift");
        const auto p = ptr + "/drift";
        const auto type = detail::need_type(d, p);
        if (type == "zero") {
            only_keys(d, p, {"type"});
            m.drift = drift::Zero{};
        } else if (type == "constant") {
            only_keys(d, p, {"type", "value"});
            m.drift = drift::ConstantVector{detail::need_list(d, p, "value")};
        } else if (type == "linear") {
            only_keys(d, p, {"type", "rate"});
            m.drift = drift::Linear{need_number(d, p, "rate")};
        } else {
            throw ConfigError(p + "/type", "unknown drift type '" + type + "'");
        }
    }
    if (j.contains("diffusion")) {
        const auto& d = j.at("diffusion");
        const auto p = ptr + "/diffusion";
        const auto type = detail::need_type(d, p);
        if (type == "identity") {
            only_keys(d, p, {"type", "sigma2"});
            const double s2 = need_number(d, p, "sigma2");
            if (!(s2 > 0.0)) throw ConfigError(p + "/sigma2", "must be > 0");
            m.diffusion = diffusion::IdentityScalar{s2};
        } else if (type == "matrix") {
            only_keys(d, p, {"type", "a"});
            m.diffusion = diffusion::ConstantMatrix{detail::need_list(d, p, "a")};
        } else {
            throw ConfigError(p + "/type", "unknown diffusion type '" + type + "'");
        }
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        const auto p = ptr + "/domain";
        const auto type = detail::need_type(d, p);
        if (type == "whole") {
            only_keys(d, p, {"type"});
            m.domain = domain::WholeSpace{};
        } else if (type == "interval") {
            only_keys(d, p, {"type", "lo", "hi"});
            m.domain = domain::Interval{need_number(d, p, "lo"), need_number(d, p, "hi")};
        } else if (type == "ball") {
            only_keys(d, p, {"type", "center", "radius"});
            m.domain = domain::Ball{detail::need_list(d, p, "center"), need_number(d, p, "radius")};
        } else {
            throw ConfigError(p + "/type", "unknown domain type '" + type + "'");
        }
    }
    // Point validation failures at the key that causes them.
    if (const auto* c = std::get_if<coef::Constant>(&m.alpha); c && !(c->value > 0.0))
        throw ConfigError(ptr + "/alpha/value", "alpha must be > 0 on D");
    if (const auto* pw = std::get_if<coef::Power>(&m.alpha)) {
        if (!(pw->c0 > 0.0)) throw ConfigError(ptr + "/alpha/c0", "alpha must be > 0 on D");
        if (pw->c1 < 0.0) throw ConfigError(ptr + "/alpha/c1", "alpha must be > 0 on D");
    }
    if (j.contains("alpha") && !std::holds_alternative<coef::Constant>(m.alpha) &&
        !std::holds_alternative<coef::Power>(m.alpha))
        throw ConfigError(ptr + "/alpha/type", "alpha must be constant or power (positive on D)");
    if (const auto* pw = std::get_if<coef::Power>(&m.beta); pw && (pw->p < 0.0 || pw->p > 2.0))
        throw ConfigError(ptr + "/beta/p", "power exponent must lie in [0, 2]");
    try {
        validate(m);
    } catch (const ModelError& e) {
        throw ConfigError(ptr, e.what());
    }
    return m;
}

inline json model_to_json(const ModelSpec& m, const std::set<std::string>& keys) {
    json j = json::object();
    auto want = [&](const char* k) { return keys.empty() || keys.count(k) > 0; };
    if (want("dim")) j["dim"] = m.dim;
    if (want("beta")) j["beta"] = scalar_to_json(m.beta);
    if (want("alpha")) j["alpha"] = scalar_to_json(m.alpha);
    if (want("drift")) {
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, drift::Zero>) j["drift"] = {{"type", "zero"}};
                else if constexpr (std::is_same_v<K, drift::ConstantVector>) j["drift"] = {{"type", "constant"}, {"value", k.value}};
                else j["drift"] = {{"type", "linear"}, {"rate", k.rate}};
            },
            m.drift);
    }
    if (want("diffusion")) {
        if (const auto* s = std::get_if<diffusion::IdentityScalar>(&m.diffusion))
            j["diffusion"] = {{"type", "identity"}, {"sigma2", s->sigma2}};
        else
            j["diffusion"] = {{"type", "matrix"}, {"a", std::get<diffusion::ConstantMatrix>(m.diffusion).a}};
    }
    if (want("domain")) {
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, domain::WholeSpace>) j["domain"] = {{"type", "whole"}};
                else if constexpr (std::is_same_v<K, domain::Interval>) j["domain"] = {{"type", "interval"}, {"lo", k.lo}, {"hi", k.hi}};
                else j["domain"] = {{"type", "ball"}, {"center", k.center}, {"radius", k.radius}};
            },
            m.domain);
    }
    return j;
}

namespace detail {

inline void check_param(const ParamSpec& spec, const json& v, const std::string& ptr) {
    if (v.is_null() && !spec.required && spec.default_value.is_null()) return;
    switch (spec.type) {
        case ParamType::Number:
            if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(ptr, "expected a finite number");
            break;
        case ParamType::Integer:
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                throw ConfigError(ptr, "expected a nonnegative integer");
            break;
        case ParamType::Boolean:
            if (!v.is_boolean()) throw ConfigError(ptr, "expected a boolean");
            break;
        case ParamType::String:
            if (!v.is_string()) throw ConfigError(ptr, "expected a string");
            if (!spec.choices.empty() &&
                std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end())
                throw ConfigError(ptr, "unknown value '" + v.get<std::string>() + "'");
            break;
        case ParamType::NumberList:
            if (!v.is_array() || v.empty()) throw ConfigError(ptr, "expected a nonempty array of numbers");
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!v[i].is_number()) throw ConfigError(ptr + "/" + std::to_string(i), "expected a number");
            break;
        case ParamType::Object:
            parse_scalar(v, ptr);
            break;
    }
}

/// Range checks that need more than the type.
inline void check_ranges(const CampaignConfig& c) {
    auto positive = [&](const char* k) {
        if (c.params.contains(k) && !c.params.at(k).is_null() && !(c.params.at(k).get<double>() > 0.0))
            throw ConfigError(std::string("/params/") + k, "must be > 0");
    };
    for (const char* k : {"t", "dt", "horizon", "record_step", "reps", "n", "dx", "ds", "s_max", "R", "ell", "p",
                          "max_particles", "max_wall_seconds", "factor", "batches", "levels"})
        if (schema(c.kind).find(k)) positive(k);
    for (const char* k : {"window"}) {
        if (c.params.contains(k)) {
            const auto w = c.params.at(k).get<std::vector<double>>();
            if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError(std::string("/params/") + k, "expected [lo, hi] with lo < hi");
        }
    }
}

}  // namespace detail

/// Parses and validates a campaign document.
inline CampaignConfig parse_config(const json& j) {
    detail::only_keys(j, "", {"kind", "seed", "workers", "output_dir", "model", "params"});
    CampaignConfig c;
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("/kind", "missing or not a string");
    c.kind = j.at("kind").get<std::string>();
    const auto& sch = schema(c.kind);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("/seed", "expected a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_unsigned()) throw ConfigError("/workers", "expected a nonnegative integer");
        c.workers = j.at("workers").get<unsigned>();
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("/output_dir", "expected a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    c.model = parse_model(j.contains("model") ? j.at("model") : json::object(), &c.model_keys);
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (!p.is_object()) throw ConfigError("/params", "expected an object");
        for (const auto& [k, v] : p.items()) {
            const auto* spec = sch.find(k);
            if (!spec) throw ConfigError("/params/" + k, "unknown key for kind " + c.kind);
            detail::check_param(*spec, v, "/params/" + k);
        }
        c.params = p;
    }
    for (const auto& spec : sch.params)
        if (spec.required && !c.params.contains(spec.name)) throw ConfigError("/params/" + spec.name, "missing");
    detail::check_ranges(c);
    return c;
}

inline CampaignConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

inline json to_json(const CampaignConfig& c) {
    json j;
    j["kind"] = c.kind;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
    j["model"] = model_to_json(c.model, c.model_keys);
    j["params"] = c.params;
    return j;
}

/// Schema of a kind as a JSON document (for `describe`).
inline json describe(const std::string& kind) {
    const auto& s = schema(kind);
    json params = json::array();
    for (const auto& p : s.params) {
        json e{{"name", p.name}, {"type", to_string(p.type)}, {"required", p.required}, {"help", p.help}};
        if (!p.required) e["default"] = p.default_value;
        if (!p.choices.empty()) e["choices"] = p.choices;
        params.push_back(e);
    }
    return {{"kind", s.kind},
            {"summary", s.summary},
            {"top_level", {"kind", "seed", "workers", "output_dir", "model", "params"}},
            {"model", {{"dim", "positive integer (default 1)"},
                       {"beta", "coefficient (default constant 0)"},
                       {"alpha", "coefficient > 0 on D (default constant 1)"},
                       {"drift", "zero | constant{value[]} | linear{rate}"},
                       {"diffusion", "identity{sigma2} | matrix{a[]}"},
                       {"domain", "whole | interval{lo,hi} | ball{center[],radius}"},
                       {"coefficient", "constant{value} | power{c0,c1,p} | signed_linear{scale} | "
                                       "bump{height,radius,center} | gaussian{height,width,center} | indicator{height,lo,hi}"}}},
            {"params", params}};
}

}  // namespace supergrowth
