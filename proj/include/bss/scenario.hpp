#pragma once

// Scenario files: a JSON object naming a source model, an H family, the
// mixing matrix and the run/engine settings.
//
//   {
//     "model": {"name": "polar", "d": 1},
//     "H": "classical_cubic",
//     "mixing": {"seed": 3},
//     "mu": 0.005, "n_steps": 200000, "seeds": [1, 2, 3],
//     "thinning": 100, "tolerance": 0.15,
//     "expectation": {"mode": "quadrature", "nodes": 64},
//     "output_dir": "out"
//   }
//
// Model and H may be given as a bare name or as an object with "name" plus
// parameters. Unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bss/adaptive.hpp"
#include "bss/error.hpp"
#include "bss/expectation.hpp"
#include "bss/linalg.hpp"
#include "bss/meanfield.hpp"
#include "bss/nonlinearity.hpp"
#include "bss/sources.hpp"

namespace bss {

using json = nlohmann::json;

struct Scenario {
    std::string name;
    json model_spec;
    json h_spec;
    /// Explicit A; when absent, A is random (see mixing_seed).
    std::optional<Mat2> mixing_matrix;
    /// Seed of a single random A shared by all runs. When neither this nor
    /// mixing_matrix is set, each run draws its own A from its seed.
    std::optional<std::uint64_t> mixing_seed;
    double mu = 0.005;
    std::uint64_t n_steps = 200000;
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t thinning = default_thinning;
    /// Non-mixing index below which a run counts as converged.
    double tolerance = 0.15;
    Orientation orientation = Orientation::diagonal;
    ExpectationEngine engine;
    std::string output_dir = "out";
};

/// Text shown by `bss --help`.
inline constexpr const char* scenario_defaults_help =
    "Scenario keys and defaults:\n"
    "  model        required; gaussian_pair{sigma1,sigma2}, gaussian_scale_mixture, laplace_pair,\n"
    "               uniform_pair{smoothing=0}, polar{d=0}, elliptical{K1=1,K2=1,omega=gaussian|exponential},\n"
    "               contaminated{epsilon,f1,f2,g1,g2} with marginals {dist=gaussian|laplace|uniform,\n"
    "               sigma|b|a, mean=0}\n"
    "  H            required except for separability; classical_cubic, absvalue, classical{g=cubic|linear|tanh},\n"
    "               score_based{offset=true}\n"
    "  mixing       {matrix: [[a11,a12],[a21,a22]]} or {seed: n}; default: random A per run seed\n"
    "  mu           0.005\n"
    "  n_steps      200000\n"
    "  seeds        [1]\n"
    "  thinning     100\n"
    "  tolerance    0.15\n"
    "  orientation  diagonal (or anti-diagonal)\n"
    "  expectation  {mode: quadrature, nodes: 64} or {mode: monte_carlo, n: 100000, seed: 1}\n"
    "  output_dir   out\n";

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": key '" + key + "' has the wrong type");
    }
}

/// Normalizes "name" or {"name": ...} to an object.
inline json as_named(const json& j, const std::string& where) {
    if (j.is_string()) return json{{"name", j.get<std::string>()}};
    if (j.is_object() && j.contains("name") && j.at("name").is_string()) return j;
    throw ParseError(where + ": expected a name or an object with a 'name' field");
}

inline Univariate parse_marginal(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    check_keys(j, {"dist", "sigma", "b", "a", "mean"}, where);
    const auto dist = get_or<std::string>(j, "dist", "gaussian", where);
    const double mean = get_or(j, "mean", 0.0, where);
    if (dist == "gaussian") return gaussian(get_or(j, "sigma", 1.0, where), mean);
    if (mean != 0.0) throw ParseError(where + ": only gaussian marginals accept a mean");
    if (dist == "laplace") return laplace(get_or(j, "b", 1.0, where));
    if (dist == "uniform") return uniform(get_or(j, "a", std::sqrt(3.0), where));
    throw ParseError(where + ": unknown marginal '" + dist + "'");
}

} // namespace detail

/// Builds a SourceModel from its scenario description.
inline SourceModel model_from_json(const json& spec) {
    const json j = detail::as_named(spec, "model");
    const auto name = j.at("name").get<std::string>();
    const std::string where = "model '" + name + "'";
    if (name == "gaussian_pair") {
        detail::check_keys(j, {"name", "sigma1", "sigma2"}, where);
        return make_gaussian_pair(detail::get_or(j, "sigma1", 1.0, where), detail::get_or(j, "sigma2", 1.0, where));
    }
    if (name == "gaussian_scale_mixture") {
        detail::check_keys(j, {"name"}, where);
        return make_gaussian_scale_mixture();
    }
    if (name == "laplace_pair") {
        detail::check_keys(j, {"name"}, where);
        return make_laplace_pair();
    }
    if (name == "uniform_pair") {
        detail::check_keys(j, {"name", "smoothing"}, where);
        return make_uniform_pair(detail::get_or(j, "smoothing", 0.0, where));
    }
    if (name == "polar") {
        detail::check_keys(j, {"name", "d"}, where);
        return make_polar_dependent({detail::get_or(j, "d", 0.0, where)});
    }
    if (name == "elliptical") {
        detail::check_keys(j, {"name", "K1", "K2", "omega"}, where);
        const auto omega = detail::get_or<std::string>(j, "omega", "gaussian", where);
        EllipticalProfile profile;
        if (omega == "gaussian")
            profile = gaussian_profile();
        else if (omega == "exponential")
            profile = exponential_profile();
        else
            throw ParseError(where + ": unknown omega '" + omega + "'");
        return make_elliptical({profile, detail::get_or(j, "K1", 1.0, where), detail::get_or(j, "K2", 1.0, where)});
    }
    if (name == "contaminated") {
        detail::check_keys(j, {"name", "epsilon", "f1", "f2", "g1", "g2"}, where);
        for (const char* k : {"epsilon", "f1", "f2", "g1", "g2"})
            if (!j.contains(k)) throw ParseError(where + ": missing key '" + k + "'");
        ContaminationConfig cfg;
        cfg.epsilon = detail::get_or(j, "epsilon", 0.0, where);
        cfg.f1 = detail::parse_marginal(j.at("f1"), where + ".f1");
        cfg.f2 = detail::parse_marginal(j.at("f2"), where + ".f2");
        cfg.g1 = detail::parse_marginal(j.at("g1"), where + ".g1");
        cfg.g2 = detail::parse_marginal(j.at("g2"), where + ".g2");
        return make_contaminated(cfg);
    }
    throw ParseError("unknown model '" + name + "'");
}

/// Builds an HMatrix from its scenario description. The score-based family
/// needs the model it is derived from.
inline HMatrix h_from_json(const json& spec, const SourceModel& model) {
    const json j = detail::as_named(spec, "H");
    const auto name = j.at("name").get<std::string>();
    const std::string where = "H '" + name + "'";
    if (name == "classical_cubic") {
        detail::check_keys(j, {"name"}, where);
        return make_classical_cubic();
    }
    if (name == "absvalue") {
        detail::check_keys(j, {"name"}, where);
        return make_absvalue();
    }
    if (name == "classical") {
        detail::check_keys(j, {"name", "g"}, where);
        const auto g = detail::get_or<std::string>(j, "g", "cubic", where);
        if (g == "cubic") return make_classical(cubic_pair());
        if (g == "linear") return make_classical(linear_pair());
        if (g == "tanh") return make_classical(tanh_pair());
        throw ParseError(where + ": unknown g '" + g + "'");
    }
    if (name == "score_based") {
        detail::check_keys(j, {"name", "offset"}, where);
        return make_score_based(model, detail::get_or(j, "offset", true, where));
    }
    throw ParseError("unknown H '" + name + "'");
}

inline ExpectationEngine engine_from_json(const json& j) {
    const std::string where = "expectation";
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    detail::check_keys(j, {"mode", "n", "nodes", "seed"}, where);
    const auto mode = detail::get_or<std::string>(j, "mode", "quadrature", where);
    ExpectationEngine e;
    if (mode == "quadrature") {
        e = ExpectationEngine::quadrature(detail::get_or(j, "nodes", 64, where));
    } else if (mode == "monte_carlo") {
        e = ExpectationEngine::monte_carlo(detail::get_or<std::size_t>(j, "n", 100000, where),
                                           detail::get_or<std::uint64_t>(j, "seed", 1, where));
    } else {
        throw ParseError(where + ": unknown mode '" + mode + "'");
    }
    try {
        e.validate();
    } catch (const DomainError& err) {
        throw ParseError(err.what());
    }
    return e;
}

inline Scenario parse_scenario(const json& j, const std::string& name = "scenario") {
    if (!j.is_object()) throw ParseError(name + ": top level must be an object");
    detail::check_keys(j,
                       {"model", "H", "mixing", "mu", "n_steps", "seeds", "thinning", "tolerance", "orientation",
                        "expectation", "output_dir"},
                       name);
    if (!j.contains("model")) throw ParseError(name + ": missing 'model'");
    Scenario sc;
    sc.name = name;
    sc.model_spec = detail::as_named(j.at("model"), "model");
    if (j.contains("H")) sc.h_spec = detail::as_named(j.at("H"), "H");
    sc.mu = detail::get_or(j, "mu", sc.mu, name);
    sc.n_steps = detail::get_or(j, "n_steps", sc.n_steps, name);
    sc.thinning = detail::get_or(j, "thinning", sc.thinning, name);
    sc.tolerance = detail::get_or(j, "tolerance", sc.tolerance, name);
    sc.output_dir = detail::get_or(j, "output_dir", sc.output_dir, name);
    if (j.contains("seeds")) {
        sc.seeds = detail::get_or<std::vector<std::uint64_t>>(j, "seeds", {}, name);
        if (sc.seeds.empty()) throw ParseError(name + ": 'seeds' must not be empty");
    }
    if (j.contains("orientation")) {
        const auto o = detail::get_or<std::string>(j, "orientation", "diagonal", name);
        if (o == "diagonal")
            sc.orientation = Orientation::diagonal;
        else if (o == "anti-diagonal" || o == "anti_diagonal")
            sc.orientation = Orientation::anti_diagonal;
        else
            throw ParseError(name + ": unknown orientation '" + o + "'");
    }
    if (j.contains("expectation")) sc.engine = engine_from_json(j.at("expectation"));
    if (j.contains("mixing")) {
        const auto& m = j.at("mixing");
        if (!m.is_object()) throw ParseError(name + ": 'mixing' must be an object");
        detail::check_keys(m, {"matrix", "seed"}, "mixing");
        if (m.contains("matrix") && m.contains("seed"))
            throw ParseError("mixing: give either 'matrix' or 'seed', not both");
        if (m.contains("matrix")) {
            std::vector<std::vector<double>> rows;
            try {
                rows = m.at("matrix").get<std::vector<std::vector<double>>>();
            } catch (const json::exception&) {
                throw ParseError("mixing.matrix: expected [[a11, a12], [a21, a22]]");
            }
            if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
                throw ParseError("mixing.matrix: expected a 2x2 array");
            sc.mixing_matrix = Mat2{rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
        }
        if (m.contains("seed")) sc.mixing_seed = detail::get_or<std::uint64_t>(m, "seed", 0, "mixing");
    }
    if (!(sc.mu >= 0.0) || !std::isfinite(sc.mu)) throw ParseError(name + ": 'mu' must be finite and >= 0");
    if (sc.n_steps < 1) throw ParseError(name + ": 'n_steps' must be >= 1");
    if (sc.thinning < 1) throw ParseError(name + ": 'thinning' must be >= 1");
    // Resolve names now so that typos fail at parse time.
    const auto model = model_from_json(sc.model_spec);
    if (!sc.h_spec.is_null()) (void)h_from_json(sc.h_spec, model);
    return sc;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& name = "scenario") {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(name + ": " + e.what());
    }
    return parse_scenario(j, name);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path);
}

/// The H of a scenario; commands that adapt or linearize need one.
inline HMatrix scenario_h(const Scenario& sc, const SourceModel& model) {
    if (sc.h_spec.is_null()) throw ParseError(sc.name + ": missing 'H'");
    return h_from_json(sc.h_spec, model);
}

/// The mixing matrix used by the run with the given seed.
inline MixingMatrix scenario_mixing(const Scenario& sc, std::uint64_t run_seed) {
    if (sc.mixing_matrix) return MixingMatrix(*sc.mixing_matrix);
    Rng rng(sc.mixing_seed.value_or(run_seed), 2);
    return random_mixing(rng);
}

} // namespace bss
