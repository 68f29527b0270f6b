#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "confsol/reaction_ode.hpp"
#include "confsol/scan.hpp"
#include "confsol/soliton.hpp"

namespace confsol::report {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"lemma-scan", "identity-fuzz", "ode-run", "soliton-verify"};
    return names;
}

struct LemmaOptions {
    std::size_t averaging_trials = 100000;
    std::size_t claim_samples = 10000;
    std::size_t zero_rho_samples = 10000;
};

struct FuzzOptions {
    std::size_t samples = 1000000;
    int max_n = 8;
    int max_m0 = 6;
    double magnitude_decades = 3.0;  // entries scaled by 10^U(-d, d)
    std::size_t oracle_samples = 50;
    std::vector<int> oracle_dimensions{4, 5, 6, 7};
    std::size_t weyl_samples = 100;
    std::vector<int> weyl_dimensions{4, 5, 6};
    std::size_t chunks = 64;
};

struct OdeOptions {
    double c0 = 1.0;
    std::size_t orthant_runs = 200;
    std::vector<int> orthant_dimensions{4, 5};
    std::size_t hi_runs = 100;
    double hi_t_end = 5.0;
    double hi_sample_dt = 0.01;
    std::size_t comparison_samples = 10000;
    std::size_t coherence_runs = 20;
    std::size_t csv_runs = 2;
};

struct SolitonOptions {
    std::vector<std::string> kinds{"gaussian", "round_sphere", "cylinder"};
    std::size_t pairs = 100;
    double spread = 6.0;
    std::size_t geodesic_samples = 16;
};

struct RunConfig {
    std::string suite;
    std::vector<int> dimensions;
    std::vector<int> m_values;
    ScanConfig scan;
    IntegratorOptions integrator;
    LemmaOptions lemma;
    FuzzOptions fuzz;
    OdeOptions ode;
    SolitonOptions soliton;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 1;
    std::map<std::string, double> tolerances;
    std::vector<std::string> warnings;
    unsigned jobs = 1;
    bool self_test = false;

    double tolerance(const std::string& name) const {
        auto it = tolerances.find(name);
        if (it == tolerances.end()) throw std::logic_error("unknown tolerance " + name);
        return it->second;
    }
};

inline std::map<std::string, double> default_tolerances(const std::string& suite) {
    if (suite == "lemma-scan") return {{"c_est", 1e-9}, {"averaging", 1e-12}, {"zero_rho", 1e-12}};
    if (suite == "identity-fuzz") return {{"identity", 1e-10}, {"oracle", 1e-12}, {"weyl", 1e-12}};
    if (suite == "ode-run")
        return {{"blowup_time", 1e-4},   {"invariant_subspace", 1e-9}, {"mixed_pairs", 1e-12},
                {"orthant", 1e-9},       {"hi_margin", 1e-6},          {"comparison_residual", 1e-8},
                {"coherence_slack", 1e-6}};
    if (suite == "soliton-verify") return {{"residual", 1e-12}, {"margin", 1e-12}};
    throw ConfigError("unknown suite '" + suite + "'");
}

/// Suite defaults before any file or flag is applied.
inline RunConfig default_config(const std::string& suite) {
    RunConfig c;
    c.suite = suite;
    c.tolerances = default_tolerances(suite);
    if (suite == "lemma-scan") {
        c.m_values = {1, 2};
        c.dimensions = {4, 5, 6, 7, 8};
        c.scan.dump_rows = 2000;
    } else if (suite == "identity-fuzz") {
        c.dimensions = {4, 5, 6, 7, 8};
        c.m_values = {0, 1, 2, 3, 4, 5, 6};
    } else if (suite == "ode-run") {
        c.dimensions = {4, 5, 6};
        c.m_values = {0, 1, 2};
        c.scan.grid_resolution = 60;
        c.scan.random_samples = 20000;
    } else {
        c.dimensions = {4, 5, 6};
        c.m_values = {};
    }
    return c;
}

namespace detail {

// Reads declared keys and rejects anything else, so typos surface as errors.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type");
        }
    }

    const nlohmann::json* child(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }

private:
    const nlohmann::json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

inline void read_scan(const nlohmann::json& j, ScanConfig& s) {
    ObjectReader r(j, "scan");
    r.get("box_half_width", s.box_half_width);
    r.get("grid_resolution", s.grid_resolution);
    r.get("random_samples", s.random_samples);
    r.get("max_draws_per_sample", s.max_draws_per_sample);
    r.get("refine_iterations", s.refine_iterations);
    r.get("refine_starts", s.refine_starts);
    r.get("dump_rows", s.dump_rows);
    r.get("chunks", s.chunks);
    r.finish();
}

inline void read_integrator(const nlohmann::json& j, IntegratorOptions& o) {
    ObjectReader r(j, "integrator");
    std::string method = o.method == IntegratorOptions::Method::rk4 ? "rk4" : "adaptive";
    r.get("method", method);
    if (method == "rk4") o.method = IntegratorOptions::Method::rk4;
    else if (method == "adaptive") o.method = IntegratorOptions::Method::adaptive;
    else throw ConfigError("integrator.method: expected 'rk4' or 'adaptive', got '" + method + "'");
    r.get("dt", o.dt);
    r.get("tolerance", o.tolerance);
    r.get("constrained", o.constrained);
    r.get("t_end", o.t_end);
    r.get("blowup_threshold", o.blowup_threshold);
    r.get("sample_dt", o.sample_dt);
    r.finish();
}

inline void read_lemma(const nlohmann::json& j, LemmaOptions& o) {
    ObjectReader r(j, "lemma");
    r.get("averaging_trials", o.averaging_trials);
    r.get("claim_samples", o.claim_samples);
    r.get("zero_rho_samples", o.zero_rho_samples);
    r.finish();
}

inline void read_fuzz(const nlohmann::json& j, FuzzOptions& o) {
    ObjectReader r(j, "fuzz");
    r.get("samples", o.samples);
    r.get("max_n", o.max_n);
    r.get("max_m0", o.max_m0);
    r.get("magnitude_decades", o.magnitude_decades);
    r.get("oracle_samples", o.oracle_samples);
    r.get("oracle_dimensions", o.oracle_dimensions);
    r.get("weyl_samples", o.weyl_samples);
    r.get("weyl_dimensions", o.weyl_dimensions);
    r.get("chunks", o.chunks);
    r.finish();
}

inline void read_ode(const nlohmann::json& j, OdeOptions& o) {
    ObjectReader r(j, "ode");
    r.get("c0", o.c0);
    r.get("orthant_runs", o.orthant_runs);
    r.get("orthant_dimensions", o.orthant_dimensions);
    r.get("hi_runs", o.hi_runs);
    r.get("hi_t_end", o.hi_t_end);
    r.get("hi_sample_dt", o.hi_sample_dt);
    r.get("comparison_samples", o.comparison_samples);
    r.get("coherence_runs", o.coherence_runs);
    r.get("csv_runs", o.csv_runs);
    r.finish();
}

inline void read_soliton(const nlohmann::json& j, SolitonOptions& o) {
    ObjectReader r(j, "soliton");
    r.get("kinds", o.kinds);
    r.get("pairs", o.pairs);
    r.get("spread", o.spread);
    r.get("geodesic_samples", o.geodesic_samples);
    r.finish();
}

inline void require_dimensions(const std::vector<int>& dims, const std::string& what, int lo, int hi) {
    if (dims.empty()) throw ConfigError(what + ": list must not be empty");
    for (int n : dims)
        if (n < lo || n > hi)
            throw ConfigError(what + ": dimension " + std::to_string(n) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
}

}  // namespace detail

/// Applies a parsed config document on top of the suite defaults.
inline void apply_document(RunConfig& c, const nlohmann::json& doc) {
    detail::ObjectReader r(doc, "config");
    std::string suite = c.suite;
    r.get("suite", suite);
    if (suite != c.suite) throw ConfigError("config is for suite '" + suite + "', not '" + c.suite + "'");
    r.get("seed", c.seed);
    r.get("dimensions", c.dimensions);
    r.get("m", c.m_values);
    std::string out = c.output_dir.string();
    r.get("output_dir", out);
    c.output_dir = out;
    if (auto* j = r.child("scan")) detail::read_scan(*j, c.scan);
    if (auto* j = r.child("integrator")) detail::read_integrator(*j, c.integrator);
    if (auto* j = r.child("lemma")) detail::read_lemma(*j, c.lemma);
    if (auto* j = r.child("fuzz")) detail::read_fuzz(*j, c.fuzz);
    if (auto* j = r.child("ode")) detail::read_ode(*j, c.ode);
    if (auto* j = r.child("soliton")) detail::read_soliton(*j, c.soliton);
    if (auto* j = r.child("tolerances")) {
        if (!j->is_object()) throw ConfigError("tolerances: expected an object");
        for (auto it = j->begin(); it != j->end(); ++it) {
            if (!c.tolerances.count(it.key()))
                throw ConfigError("tolerances: '" + it.key() + "' is not a tolerance of " + c.suite);
            if (!it->is_number()) throw ConfigError("tolerances." + it.key() + ": expected a number");
            c.tolerances[it.key()] = it->get<double>();
        }
    }
    r.finish();
}

/// Cross-field validation; also records warnings that do not reject the run.
inline void validate(RunConfig& c) {
    for (const auto& [name, value] : c.tolerances) {
        if (!std::isfinite(value) || value <= 0.0)
            throw ConfigError("tolerances." + name + ": must be finite and positive");
        if (value < std::numeric_limits<double>::epsilon())
            c.warnings.push_back("tolerance " + name + " is below machine epsilon; the check cannot be met reliably");
    }
    try {
        c.scan.validate();
        c.integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.jobs == 0) throw ConfigError("jobs must be positive");

    if (c.suite == "lemma-scan") {
        if (c.m_values.empty()) throw ConfigError("m: list must not be empty");
        for (int m : c.m_values)
            if (m < 1) throw ConfigError("m: values must be >= 1");
        detail::require_dimensions(c.dimensions, "dimensions", 4, 64);
    } else if (c.suite == "identity-fuzz") {
        if (c.fuzz.max_n < 4 || c.fuzz.max_n > 64) throw ConfigError("fuzz.max_n: must lie in [4, 64]");
        if (c.fuzz.max_m0 < 0) throw ConfigError("fuzz.max_m0: must be >= 0");
        if (!(c.fuzz.magnitude_decades >= 0.0 && c.fuzz.magnitude_decades <= 100.0))
            throw ConfigError("fuzz.magnitude_decades: must lie in [0, 100]");
        if (c.fuzz.chunks == 0) throw ConfigError("fuzz.chunks: must be positive");
        if (c.fuzz.oracle_samples > 0)
            detail::require_dimensions(c.fuzz.oracle_dimensions, "fuzz.oracle_dimensions", 3, 10);
        if (c.fuzz.weyl_samples > 0)
            detail::require_dimensions(c.fuzz.weyl_dimensions, "fuzz.weyl_dimensions", 4,
                                       static_cast<int>(RiemannTensor::max_dimension));
        if (c.fuzz.samples == 0) c.warnings.push_back("identity fuzz ran with zero samples; the pass is vacuous");
    } else if (c.suite == "ode-run") {
        detail::require_dimensions(c.dimensions, "dimensions", 4, 16);
        detail::require_dimensions(c.ode.orthant_dimensions, "ode.orthant_dimensions", 4, 16);
        for (int m : c.m_values)
            if (m < 0) throw ConfigError("m: values must be >= 0");
        if (!(c.ode.c0 > 0.0) || !std::isfinite(c.ode.c0)) throw ConfigError("ode.c0: must be positive");
        if (!(c.ode.hi_t_end > 0.0) || !(c.ode.hi_sample_dt > 0.0))
            throw ConfigError("ode.hi_t_end and ode.hi_sample_dt: must be positive");
    } else if (c.suite == "soliton-verify") {
        detail::require_dimensions(c.dimensions, "dimensions", 3, 64);
        if (c.soliton.kinds.empty()) throw ConfigError("soliton.kinds: list must not be empty");
        for (const auto& k : c.soliton.kinds) {
            try {
                parse_soliton_kind(k);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("soliton.kinds: ") + e.what());
            }
        }
        if (!(c.soliton.spread > 0.0)) throw ConfigError("soliton.spread: must be positive");
        if (c.soliton.pairs == 0) c.warnings.push_back("soliton check ran with zero point pairs; the pass is vacuous");
    }
}

inline nlohmann::json load_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    try {
        return nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

/// The config as it was actually used; jobs and the output path are left out
/// so summaries depend only on what determines the numbers.
inline nlohmann::json echo(const RunConfig& c) {
    nlohmann::json j;
    j["suite"] = c.suite;
    j["seed"] = c.seed;
    j["dimensions"] = c.dimensions;
    j["m"] = c.m_values;
    j["tolerances"] = c.tolerances;
    j["self_test"] = c.self_test;
    if (c.suite == "lemma-scan" || c.suite == "ode-run") {
        const auto& s = c.scan;
        j["scan"] = {{"box_half_width", s.box_half_width}, {"grid_resolution", s.grid_resolution},
                     {"random_samples", s.random_samples}, {"max_draws_per_sample", s.max_draws_per_sample},
                     {"refine_iterations", s.refine_iterations}, {"refine_starts", s.refine_starts},
                     {"dump_rows", s.dump_rows}, {"chunks", s.chunks}};
    }
    if (c.suite == "lemma-scan") {
        j["lemma"] = {{"averaging_trials", c.lemma.averaging_trials}, {"claim_samples", c.lemma.claim_samples},
                      {"zero_rho_samples", c.lemma.zero_rho_samples}};
    } else if (c.suite == "identity-fuzz") {
        const auto& f = c.fuzz;
        j["fuzz"] = {{"samples", f.samples}, {"max_n", f.max_n}, {"max_m0", f.max_m0},
                     {"magnitude_decades", f.magnitude_decades}, {"oracle_samples", f.oracle_samples},
                     {"oracle_dimensions", f.oracle_dimensions}, {"weyl_samples", f.weyl_samples},
                     {"weyl_dimensions", f.weyl_dimensions}, {"chunks", f.chunks}};
    } else if (c.suite == "ode-run") {
        const auto& i = c.integrator;
        j["integrator"] = {{"method", i.method == IntegratorOptions::Method::rk4 ? "rk4" : "adaptive"},
                           {"dt", i.dt}, {"tolerance", i.tolerance}, {"constrained", i.constrained},
                           {"t_end", i.t_end}, {"blowup_threshold", i.blowup_threshold},
                           {"sample_dt", i.sample_dt}};
        const auto& o = c.ode;
        j["ode"] = {{"c0", o.c0}, {"orthant_runs", o.orthant_runs}, {"orthant_dimensions", o.orthant_dimensions},
                    {"hi_runs", o.hi_runs}, {"hi_t_end", o.hi_t_end}, {"hi_sample_dt", o.hi_sample_dt},
                    {"comparison_samples", o.comparison_samples}, {"coherence_runs", o.coherence_runs},
                    {"csv_runs", o.csv_runs}};
    } else if (c.suite == "soliton-verify") {
        const auto& s = c.soliton;
        j["soliton"] = {{"kinds", s.kinds}, {"pairs", s.pairs}, {"spread", s.spread},
                        {"geodesic_samples", s.geodesic_samples}};
    }
    return j;
}

}  // namespace confsol::report
