// One line per acceptance criterion; exit status 0 only if all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confsol/report/cli.hpp"

using namespace confsol::report;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> body;
};

unsigned g_jobs = 1;
std::uint64_t g_seed = 20240611;

RunConfig make(const std::string& suite, const std::function<void(RunConfig&)>& edit = {}) {
    RunConfig c = default_config(suite);
    c.seed = g_seed;
    c.jobs = g_jobs;
    if (edit) edit(c);
    validate(c);
    return c;
}

// Checks whose name starts with one of the prefixes; all must pass and at least one must exist.
Outcome select(const RunReport& rep, std::initializer_list<const char*> prefixes) {
    std::size_t seen = 0, failed = 0;
    std::string first_failure;
    for (const auto& c : rep.checks)
        for (const char* p : prefixes)
            if (c.name.rfind(p, 0) == 0) {
                ++seen;
                if (!c.passed) {
                    ++failed;
                    if (first_failure.empty())
                        first_failure = c.name + " = " + std::to_string(c.value) + " " + c.relation + " " +
                                        std::to_string(c.limit);
                }
            }
    Outcome o;
    o.passed = seen > 0 && failed == 0;
    o.detail = std::to_string(seen - failed) + "/" + std::to_string(seen) + " checks";
    if (!first_failure.empty()) o.detail += "; first failure " + first_failure;
    return o;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

RunConfig ode_only(const std::function<void(OdeOptions&)>& enable) {
    return make("ode-run", [&](RunConfig& c) {
        c.ode.orthant_runs = 0;
        c.ode.hi_runs = 0;
        c.ode.comparison_samples = 0;
        c.ode.coherence_runs = 0;
        enable(c.ode);
    });
}

RunConfig fuzz_only(const std::function<void(FuzzOptions&)>& enable) {
    return make("identity-fuzz", [&](RunConfig& c) {
        c.fuzz.samples = 0;
        c.fuzz.oracle_samples = 0;
        c.fuzz.weyl_samples = 0;
        enable(c.fuzz);
        c.warnings.clear();
    });
}

std::vector<Criterion> criteria() {
    return {
        {1, "Lie-algebra square: structure constants match the closed form", 10.0,
         [] {
             auto rep = cmd_identity_fuzz(fuzz_only([](FuzzOptions& f) {
                 f.oracle_samples = 50;
                 f.oracle_dimensions = {4, 5, 6, 7};
             }));
             auto o = select(rep, {"oracle_"});
             double diag = 0.0, off = 0.0;
             for (const auto& e : rep.summary["oracle"]) {
                 diag = std::max(diag, e["max_diagonal_deviation"].get<double>());
                 off = std::max(off, e["max_off_diagonal"].get<double>());
             }
             o.detail += fmt(", max diagonal deviation %.3g", diag) + fmt(", max off-diagonal %.3g", off);
             return o;
         }},
        {2, "Weyl reconstruction: vanishing Weyl part and exact symmetries", 10.0,
         [] {
             auto rep = cmd_identity_fuzz(fuzz_only([](FuzzOptions& f) {
                 f.weyl_samples = 100;
                 f.weyl_dimensions = {4, 5, 6};
             }));
             auto o = select(rep, {"weyl_norm", "curvature_symmetries", "three_index_components"});
             double w = 0.0;
             for (const auto& e : rep.summary["weyl"]) w = std::max(w, e["max_weyl_norm"].get<double>());
             o.detail += fmt(", max |W| %.3g", w);
             return o;
         }},
        {3, "Complete-square identity on 1e6 samples", 60.0,
         [] {
             auto rep = cmd_identity_fuzz(fuzz_only([](FuzzOptions& f) {
                 f.samples = 1000000;
                 f.max_n = 8;
                 f.max_m0 = 6;
             }));
             auto o = select(rep, {"identity"});
             o.passed = o.passed && rep.summary["identity"]["samples"] == 1000000;
             o.detail += fmt(", max relative error %.3g", rep.summary["identity"]["max_relative_error"].get<double>());
             return o;
         }},
        {4, "Pinching function nonnegative for m = 1, 2 (n = 4..8)", 300.0,
         [] {
             auto rep = cmd_lemma_scan(make("lemma-scan", [](RunConfig& c) {
                 c.m_values = {1, 2};
                 c.dimensions = {4, 5, 6, 7, 8};
                 c.scan.random_samples = 100000;
                 c.lemma.averaging_trials = 0;
                 c.lemma.claim_samples = 0;
                 c.lemma.zero_rho_samples = 0;
             }));
             auto o = select(rep, {"c_est", "feasible_samples", "bounded"});
             o.detail += fmt(", max C_est %.3g", rep.summary["max_c_est_case_one"].get<double>());
             return o;
         }},
        {5, "Pinching function for m = 3..8 (n = 4..6): bounded, averaging, proof claims", 600.0,
         [] {
             auto rep = cmd_lemma_scan(make("lemma-scan", [](RunConfig& c) {
                 c.m_values = {3, 4, 5, 6, 7, 8};
                 c.dimensions = {4, 5, 6};
                 c.lemma.averaging_trials = 100000;
                 c.lemma.claim_samples = 10000;
             }));
             auto o = select(rep, {"bounded", "averaging", "proof_claim"});
             double c_est = 0.0;
             for (const auto& e : rep.summary["cases"]) c_est = std::max(c_est, e["c_est"].get<double>());
             o.detail += fmt(", max C_est %.3g", c_est);
             return o;
         }},
        {6, "Reaction ODE closed forms (sphere, cylinder, zero data)", 30.0,
         [] {
             auto rep = cmd_ode_run(ode_only([](OdeOptions&) {}));
             auto o = select(rep, {"sphere_", "cylinder_", "zero_fixed_point"});
             double rel = 0.0;
             for (const auto& e : rep.summary["closed_forms"]) rel = std::max(rel, e["relative_error"].get<double>());
             o.detail += fmt(", max blow-up time error %.3g", rel);
             return o;
         }},
        {7, "Nonnegative orthant is invariant (200 runs, n = 4, 5)", 60.0,
         [] {
             auto rep = cmd_ode_run(ode_only([](OdeOptions& o) {
                 o.orthant_runs = 200;
                 o.orthant_dimensions = {4, 5};
             }));
             auto o = select(rep, {"orthant"});
             double lo = 0.0;
             for (const auto& e : rep.summary["orthant"]) lo = std::min(lo, e["min_value"].get<double>());
             o.detail += fmt(", min pair value %.3g", lo);
             return o;
         }},
        {8, "Comparison bound solves u' = u^2 / (2(m+2)) and respects its floor", 5.0,
         [] {
             auto rep = cmd_ode_run(ode_only([](OdeOptions& o) { o.comparison_samples = 10000; }));
             auto o = select(rep, {"comparison"});
             o.detail += fmt(", max residual %.3g", rep.summary["comparison"]["max_relative_residual"].get<double>());
             return o;
         }},
        {9, "Hamilton-Ivey margin stays nonnegative in constrained mode", 120.0,
         [] {
             auto rep = cmd_ode_run(ode_only([](OdeOptions& o) {
                 o.hi_runs = 100;
                 o.hi_t_end = 5.0;
             }));
             auto o = select(rep, {"hi_margin"});
             double lo = std::numeric_limits<double>::infinity();
             std::size_t samples = 0;
             for (const auto& e : rep.summary["hamilton_ivey"]) {
                 lo = std::min(lo, e["min_margin"].get<double>());
                 samples += e["samples_with_margin"].get<std::size_t>();
             }
             o.passed = o.passed && samples > 0;
             o.detail += fmt(", min margin %.3g", lo) + ", " + std::to_string(samples) + " samples with nu < 0";
             return o;
         }},
        {10, "Normalized solitons: residuals, R <= f, Hess f <= g/2, growth bounds", 10.0,
         [] {
             auto rep = cmd_soliton_verify(make("soliton-verify"));
             auto o = select(rep, {""});
             o.passed = o.passed && rep.passed();
             return o;
         }},
        {11, "Determinism: byte-identical summaries on rerun", 300.0,
         [] {
             Outcome o{true, ""};
             for (const auto& suite : suite_names()) {
                 auto first = run_suite(make(suite)).to_json().dump(2);
                 auto second = run_suite(make(suite, [](RunConfig& c) { c.jobs = std::max(1u, g_jobs / 2); }))
                                   .to_json()
                                   .dump(2);
                 const bool same = first == second;
                 o.passed = o.passed && same;
                 o.detail += (o.detail.empty() ? "" : ", ") + suite + (same ? " identical" : " DIFFERS");
             }
             return o;
         }},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    app.add_option("--jobs", g_jobs, "worker threads");
    app.add_option("--seed", g_seed, "seed for all suites");
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& c : criteria()) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_seconds;
        const bool ok = o.passed && in_time;
        failed += ok ? 0 : 1;
        std::printf("[%s] criterion %2d: %s (%.2f s, budget %.0f s%s): %s\n", ok ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria().size()) - failed, criteria().size());
    return failed == 0 ? 0 : 1;
}
