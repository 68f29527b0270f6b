#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "confsol/parallel.hpp"
#include "confsol/pinching.hpp"
#include "confsol/random.hpp"
#include "confsol/report/io.hpp"
#include "confsol/report/run_report.hpp"
#include "confsol/scan.hpp"

namespace confsol::report {

namespace detail {

struct AveragingStats {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t feasibility_lost = 0;
    double max_relative_increase = -std::numeric_limits<double>::infinity();
};

struct ClaimStats {
    std::size_t checked = 0;
    std::size_t undrawn = 0;
    std::array<std::size_t, 6> failures{};
};

struct ZeroRhoStats {
    std::size_t checked = 0;
    std::size_t undrawn = 0;
    std::size_t violations = 0;
    double min_relative_f = std::numeric_limits<double>::infinity();
};

constexpr std::size_t lemma_chunks = 64;
constexpr std::size_t lemma_max_draws = 100000;

inline std::pair<std::size_t, std::size_t> distinct_tail_indices(Rng& rng, std::size_t n) {
    const int tail = static_cast<int>(n) - 2;
    const auto i = static_cast<std::size_t>(2 + rng.uniform_int(0, tail - 1));
    auto j = static_cast<std::size_t>(2 + rng.uniform_int(0, tail - 2));
    if (j >= i) ++j;
    return {i, j};
}

// Averaging trials alternate between feasible instances and unconstrained
// random vectors; f must not increase on either.
inline AveragingStats averaging_trials(const RunConfig& c, int m, std::size_t n, double box) {
    const double tol = c.tolerance("averaging");
    std::vector<AveragingStats> slots(lemma_chunks);
    parallel_for_chunks(lemma_chunks, c.jobs, [&](std::size_t chunk) {
        auto [begin, end] = chunk_range(c.lemma.averaging_trials, lemma_chunks, chunk);
        Rng rng(c.seed, stream_key(2, m, n, chunk));
        auto& s = slots[chunk];
        for (std::size_t t = begin; t < end; ++t) {
            std::optional<PinchingInstance> inst;
            if (t % 2 == 0) inst = draw_feasible(rng, n, m, 1.0, box, false, lemma_max_draws);
            if (!inst) {
                inst = PinchingInstance{std::vector<double>(n), m, 1.0};
                for (auto& v : inst->x) v = rng.uniform(-box, box);
            }
            const bool was_feasible = constraints(*inst).all();
            const auto [i, j] = distinct_tail_indices(rng, n);
            const auto out = averaging_step(*inst, i, j);
            const double scale = confsol::detail::quadratic_scale(inst->x);
            const double increase = (evaluate_f(out) - evaluate_f(*inst)) / scale;
            ++s.trials;
            s.max_relative_increase = std::max(s.max_relative_increase, increase);
            if (increase > tol) ++s.violations;
            if (was_feasible && !constraints(out).all()) ++s.feasibility_lost;
        }
    });
    AveragingStats total;
    for (const auto& s : slots) {
        total.trials += s.trials;
        total.violations += s.violations;
        total.feasibility_lost += s.feasibility_lost;
        total.max_relative_increase = std::max(total.max_relative_increase, s.max_relative_increase);
    }
    return total;
}

inline ClaimStats claim_checks(const RunConfig& c, int m, std::size_t n, double box) {
    std::vector<ClaimStats> slots(lemma_chunks);
    parallel_for_chunks(lemma_chunks, c.jobs, [&](std::size_t chunk) {
        auto [begin, end] = chunk_range(c.lemma.claim_samples, lemma_chunks, chunk);
        Rng rng(c.seed, stream_key(3, m, n, chunk));
        auto& s = slots[chunk];
        for (std::size_t t = begin; t < end; ++t) {
            auto inst = draw_feasible(rng, n, m, 1.0, box, true, lemma_max_draws);
            if (!inst) {
                ++s.undrawn;
                continue;
            }
            ++s.checked;
            const auto claims = proof_claims(*inst);
            for (std::size_t k = 0; k < claims.size(); ++k)
                if (!claims[k]) ++s.failures[k];
        }
    });
    ClaimStats total;
    for (const auto& s : slots) {
        total.checked += s.checked;
        total.undrawn += s.undrawn;
        for (std::size_t k = 0; k < 6; ++k) total.failures[k] += s.failures[k];
    }
    return total;
}

// At rho = 0 the constant term drops out, so f >= 0 on the feasible set.
inline ZeroRhoStats zero_rho_checks(const RunConfig& c, int m, std::size_t n, double box) {
    const double tol = c.tolerance("zero_rho");
    std::vector<ZeroRhoStats> slots(lemma_chunks);
    parallel_for_chunks(lemma_chunks, c.jobs, [&](std::size_t chunk) {
        auto [begin, end] = chunk_range(c.lemma.zero_rho_samples, lemma_chunks, chunk);
        Rng rng(c.seed, stream_key(4, m, n, chunk));
        auto& s = slots[chunk];
        for (std::size_t t = begin; t < end; ++t) {
            auto inst = draw_feasible(rng, n, m, 0.0, box, false, lemma_max_draws);
            if (!inst) {
                ++s.undrawn;
                continue;
            }
            ++s.checked;
            const double rel = evaluate_f(*inst) / confsol::detail::quadratic_scale(inst->x);
            s.min_relative_f = std::min(s.min_relative_f, rel);
            if (rel < -tol) ++s.violations;
        }
    });
    ZeroRhoStats total;
    for (const auto& s : slots) {
        total.checked += s.checked;
        total.undrawn += s.undrawn;
        total.violations += s.violations;
        total.min_relative_f = std::min(total.min_relative_f, s.min_relative_f);
    }
    return total;
}

inline std::string scan_csv(const ScanResult& r) {
    CsvBuilder csv;
    std::string header;
    for (std::size_t i = 1; i <= r.n; ++i) header += "x" + std::to_string(i) + ",";
    csv.raw_row(header + "m,n,f,ordered,lower_slab,upper_slab,feasible");
    for (const auto& row : r.dump) {
        std::string line;
        for (double v : row.x) line += csv_number(v) + ",";
        line += std::to_string(r.m) + "," + std::to_string(r.n) + "," + csv_number(row.f) + ",";
        line += std::string(row.flags.ordered ? "1" : "0") + "," + (row.flags.lower_slab ? "1" : "0") + "," +
                (row.flags.upper_slab ? "1" : "0") + "," + (row.flags.all() ? "1" : "0");
        csv.raw_row(line);
    }
    return csv.str();
}

}  // namespace detail

inline RunReport cmd_lemma_scan(const RunConfig& c) {
    RunReport rep = start_report(c);
    auto& cases = rep.summary["cases"] = nlohmann::json::array();
    double worst_case_one = 0.0;

    for (int m : c.m_values)
        for (int n_int : c.dimensions) {
            const auto n = static_cast<std::size_t>(n_int);
            const std::string tag = "[" + label("m", m) + "," + label("n", n_int) + "]";
            ScanConfig sc = c.scan;
            sc.seed = Rng(c.seed, stream_key(1, m, n)).next();
            const auto r = scan_min_f(m, n, sc, c.jobs);
            rep.artifacts.push_back({"lemma_scan_m" + std::to_string(m) + "_n" + std::to_string(n) + ".csv",
                                     detail::scan_csv(r)});

            if (!r.feasible_found) {
                rep.warnings.push_back("empty feasible set in the search box for " + tag);
            } else {
                if (m <= 2) {
                    rep.check_le("c_est" + tag, r.c_est, c.tolerance("c_est"), "f >= 0 on the feasible set");
                    worst_case_one = std::max(worst_case_one, r.c_est);
                }
                rep.check_ge("bounded" + tag, r.bounded ? 1.0 : 0.0, 1.0, "finite minimum inside twice the box");
                rep.check_ge("feasible_samples" + tag, static_cast<double>(r.random_feasible),
                             static_cast<double>(sc.random_samples));
            }

            const double box = sc.box_for(m, n);
            const auto avg = detail::averaging_trials(c, m, n, box);
            rep.check_le("averaging" + tag, static_cast<double>(avg.violations), 0.0,
                         "trials where averaging raised f beyond tolerance * scale");
            rep.check_le("averaging_feasibility" + tag, static_cast<double>(avg.feasibility_lost), 0.0);

            const auto claims = detail::claim_checks(c, m, n, box);
            std::size_t claim_failures = 0;
            for (auto f : claims.failures) claim_failures += f;
            rep.check_le("proof_claims" + tag, static_cast<double>(claim_failures), 0.0);
            rep.check_ge("proof_claim_samples" + tag, static_cast<double>(claims.checked),
                         static_cast<double>(c.lemma.claim_samples));

            const auto zero = detail::zero_rho_checks(c, m, n, box);
            rep.check_le("zero_rho" + tag, static_cast<double>(zero.violations), 0.0,
                         "feasible rho = 0 instances with f < 0");

            nlohmann::json refine_final;
            if (!r.refine_history.empty()) refine_final = detail::finite_or_null(r.refine_history.back());
            cases.push_back({
                {"m", m},
                {"n", n},
                {"box_half_width", r.box_half_width},
                {"feasible_found", r.feasible_found},
                {"min_f", detail::finite_or_null(r.min_f)},
                {"c_est", r.c_est},
                {"argmin", r.argmin.x},
                {"provenance", to_string(r.provenance)},
                {"bounded", r.bounded},
                {"grid", {{"points", r.grid_points}, {"feasible", r.grid_feasible},
                          {"min_f", detail::finite_or_null(r.grid_min)}}},
                {"random", {{"draws", r.random_draws}, {"feasible", r.random_feasible},
                            {"min_f", detail::finite_or_null(r.random_min)}}},
                {"refine_final_f", refine_final},
                {"averaging", {{"trials", avg.trials}, {"violations", avg.violations},
                               {"feasibility_lost", avg.feasibility_lost},
                               {"max_relative_increase", detail::finite_or_null(avg.max_relative_increase)}}},
                {"proof_claims", {{"checked", claims.checked}, {"undrawn", claims.undrawn},
                                  {"failures_by_claim", claims.failures}}},
                {"zero_rho", {{"checked", zero.checked}, {"undrawn", zero.undrawn}, {"violations", zero.violations},
                              {"min_relative_f", detail::finite_or_null(zero.min_relative_f)}}},
            });
        }
    rep.summary["max_c_est_case_one"] = worst_case_one;
    return rep;
}

}  // namespace confsol::report
