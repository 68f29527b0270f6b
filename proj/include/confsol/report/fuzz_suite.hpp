#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "confsol/curvature_algebra.hpp"
#include "confsol/parallel.hpp"
#include "confsol/pinching.hpp"
#include "confsol/random.hpp"
#include "confsol/report/io.hpp"
#include "confsol/report/run_report.hpp"

namespace confsol::report {

namespace detail {

struct FuzzWorst {
    double error = 0.0;
    std::size_t count = 0;
    int n = 0;
    int m0 = 0;
    std::vector<double> mvec;
};

struct OracleStats {
    int n = 0;
    std::size_t samples = 0;
    double diagonal = 0.0;
    double off_diagonal = 0.0;
};

struct WeylStats {
    int n = 0;
    std::size_t samples = 0;
    double weyl_norm = 0.0;
    double symmetry = 0.0;  // relative to max(1, max |R|)
    std::size_t three_index_nonzero = 0;
};

inline FuzzWorst fuzz_identity(const RunConfig& c) {
    const auto& f = c.fuzz;
    std::vector<FuzzWorst> slots(f.chunks);
    parallel_for_chunks(f.chunks, c.jobs, [&](std::size_t chunk) {
        auto [begin, end] = chunk_range(f.samples, f.chunks, chunk);
        Rng rng(c.seed, stream_key(10, 0, 0, chunk));
        auto& w = slots[chunk];
        std::vector<double> mvec;
        for (std::size_t s = begin; s < end; ++s) {
            const int n = rng.uniform_int(4, f.max_n);
            const int m0 = rng.uniform_int(0, f.max_m0);
            const double scale = std::pow(10.0, rng.uniform(-f.magnitude_decades, f.magnitude_decades));
            mvec.resize(static_cast<std::size_t>(n));
            for (auto& v : mvec) v = scale * rng.uniform(-1.0, 1.0);
            std::sort(mvec.begin(), mvec.end());
            auto r = reaction_quadratic(mvec, m0);
            // self-test fault: complete the square with the wrong weight
            if (c.self_test) r.square_term = complete_square(mvec, m0 + 3.0);
            const double err = identity_error(r);
            ++w.count;
            if (err > w.error || w.mvec.empty()) w = {err, w.count, n, m0, mvec};
        }
    });
    FuzzWorst total;
    for (const auto& s : slots) {
        const std::size_t count = total.count + s.count;
        if (!s.mvec.empty() && (total.mvec.empty() || s.error > total.error)) total = s;
        total.count = count;
    }
    return total;
}

inline OracleStats oracle_check(const RunConfig& c, int n_int) {
    const auto n = static_cast<std::size_t>(n_int);
    StructureConstants sc(n);
    Rng rng(c.seed, stream_key(11, n, 0));
    OracleStats st{n_int, 0, 0.0, 0.0};
    std::vector<double> pairs(pair_count(n));
    for (std::size_t s = 0; s < c.fuzz.oracle_samples; ++s) {
        for (auto& v : pairs) v = rng.uniform(-1.0, 1.0);
        const auto w = WedgeDiagonal::general(n, pairs);
        const auto dense = lie_algebra_square_oracle(w, sc);
        const auto closed_w = lie_algebra_square_closed(w);
        const auto closed = closed_w.pairs();
        for (std::size_t a = 0; a < dense.size; ++a)
            for (std::size_t b = 0; b < dense.size; ++b) {
                if (a == b)
                    st.diagonal = std::max(st.diagonal, std::abs(dense(a, a) - closed[a]));
                else
                    st.off_diagonal = std::max(st.off_diagonal, std::abs(dense(a, b)));
            }
        ++st.samples;
    }
    return st;
}

inline WeylStats weyl_check(const RunConfig& c, int n_int) {
    const auto n = static_cast<std::size_t>(n_int);
    Rng rng(c.seed, stream_key(12, n, 0));
    WeylStats st{n_int, 0, 0.0, 0.0, 0};
    std::vector<double> lambdas(n);
    for (std::size_t s = 0; s < c.fuzz.weyl_samples; ++s) {
        for (auto& v : lambdas) v = rng.uniform(-3.0, 3.0);
        std::sort(lambdas.begin(), lambdas.end());
        RicciSpectrum spec(lambdas);
        const auto rm = riemann_from_spectrum(spec);
        st.weyl_norm = std::max(st.weyl_norm, weyl_tensor(rm, spec).max_norm);
        st.symmetry = std::max(st.symmetry, rm.symmetry_defect() / std::max(1.0, rm.max_abs()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l) {
                        if (std::set<std::size_t>{i, j, k, l}.size() < 3) continue;
                        if (rm(i, j, k, l) != 0.0) ++st.three_index_nonzero;
                    }
        ++st.samples;
    }
    return st;
}

}  // namespace detail

inline RunReport cmd_identity_fuzz(const RunConfig& c) {
    RunReport rep = start_report(c);

    const auto worst = detail::fuzz_identity(c);
    rep.check_le("identity", worst.error, c.tolerance("identity"),
                 c.fuzz.samples == 0 ? "no samples drawn" : "max relative error of the complete-square identity");
    rep.summary["identity"] = {{"samples", worst.count},
                               {"max_relative_error", worst.error},
                               {"worst_n", worst.n},
                               {"worst_m0", worst.m0},
                               {"worst_mvec", worst.mvec}};

    std::vector<detail::OracleStats> oracle(c.fuzz.oracle_samples > 0 ? c.fuzz.oracle_dimensions.size() : 0);
    parallel_for_chunks(oracle.size(), c.jobs,
                        [&](std::size_t k) { oracle[k] = detail::oracle_check(c, c.fuzz.oracle_dimensions[k]); });
    auto& oj = rep.summary["oracle"] = nlohmann::json::array();
    for (const auto& o : oracle) {
        const std::string tag = "[" + label("n", o.n) + "]";
        rep.check_le("oracle_diagonal" + tag, o.diagonal, c.tolerance("oracle"));
        rep.check_le("oracle_off_diagonal" + tag, o.off_diagonal, c.tolerance("oracle"));
        oj.push_back({{"n", o.n}, {"samples", o.samples}, {"max_diagonal_deviation", o.diagonal},
                      {"max_off_diagonal", o.off_diagonal}});
    }

    std::vector<detail::WeylStats> weyl(c.fuzz.weyl_samples > 0 ? c.fuzz.weyl_dimensions.size() : 0);
    parallel_for_chunks(weyl.size(), c.jobs,
                        [&](std::size_t k) { weyl[k] = detail::weyl_check(c, c.fuzz.weyl_dimensions[k]); });
    auto& wj = rep.summary["weyl"] = nlohmann::json::array();
    for (const auto& w : weyl) {
        const std::string tag = "[" + label("n", w.n) + "]";
        rep.check_le("weyl_norm" + tag, w.weyl_norm, c.tolerance("weyl"));
        rep.check_le("curvature_symmetries" + tag, w.symmetry, c.tolerance("weyl"));
        rep.check_le("three_index_components" + tag, static_cast<double>(w.three_index_nonzero), 0.0,
                     "components with three distinct indices must be exactly zero");
        wj.push_back({{"n", w.n}, {"samples", w.samples}, {"max_weyl_norm", w.weyl_norm},
                      {"max_relative_symmetry_defect", w.symmetry},
                      {"three_index_nonzero", w.three_index_nonzero}});
    }
    return rep;
}

}  // namespace confsol::report
