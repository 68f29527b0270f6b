#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "confsol/random.hpp"
#include "confsol/report/io.hpp"
#include "confsol/report/run_report.hpp"
#include "confsol/soliton.hpp"

namespace confsol::report {

namespace detail {

// h(tau) = f(gamma(tau)) is exactly quadratic on all three models:
// h(tau) = f(p) + h'(0) tau + h'' tau^2 / 2 with h'' from geodesic_hessian.
inline double geodesic_potential_residual(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x,
                                          std::size_t samples) {
    const double d = distance(m, p, x);
    if (d == 0.0) return 0.0;
    double slope = 0.0;
    if (m.kind == SolitonKind::gaussian) {
        for (std::size_t i = 0; i < m.n; ++i) slope += p.ambient[i] * (x.ambient[i] - p.ambient[i]) / d;
        slope *= 2.0 * m.quadratic;
    } else if (m.kind == SolitonKind::cylinder) {
        slope = 2.0 * m.quadratic * p.axial * (x.axial - p.axial) / d;
    }
    const double curvature = geodesic_hessian(m, p, x);
    const double f0 = potential(m, p);
    double worst = 0.0;
    const std::size_t count = std::max<std::size_t>(samples, 2);
    for (std::size_t s = 0; s < count; ++s) {
        const double tau = d * static_cast<double>(s) / static_cast<double>(count - 1);
        const double model = f0 + slope * tau + 0.5 * curvature * tau * tau;
        const double actual = potential(m, geodesic_point(m, p, x, tau));
        worst = std::max(worst, std::abs(actual - model) / std::max(1.0, std::abs(actual)));
    }
    return worst;
}

struct SolitonStats {
    std::string kind;
    int n = 0;
    std::size_t pairs = 0;
    double tensor_residual = 0.0;
    double scalar_residual = 0.0;
    double geodesic_residual = 0.0;
    double min_scalar_gap = std::numeric_limits<double>::infinity();  // f - R
    double min_hess_margin = std::numeric_limits<double>::infinity();
    double min_geodesic_margin = std::numeric_limits<double>::infinity();
    GrowthSummary growth;
};

inline SolitonStats verify_model(const RunConfig& c, SolitonKind kind, std::size_t kind_index, int n_int,
                                 CsvBuilder& csv) {
    const auto n = static_cast<std::size_t>(n_int);
    const auto model = make_model(kind, n);
    Rng rng(c.seed, stream_key(30, kind_index, n));
    SolitonStats st;
    st.kind = to_string(kind);
    st.n = n_int;
    const double R = scalar_curvature(model);
    std::vector<std::pair<ModelPoint, ModelPoint>> pairs;
    for (std::size_t k = 0; k < c.soliton.pairs; ++k) {
        auto p = sample_point(model, rng, c.soliton.spread);
        auto x = sample_point(model, rng, c.soliton.spread);
        for (const auto* q : {&p, &x}) {
            const auto res = soliton_residual(model, *q);
            st.tensor_residual = std::max(st.tensor_residual, res.tensor_residual);
            st.scalar_residual = std::max(st.scalar_residual, res.scalar_residual);
            st.min_scalar_gap = std::min(st.min_scalar_gap, potential(model, *q) - R);
        }
        const auto hb = hess_bound_check(model, p, x, c.soliton.geodesic_samples);
        st.min_hess_margin = std::min(st.min_hess_margin, hb.margin);
        st.min_geodesic_margin = std::min(st.min_geodesic_margin, hb.geodesic_margin);
        const double geo = geodesic_potential_residual(model, p, x, c.soliton.geodesic_samples);
        st.geodesic_residual = std::max(st.geodesic_residual, geo);
        csv.row(st.kind, n_int, k, distance(model, p, x), potential(model, p), potential(model, x),
                hb.margin, hb.geodesic_margin, geo);
        pairs.emplace_back(std::move(p), std::move(x));
    }
    st.pairs = pairs.size();
    st.growth = growth_bound_check(model, pairs);
    return st;
}

}  // namespace detail

inline RunReport cmd_soliton_verify(const RunConfig& c) {
    RunReport rep = start_report(c);
    CsvBuilder csv;
    csv.raw_row("kind,n,pair,distance,f_p,f_x,hess_margin,geodesic_margin,geodesic_residual");
    auto& models = rep.summary["models"] = nlohmann::json::array();
    const double res_tol = c.tolerance("residual"), margin_tol = c.tolerance("margin");
    for (const auto& name : c.soliton.kinds) {
        const auto kind = parse_soliton_kind(name);
        for (int n_int : c.dimensions) {
            // the stream depends on the kind itself, not its position in the list
            const auto st = detail::verify_model(c, kind, static_cast<std::size_t>(kind), n_int, csv);
            const std::string tag = "[" + st.kind + "," + label("n", n_int) + "]";
            rep.check_le("soliton_equation" + tag, st.tensor_residual, res_tol, "Ric + Hess f - g/2");
            rep.check_le("normalization" + tag, st.scalar_residual, res_tol, "R + |grad f|^2 - f");
            rep.check_le("geodesic_potential" + tag, st.geodesic_residual, res_tol,
                         "f along geodesics against its closed-form quadratic");
            if (st.pairs == 0) continue;
            rep.check_ge("scalar_below_potential" + tag, st.min_scalar_gap, -margin_tol, "f - R");
            rep.check_ge("hessian_bound" + tag, std::min(st.min_hess_margin, st.min_geodesic_margin), -margin_tol,
                         "1/2 - Hess f");
            rep.check_ge("potential_growth" + tag, st.growth.min_f_margin, -margin_tol);
            rep.check_ge("curvature_growth" + tag, st.growth.a_found ? st.growth.min_curv_margin : -1.0,
                         -margin_tol, "exp(a (d^2 + 1)) - max |Rm| for a from the menu");
            models.push_back({{"kind", st.kind},
                              {"n", st.n},
                              {"pairs", st.pairs},
                              {"max_tensor_residual", st.tensor_residual},
                              {"max_scalar_residual", st.scalar_residual},
                              {"max_geodesic_residual", st.geodesic_residual},
                              {"min_f_minus_R", st.min_scalar_gap},
                              {"min_hess_margin", st.min_hess_margin},
                              {"min_geodesic_margin", st.min_geodesic_margin},
                              {"growth", {{"a_used", st.growth.a_used},
                                          {"a_found", st.growth.a_found},
                                          {"min_f_margin", st.growth.min_f_margin},
                                          {"min_curv_margin", st.growth.min_curv_margin},
                                          {"min_scalar_margin", st.growth.min_scalar_margin}}}});
        }
    }
    rep.artifacts.push_back({"soliton_pairs.csv", csv.str()});
    return rep;
}

}  // namespace confsol::report
