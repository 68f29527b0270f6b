#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "confsol/parallel.hpp"
#include "confsol/pinching.hpp"
#include "confsol/random.hpp"
#include "confsol/reaction_ode.hpp"
#include "confsol/report/io.hpp"
#include "confsol/report/run_report.hpp"
#include "confsol/scan.hpp"

namespace confsol::report {

namespace detail {

inline std::string trajectory_csv(const Trajectory& traj, std::size_t n) {
    CsvBuilder csv;
    std::string header = "t";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) header += ",w_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    csv.raw_row(header + ",R,nu,conformal_residual,hi_margin");
    for (const auto& s : traj.samples) {
        std::string line = csv_number(s.t);
        for (double v : s.w.pairs()) line += "," + csv_number(v);
        const auto ps = pinch_scalars(s.w, {});
        const auto hi = hamilton_ivey_margin(ps, s.t, n);
        line += "," + csv_number(ps.scalar) + "," + csv_number(ps.nu) + "," + csv_number(s.conformal_residual) + "," +
                (hi ? csv_number(*hi) : std::string());
        csv.raw_row(line);
    }
    return csv.str();
}

inline double max_pair(const WedgeDiagonal& w) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : w.pairs()) m = std::max(m, v);
    return m;
}

// c(t) = c0 / (1 - k c0 t) on a pattern whose active pairs all evolve as c' = k c^2.
struct PatternRun {
    double expected_blowup = 0.0;
    std::optional<double> detected_blowup;
    double max_relative_error = 0.0;  // active pairs against the closed form, t <= 0.8 T
    double max_inactive = 0.0;        // |W| on pairs that should stay zero
    Trajectory traj;
};

inline PatternRun run_pattern(const IntegratorOptions& base, std::size_t n, double c0, bool cylinder) {
    // cylinder: index 0 is the axial direction, so pairs (0, j) are mixed and stay flat
    std::vector<double> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back(cylinder && i == 0 ? 0.0 : c0);
    const double k = cylinder ? static_cast<double>(n) - 2.0 : static_cast<double>(n) - 1.0;

    PatternRun out;
    out.expected_blowup = 1.0 / (k * c0);
    IntegratorOptions opts = base;
    opts.constrained = false;
    opts.t_end = 2.0 * out.expected_blowup;
    opts.sample_dt = out.expected_blowup / 100.0;
    out.traj = integrate(WedgeDiagonal::general(n, pairs), opts);
    out.detected_blowup = out.traj.blowup_time;
    for (const auto& s : out.traj.samples) {
        std::size_t idx = 0;
        const double exact = c0 / (1.0 - k * c0 * s.t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++idx) {
                const double v = s.w.pairs()[idx];
                if (cylinder && i == 0) {
                    out.max_inactive = std::max(out.max_inactive, std::abs(v));
                } else if (s.t <= 0.8 * out.expected_blowup) {
                    out.max_relative_error = std::max(out.max_relative_error, std::abs(v - exact) / std::abs(exact));
                }
            }
    }
    return out;
}

struct OrthantRun {
    double blowup_time = 0.0;
    bool blew_up = false;
    double min_value = std::numeric_limits<double>::infinity();
};

// Nonnegative data, about a quarter of the pairs on the boundary of the orthant.
inline OrthantRun run_orthant(const IntegratorOptions& base, std::size_t n, Rng& rng) {
    std::vector<double> pairs(pair_count(n));
    for (auto& v : pairs) v = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
    const auto w0 = WedgeDiagonal::general(n, pairs);

    IntegratorOptions probe = base;
    probe.constrained = false;
    probe.t_end = 1000.0;
    probe.sample_dt = 0.0;
    const auto first = integrate(w0, probe);

    OrthantRun out;
    out.blew_up = first.blew_up;
    out.blowup_time = first.blowup_time.value_or(probe.t_end);
    IntegratorOptions opts = probe;
    opts.t_end = 0.8 * out.blowup_time;
    opts.sample_dt = opts.t_end / 200.0;
    const auto traj = integrate(w0, opts);
    for (const auto& s : traj.samples)
        for (double v : s.w.pairs()) out.min_value = std::min(out.min_value, v);
    return out;
}

// Rank-structured data with nu(0) >= -1 and a nonnegative initial margin.
inline WedgeDiagonal hamilton_ivey_initial(Rng& rng, std::size_t n) {
    for (;;) {
        std::vector<double> mvec(n);
        for (auto& v : mvec) v = rng.uniform(-1.0, 1.0);
        std::sort(mvec.begin(), mvec.end());
        auto w = WedgeDiagonal::rank_structured(mvec);
        const double nu = w.min_pair();
        if (nu < -1.0) {
            for (auto& v : mvec) v /= -nu;
            w = WedgeDiagonal::rank_structured(mvec);
        }
        const auto margin = hamilton_ivey_margin(pinch_scalars(w, {}), 0.0, n);
        if (!margin || *margin >= 0.0) return w;
    }
}

struct HiRun {
    bool blew_up = false;
    double end_time = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t margin_samples = 0;
    double max_relative_projection = 0.0;
    Trajectory traj;
};

inline HiRun run_hamilton_ivey(const IntegratorOptions& base, const OdeOptions& o, std::size_t n, Rng& rng) {
    IntegratorOptions opts = base;
    opts.constrained = true;
    opts.t_end = o.hi_t_end;
    opts.sample_dt = o.hi_sample_dt;
    HiRun out;
    out.traj = integrate(hamilton_ivey_initial(rng, n), opts);
    out.blew_up = out.traj.blew_up;
    out.end_time = out.traj.samples.back().t;
    out.max_relative_projection = out.traj.max_relative_projection;
    for (const auto& s : out.traj.samples) {
        const auto margin = hamilton_ivey_margin(pinch_scalars(s.w, {}), s.t, n);
        if (!margin) continue;
        ++out.margin_samples;
        out.min_margin = std::min(out.min_margin, *margin);
    }
    return out;
}

struct ComparisonStats {
    std::size_t samples = 0;
    double max_residual = 0.0;
    double max_initial_error = 0.0;
    std::size_t floor_violations = 0;
    double min_floor_gap = std::numeric_limits<double>::infinity();  // bound + 2(m+2)/t, relative
};

inline ComparisonStats comparison_checks(const RunConfig& c) {
    ComparisonStats st;
    Rng rng(c.seed, stream_key(23, 0, 0));
    for (std::size_t s = 0; s < c.ode.comparison_samples; ++s) {
        const double u0 = -std::pow(10.0, rng.uniform(-2.0, 2.0));
        const int m = rng.uniform_int(0, 8);
        const double t = std::pow(10.0, rng.uniform(-2.0, 2.0));
        const double k = 2.0 * (m + 2.0);
        auto b = [&](double time) { return comparison_bound(u0, m, time); };
        // fourth-order central difference; the step follows the time scale
        // k / |b| of the solution, capped so the stencil stays in t > 0
        const double h = std::min(0.25 * t, 1e-3 * k / std::abs(b(t)));
        const double deriv = (-b(t + 2 * h) + 8 * b(t + h) - 8 * b(t - h) + b(t - 2 * h)) / (12 * h);
        const double rhs = b(t) * b(t) / k;
        st.max_residual = std::max(st.max_residual, std::abs(deriv - rhs) / std::abs(rhs));
        st.max_initial_error = std::max(st.max_initial_error, std::abs(b(0.0) - u0) / std::abs(u0));
        const double floor = -k / t;
        const double gap = (b(t) - floor) / std::abs(floor);
        st.min_floor_gap = std::min(st.min_floor_gap, gap);
        if (b(t) < floor) ++st.floor_violations;
        ++st.samples;
    }
    return st;
}

struct CoherenceStats {
    int m0 = 0;
    int n = 0;
    double c_est = 0.0;
    std::size_t states_checked = 0;
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();  // (increment/dt - rate) / max(1, u^2)
};

// One unconstrained RK4 step from rank-structured states satisfying the
// pinching constraints with m = m0 + 1 and rho = max(0, -(R + m0 nu)):
//   u(t + dt) - u(t) >= dt [u^2 / (2 (m0 + 2)) - C rho^2] - slack.
inline CoherenceStats coherence_checks(const RunConfig& c, int m0, std::size_t n, double c_est) {
    const double slack = c.tolerance("coherence_slack");
    const double dt = c.integrator.dt;
    CoherenceStats st;
    st.m0 = m0;
    st.n = static_cast<int>(n);
    st.c_est = c_est;
    const int m = m0 + 1;
    const double box = ScanConfig::default_box(m, n);
    IntegratorOptions opts = c.integrator;
    opts.constrained = true;
    opts.t_end = 1.0;
    opts.sample_dt = 0.01;
    Rng rng(c.seed, stream_key(24, m0, n));
    for (std::size_t run = 0; run < c.ode.coherence_runs; ++run) {
        auto inst = draw_feasible(rng, n, m, 1.0, box, false, 1000000);
        if (!inst) continue;
        double size = 0.0;
        for (double v : inst->x) size = std::max(size, std::abs(v));
        std::vector<double> mvec = inst->x;
        for (auto& v : mvec) v /= size;
        const auto traj = integrate(WedgeDiagonal::rank_structured(mvec), opts);
        for (const auto& s : traj.samples) {
            auto x = conformal_project(s.w).mvec;
            std::sort(x.begin(), x.end());
            const auto w = WedgeDiagonal::rank_structured(x);
            const double s_sum = pair_sum_S(x);
            const double m12 = x[0] + x[1];
            const double rho = std::max(0.0, -(s_sum + m * m12));
            if (!constraints(PinchingInstance{x, m, rho}).all()) continue;
            const double u = w.pair_sum() + (m0 + 1.0) * w.min_pair();
            if (!(u < 0.0)) continue;
            const auto next = WedgeDiagonal::general(n, confsol::detail::rk4_step(n, {w.pairs().begin(), w.pairs().end()}, dt));
            const double u_next = next.pair_sum() + (m0 + 1.0) * next.min_pair();
            const double rate = u * u / (2.0 * (m0 + 2.0)) - c_est * rho * rho;
            const double gap = ((u_next - u) / dt - rate) / std::max(1.0, u * u);
            ++st.states_checked;
            st.min_slack = std::min(st.min_slack, gap);
            if (gap < -slack) ++st.violations;
        }
    }
    return st;
}

}  // namespace detail

inline RunReport cmd_ode_run(const RunConfig& c) {
    RunReport rep = start_report(c);
    const auto& o = c.ode;

    // closed forms
    auto& closed = rep.summary["closed_forms"] = nlohmann::json::array();
    for (int n_int : c.dimensions) {
        const auto n = static_cast<std::size_t>(n_int);
        const std::string tag = "[" + label("n", n_int) + "]";
        for (bool cylinder : {false, true}) {
            const std::string kind = cylinder ? "cylinder" : "sphere";
            const auto run = detail::run_pattern(c.integrator, n, o.c0, cylinder);
            const double detected = run.detected_blowup.value_or(std::numeric_limits<double>::infinity());
            const double rel = std::abs(detected - run.expected_blowup) / run.expected_blowup;
            rep.check_le(kind + "_blowup_time" + tag, rel, c.tolerance("blowup_time"));
            rep.check_le(kind + "_closed_form" + tag, run.max_relative_error, c.tolerance("invariant_subspace"));
            if (cylinder) rep.check_le("cylinder_mixed_pairs" + tag, run.max_inactive, c.tolerance("mixed_pairs"));
            rep.artifacts.push_back({"ode_" + kind + "_n" + std::to_string(n) + ".csv", detail::trajectory_csv(run.traj, n)});
            closed.push_back({{"pattern", kind}, {"n", n}, {"c0", o.c0}, {"expected_blowup", run.expected_blowup},
                              {"detected_blowup", detail::finite_or_null(detected)}, {"relative_error", rel},
                              {"max_closed_form_error", run.max_relative_error},
                              {"max_mixed_pair", run.max_inactive},
                              {"accepted_steps", run.traj.accepted_steps},
                              {"rejected_steps", run.traj.rejected_steps}});
        }
        IntegratorOptions zero_opts = c.integrator;
        zero_opts.t_end = 1.0;
        zero_opts.sample_dt = 0.0;
        const auto zero = integrate(WedgeDiagonal::general(n, 0.0), zero_opts);
        double drift = zero.blew_up ? std::numeric_limits<double>::infinity() : 0.0;
        for (const auto& s : zero.samples) drift = std::max(drift, s.w.max_abs());
        rep.check_le("zero_fixed_point" + tag, drift, 0.0);
    }

    // orthant invariance
    auto& orthant = rep.summary["orthant"] = nlohmann::json::array();
    for (int n_int : o.orthant_dimensions) {
        const auto n = static_cast<std::size_t>(n_int);
        std::vector<detail::OrthantRun> runs(o.orthant_runs);
        parallel_for_chunks(runs.size(), c.jobs, [&](std::size_t k) {
            Rng rng(c.seed, stream_key(21, n, 0, k));
            runs[k] = detail::run_orthant(c.integrator, n, rng);
        });
        double min_value = std::numeric_limits<double>::infinity(), t_lo = min_value, t_hi = 0.0;
        std::size_t blown = 0;
        for (const auto& r : runs) {
            min_value = std::min(min_value, r.min_value);
            t_lo = std::min(t_lo, r.blowup_time);
            t_hi = std::max(t_hi, r.blowup_time);
            blown += r.blew_up ? 1 : 0;
        }
        rep.check_ge("orthant[" + label("n", n_int) + "]", runs.empty() ? 0.0 : min_value, -c.tolerance("orthant"));
        orthant.push_back({{"n", n}, {"runs", runs.size()}, {"blew_up", blown},
                           {"min_value", detail::finite_or_null(min_value)},
                           {"min_blowup_time", detail::finite_or_null(t_lo)}, {"max_blowup_time", t_hi}});
    }

    // Hamilton-Ivey margin along constrained trajectories
    auto& hi = rep.summary["hamilton_ivey"] = nlohmann::json::array();
    for (int n_int : c.dimensions) {
        const auto n = static_cast<std::size_t>(n_int);
        std::vector<detail::HiRun> runs(o.hi_runs);
        parallel_for_chunks(runs.size(), c.jobs, [&](std::size_t k) {
            Rng rng(c.seed, stream_key(22, n, 0, k));
            runs[k] = detail::run_hamilton_ivey(c.integrator, o, n, rng);
        });
        double min_margin = std::numeric_limits<double>::infinity(), projection = 0.0;
        std::size_t blown = 0, margin_samples = 0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const auto& r = runs[k];
            min_margin = std::min(min_margin, r.min_margin);
            projection = std::max(projection, r.max_relative_projection);
            blown += r.blew_up ? 1 : 0;
            margin_samples += r.margin_samples;
            if (k < o.csv_runs)
                rep.artifacts.push_back({"ode_hi_n" + std::to_string(n) + "_run" + std::to_string(k) + ".csv",
                                         detail::trajectory_csv(r.traj, n)});
        }
        rep.check_ge("hi_margin[" + label("n", n_int) + "]", min_margin, -c.tolerance("hi_margin"),
                     margin_samples == 0 ? "no sample had nu < 0" : "");
        hi.push_back({{"n", n}, {"runs", runs.size()}, {"blew_up", blown}, {"samples_with_margin", margin_samples},
                      {"min_margin", detail::finite_or_null(min_margin)},
                      {"max_relative_projection", projection}});
    }

    // comparison bound
    const auto cmp = detail::comparison_checks(c);
    rep.check_le("comparison_residual", cmp.max_residual, c.tolerance("comparison_residual"));
    rep.check_le("comparison_initial_value", cmp.max_initial_error, c.tolerance("comparison_residual"));
    rep.check_le("comparison_floor", static_cast<double>(cmp.floor_violations), 0.0, "bound >= -2(m+2)/t");
    rep.summary["comparison"] = {{"samples", cmp.samples}, {"max_relative_residual", cmp.max_residual},
                                 {"max_initial_error", cmp.max_initial_error},
                                 {"floor_violations", cmp.floor_violations},
                                 {"min_relative_floor_gap", detail::finite_or_null(cmp.min_floor_gap)}};

    // one-step coherence with the pinching lower envelope
    auto& coh = rep.summary["coherence"] = nlohmann::json::array();
    if (o.coherence_runs > 0) {
        for (int m0 : c.m_values)
            for (int n_int : c.dimensions) {
                const auto n = static_cast<std::size_t>(n_int);
                ScanConfig sc = c.scan;
                sc.seed = Rng(c.seed, stream_key(25, m0, n)).next();
                const auto scan = scan_min_f(m0 + 1, n, sc, c.jobs);
                const auto st = detail::coherence_checks(c, m0, n, scan.c_est);
                const std::string tag = "[" + label("m0", m0) + "," + label("n", n_int) + "]";
                rep.check_le("coherence" + tag, static_cast<double>(st.violations), 0.0,
                             st.states_checked == 0 ? "no state satisfied the constraints" : "");
                coh.push_back({{"m0", m0}, {"n", n}, {"c_est", st.c_est}, {"states_checked", st.states_checked},
                               {"violations", st.violations},
                               {"min_relative_slack", detail::finite_or_null(st.min_slack)}});
            }
    }
    return rep;
}

}  // namespace confsol::report
