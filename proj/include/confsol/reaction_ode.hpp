#pragma once

// Pointwise reaction ODE dW/dt = W^2 + W# for curvature operators that are
// diagonal in a fixed wedge basis, plus the pinching scalars tracked along it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "confsol/curvature_algebra.hpp"
#include "confsol/pair_index.hpp"
#include "confsol/wedge.hpp"

namespace confsol {

/// (dW/dt)_ij = W_ij^2 + (W#)_ij.
inline WedgeDiagonal reaction_rhs(const WedgeDiagonal& w) {
    auto sharp = lie_algebra_square_closed(w);
    std::vector<double> out(sharp.pairs().begin(), sharp.pairs().end());
    const auto pairs = w.pairs();
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += pairs[p] * pairs[p];
    return WedgeDiagonal::general(w.n(), std::move(out));
}

struct ConformalProjection {
    std::vector<double> mvec;
    double residual = 0.0;  // sqrt of the minimized sum of squares
};

/// Least-squares fit of W_ij by M_i + M_j. The normal equations
/// (n-2) M_i + sum_k M_k = sum_{j != i} W_ij solve in closed form.
inline ConformalProjection conformal_project(const WedgeDiagonal& w) {
    const std::size_t n = w.n();
    if (n < 3) throw std::invalid_argument("conformal_project: n must be at least 3");
    const double nd = static_cast<double>(n);
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row[i] += w(i, j);
    const double total = w.pair_sum() / (nd - 1.0);

    ConformalProjection out;
    out.mvec.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.mvec[i] = (row[i] - total) / (nd - 2.0);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = w(i, j) - out.mvec[i] - out.mvec[j];
            ss += d * d;
        }
    out.residual = std::sqrt(ss);
    return out;
}

struct IntegratorOptions {
    enum class Method { rk4, adaptive };

    Method method = Method::adaptive;
    double dt = 1e-4;           // fixed step, and initial step for adaptive runs
    double tolerance = 1e-10;   // relative local error target (adaptive)
    bool constrained = false;   // project onto W_ij = M_i + M_j after each step
    double t_end = 1.0;
    double blowup_threshold = 1e8;
    double sample_dt = 0.0;     // 0 samples t_end / 100

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("IntegratorOptions: dt must be positive");
        if (!(tolerance > 0.0)) throw std::invalid_argument("IntegratorOptions: tolerance must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("IntegratorOptions: t_end must be positive");
        if (!(blowup_threshold > 0.0)) throw std::invalid_argument("IntegratorOptions: blow-up threshold must be positive");
        if (sample_dt < 0.0) throw std::invalid_argument("IntegratorOptions: sample_dt must be nonnegative");
    }

    double sample_interval() const { return sample_dt > 0.0 ? sample_dt : t_end / 100.0; }
};

struct OdeState {
    double t = 0.0;
    WedgeDiagonal w;
    double conformal_residual = 0.0;
};

struct Trajectory {
    std::vector<OdeState> samples;
    bool blew_up = false;
    std::optional<double> blowup_time;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    /// Constrained mode: largest per-step projection residual divided by max|W|.
    double max_relative_projection = 0.0;
};

namespace detail {

inline std::vector<double> rhs_values(std::size_t n, const std::vector<double>& y) {
    auto r = reaction_rhs(WedgeDiagonal::general(n, y));
    return {r.pairs().begin(), r.pairs().end()};
}

inline std::vector<double> rk4_step(std::size_t n, const std::vector<double>& y, double h) {
    const std::size_t dim = y.size();
    std::vector<double> tmp(dim);
    auto k1 = rhs_values(n, y);
    for (std::size_t p = 0; p < dim; ++p) tmp[p] = y[p] + 0.5 * h * k1[p];
    auto k2 = rhs_values(n, tmp);
    for (std::size_t p = 0; p < dim; ++p) tmp[p] = y[p] + 0.5 * h * k2[p];
    auto k3 = rhs_values(n, tmp);
    for (std::size_t p = 0; p < dim; ++p) tmp[p] = y[p] + h * k3[p];
    auto k4 = rhs_values(n, tmp);
    std::vector<double> out(dim);
    for (std::size_t p = 0; p < dim; ++p) out[p] = y[p] + h / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
    return out;
}

inline double max_abs(const std::vector<double>& y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const std::vector<double>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates from t = 0 and samples every options.sample_interval(). Stops
/// with a blow-up flag once max|W| exceeds the threshold, the state stops being
/// finite, or the adaptive step underflows.
inline Trajectory integrate(const WedgeDiagonal& w0, const IntegratorOptions& options) {
    options.validate();
    const std::size_t n = w0.n();
    Trajectory traj;

    std::vector<double> y(w0.pairs().begin(), w0.pairs().end());
    double t = 0.0;
    auto record = [&](double time) {
        auto w = WedgeDiagonal::general(n, y);
        const double residual = conformal_project(w).residual;
        traj.samples.push_back(OdeState{time, std::move(w), residual});
    };
    auto constrain = [&](std::vector<double>& state) {
        if (!options.constrained) return;
        auto proj = conformal_project(WedgeDiagonal::general(n, state));
        const double scale = detail::max_abs(state);
        if (scale > 0.0) traj.max_relative_projection = std::max(traj.max_relative_projection, proj.residual / scale);
        auto rs = WedgeDiagonal::rank_structured(proj.mvec);
        state.assign(rs.pairs().begin(), rs.pairs().end());
    };
    constrain(y);
    record(0.0);

    const double interval = options.sample_interval();
    double h = options.dt;
    std::size_t sample_index = 1;
    while (t < options.t_end) {
        const double next_sample = std::min(options.t_end, interval * static_cast<double>(sample_index));
        const double step = std::min(h, next_sample - t);
        std::vector<double> y_new;
        if (options.method == IntegratorOptions::Method::rk4) {
            y_new = detail::rk4_step(n, y, step);
        } else {
            auto full = detail::rk4_step(n, y, step);
            auto half = detail::rk4_step(n, detail::rk4_step(n, y, 0.5 * step), 0.5 * step);
            double diff = 0.0;
            for (std::size_t p = 0; p < y.size(); ++p) diff = std::max(diff, std::abs(half[p] - full[p]));
            const double scale = std::max(detail::max_abs(y), detail::max_abs(half));
            double err = diff == 0.0 ? 0.0 : diff / (options.tolerance * scale);
            if (!detail::all_finite(half) || !detail::all_finite(full)) err = std::numeric_limits<double>::infinity();
            if (!(err <= 1.0)) {
                ++traj.rejected_steps;
                h = step * (std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.25);
                if (h < 1e-15 * std::max(1.0, t)) {
                    traj.blew_up = true;
                    traj.blowup_time = t;
                    record(t);
                    return traj;
                }
                continue;
            }
            for (std::size_t p = 0; p < y.size(); ++p) half[p] += (half[p] - full[p]) / 15.0;
            y_new = std::move(half);
            const double grow = err == 0.0 ? 4.0 : std::min(4.0, std::max(0.1, 0.9 * std::pow(err, -0.2)));
            // a step clipped to hit a sample time says nothing about the natural step size
            if (step < h) {
                if (grow < 1.0) h = step * grow;
            } else {
                h = step * grow;
            }
        }
        ++traj.accepted_steps;
        t = (step == next_sample - t) ? next_sample : t + step;
        y = std::move(y_new);
        constrain(y);

        if (!detail::all_finite(y) || detail::max_abs(y) > options.blowup_threshold) {
            traj.blew_up = true;
            traj.blowup_time = t;
            if (detail::all_finite(y)) record(t);
            return traj;
        }
        if (t >= next_sample) {
            record(t);
            ++sample_index;
        }
    }
    return traj;
}

struct PinchScalars {
    double scalar = 0.0;            // R = sum of pair values
    double nu = 0.0;                // least eigenvalue (smallest pair value)
    std::vector<double> pinch_m;    // R + m nu for each configured m
    std::optional<double> hi_margin;
};

inline PinchScalars pinch_scalars(const WedgeDiagonal& w, std::span<const int> m_list) {
    PinchScalars s;
    s.scalar = w.pair_sum();
    s.nu = w.min_pair();
    s.pinch_m.reserve(m_list.size());
    for (int m : m_list) s.pinch_m.push_back(s.scalar + m * s.nu);
    return s;
}

/// R - (-nu)[log(-nu) + log(1+t) - n(n+1)/2] when nu < 0; empty otherwise.
inline std::optional<double> hamilton_ivey_margin(const PinchScalars& s, double t, std::size_t n) {
    if (!(s.nu < 0.0)) return std::nullopt;
    const double neg = -s.nu;
    const double nd = static_cast<double>(n);
    return s.scalar - neg * (std::log(neg) + std::log1p(t) - 0.5 * nd * (nd + 1.0));
}

/// Exact solution of u' = u^2 / (2(m+2)) with u(0) = u0 < 0.
inline double comparison_bound(double u0, int m, double t) {
    if (!(u0 < 0.0)) throw std::invalid_argument("comparison_bound: u0 must be negative");
    if (m < 0) throw std::invalid_argument("comparison_bound: m must be nonnegative");
    return 1.0 / (1.0 / u0 - t / (2.0 * (m + 2.0)));
}

}  // namespace confsol
