#pragma once

// The quadratic pinching function f(x_1..x_n; m) built from pair sums
// M_ij = x_i + x_j, its constraint system and the reduction claims used to
// bound it from below. Indices are 0-based: the distinguished pair {1,2} is
// (0, 1) here, and "third coordinate onward" means indices >= 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace confsol {

struct PinchingInstance {
    std::vector<double> x;
    int m = 1;
    double rho = 0.0;

    std::size_t n() const noexcept { return x.size(); }
};

struct ConstraintFlags {
    bool ordered = false;      // x_1 <= x_2 <= min_{i>=3} x_i
    bool lower_slab = false;   // S + m M_12 >= -rho
    bool upper_slab = false;   // S + (m+1) M_12 < -(m+1)(m+n-1) rho

    bool all() const noexcept { return ordered && lower_slab && upper_slab; }
};

namespace detail {

inline double pair_value(std::span<const double> x, std::size_t i, std::size_t j) { return x[i] + x[j]; }

inline bool is_distinguished(std::size_t i, std::size_t j) { return i == 0 && j == 1; }

inline void require_pinching_shape(std::size_t n, int m) {
    if (n < 4) throw std::invalid_argument("pinching function needs n >= 4");
    if (m < 1) throw std::invalid_argument("pinching function needs m >= 1");
}

/// max(1, |x|^2), the scale for tolerances on quadratic quantities.
inline double quadratic_scale(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::max(1.0, s);
}

}  // namespace detail

/// S = sum over unordered pairs other than {1,2} of (x_i + x_j).
inline double pair_sum_S(std::span<const double> x) {
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!detail::is_distinguished(i, j)) s += detail::pair_value(x, i, j);
    return s;
}

inline double pair_sum_S(const PinchingInstance& inst) { return pair_sum_S(inst.x); }

/// f by literal summation of its defining expression.
inline double evaluate_f(std::span<const double> x, int m) {
    const std::size_t n = x.size();
    detail::require_pinching_shape(n, m);
    const double mp1 = static_cast<double>(m) + 1.0;
    const double s = pair_sum_S(x);
    const double m12 = detail::pair_value(x, 0, 1);

    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (detail::is_distinguished(i, j)) continue;
            const double mij = detail::pair_value(x, i, j);
            double cross = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) cross += detail::pair_value(x, i, k) * detail::pair_value(x, j, k);
            quad += mij * mij + cross;
        }
    double first_pair_cross = 0.0;
    for (std::size_t k = 2; k < n; ++k) first_pair_cross += detail::pair_value(x, 0, k) * detail::pair_value(x, 1, k);

    return -s * (s + mp1 * m12) / mp1 - m12 * s + (quad + mp1 * first_pair_cross);
}

inline double evaluate_f(const PinchingInstance& inst) { return evaluate_f(inst.x, inst.m); }

inline ConstraintFlags constraints(const PinchingInstance& inst) {
    if (!(inst.rho >= 0.0)) throw std::invalid_argument("constraints: rho must be nonnegative");
    const std::size_t n = inst.n();
    detail::require_pinching_shape(n, inst.m);
    const auto& x = inst.x;
    const double m = static_cast<double>(inst.m);
    const double nd = static_cast<double>(n);
    const double s = pair_sum_S(x);
    const double m12 = x[0] + x[1];

    ConstraintFlags c;
    c.ordered = x[0] <= x[1] && x[1] <= *std::min_element(x.begin() + 2, x.end());
    c.lower_slab = s + m * m12 >= -inst.rho;
    c.upper_slab = s + (m + 1.0) * m12 < -(m + 1.0) * (m + nd - 1.0) * inst.rho;
    return c;
}

/// Replaces x_i and x_j (both indices >= 2) by their mean; f does not increase.
inline PinchingInstance averaging_step(const PinchingInstance& inst, std::size_t i, std::size_t j) {
    if (i < 2 || j < 2) throw std::invalid_argument("averaging_step: indices must be >= 2 (third coordinate onward)");
    if (i == j) throw std::invalid_argument("averaging_step: indices must differ");
    if (i >= inst.n() || j >= inst.n()) throw std::out_of_range("averaging_step: index out of range");
    PinchingInstance out = inst;
    const double mean = 0.5 * (inst.x[i] + inst.x[j]);
    out.x[i] = mean;
    out.x[j] = mean;
    return out;
}

/// True when x_3 = ... = x_n within 1e-12 relative to the instance size.
inline bool is_reduced(const PinchingInstance& inst) {
    double size = 1.0;
    for (double v : inst.x) size = std::max(size, std::abs(v));
    for (std::size_t k = 3; k < inst.n(); ++k)
        if (std::abs(inst.x[k] - inst.x[2]) > 1e-12 * size) return false;
    return true;
}

/// The six inequalities that hold on every feasible reduced instance,
/// with M_33 = 2 x_3:
///   (1) M_12 < -rho <= 0
///   (2) M_33 > 0
///   (3) M_12 + (n-1)/2 M_33 > 0
///   (4) (m+n-1)(-M_12) >= (n-1)(n-2)/2 M_33
///   (5) (n-1)(n-2)/2 M_33 >= -rho - (m+n-2) M_12
///   (6) (n-2)(M_12 + (n-1)/2 M_33) >= (m-1)(-M_12)
inline std::array<bool, 6> proof_claims(const PinchingInstance& inst) {
    if (!is_reduced(inst)) throw std::invalid_argument("proof_claims: instance is not reduced (x_3 = ... = x_n)");
    if (!constraints(inst).all()) throw std::invalid_argument("proof_claims: instance is infeasible");
    const double n = static_cast<double>(inst.n());
    const double m = static_cast<double>(inst.m);
    const double rho = inst.rho;
    const double m12 = inst.x[0] + inst.x[1];
    const double m33 = 2.0 * inst.x[2];
    const double tri = 0.5 * (n - 1.0) * (n - 2.0);
    return {
        m12 < -rho && -rho <= 0.0,
        m33 > 0.0,
        m12 + 0.5 * (n - 1.0) * m33 > 0.0,
        (m + n - 1.0) * (-m12) >= tri * m33,
        tri * m33 >= -rho - (m + n - 2.0) * m12,
        (n - 2.0) * (m12 + 0.5 * (n - 1.0) * m33) >= (m - 1.0) * (-m12),
    };
}

struct ReactionQuadratic {
    double q = 0.0;            // reaction term of R + (m0+1) nu on the least eigenvector
    double square_term = 0.0;  // (S + (m0+2) M_12)^2 / (m0+2)
    double f_term = 0.0;       // f with m = m0 + 1
};

/// (S + weight * M_12)^2 / weight.
inline double complete_square(std::span<const double> mvec, double weight) {
    const double v = pair_sum_S(mvec) + weight * (mvec[0] + mvec[1]);
    return v * v / weight;
}

/// Evaluates q directly and as square_term + f_term; the two agree identically.
inline ReactionQuadratic reaction_quadratic(std::span<const double> mvec, int m0) {
    const std::size_t n = mvec.size();
    if (m0 < 0) throw std::invalid_argument("reaction_quadratic: m0 must be nonnegative");
    if (n < 4) throw std::invalid_argument("reaction_quadratic: n must be at least 4");
    if (!std::is_sorted(mvec.begin(), mvec.end()))
        throw std::invalid_argument("reaction_quadratic: mvec must be ascending");

    auto pair_term = [&](std::size_t i, std::size_t j) {
        const double mij = mvec[i] + mvec[j];
        double cross = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (k != i && k != j) cross += (mvec[i] + mvec[k]) * (mvec[j] + mvec[k]);
        return mij * mij + cross;
    };

    ReactionQuadratic out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.q += pair_term(i, j);
    out.q += (static_cast<double>(m0) + 1.0) * pair_term(0, 1);
    out.square_term = complete_square(mvec, static_cast<double>(m0) + 2.0);
    out.f_term = evaluate_f(mvec, m0 + 1);
    return out;
}

/// |q - (square_term + f_term)| relative to the size of the summands.
inline double identity_error(const ReactionQuadratic& r) {
    const double denom = std::max({std::abs(r.q), std::abs(r.square_term) + std::abs(r.f_term),
                                   std::numeric_limits<double>::min()});
    return std::abs(r.q - (r.square_term + r.f_term)) / denom;
}

}  // namespace confsol
