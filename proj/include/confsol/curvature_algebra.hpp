#pragma once

// Curvature-operator algebra of metrics with vanishing Weyl tensor, written in
// an orthonormal Ricci eigenframe (the metric is the identity in every formula).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "confsol/pair_index.hpp"
#include "confsol/wedge.hpp"

namespace confsol {

/// Ascending Ricci eigenvalues at a point, n >= 4.
class RicciSpectrum {
public:
    explicit RicciSpectrum(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
        if (lambdas_.size() < 4)
            throw std::invalid_argument("RicciSpectrum: dimension must be at least 4");
        for (double v : lambdas_)
            if (!std::isfinite(v)) throw std::invalid_argument("RicciSpectrum: non-finite eigenvalue");
        if (!std::is_sorted(lambdas_.begin(), lambdas_.end()))
            throw std::invalid_argument("RicciSpectrum: eigenvalues must be ascending");
        for (double v : lambdas_) scalar_ += v;
    }

    std::size_t n() const noexcept { return lambdas_.size(); }
    std::span<const double> lambdas() const noexcept { return lambdas_; }
    double scalar() const noexcept { return scalar_; }

private:
    std::vector<double> lambdas_;
    double scalar_ = 0.0;
};

namespace detail {

inline void require_conformal_dimension(std::size_t n) {
    if (n < 4) throw std::invalid_argument("dimension must be at least 4");
}

inline double lambda_sum(std::span<const double> lambdas) {
    double s = 0.0;
    for (double v : lambdas) s += v;
    return s;
}

}  // namespace detail

/// M_i = 2 lambda_i / (n-2) - R / ((n-1)(n-2)), output order follows the input.
/// Accepts eigenvalues in any order so permutation equivariance can be checked.
inline WedgeDiagonal wedge_components(std::span<const double> lambdas) {
    const std::size_t n = lambdas.size();
    detail::require_conformal_dimension(n);
    const double nd = static_cast<double>(n);
    const double scalar = detail::lambda_sum(lambdas);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i)
        m[i] = 2.0 * lambdas[i] / (nd - 2.0) - scalar / ((nd - 1.0) * (nd - 2.0));
    return WedgeDiagonal::rank_structured(std::move(m));
}

inline WedgeDiagonal wedge_components(const RicciSpectrum& spec) {
    return wedge_components(spec.lambdas());
}

/// Dense R_ijkl in an orthonormal frame, R_ijij the sectional curvature of e_i ^ e_j.
class RiemannTensor {
public:
    static constexpr std::size_t max_dimension = 8;
    static constexpr double symmetry_tolerance = 1e-12;

    /// Validates antisymmetry in each index pair, pair symmetry and the first
    /// Bianchi identity to symmetry_tolerance * max(1, max|R|).
    static RiemannTensor from_components(std::size_t n, std::vector<double> components) {
        if (n < 2 || n > max_dimension)
            throw std::invalid_argument("RiemannTensor: dimension out of range [2, 8]");
        if (components.size() != n * n * n * n)
            throw std::invalid_argument("RiemannTensor: expected n^4 components");
        RiemannTensor rm(n, std::move(components));
        const double defect = rm.symmetry_defect();
        if (defect > symmetry_tolerance * std::max(1.0, rm.max_abs()))
            throw std::invalid_argument("RiemannTensor: curvature symmetries violated (defect " +
                                        std::to_string(defect) + ")");
        return rm;
    }

    std::size_t n() const noexcept { return n_; }
    std::span<const double> components() const noexcept { return data_; }

    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * n_ + j) * n_ + k) * n_ + l];
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest violation over all index quadruples of the four algebraic symmetries.
    double symmetry_defect() const {
        double worst = 0.0;
        const auto& r = *this;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = 0; k < n_; ++k)
                    for (std::size_t l = 0; l < n_; ++l) {
                        const double v = r(i, j, k, l);
                        worst = std::max({worst, std::abs(v + r(j, i, k, l)), std::abs(v + r(i, j, l, k)),
                                          std::abs(v - r(k, l, i, j)),
                                          std::abs(v + r(i, k, l, j) + r(i, l, j, k))});
                    }
        return worst;
    }

    /// Ric_ik = sum_j R_ijkj.
    std::vector<double> ricci() const {
        std::vector<double> ric(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k)
                for (std::size_t j = 0; j < n_; ++j) ric[i * n_ + k] += (*this)(i, j, k, j);
        return ric;
    }

private:
    RiemannTensor(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {}

    std::size_t n_;
    std::vector<double> data_;
};

namespace detail {

inline double kron(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

/// Ricci and scalar part of the curvature decomposition for diagonal Ricci.
inline double conformal_part(std::span<const double> lambdas, double scalar, std::size_t i, std::size_t j,
                             std::size_t k, std::size_t l) {
    const double nd = static_cast<double>(lambdas.size());
    auto ric = [&](std::size_t a, std::size_t b) { return a == b ? lambdas[a] : 0.0; };
    const double ricci_term =
        (ric(i, k) * kron(j, l) + ric(j, l) * kron(i, k) - ric(i, l) * kron(j, k) - ric(j, k) * kron(i, l)) /
        (nd - 2.0);
    const double scalar_term = scalar * (kron(i, k) * kron(j, l) - kron(i, l) * kron(j, k)) / ((nd - 1.0) * (nd - 2.0));
    return ricci_term - scalar_term;
}

}  // namespace detail

/// Riemann tensor of a vanishing-Weyl metric with the given Ricci spectrum.
inline RiemannTensor riemann_from_spectrum(const RicciSpectrum& spec) {
    const std::size_t n = spec.n();
    if (n > RiemannTensor::max_dimension) throw std::invalid_argument("riemann_from_spectrum: n > 8");
    std::vector<double> data(n * n * n * n);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l)
                    data[idx++] = detail::conformal_part(spec.lambdas(), spec.scalar(), i, j, k, l);
    return RiemannTensor::from_components(n, std::move(data));
}

struct WeylPart {
    std::size_t n = 0;
    std::vector<double> components;
    double max_norm = 0.0;

    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return components[((i * n + j) * n + k) * n + l];
    }
};

/// R_ijkl minus its Ricci/scalar part computed from `ric`.
inline WeylPart weyl_tensor(const RiemannTensor& rm, const RicciSpectrum& ric) {
    const std::size_t n = rm.n();
    if (ric.n() != n) throw std::invalid_argument("weyl_tensor: dimension mismatch");
    WeylPart out;
    out.n = n;
    out.components.resize(n * n * n * n);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const double w = rm(i, j, k, l) - detail::conformal_part(ric.lambdas(), ric.scalar(), i, j, k, l);
                    out.components[idx++] = w;
                    out.max_norm = std::max(out.max_norm, std::abs(w));
                }
    return out;
}

/// Scale between the wedge-basis generators and the elementary antisymmetric
/// matrices A_ij ((A_ij)_ij = 1, (A_ij)_ji = -1): E_ij = generator_scale * A_ij.
/// With this scale the E_ij are Frobenius-orthonormal and the closed form
/// (M#)_ij = sum_{k != i,j} M_ik M_jk is reproduced by the structure constants.
inline constexpr double generator_scale = std::numbers::sqrt2 / 2.0;

/// so(n) structure constants in the wedge basis: [E_a, E_b] = sum_c C_c^{ab} E_c.
class StructureConstants {
public:
    using Key = std::array<std::size_t, 3>;  // (a, b, c) -> C_c^{ab}

    explicit StructureConstants(std::size_t n) : n_(n) {
        if (n < 3) throw std::invalid_argument("StructureConstants: n must be at least 3");
        const auto pairs = pair_list(n);
        const std::size_t dim = pairs.size();
        std::vector<std::vector<double>> gens;
        gens.reserve(dim);
        for (auto [i, j] : pairs) gens.push_back(generator(i, j));

        std::vector<double> ab(n * n), ba(n * n);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) {
                multiply(gens[a], gens[b], ab);
                multiply(gens[b], gens[a], ba);
                for (std::size_t c = 0; c < dim; ++c) {
                    double coeff = 0.0;
                    for (std::size_t p = 0; p < n * n; ++p) coeff += (ab[p] - ba[p]) * gens[c][p];
                    if (std::abs(coeff) > 1e-14) table_[{a, b, c}] = coeff;
                }
            }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t algebra_dimension() const noexcept { return pair_count(n_); }
    const std::map<Key, double>& table() const noexcept { return table_; }

    double operator()(std::size_t a, std::size_t b, std::size_t c) const {
        auto it = table_.find({a, b, c});
        return it == table_.end() ? 0.0 : it->second;
    }

    /// Dense n x n matrix of E_ij.
    std::vector<double> generator(std::size_t i, std::size_t j) const {
        std::vector<double> g(n_ * n_, 0.0);
        g[i * n_ + j] = generator_scale;
        g[j * n_ + i] = -generator_scale;
        return g;
    }

private:
    void multiply(const std::vector<double>& x, const std::vector<double>& y, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t k = 0; k < n_; ++k) {
                const double xv = x[r * n_ + k];
                if (xv == 0.0) continue;
                for (std::size_t c = 0; c < n_; ++c) out[r * n_ + c] += xv * y[k * n_ + c];
            }
    }

    std::size_t n_;
    std::map<Key, double> table_;
};

/// (M#)_ij = sum_{k not in {i,j}} W_ik W_jk for a wedge-diagonal operator.
inline WedgeDiagonal lie_algebra_square_closed(const WedgeDiagonal& w) {
    const std::size_t n = w.n();
    std::vector<double> out(pair_count(n), 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++idx) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) s += w(i, k) * w(j, k);
            out[idx] = s;
        }
    return WedgeDiagonal::general(n, std::move(out));
}

/// Row-major square matrix over wedge-basis indices.
struct WedgeMatrix {
    std::size_t size = 0;
    std::vector<double> data;

    double operator()(std::size_t a, std::size_t b) const { return data[a * size + b]; }
};

/// M#_ab = sum_{g,h} C_a^{gh} C_b^{gh} W_g W_h, the full matrix from structure constants.
inline WedgeMatrix lie_algebra_square_oracle(const WedgeDiagonal& w, const StructureConstants& sc) {
    if (w.n() != sc.n()) throw std::invalid_argument("lie_algebra_square_oracle: dimension mismatch");
    const std::size_t dim = sc.algebra_dimension();
    // dense[c][a][b] = C_c^{ab}
    std::vector<double> dense(dim * dim * dim, 0.0);
    for (const auto& [key, value] : sc.table()) dense[(key[2] * dim + key[0]) * dim + key[1]] = value;

    const auto diag = w.pairs();
    WedgeMatrix out{dim, std::vector<double>(dim * dim, 0.0)};
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            double s = 0.0;
            for (std::size_t g = 0; g < dim; ++g)
                for (std::size_t h = 0; h < dim; ++h)
                    s += dense[(a * dim + g) * dim + h] * dense[(b * dim + g) * dim + h] * diag[g] * diag[h];
            out.data[a * dim + b] = s;
        }
    return out;
}

}  // namespace confsol
