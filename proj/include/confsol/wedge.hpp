#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "confsol/pair_index.hpp"

namespace confsol {

/// Curvature operator that is diagonal in the wedge basis sqrt(2) e_i ^ e_j.
///
/// Stores one eigenvalue W_ij per unordered pair. A rank-structured operator
/// additionally carries per-index values M_i with W_ij = M_i + M_j; that is
/// the form a vanishing-Weyl curvature operator takes in a Ricci eigenframe.
class WedgeDiagonal {
public:
    enum class Kind { rank_structured, general };

    WedgeDiagonal() = default;

    static WedgeDiagonal general(std::size_t n, std::vector<double> pairs) {
        if (n < 2) throw std::invalid_argument("WedgeDiagonal: n must be at least 2");
        if (pairs.size() != pair_count(n))
            throw std::invalid_argument("WedgeDiagonal: expected n(n-1)/2 pair values");
        WedgeDiagonal w;
        w.n_ = n;
        w.kind_ = Kind::general;
        w.pairs_ = std::move(pairs);
        return w;
    }

    static WedgeDiagonal general(std::size_t n, double value) {
        return general(n, std::vector<double>(pair_count(n), value));
    }

    static WedgeDiagonal rank_structured(std::vector<double> m_vec) {
        const std::size_t n = m_vec.size();
        if (n < 2) throw std::invalid_argument("WedgeDiagonal: n must be at least 2");
        WedgeDiagonal w;
        w.n_ = n;
        w.kind_ = Kind::rank_structured;
        w.pairs_.reserve(pair_count(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) w.pairs_.push_back(m_vec[i] + m_vec[j]);
        w.m_vec_ = std::move(m_vec);
        return w;
    }

    std::size_t n() const noexcept { return n_; }
    Kind kind() const noexcept { return kind_; }
    bool is_rank_structured() const noexcept { return kind_ == Kind::rank_structured; }

    /// Per-index values; empty for general operators.
    std::span<const double> m_vec() const noexcept { return m_vec_; }
    std::span<const double> pairs() const noexcept { return pairs_; }

    double operator()(std::size_t i, std::size_t j) const { return pairs_[pair_index(n_, i, j)]; }

    /// Same pair values, forgetting the per-index structure.
    WedgeDiagonal flattened() const { return general(n_, pairs_); }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : pairs_) m = std::max(m, std::abs(v));
        return m;
    }

    double min_pair() const noexcept { return *std::min_element(pairs_.begin(), pairs_.end()); }

    double pair_sum() const noexcept {
        double s = 0.0;
        for (double v : pairs_) s += v;
        return s;
    }

private:
    std::size_t n_ = 0;
    Kind kind_ = Kind::general;
    std::vector<double> m_vec_;
    std::vector<double> pairs_;
};

}  // namespace confsol
