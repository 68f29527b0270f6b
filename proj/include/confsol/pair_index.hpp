#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace confsol {

// Unordered index pairs {i, j}, i < j, over 0..n-1 in lexicographic order:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...

constexpr std::size_t pair_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

constexpr std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) noexcept {
    if (i > j) std::swap(i, j);
    // rows 0..i-1 contribute (n-1) + (n-2) + ... + (n-i) entries
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

inline std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(pair_count(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    return out;
}

}  // namespace confsol
