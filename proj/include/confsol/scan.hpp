#pragma once

// Seeded search for the infimum of the pinching function over its feasible
// set at rho = 1. The result is an empirical lower envelope, not a certified
// bound.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "confsol/parallel.hpp"
#include "confsol/pinching.hpp"
#include "confsol/random.hpp"

namespace confsol {

struct ScanConfig {
    /// Half-width B of the search box [-B, B]^n; 0 selects default_box(m, n).
    double box_half_width = 0.0;
    int grid_resolution = 120;
    std::size_t random_samples = 100000;  // feasible samples to collect
    std::size_t max_draws_per_sample = 2000;
    int refine_iterations = 200;
    std::size_t refine_starts = 8;
    std::uint64_t seed = 1;
    std::size_t dump_rows = 0;  // leading random draws kept for the CSV dump
    std::size_t chunks = 64;

    void validate() const {
        if (grid_resolution < 2) throw std::invalid_argument("ScanConfig: grid resolution must be >= 2");
        if (refine_iterations < 0) throw std::invalid_argument("ScanConfig: refine iterations must be >= 0");
        if (box_half_width < 0.0) throw std::invalid_argument("ScanConfig: box half-width must be >= 0");
        if (chunks == 0) throw std::invalid_argument("ScanConfig: chunk count must be positive");
    }

    /// max(10 (m + n), 4 * apex scale). At rho = 1 the feasible set only
    /// starts at M_12 = 1 - (m+1)(m+n-1), where the reduced slice needs
    /// x_3 = ((m+n-2)|M_12| - 1) / ((n-1)(n-2)); for large m that point lies
    /// outside 10 (m + n).
    static double default_box(int m, std::size_t n) {
        const double md = m, nd = static_cast<double>(n);
        const double apex_m12 = (md + 1.0) * (md + nd - 1.0) - 1.0;
        const double apex_x3 = ((md + nd - 2.0) * apex_m12 - 1.0) / ((nd - 1.0) * (nd - 2.0));
        return std::max(10.0 * (md + nd), 4.0 * std::max(apex_m12, apex_x3));
    }

    double box_for(int m, std::size_t n) const {
        return box_half_width > 0.0 ? box_half_width : default_box(m, n);
    }
};

enum class Provenance { none, grid, random, refined };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::grid: return "grid";
        case Provenance::random: return "random";
        case Provenance::refined: return "refined";
        default: return "none";
    }
}

struct SampleRow {
    std::vector<double> x;
    double f = 0.0;
    ConstraintFlags flags;
};

struct ScanResult {
    int m = 0;
    std::size_t n = 0;
    double box_half_width = 0.0;
    bool feasible_found = false;
    double min_f = std::numeric_limits<double>::infinity();
    PinchingInstance argmin;
    double c_est = 0.0;  // max(0, -min_f)
    Provenance provenance = Provenance::none;

    std::size_t grid_points = 0;
    std::size_t grid_feasible = 0;
    double grid_min = std::numeric_limits<double>::infinity();
    std::size_t random_draws = 0;
    std::size_t random_feasible = 0;
    double random_min = std::numeric_limits<double>::infinity();
    /// Best value after each refinement sweep.
    std::vector<double> refine_history;
    /// Finite minimum whose minimizer stays within twice the search box.
    bool bounded = false;

    std::vector<SampleRow> dump;

    std::size_t feasible_count() const noexcept { return grid_feasible + random_feasible; }
};

namespace detail {

struct Candidate {
    double f = std::numeric_limits<double>::infinity();
    std::vector<double> x;
    Provenance source = Provenance::none;
};

/// Keeps the `cap` smallest candidates; ties keep the earlier one.
class BestList {
public:
    explicit BestList(std::size_t cap) : cap_(cap) {}

    void offer(double f, const std::vector<double>& x, Provenance source) {
        if (cap_ == 0) return;
        if (items_.size() == cap_ && !(f < items_.back().f)) return;
        auto pos = std::upper_bound(items_.begin(), items_.end(), f,
                                    [](double v, const Candidate& c) { return v < c.f; });
        items_.insert(pos, Candidate{f, x, source});
        if (items_.size() > cap_) items_.pop_back();
    }

    void merge(const BestList& other) {
        for (const auto& c : other.items_) offer(c.f, c.x, c.source);
    }

    const std::vector<Candidate>& items() const noexcept { return items_; }

private:
    std::size_t cap_;
    std::vector<Candidate> items_;
};

inline bool feasible_at_unit_rho(const std::vector<double>& x, int m) {
    return constraints(PinchingInstance{x, m, 1.0}).all();
}

}  // namespace detail

namespace detail {

inline std::vector<double> expand_reduced(std::size_t n, double x1, double x2, double rest) {
    std::vector<double> x(n, rest);
    x[0] = x1;
    x[1] = x2;
    return x;
}

using Direction = std::array<double, 3>;

inline Direction cross(const Direction& a, const Direction& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Search directions in the reduced (x_1, x_2, x_3) space: the 26 lattice
/// directions plus, in both orientations, the edge directions where two
/// constraint planes meet and the in-plane directions N x e_k of each plane.
inline std::vector<Direction> reduced_directions(int m, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double k = (nd - 1.0) * (nd - 2.0);
    const std::array<Direction, 4> normals{{{-1.0, 1.0, 0.0},
                                            {0.0, -1.0, 1.0},
                                            {nd - 2.0 + m, nd - 2.0 + m, k},
                                            {nd - 1.0 + m, nd - 1.0 + m, k}}};
    std::vector<Direction> out;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                if (a != 0 || b != 0 || c != 0) out.push_back({double(a), double(b), double(c)});
    auto add_both = [&](Direction d) {
        const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        if (len < 1e-12) return;
        for (auto& v : d) v /= len;
        out.push_back(d);
        out.push_back({-d[0], -d[1], -d[2]});
    };
    for (std::size_t i = 0; i < normals.size(); ++i)
        for (std::size_t j = i + 1; j < normals.size(); ++j) add_both(cross(normals[i], normals[j]));
    for (const auto& nrm : normals)
        for (std::size_t e = 0; e < 3; ++e) {
            Direction axis{0.0, 0.0, 0.0};
            axis[e] = 1.0;
            add_both(cross(nrm, axis));
        }
    return out;
}

}  // namespace detail

/// Local refinement of a feasible candidate. Coordinates x_3..x_n are first
/// replaced by their mean (pairwise averaging never increases f and keeps the
/// constraints), then a pattern search over reduced_directions() runs with a step that halves whenever a sweep
/// finds no feasible improvement. Appends the best value after each sweep.
inline detail::Candidate refine_feasible(detail::Candidate start, int m, double initial_step, int sweeps,
                                         std::vector<double>* history = nullptr) {
    const std::size_t n = start.x.size();
    double rest = 0.0;
    for (std::size_t k = 2; k < n; ++k) rest += start.x[k];
    rest /= static_cast<double>(n - 2);
    auto reduced = detail::expand_reduced(n, start.x[0], start.x[1], rest);
    if (detail::feasible_at_unit_rho(reduced, m)) {
        const double f = evaluate_f(reduced, m);
        if (f <= start.f) {
            start.f = f;
            start.x = std::move(reduced);
        }
    }

    std::array<double, 3> point{start.x[0], start.x[1], start.x[2]};
    const bool is_reduced_start = is_reduced(PinchingInstance{start.x, m, 1.0});
    const auto directions = detail::reduced_directions(m, n);
    double step = initial_step;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        if (is_reduced_start) {
            for (const auto& d : directions) {
                auto trial = detail::expand_reduced(n, point[0] + d[0] * step, point[1] + d[1] * step,
                                                    point[2] + d[2] * step);
                if (!detail::feasible_at_unit_rho(trial, m)) continue;
                const double f = evaluate_f(trial, m);
                if (f < start.f) {
                    start.f = f;
                    start.x = std::move(trial);
                    point = {start.x[0], start.x[1], start.x[2]};
                    improved = true;
                }
            }
        } else {
            for (std::size_t k = 0; k < n; ++k)
                for (double dir : {-1.0, 1.0}) {
                    auto trial = start.x;
                    trial[k] += dir * step;
                    if (!detail::feasible_at_unit_rho(trial, m)) continue;
                    const double f = evaluate_f(trial, m);
                    if (f < start.f) {
                        start.f = f;
                        start.x = std::move(trial);
                        improved = true;
                    }
                }
        }
        if (!improved) step *= 0.5;
        if (history) history->push_back(start.f);
    }
    return start;
}

/// Proposal for feasible instances: x uniform in [-B, B]^n with x_1 <= x_2,
/// then x_3..x_n shifted by a common offset drawn from the interval where both
/// slab constraints hold. With `reduced`, x_3..x_n start equal and stay equal.
/// Returns whether the result lies in the box; ordering is left to the caller.
inline bool propose_slab_instance(Rng& rng, std::vector<double>& x, int m, double rho, double box, bool reduced) {
    const std::size_t n = x.size();
    const double md = m, nd = static_cast<double>(n);
    const double shift_rate = (nd - 1.0) * (nd - 2.0);  // dS per unit common shift of x_3..x_n
    if (reduced) {
        x[0] = rng.uniform(-box, box);
        x[1] = rng.uniform(-box, box);
        std::fill(x.begin() + 2, x.end(), rng.uniform(-box, box));
    } else {
        for (auto& v : x) v = rng.uniform(-box, box);
    }
    if (x[1] < x[0]) std::swap(x[0], x[1]);
    const double m12 = x[0] + x[1];
    const double s0 = pair_sum_S(x);
    const double lo = (-rho - md * m12 - s0) / shift_rate;
    const double hi = (-(md + 1.0) * (md + nd - 1.0) * rho - (md + 1.0) * m12 - s0) / shift_rate;
    if (hi > lo) {
        const double delta = rng.uniform(lo, hi);
        for (std::size_t k = 2; k < n; ++k) x[k] += delta;
    }
    return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= box; });
}

/// Feasible instance from repeated proposals, or nothing after max_draws.
inline std::optional<PinchingInstance> draw_feasible(Rng& rng, std::size_t n, int m, double rho, double box,
                                                     bool reduced, std::size_t max_draws) {
    std::vector<double> x(n);
    for (std::size_t d = 0; d < max_draws; ++d) {
        if (!propose_slab_instance(rng, x, m, rho, box, reduced)) continue;
        PinchingInstance inst{x, m, rho};
        if (constraints(inst).all()) return inst;
    }
    return std::nullopt;
}

inline ScanResult scan_min_f(int m, std::size_t n, const ScanConfig& config, unsigned jobs = 1) {
    config.validate();
    detail::require_pinching_shape(n, m);

    ScanResult result;
    result.m = m;
    result.n = n;
    const double box = config.box_for(m, n);
    result.box_half_width = box;
    const std::size_t keep = std::max<std::size_t>(config.refine_starts, 1);

    // (a) reduced slice x_3 = ... = x_n, x_1 <= x_2 <= x_3 on a uniform grid.
    const int res = config.grid_resolution;
    const double spacing = 2.0 * box / (res - 1);
    auto coord = [&](int a) { return -box + spacing * a; };
    const std::size_t grid_chunks = static_cast<std::size_t>(res);
    std::vector<detail::BestList> grid_best(grid_chunks, detail::BestList(keep));
    std::vector<std::size_t> grid_points(grid_chunks, 0), grid_feasible(grid_chunks, 0);
    parallel_for_chunks(grid_chunks, jobs, [&](std::size_t chunk) {
        const int a = static_cast<int>(chunk);
        std::vector<double> x(n);
        for (int b = a; b < res; ++b)
            for (int c = b; c < res; ++c) {
                x[0] = coord(a);
                x[1] = coord(b);
                std::fill(x.begin() + 2, x.end(), coord(c));
                ++grid_points[chunk];
                if (!detail::feasible_at_unit_rho(x, m)) continue;
                ++grid_feasible[chunk];
                grid_best[chunk].offer(evaluate_f(x, m), x, Provenance::grid);
            }
    });
    detail::BestList best(keep);
    for (std::size_t c = 0; c < grid_chunks; ++c) {
        result.grid_points += grid_points[c];
        result.grid_feasible += grid_feasible[c];
        best.merge(grid_best[c]);
        if (!grid_best[c].items().empty())
            result.grid_min = std::min(result.grid_min, grid_best[c].items().front().f);
    }

    // (b) full-dimensional random instances from the slab proposal, rejected
    // unless ordered and inside the box.
    const std::size_t chunks = config.chunks;
    const std::size_t quota = (config.random_samples + chunks - 1) / chunks;
    std::vector<detail::BestList> random_best(chunks, detail::BestList(keep));
    std::vector<std::size_t> draws(chunks, 0), feasible(chunks, 0);
    std::vector<std::vector<SampleRow>> dumps(chunks);
    const std::size_t dump_quota = (config.dump_rows + chunks - 1) / chunks;
    parallel_for_chunks(chunks, jobs, [&](std::size_t chunk) {
        if (config.random_samples == 0) return;
        Rng rng(config.seed, chunk);
        std::vector<double> x(n);
        const std::size_t max_draws = quota * config.max_draws_per_sample;
        while (feasible[chunk] < quota && draws[chunk] < max_draws) {
            ++draws[chunk];
            const bool in_box = propose_slab_instance(rng, x, m, 1.0, box, false);
            const auto flags = constraints(PinchingInstance{x, m, 1.0});
            const bool ok = in_box && flags.all();
            double f = std::numeric_limits<double>::quiet_NaN();
            if (ok || dumps[chunk].size() < dump_quota) f = evaluate_f(x, m);
            if (dumps[chunk].size() < dump_quota) dumps[chunk].push_back(SampleRow{x, f, flags});
            if (!ok) continue;
            ++feasible[chunk];
            random_best[chunk].offer(f, x, Provenance::random);
        }
    });
    for (std::size_t c = 0; c < chunks; ++c) {
        result.random_draws += draws[c];
        result.random_feasible += feasible[c];
        best.merge(random_best[c]);
        if (!random_best[c].items().empty())
            result.random_min = std::min(result.random_min, random_best[c].items().front().f);
        for (auto& row : dumps[c])
            if (result.dump.size() < config.dump_rows) result.dump.push_back(std::move(row));
    }

    if (best.items().empty()) return result;
    result.feasible_found = true;

    // (c) local refinement from the best candidates, sequential for a stable history.
    detail::Candidate overall = best.items().front();
    std::vector<double> history(static_cast<std::size_t>(config.refine_iterations),
                                std::numeric_limits<double>::infinity());
    for (const auto& start : best.items()) {
        std::vector<double> local;
        auto refined = refine_feasible(start, m, 0.05 * box, config.refine_iterations, &local);
        for (std::size_t s = 0; s < local.size(); ++s) history[s] = std::min(history[s], local[s]);
        if (refined.f < overall.f) {
            if (refined.f < start.f) refined.source = Provenance::refined;
            overall = std::move(refined);
        }
    }
    result.refine_history = std::move(history);

    result.min_f = overall.f;
    result.argmin = PinchingInstance{overall.x, m, 1.0};
    result.provenance = overall.source;
    result.c_est = std::max(0.0, -result.min_f);
    double reach = 0.0;
    for (double v : overall.x) reach = std::max(reach, std::abs(v));
    result.bounded = std::isfinite(result.min_f) && reach <= 2.0 * box;
    return result;
}

}  // namespace confsol
