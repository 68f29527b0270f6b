#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "confsol/random.hpp"
#include "confsol/soliton.hpp"

using namespace confsol;

namespace {

constexpr SolitonKind kAllKinds[] = {SolitonKind::gaussian, SolitonKind::round_sphere, SolitonKind::cylinder};

ModelPoint cylinder_point(const SolitonModel& m, double s) {
    ModelPoint p;
    p.ambient.assign(m.n, 0.0);
    p.ambient[0] = m.radius;
    p.axial = s;
    return p;
}

}  // namespace

TEST(MakeModel, NormalizedConstants) {
    auto g = make_model(SolitonKind::gaussian, 5);
    ModelPoint origin{std::vector<double>(5, 0.0), 0.0};
    EXPECT_EQ(potential(g, origin), 0.0);
    EXPECT_EQ(scalar_curvature(g), 0.0);

    auto s = make_model(SolitonKind::round_sphere, 4);
    EXPECT_NEAR(s.radius * s.radius, 6.0, 1e-14);
    EXPECT_NEAR(s.constant, 2.0, 1e-15);
    EXPECT_NEAR(scalar_curvature(s), 2.0, 1e-14);

    auto c = make_model(SolitonKind::cylinder, 4);
    EXPECT_NEAR(c.radius * c.radius, 4.0, 1e-14);
    EXPECT_NEAR(scalar_curvature(c), 1.5, 1e-14);
    EXPECT_NEAR(potential(c, cylinder_point(c, 2.0)), 1.0 + 1.5, 1e-14);

    EXPECT_THROW(make_model(SolitonKind::gaussian, 3), std::invalid_argument);
    EXPECT_THROW(parse_soliton_kind("cylindre"), std::invalid_argument);
    EXPECT_EQ(parse_soliton_kind("round_sphere"), SolitonKind::round_sphere);
}

TEST(SolitonResidual, VanishesOnAllModels) {
    Rng rng(31);
    for (std::size_t n = 4; n <= 6; ++n)
        for (auto kind : kAllKinds) {
            auto m = make_model(kind, n);
            for (int k = 0; k < 100; ++k) {
                auto r = soliton_residual(m, sample_point(m, rng, 5.0));
                EXPECT_LE(r.tensor_residual, 1e-12);
                EXPECT_LE(r.scalar_residual, 1e-12);
            }
        }
    auto c = make_model(SolitonKind::cylinder, 4);
    auto r = soliton_residual(c, cylinder_point(c, 3.0));
    EXPECT_LE(r.tensor_residual, 1e-12);
    EXPECT_LE(r.scalar_residual, 1e-12);
}

TEST(SolitonModels, CurvatureOperatorIsNonnegativeAndRankStructured) {
    for (std::size_t n = 4; n <= 6; ++n)
        for (auto kind : kAllKinds) {
            auto m = make_model(kind, n);
            auto spec = ricci_spectrum(m);
            auto w = wedge_components(spec);
            EXPECT_TRUE(w.is_rank_structured());
            EXPECT_GE(w.min_pair(), -1e-14);
            EXPECT_LE(weyl_tensor(riemann_from_spectrum(spec), spec).max_norm, 1e-12);
        }
}

TEST(Geodesics, DistanceAndEndpoints) {
    Rng rng(32);
    for (auto kind : kAllKinds) {
        auto m = make_model(kind, 5);
        for (int k = 0; k < 20; ++k) {
            auto p = sample_point(m, rng, 4.0), x = sample_point(m, rng, 4.0);
            const double d = distance(m, p, x);
            auto end = geodesic_point(m, p, x, d);
            EXPECT_NEAR(distance(m, end, x), 0.0, 1e-6);
            // unit speed: consecutive samples are d/8 apart
            auto a = geodesic_point(m, p, x, 0.25 * d), b = geodesic_point(m, p, x, 0.375 * d);
            EXPECT_NEAR(distance(m, a, b), 0.125 * d, 1e-9 * std::max(1.0, d));
        }
    }
}

TEST(HessBound, ModelMargins) {
    Rng rng(33);
    auto g = make_model(SolitonKind::gaussian, 4);
    auto hg = hess_bound_check(g, sample_point(g, rng, 3.0), sample_point(g, rng, 3.0));
    EXPECT_EQ(hg.margin, 0.0);

    auto s = make_model(SolitonKind::round_sphere, 4);
    auto hs = hess_bound_check(s, sample_point(s, rng, 3.0), sample_point(s, rng, 3.0));
    EXPECT_EQ(hs.margin, 0.5);
    EXPECT_EQ(hs.geodesic_margin, 0.5);

    auto c = make_model(SolitonKind::cylinder, 4);
    auto hc = hess_bound_check(c, cylinder_point(c, -1.0), cylinder_point(c, 2.0));
    EXPECT_EQ(hc.direction_margins[0], 0.0);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(hc.direction_margins[i], 0.5);
    EXPECT_NEAR(hc.geodesic_margin, 0.0, 1e-15);
}

TEST(HessBound, GeodesicSecondDerivativeMatchesFiniteDifferences) {
    Rng rng(34);
    for (auto kind : kAllKinds) {
        auto m = make_model(kind, 5);
        for (int k = 0; k < 10; ++k) {
            auto p = sample_point(m, rng, 3.0), x = sample_point(m, rng, 3.0);
            const double d = distance(m, p, x);
            const double tau = 0.5 * d, h = 1e-3 * d;
            auto h_at = [&](double s) { return potential(m, geodesic_point(m, p, x, s)); };
            const double fd = (h_at(tau + h) - 2.0 * h_at(tau) + h_at(tau - h)) / (h * h);
            EXPECT_NEAR(fd, geodesic_hessian(m, p, x), 1e-5);
            EXPECT_LE(fd, 0.5 + 1e-5);
        }
    }
}

TEST(GrowthBound, Examples) {
    Rng rng(35);
    auto g = make_model(SolitonKind::gaussian, 4);
    ModelPoint origin{std::vector<double>(4, 0.0), 0.0};
    for (int k = 0; k < 10; ++k) {
        auto x = sample_point(g, rng, 5.0);
        EXPECT_NEAR(growth_bound_check(g, origin, x, 0.25).f_margin, 0.0, 1e-13);
    }

    auto s = make_model(SolitonKind::round_sphere, 5);
    auto p = sample_point(s, rng, 1.0), x = sample_point(s, rng, 1.0);
    const double d = distance(s, p, x);
    EXPECT_NEAR(growth_bound_check(s, p, x, 0.25).f_margin, 0.25 * d * d, 1e-13);

    auto c = make_model(SolitonKind::cylinder, 4);
    auto gc = growth_bound_check(c, cylinder_point(c, 0.0), cylinder_point(c, 4.0), 0.25);
    // 16/4 + 0 + 3/2 - (16/4 + 3/2)
    EXPECT_NEAR(gc.f_margin, 0.0, 1e-13);
    EXPECT_GE(gc.curv_margin, 0.0);
    EXPECT_GE(gc.scalar_margin, 0.0);
}

TEST(GrowthBound, SummaryPicksSmallestExponent) {
    Rng rng(36);
    for (auto kind : kAllKinds) {
        auto m = make_model(kind, 6);
        std::vector<std::pair<ModelPoint, ModelPoint>> pairs;
        for (int k = 0; k < 100; ++k) pairs.emplace_back(sample_point(m, rng, 5.0), sample_point(m, rng, 5.0));
        auto summary = growth_bound_check(m, pairs);
        EXPECT_TRUE(summary.a_found);
        EXPECT_EQ(summary.a_used, 0.25);
        EXPECT_GE(summary.min_f_margin, -1e-12);
        EXPECT_GE(summary.min_scalar_margin, -1e-12);
    }
}
