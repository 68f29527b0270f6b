#pragma once

// The three normalized gradient shrinking solitons with vanishing Weyl tensor:
// Ric + Hess f = g/2 and R + |grad f|^2 - f = 0. Each model is evaluated in
// closed form in an adapted orthonormal frame.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "confsol/curvature_algebra.hpp"
#include "confsol/random.hpp"

namespace confsol {

enum class SolitonKind { gaussian, round_sphere, cylinder };

inline const char* to_string(SolitonKind k) {
    switch (k) {
        case SolitonKind::gaussian: return "gaussian";
        case SolitonKind::round_sphere: return "round_sphere";
        case SolitonKind::cylinder: return "cylinder";
    }
    return "unknown";
}

inline SolitonKind parse_soliton_kind(std::string_view name) {
    if (name == "gaussian") return SolitonKind::gaussian;
    if (name == "round_sphere") return SolitonKind::round_sphere;
    if (name == "cylinder") return SolitonKind::cylinder;
    throw std::invalid_argument("unsupported soliton kind: " + std::string(name));
}

/// f = quadratic * |x|^2 (or s^2 on the line factor) + constant.
struct SolitonModel {
    SolitonKind kind = SolitonKind::gaussian;
    std::size_t n = 0;
    double radius = 0.0;  // radius of the sphere factor; 0 for the Gaussian
    double quadratic = 0.0;
    double constant = 0.0;
};

/// Gaussian: ambient = x in R^n. Round sphere: ambient = y in R^(n+1), |y| = r.
/// Cylinder: ambient = y in R^n on S^(n-1)(r), axial = line coordinate s.
struct ModelPoint {
    std::vector<double> ambient;
    double axial = 0.0;
};

inline SolitonModel make_model(SolitonKind kind, std::size_t n) {
    if (n < 4) throw std::invalid_argument("make_model: n must be at least 4");
    const double nd = static_cast<double>(n);
    SolitonModel m;
    m.kind = kind;
    m.n = n;
    switch (kind) {
        case SolitonKind::gaussian:
            m.quadratic = 0.25;
            break;
        case SolitonKind::round_sphere:
            // (n-1)/r^2 = 1/2; grad f = 0 forces f = R = n/2
            m.radius = std::sqrt(2.0 * (nd - 1.0));
            m.constant = 0.5 * nd;
            break;
        case SolitonKind::cylinder:
            // S^(n-1)(r) x R with (n-2)/r^2 = 1/2; R = (n-1)/2 fixes the constant at s = 0
            m.radius = std::sqrt(2.0 * (nd - 2.0));
            m.quadratic = 0.25;
            m.constant = 0.5 * (nd - 1.0);
            break;
        default:
            throw std::invalid_argument("make_model: unsupported kind");
    }
    return m;
}

/// Ricci eigenvalues in the adapted frame; for the cylinder the axial
/// direction comes first.
inline std::vector<double> ricci_frame(const SolitonModel& m) {
    const double nd = static_cast<double>(m.n);
    std::vector<double> ric(m.n, 0.0);
    switch (m.kind) {
        case SolitonKind::gaussian: break;
        case SolitonKind::round_sphere:
            std::fill(ric.begin(), ric.end(), (nd - 1.0) / (m.radius * m.radius));
            break;
        case SolitonKind::cylinder:
            std::fill(ric.begin() + 1, ric.end(), (nd - 2.0) / (m.radius * m.radius));
            break;
    }
    return ric;
}

inline RicciSpectrum ricci_spectrum(const SolitonModel& m) { return RicciSpectrum(ricci_frame(m)); }

inline double scalar_curvature(const SolitonModel& m) {
    double s = 0.0;
    for (double v : ricci_frame(m)) s += v;
    return s;
}

/// Hess f in the adapted frame (diagonal, same ordering as ricci_frame).
inline std::vector<double> hessian_frame(const SolitonModel& m, const ModelPoint&) {
    std::vector<double> h(m.n, 0.0);
    switch (m.kind) {
        case SolitonKind::gaussian: std::fill(h.begin(), h.end(), 2.0 * m.quadratic); break;
        case SolitonKind::round_sphere: break;
        case SolitonKind::cylinder: h[0] = 2.0 * m.quadratic; break;
    }
    return h;
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::size_t ambient_dimension(const SolitonModel& m) {
    return m.kind == SolitonKind::round_sphere ? m.n + 1 : m.n;
}

inline void require_point(const SolitonModel& m, const ModelPoint& p) {
    if (p.ambient.size() != ambient_dimension(m)) throw std::invalid_argument("model point has wrong dimension");
}

/// Unit-speed great circle on the sphere of radius r through p towards x.
struct SphereArc {
    std::vector<double> start_unit;
    std::vector<double> tangent_unit;
    double radius = 0.0;
    double angle = 0.0;

    SphereArc(std::span<const double> p, std::span<const double> x, double r) : radius(r) {
        const std::size_t dim = p.size();
        start_unit.resize(dim);
        const double pn = std::sqrt(dot(p, p));
        const double xn = std::sqrt(dot(x, x));
        for (std::size_t i = 0; i < dim; ++i) start_unit[i] = p[i] / pn;
        const double c = std::clamp(dot(start_unit, x) / xn, -1.0, 1.0);
        tangent_unit.assign(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) tangent_unit[i] = x[i] / xn - c * start_unit[i];
        double tn = std::sqrt(dot(tangent_unit, tangent_unit));
        if (tn < 1e-12) {
            // coincident or antipodal: any direction orthogonal to p
            for (std::size_t e = 0; e < dim && tn < 0.5; ++e) {
                std::fill(tangent_unit.begin(), tangent_unit.end(), 0.0);
                tangent_unit[e] = 1.0;
                const double proj = start_unit[e];
                for (std::size_t i = 0; i < dim; ++i) tangent_unit[i] -= proj * start_unit[i];
                tn = std::sqrt(dot(tangent_unit, tangent_unit));
            }
        }
        for (auto& v : tangent_unit) v /= tn;
        angle = std::acos(c);
    }

    double length() const { return radius * angle; }

    std::vector<double> at(double arc) const {
        const double phi = arc / radius;
        std::vector<double> y(start_unit.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = radius * (std::cos(phi) * start_unit[i] + std::sin(phi) * tangent_unit[i]);
        return y;
    }
};

}  // namespace detail

inline double potential(const SolitonModel& m, const ModelPoint& p) {
    detail::require_point(m, p);
    switch (m.kind) {
        case SolitonKind::gaussian: return m.quadratic * detail::dot(p.ambient, p.ambient) + m.constant;
        case SolitonKind::round_sphere: return m.constant;
        case SolitonKind::cylinder: return m.quadratic * p.axial * p.axial + m.constant;
    }
    return 0.0;
}

/// Components of grad f in the adapted frame (ambient coordinates for the
/// Gaussian; axial component only for the cylinder).
inline std::vector<double> potential_gradient(const SolitonModel& m, const ModelPoint& p) {
    detail::require_point(m, p);
    std::vector<double> g(m.n, 0.0);
    switch (m.kind) {
        case SolitonKind::gaussian:
            for (std::size_t i = 0; i < m.n; ++i) g[i] = 2.0 * m.quadratic * p.ambient[i];
            break;
        case SolitonKind::round_sphere: break;
        case SolitonKind::cylinder: g[0] = 2.0 * m.quadratic * p.axial; break;
    }
    return g;
}

inline double gradient_norm(const SolitonModel& m, const ModelPoint& p) {
    const auto g = potential_gradient(m, p);
    return std::sqrt(detail::dot(g, g));
}

struct SolitonResidual {
    double tensor_residual = 0.0;  // max |Ric + Hess f - g/2| over frame entries
    double scalar_residual = 0.0;  // |R + |grad f|^2 - f|
};

inline SolitonResidual soliton_residual(const SolitonModel& m, const ModelPoint& p) {
    const auto ric = ricci_frame(m);
    const auto hess = hessian_frame(m, p);
    SolitonResidual r;
    // frame is a Ricci and Hessian eigenframe, so off-diagonal entries are 0
    for (std::size_t i = 0; i < m.n; ++i) r.tensor_residual = std::max(r.tensor_residual, std::abs(ric[i] + hess[i] - 0.5));
    const auto g = potential_gradient(m, p);
    r.scalar_residual = std::abs(scalar_curvature(m) + detail::dot(g, g) - potential(m, p));
    return r;
}

/// Length of the minimizing geodesic.
inline double distance(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x) {
    detail::require_point(m, p);
    detail::require_point(m, x);
    switch (m.kind) {
        case SolitonKind::gaussian: {
            double s = 0.0;
            for (std::size_t i = 0; i < m.n; ++i) s += (x.ambient[i] - p.ambient[i]) * (x.ambient[i] - p.ambient[i]);
            return std::sqrt(s);
        }
        case SolitonKind::round_sphere: return detail::SphereArc(p.ambient, x.ambient, m.radius).length();
        case SolitonKind::cylinder: {
            const double arc = detail::SphereArc(p.ambient, x.ambient, m.radius).length();
            return std::hypot(arc, x.axial - p.axial);
        }
    }
    return 0.0;
}

/// Point at arclength tau along the unit-speed minimizing geodesic from p to x.
inline ModelPoint geodesic_point(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x, double tau) {
    const double d = distance(m, p, x);
    const double frac = d > 0.0 ? tau / d : 0.0;
    ModelPoint out;
    switch (m.kind) {
        case SolitonKind::gaussian:
            out.ambient.resize(m.n);
            for (std::size_t i = 0; i < m.n; ++i) out.ambient[i] = p.ambient[i] + frac * (x.ambient[i] - p.ambient[i]);
            break;
        case SolitonKind::round_sphere: out.ambient = detail::SphereArc(p.ambient, x.ambient, m.radius).at(tau); break;
        case SolitonKind::cylinder: {
            detail::SphereArc arc(p.ambient, x.ambient, m.radius);
            out.ambient = arc.at(frac * arc.length());
            out.axial = p.axial + frac * (x.axial - p.axial);
            break;
        }
    }
    return out;
}

/// Hess f(gamma', gamma') along the unit-speed geodesic, i.e. h''.
inline double geodesic_hessian(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x) {
    const double d = distance(m, p, x);
    switch (m.kind) {
        case SolitonKind::gaussian: return 2.0 * m.quadratic;
        case SolitonKind::round_sphere: return 0.0;
        case SolitonKind::cylinder: {
            if (d == 0.0) return 0.0;
            const double axial_speed = (x.axial - p.axial) / d;
            return 2.0 * m.quadratic * axial_speed * axial_speed;
        }
    }
    return 0.0;
}

struct HessBound {
    double margin = 0.0;                      // 1/2 - largest Hess f eigenvalue along the geodesic
    double geodesic_margin = 0.0;             // 1/2 - largest h''
    std::vector<double> direction_margins;    // 1/2 - Hess f per frame direction (minimum over samples)
};

inline HessBound hess_bound_check(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x,
                                  std::size_t samples = 16) {
    const double d = distance(m, p, x);
    HessBound out;
    out.direction_margins.assign(m.n, 0.5);
    out.margin = 0.5;
    const std::size_t count = std::max<std::size_t>(samples, 2);
    for (std::size_t s = 0; s < count; ++s) {
        const double tau = d * static_cast<double>(s) / static_cast<double>(count - 1);
        const auto point = geodesic_point(m, p, x, tau);
        const auto hess = hessian_frame(m, point);
        for (std::size_t i = 0; i < m.n; ++i) {
            out.direction_margins[i] = std::min(out.direction_margins[i], 0.5 - hess[i]);
            out.margin = std::min(out.margin, 0.5 - hess[i]);
        }
    }
    out.geodesic_margin = 0.5 - geodesic_hessian(m, p, x);
    return out;
}

struct GrowthMargins {
    double f_margin = 0.0;        // d^2/4 + |grad f|(p) d + |f|(p) - f(x)
    double curv_margin = 0.0;     // exp(a (d^2 + 1)) - max |R_ijkl|
    double scalar_margin = 0.0;   // f(x) - R
    double a_used = 0.0;
};

inline double max_riemann_component(const SolitonModel& m) { return riemann_from_spectrum(ricci_spectrum(m)).max_abs(); }

inline GrowthMargins growth_bound_check(const SolitonModel& m, const ModelPoint& p, const ModelPoint& x, double a) {
    const double d = distance(m, p, x);
    GrowthMargins g;
    g.f_margin = 0.25 * d * d + gradient_norm(m, p) * d + std::abs(potential(m, p)) - potential(m, x);
    g.curv_margin = std::exp(a * (d * d + 1.0)) - max_riemann_component(m);
    g.scalar_margin = potential(m, x) - scalar_curvature(m);
    g.a_used = a;
    return g;
}

inline constexpr std::array<double, 3> growth_exponent_menu{0.25, 0.5, 1.0};

struct GrowthSummary {
    double min_f_margin = 0.0;
    double min_curv_margin = 0.0;
    double min_scalar_margin = 0.0;
    double a_used = 0.0;
    bool a_found = false;
};

/// Picks the smallest exponent from the menu for which the curvature bound
/// holds on every pair, and reports the worst margins at that exponent.
inline GrowthSummary growth_bound_check(const SolitonModel& m,
                                        std::span<const std::pair<ModelPoint, ModelPoint>> pairs) {
    GrowthSummary best;
    for (double a : growth_exponent_menu) {
        GrowthSummary s;
        s.a_used = a;
        s.min_f_margin = s.min_curv_margin = s.min_scalar_margin = std::numeric_limits<double>::infinity();
        for (const auto& [p, x] : pairs) {
            const auto g = growth_bound_check(m, p, x, a);
            s.min_f_margin = std::min(s.min_f_margin, g.f_margin);
            s.min_curv_margin = std::min(s.min_curv_margin, g.curv_margin);
            s.min_scalar_margin = std::min(s.min_scalar_margin, g.scalar_margin);
        }
        s.a_found = s.min_curv_margin >= 0.0;
        best = s;
        if (s.a_found) break;
    }
    return best;
}

/// Random point: uniform cube for flat directions, normalized cube sample on spheres.
inline ModelPoint sample_point(const SolitonModel& m, Rng& rng, double spread) {
    ModelPoint p;
    auto sphere = [&](std::size_t dim) {
        std::vector<double> v(dim);
        double norm = 0.0;
        while (norm < 1e-3) {
            for (auto& c : v) c = rng.uniform(-1.0, 1.0);
            norm = std::sqrt(detail::dot(v, v));
        }
        for (auto& c : v) c *= m.radius / norm;
        return v;
    };
    switch (m.kind) {
        case SolitonKind::gaussian:
            p.ambient.resize(m.n);
            for (auto& c : p.ambient) c = rng.uniform(-spread, spread);
            break;
        case SolitonKind::round_sphere: p.ambient = sphere(m.n + 1); break;
        case SolitonKind::cylinder:
            p.ambient = sphere(m.n);
            p.axial = rng.uniform(-spread, spread);
            break;
    }
    return p;
}

}  // namespace confsol
