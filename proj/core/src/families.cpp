#include "mcf4/families.hpp"

#include <cmath>
#include <numbers>

namespace mcf4 {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(Family f) {
    switch (f) {
    case Family::Plane: return "plane";
    case Family::CliffordTorus: return "cliffordTorus";
    case Family::AnalyticSphere: return "analyticSphere";
    case Family::HolomorphicPatch: return "holomorphicPatch";
    case Family::SymplecticGraph: return "symplecticGraph";
    default: return "lagrangianGraph";
    }
}

Family family_from_string(const std::string& s) {
    if (s == "plane") return Family::Plane;
    if (s == "cliffordTorus") return Family::CliffordTorus;
    if (s == "analyticSphere") return Family::AnalyticSphere;
    if (s == "holomorphicPatch") return Family::HolomorphicPatch;
    if (s == "symplecticGraph") return Family::SymplecticGraph;
    if (s == "lagrangianGraph") return Family::LagrangianGraph;
    throw ValidationError("unknown family '" + s + "'");
}

HolomorphicExpr holomorphic_expr_from_string(const std::string& s) {
    if (s == "z2") return HolomorphicExpr::ZSquared;
    if (s == "linear") return HolomorphicExpr::Linear;
    throw ValidationError("unknown holomorphic expression '" + s +
                          "' (expected z2 or linear)");
}

SurfaceGrid make_plane(double extent, std::size_t nu, std::size_t nv) {
    SurfaceGrid s(Topology::Patch, nu, nv,
                  2.0 * extent / static_cast<double>(nu - 1),
                  2.0 * extent / static_cast<double>(nv - 1));
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double u = -extent + static_cast<double>(i) * s.hu;
            const double v = -extent + static_cast<double>(j) * s.hv;
            s.at(i, j) = Vec4(u, v, 0.0, 0.0);
        }
    return s;
}

SurfaceGrid make_clifford_torus(double r0, std::size_t nu, std::size_t nv) {
    SurfaceGrid s(Topology::Torus, nu, nv, 2.0 * kPi / static_cast<double>(nu),
                  2.0 * kPi / static_cast<double>(nv));
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double u = static_cast<double>(i) * s.hu;
            const double v = static_cast<double>(j) * s.hv;
            s.at(i, j) = r0 * Vec4(std::cos(u), std::sin(u), std::cos(v), std::sin(v));
        }
    return s;
}

SurfaceGrid make_sphere_snapshot(double r, std::size_t nu, std::size_t nv) {
    // Interior rows i = 1..nu-2 carry cell-centered theta over (0, pi);
    // interior columns the same for phi over (0, 2pi). The boundary ring
    // extends the chart by one cell in closed form, so interior central
    // stencils are exact and interior midpoint quadrature covers the sphere.
    const double ht = kPi / static_cast<double>(nu - 2);
    const double hp = 2.0 * kPi / static_cast<double>(nv - 2);
    SurfaceGrid s(Topology::Patch, nu, nv, ht, hp);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double theta = (static_cast<double>(i) - 0.5) * ht;
            const double phi = (static_cast<double>(j) - 0.5) * hp;
            s.at(i, j) = r * Vec4(std::sin(theta) * std::cos(phi),
                                  std::sin(theta) * std::sin(phi),
                                  std::cos(theta), 0.0);
        }
    return s;
}

SurfaceGrid make_holomorphic_patch(HolomorphicExpr expr, std::size_t nu,
                                   std::size_t nv) {
    SurfaceGrid s(Topology::Patch, nu, nv, 2.0 / static_cast<double>(nu - 1),
                  2.0 / static_cast<double>(nv - 1));
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double u = -1.0 + static_cast<double>(i) * s.hu;
            const double v = -1.0 + static_cast<double>(j) * s.hv;
            if (expr == HolomorphicExpr::ZSquared)
                s.at(i, j) = Vec4(u, v, u * u - v * v, 2.0 * u * v);
            else
                s.at(i, j) = Vec4(u, v, u, v);
        }
    return s;
}

SurfaceGrid make_symplectic_graph(double eps, int p, int q, std::size_t nu,
                                  std::size_t nv) {
    if (!(eps >= 0.0) || eps >= 0.5)
        throw ValidationError("symplecticGraph requires 0 <= eps < 0.5");
    if (p < 1 || q < 1)
        throw ValidationError("symplecticGraph wavenumbers must be positive");
    SurfaceGrid s(Topology::Torus, nu, nv, 2.0 * kPi / static_cast<double>(nu),
                  2.0 * kPi / static_cast<double>(nv));
    s.period_u = Vec4(2.0 * kPi, 0, 0, 0);
    s.period_v = Vec4(0, 2.0 * kPi, 0, 0);
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double u = static_cast<double>(i) * s.hu;
            const double v = static_cast<double>(j) * s.hv;
            s.at(i, j) = Vec4(u, v, eps * std::sin(p * u), eps * std::cos(q * v));
        }
    return s;
}

SurfaceGrid make_lagrangian_graph(double eps, std::size_t nu, std::size_t nv) {
    if (!(eps >= 0.0) || eps >= 0.5)
        throw ValidationError("lagrangianGraph requires 0 <= eps < 0.5");
    SurfaceGrid s(Topology::Patch, nu, nv, 2.0 / static_cast<double>(nu - 1),
                  2.0 / static_cast<double>(nv - 1));
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            const double u = -1.0 + static_cast<double>(i) * s.hu;
            const double v = -1.0 + static_cast<double>(j) * s.hv;
            s.at(i, j) = Vec4(u, v, u, -v + eps * std::sin(kPi * u));
        }
    return s;
}

namespace {

FlowTrace analytic_shrinker_trace(double r0, double rate, std::size_t nu,
                                  std::size_t nv, std::size_t steps,
                                  std::size_t stride, double threshold_a2,
                                  bool sphere) {
    // r(t)^2 = r0^2 - rate * t, extinction at T = r0^2 / rate.
    FlowTrace trace;
    trace.structure = KahlerStructure::standard();
    trace.initially_symplectic = false;

    const double t_extinct = r0 * r0 / rate;
    // stop just past the |A|^2 threshold: |A|^2 = 2 / r^2
    const double r2_stop = 2.0 / threshold_a2;
    const double t_stop = (r0 * r0 - r2_stop) / rate;
    const double dt = t_stop / static_cast<double>(steps);

    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = dt * static_cast<double>(k);
        const double r = std::sqrt(r0 * r0 - rate * t);
        SurfaceGrid snap = sphere ? make_sphere_snapshot(r, nu, nv)
                                  : make_clifford_torus(r, nu, nv);
        snap.time = t;

        const GeometryField geom = compute_geometry(snap, trace.structure);
        double max_a2 = 0.0, max_h = 0.0, min_cos = 1.0;
        for (std::size_t idx = 0; idx < snap.size(); ++idx) {
            min_cos = std::min(min_cos, geom.cos_alpha[idx]);
            if (!geom.interior[idx]) continue;
            max_a2 = std::max(max_a2, geom.norm_sq_a[idx]);
            max_h = std::max(max_h, std::sqrt(geom.norm_sq_h[idx]));
        }
        trace.rows.push_back({t, k < steps ? dt : 0.0, surface_area(snap, geom),
                              max_a2, max_h, min_cos});
        if (k % stride == 0 || k == steps) trace.snapshots.push_back(snap);
        if (max_a2 > threshold_a2) break;
    }
    (void)t_extinct;
    return trace;
}

} // namespace

FlowTrace make_analytic_sphere_trace(double r0, std::size_t nu, std::size_t nv,
                                     std::size_t steps, std::size_t stride,
                                     double threshold_a2) {
    return analytic_shrinker_trace(r0, 4.0, nu, nv, steps, stride, threshold_a2,
                                   /*sphere=*/true);
}

FlowTrace make_analytic_clifford_trace(double r0, std::size_t nu, std::size_t nv,
                                       std::size_t steps, std::size_t stride,
                                       double threshold_a2) {
    return analytic_shrinker_trace(r0, 2.0, nu, nv, steps, stride, threshold_a2,
                                   /*sphere=*/false);
}

FlowTrace make_static_trace(const SurfaceGrid& surface, double t_end,
                            std::size_t nsnap) {
    FlowTrace trace;
    trace.structure = KahlerStructure::standard();
    const GeometryField geom = compute_geometry(surface, trace.structure);
    double max_a2 = 0.0, max_h = 0.0, min_cos = 1.0;
    for (std::size_t idx = 0; idx < surface.size(); ++idx) {
        min_cos = std::min(min_cos, geom.cos_alpha[idx]);
        if (!geom.interior[idx]) continue;
        max_a2 = std::max(max_a2, geom.norm_sq_a[idx]);
        max_h = std::max(max_h, std::sqrt(geom.norm_sq_h[idx]));
    }
    trace.initially_symplectic = min_cos > 0.0;
    const double area = surface_area(surface, geom);
    const double dt = t_end / static_cast<double>(nsnap - 1);
    for (std::size_t k = 0; k < nsnap; ++k) {
        SurfaceGrid snap = surface;
        snap.time = dt * static_cast<double>(k);
        trace.snapshots.push_back(snap);
        trace.rows.push_back({snap.time, k + 1 < nsnap ? dt : 0.0, area, max_a2,
                              max_h, min_cos});
    }
    return trace;
}

} // namespace mcf4
