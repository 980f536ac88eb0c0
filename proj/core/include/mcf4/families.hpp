#ifndef MCF4_FAMILIES_HPP
#define MCF4_FAMILIES_HPP

#include <cstddef>
#include <string>

#include "mcf4/flow.hpp"

namespace mcf4 {

enum class Family {
    Plane,
    CliffordTorus,
    AnalyticSphere,
    HolomorphicPatch,
    SymplecticGraph,
    LagrangianGraph
};

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// Static plane {x3 = x4 = 0} over the chart [-extent, extent]^2 (patch).
SurfaceGrid make_plane(double extent, std::size_t nu, std::size_t nv);

/// Clifford torus r0 (cos u, sin u, cos v, sin v) over [0,2pi)^2 (torus).
/// Lagrangian; the closed-form singular flow has r(t)^2 = r0^2 - 2t.
SurfaceGrid make_clifford_torus(double r0, std::size_t nu, std::size_t nv);

/// Round sphere of radius r in R^3 x {0}, spherical chart with a closed-form
/// ghost ring as the patch boundary so that interior stencils and interior
/// quadrature cover the whole sphere. Quadrature/diagnostics only, never
/// PDE-stepped.
SurfaceGrid make_sphere_snapshot(double r, std::size_t nu, std::size_t nv);

enum class HolomorphicExpr { ZSquared, Linear };
HolomorphicExpr holomorphic_expr_from_string(const std::string& s);

/// Holomorphic graph w = z^2 or w = z over [-1,1]^2 (patch, pinned ring).
/// cos(alpha) = 1 identically; stationary under the flow.
SurfaceGrid make_holomorphic_patch(HolomorphicExpr expr, std::size_t nu,
                                   std::size_t nv);

/// Symplectic graph (u, v, eps sin(p u), eps cos(q v)) over the flat torus.
/// min cos(alpha) >= (1 - eps^2 p q) / ((1 + eps^2 p^2)(1 + eps^2 q^2))^(1/2).
SurfaceGrid make_symplectic_graph(double eps, int p, int q, std::size_t nu,
                                  std::size_t nv);

/// Lagrangian patch (u, v, u, -v + eps sin(pi u)) over [-1,1]^2:
/// cos(alpha) = 0 identically (also for the discrete stencils), with
/// nontrivial curvature for eps > 0. Out of the symplectic hypothesis; used
/// for flow-correctness tests.
SurfaceGrid make_lagrangian_graph(double eps, std::size_t nu, std::size_t nv);

/// Closed-form shrinking-sphere trace r(t) = sqrt(r0^2 - 4 t): snapshots on
/// a uniform time grid until max|A|^2 exceeds the threshold, diagnostics
/// computed from the discrete geometry of each snapshot.
FlowTrace make_analytic_sphere_trace(double r0, std::size_t nu, std::size_t nv,
                                     std::size_t steps = 800,
                                     std::size_t snapshot_stride = 2,
                                     double blowup_threshold_a2 = 1e6);

/// Closed-form Clifford trace r(t) = sqrt(r0^2 - 2 t), same conventions.
FlowTrace make_analytic_clifford_trace(double r0, std::size_t nu, std::size_t nv,
                                       std::size_t steps = 800,
                                       std::size_t snapshot_stride = 2,
                                       double blowup_threshold_a2 = 1e6);

/// Static trace of a surface with H = 0 (plane, holomorphic graph): nsnap
/// copies spanning [0, t_end].
FlowTrace make_static_trace(const SurfaceGrid& surface, double t_end,
                            std::size_t nsnap = 9);

} // namespace mcf4

#endif
