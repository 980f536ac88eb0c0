#ifndef MCF4_MONOTONICITY_HPP
#define MCF4_MONOTONICITY_HPP

#include <optional>
#include <vector>

#include "mcf4/flow.hpp"

namespace mcf4 {

/// Optional spatial cutoff: identically 1 on B_r(x0), 0 outside B_2r(x0),
/// quintic ramp in between. The flat ambient needs no cutoff; this exists to
/// exercise the plumbing.
struct Cutoff {
    double radius = 0.0; ///< 0 means no cutoff

    bool active() const { return radius > 0.0; }
    double value(double distance) const;
};

/// Backward heat kernel center (x0, t0) with optional cutoff.
struct KernelParams {
    Vec4 x0 = Vec4::Zero();
    double t0 = 0.0;
    Cutoff cutoff;
};

/// rho(X, x0, t, t0) = exp(-|X-x0|^2 / (4(t0-t))) / (4 pi (t0-t)), times the
/// cutoff when configured. Throws TimeOrder unless t < t0.
double backward_heat_weight(const Vec4& x, const KernelParams& params, double t);

/// Phi(x0, t0, t) = integral of phi(F) rho over the surface.
double phi_functional(const SurfaceGrid& surface, const GeometryField& geom,
                      const KernelParams& params);
double phi_functional(const SurfaceGrid& surface, const KernelParams& params);

/// Psi = integral of (1/v) phi rho with v = exp(R0 t) cos(alpha).
/// Throws NotSymplectic when min cos(alpha) over quadrature points is below
/// eps_symp.
double psi_functional(const SurfaceGrid& surface, const GeometryField& geom,
                      const KernelParams& params, double r0_curvature = 0.0,
                      double eps_symp = 1e-6);
double psi_functional(const SurfaceGrid& surface, const KernelParams& params,
                      double r0_curvature = 0.0, double eps_symp = 1e-6);

struct DensityProfile {
    std::vector<double> radii;  ///< decreasing
    std::vector<double> values;
    double extrapolated = 0.0;  ///< linear Richardson limit from the two smallest radii
    bool converged = false;     ///< spread of the last three values < 5%
    bool monotone_violation = false; ///< area-ratio profiles only
};

/// Gaussian density profile of the flow at the spacetime point (x0, T):
/// Phi(x0, T, T - r^2) on time-interpolated snapshots.
DensityProfile gaussian_density_at(const FlowTrace& trace, const Vec4& x0,
                                   double t_singular,
                                   const std::vector<double>& radii,
                                   const Cutoff& cutoff = {});

struct WeightedPoint {
    Vec4 position;
    double weight;
};

/// Area-ratio density mu(B_rho(xi)) / (pi rho^2) over the given radii.
/// For a stationary cone the values are nonincreasing as rho decreases;
/// violations beyond 1% are flagged.
DensityProfile area_ratio_density(const std::vector<WeightedPoint>& support,
                                  const Vec4& xi,
                                  const std::vector<double>& radii);
DensityProfile area_ratio_density(const SurfaceGrid& surface,
                                  const GeometryField& geom, const Vec4& xi,
                                  const std::vector<double>& radii);

/// Quadrature support of a surface: interior points with midpoint weights.
std::vector<WeightedPoint> quadrature_support(const SurfaceGrid& surface,
                                              const GeometryField& geom);

} // namespace mcf4

#endif
