#include "mcf4/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mcf4 {

double Cutoff::value(double distance) const {
    if (!active()) return 1.0;
    if (distance <= radius) return 1.0;
    if (distance >= 2.0 * radius) return 0.0;
    const double x = (distance - radius) / radius; // in (0,1)
    const double x3 = x * x * x;
    return 1.0 - (10.0 * x3 - 15.0 * x3 * x + 6.0 * x3 * x * x);
}

double backward_heat_weight(const Vec4& x, const KernelParams& params, double t) {
    const double gap = params.t0 - t;
    if (!(gap > 0.0))
        throw TimeOrder("backward heat kernel requires t < t0 (t = " +
                        std::to_string(t) + ", t0 = " + std::to_string(params.t0) + ")");
    const double d2 = (x - params.x0).squaredNorm();
    double w = std::exp(-d2 / (4.0 * gap)) / (4.0 * std::numbers::pi * gap);
    if (params.cutoff.active()) w *= params.cutoff.value(std::sqrt(d2));
    return w;
}

double phi_functional(const SurfaceGrid& surface, const GeometryField& geom,
                      const KernelParams& params) {
    const double t = surface.time;
    if (!(t < params.t0)) throw TimeOrder("Phi requires surface time < t0");
    double acc = 0.0;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            acc += backward_heat_weight(surface.positions[idx], params, t) *
                   geom.area_element[idx];
        }
    return acc * surface.hu * surface.hv;
}

double phi_functional(const SurfaceGrid& surface, const KernelParams& params) {
    return phi_functional(surface,
                          compute_geometry(surface, KahlerStructure::standard()),
                          params);
}

double psi_functional(const SurfaceGrid& surface, const GeometryField& geom,
                      const KernelParams& params, double r0_curvature,
                      double eps_symp) {
    const double t = surface.time;
    if (!(t < params.t0)) throw TimeOrder("Psi requires surface time < t0");

    double min_cos = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j)
            if (surface.is_interior(i, j))
                min_cos = std::min(min_cos, geom.cos_alpha[surface.index(i, j)]);
    if (!(min_cos > eps_symp))
        throw NotSymplectic("Psi requires a symplectic surface; min cos(alpha) = " +
                            std::to_string(min_cos));

    const double scale = std::exp(r0_curvature * t);
    double acc = 0.0;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            const double v = scale * geom.cos_alpha[idx];
            acc += backward_heat_weight(surface.positions[idx], params, t) *
                   geom.area_element[idx] / v;
        }
    return acc * surface.hu * surface.hv;
}

double psi_functional(const SurfaceGrid& surface, const KernelParams& params,
                      double r0_curvature, double eps_symp) {
    return psi_functional(surface,
                          compute_geometry(surface, KahlerStructure::standard()),
                          params, r0_curvature, eps_symp);
}

namespace {

void finish_profile(DensityProfile& profile) {
    const std::size_t n = profile.values.size();
    if (n >= 2) {
        // linear extrapolation in the radius to rho -> 0 from the two
        // smallest radii (first-order convergence assumption)
        const double r1 = profile.radii[n - 2], r2 = profile.radii[n - 1];
        const double v1 = profile.values[n - 2], v2 = profile.values[n - 1];
        profile.extrapolated =
            r1 != r2 ? v2 + (v1 - v2) * (0.0 - r2) / (r1 - r2) : v2;
    } else if (n == 1) {
        profile.extrapolated = profile.values[0];
    }
    if (n >= 3) {
        const double a = profile.values[n - 3], b = profile.values[n - 2],
                     c = profile.values[n - 1];
        const double mx = std::max({a, b, c}), mn = std::min({a, b, c});
        const double mean = (a + b + c) / 3.0;
        profile.converged = mean != 0.0 && (mx - mn) < 0.05 * std::abs(mean);
    }
}

std::vector<double> sorted_decreasing(std::vector<double> radii) {
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    return radii;
}

} // namespace

DensityProfile gaussian_density_at(const FlowTrace& trace, const Vec4& x0,
                                   double t_singular,
                                   const std::vector<double>& radii,
                                   const Cutoff& cutoff) {
    DensityProfile profile;
    profile.radii = sorted_decreasing(radii);
    for (double r : profile.radii) {
        const double t = t_singular - r * r;
        SurfaceGrid snap;
        try {
            snap = surface_at(trace, t);
        } catch (const OutOfTraceRange& e) {
            throw InsufficientTrace(
                "trace does not cover t = T - r^2 for radius " +
                std::to_string(r) + ": " + e.what());
        }
        KernelParams params{x0, t_singular, cutoff};
        profile.values.push_back(phi_functional(snap, params));
    }
    finish_profile(profile);
    return profile;
}

DensityProfile area_ratio_density(const std::vector<WeightedPoint>& support,
                                  const Vec4& xi,
                                  const std::vector<double>& radii) {
    DensityProfile profile;
    profile.radii = sorted_decreasing(radii);
    if (profile.radii.empty()) throw ValidationError("no radii given");

    const double r_min = profile.radii.back();
    double smallest_mass = 0.0;
    for (const auto& wp : support)
        if ((wp.position - xi).norm() < r_min) smallest_mass += wp.weight;
    if (!(smallest_mass > 0.0))
        throw EmptyBall("no support inside the smallest ball (rho = " +
                        std::to_string(r_min) + ")");

    for (double rho : profile.radii) {
        double mass = 0.0;
        for (const auto& wp : support)
            if ((wp.position - xi).norm() < rho) mass += wp.weight;
        profile.values.push_back(mass / (std::numbers::pi * rho * rho));
    }
    // stationary-cone direction: values nonincreasing as rho decreases
    for (std::size_t k = 1; k < profile.values.size(); ++k)
        if (profile.values[k] > profile.values[k - 1] * (1.0 + 1e-2))
            profile.monotone_violation = true;
    finish_profile(profile);
    return profile;
}

DensityProfile area_ratio_density(const SurfaceGrid& surface,
                                  const GeometryField& geom, const Vec4& xi,
                                  const std::vector<double>& radii) {
    return area_ratio_density(quadrature_support(surface, geom), xi, radii);
}

std::vector<WeightedPoint> quadrature_support(const SurfaceGrid& surface,
                                              const GeometryField& geom) {
    std::vector<WeightedPoint> support;
    support.reserve(surface.size());
    const double cell = surface.hu * surface.hv;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            support.push_back(
                {surface.positions[idx], geom.area_element[idx] * cell});
        }
    return support;
}

} // namespace mcf4
