#ifndef MCF4_TESTS_SUPPORT_HPP
#define MCF4_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "mcf4/families.hpp"
#include "mcf4/geometry.hpp"
#include "mcf4/rescale.hpp"

namespace mcf4::testing {

inline constexpr double kPi = std::numbers::pi;

/// Generic graph-style surface builder over either topology.
/// For a torus the chart is [0, 2pi)^2; for a patch, [-extent, extent]^2.
inline SurfaceGrid make_chart_surface(
    Topology topo, std::size_t nu, std::size_t nv,
    const std::function<Vec4(double, double)>& f, double extent = 1.0) {
    double hu, hv, u0, v0;
    if (topo == Topology::Torus) {
        hu = 2.0 * kPi / static_cast<double>(nu);
        hv = 2.0 * kPi / static_cast<double>(nv);
        u0 = v0 = 0.0;
    } else {
        hu = 2.0 * extent / static_cast<double>(nu - 1);
        hv = 2.0 * extent / static_cast<double>(nv - 1);
        u0 = v0 = -extent;
    }
    SurfaceGrid s(topo, nu, nv, hu, hv);
    if (topo == Topology::Torus) {
        // graph-style lift: periodic modulo lattice translations in (x1,x2)
        s.period_u = Vec4(2.0 * kPi, 0, 0, 0);
        s.period_v = Vec4(0, 2.0 * kPi, 0, 0);
    }
    for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j)
            s.at(i, j) = f(u0 + static_cast<double>(i) * hu,
                           v0 + static_cast<double>(j) * hv);
    return s;
}

/// Element of U(2) acting on R^4 = C^2: rotations within the z- and w-planes
/// composed with a complex mixing of z and w. Commutes with the standard J.
inline Mat4 unitary_motion(double a, double b, double c) {
    Mat4 r12 = Mat4::Identity();
    r12(0, 0) = std::cos(a); r12(0, 1) = -std::sin(a);
    r12(1, 0) = std::sin(a); r12(1, 1) = std::cos(a);
    Mat4 r34 = Mat4::Identity();
    r34(2, 2) = std::cos(b); r34(2, 3) = -std::sin(b);
    r34(3, 2) = std::sin(b); r34(3, 3) = std::cos(b);
    Mat4 mix = Mat4::Zero();
    mix(0, 0) = std::cos(c); mix(0, 2) = std::sin(c);
    mix(1, 1) = std::cos(c); mix(1, 3) = std::sin(c);
    mix(2, 0) = -std::sin(c); mix(2, 2) = std::cos(c);
    mix(3, 1) = -std::sin(c); mix(3, 3) = std::cos(c);
    return r12 * r34 * mix;
}

inline SurfaceGrid apply_motion(const SurfaceGrid& s, const Mat4& q,
                                const Vec4& shift) {
    SurfaceGrid out = s;
    for (auto& p : out.positions) p = q * p + shift;
    out.period_u = q * s.period_u;
    out.period_v = q * s.period_v;
    return out;
}

/// Area-uniform disc sampling of an affine 2-plane: polar rings with the
/// per-point weight equal to its share of the ring area. Oriented tangents
/// are constant.
inline void append_disc_cloud(RescaledCloud& cloud, const Vec4& center,
                              const Vec4& e1, const Vec4& e2, double radius,
                              int rings, double weight_factor = 1.0) {
    for (int k = 0; k < rings; ++k) {
        const double r_mid = radius * (static_cast<double>(k) + 0.5) /
                             static_cast<double>(rings);
        const double ring_area = kPi * radius * radius *
                                 (2.0 * static_cast<double>(k) + 1.0) /
                                 (static_cast<double>(rings) * rings);
        const int m = std::max(8, static_cast<int>(std::floor(
                                      2.0 * kPi * r_mid * rings / radius)));
        for (int t = 0; t < m; ++t) {
            const double phi = 2.0 * kPi * (static_cast<double>(t) + 0.5) /
                               static_cast<double>(m);
            RescaledCloud::Point p;
            p.position = center + r_mid * (std::cos(phi) * e1 + std::sin(phi) * e2);
            p.tangent.row(0) = e1;
            p.tangent.row(1) = e2;
            p.weight = weight_factor * ring_area / static_cast<double>(m);
            p.cos_alpha = 0.0;
            p.scale = 0.0;
            p.time = 0.0;
            cloud.points.push_back(p);
        }
    }
    cloud.ball_radius = std::max(cloud.ball_radius, radius + center.norm());
}

} // namespace mcf4::testing

#endif
