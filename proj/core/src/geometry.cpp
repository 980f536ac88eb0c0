#include "mcf4/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcf4 {

double AdaptedFrame::gram_error() const {
    Mat4 m;
    m.col(0) = e1;
    m.col(1) = e2;
    m.col(2) = v1;
    m.col(3) = v2;
    return (m.transpose() * m - Mat4::Identity()).cwiseAbs().maxCoeff();
}

double AdaptedFrame::determinant() const {
    Mat4 m;
    m.col(0) = e1;
    m.col(1) = e2;
    m.col(2) = v1;
    m.col(3) = v2;
    return m.determinant();
}

namespace {

double mean_area_element(const SurfaceGrid& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.nu; ++i)
        for (std::size_t j = 0; j < s.nv; ++j) {
            Vec4 fu, fv;
            first_derivatives(s, i, j, fu, fv);
            const double e = fu.squaredNorm(), g = fv.squaredNorm(),
                         f = fu.dot(fv);
            const double det = e * g - f * f;
            acc += det > 0.0 ? std::sqrt(det) : 0.0;
        }
    return acc / static_cast<double>(s.size());
}

double degenerate_threshold(const SurfaceGrid& s, const GeometryOptions& opts) {
    if (opts.degenerate_tol) return *opts.degenerate_tol;
    // det g is compared against (1e-12 * mean area element)^2 so the guard
    // triggers when the local area element collapses 12 orders of magnitude
    // below the surface's own scale.
    const double scale = 1e-12 * mean_area_element(s);
    return scale * scale;
}

// Gram-Schmidt construction of the adapted frame from the coordinate tangent
// vectors. Normal seeds run through the ambient axes in a fixed order with
// fallback when a projection degenerates, then v2 is flipped if needed so
// that det(e1,e2,v1,v2) = +1.
AdaptedFrame frame_from_tangents(const Vec4& fu, const Vec4& fv, double det_g,
                                 double tol) {
    if (!(det_g > tol))
        throw DegenerateMetric("degenerate metric: det g = " + std::to_string(det_g));
    AdaptedFrame fr;
    fr.e1 = fu.normalized();
    Vec4 t2 = fv - fv.dot(fr.e1) * fr.e1;
    fr.e2 = t2.normalized();

    int found = 0;
    for (int axis = 0; axis < 4 && found < 2; ++axis) {
        Vec4 w = Vec4::Unit(axis);
        w -= w.dot(fr.e1) * fr.e1;
        w -= w.dot(fr.e2) * fr.e2;
        if (found == 1) w -= w.dot(fr.v1) * fr.v1;
        const double n = w.norm();
        if (n < 1e-8) continue;
        (found == 0 ? fr.v1 : fr.v2) = w / n;
        ++found;
    }
    if (found < 2)
        throw DegenerateMetric("could not construct a normal frame");
    if (fr.determinant() < 0.0) fr.v2 = -fr.v2;
    return fr;
}

} // namespace

double nabla_j_squared_from_h(const Mat2& h1, const Mat2& h2) {
    const double t1 = h2(0, 0) + h1(0, 1);
    const double t2 = h2(1, 0) + h1(1, 1);
    const double t3 = h2(0, 1) - h1(0, 0);
    const double t4 = h2(1, 1) - h1(1, 0);
    return t1 * t1 + t2 * t2 + t3 * t3 + t4 * t4;
}

GeometryField compute_geometry(const SurfaceGrid& surface,
                               const KahlerStructure& structure,
                               const GeometryOptions& opts) {
    const std::size_t n = surface.size();
    GeometryField out;
    out.nu = surface.nu;
    out.nv = surface.nv;
    out.g.resize(n);
    out.inv_g.resize(n);
    out.area_element.assign(n, 0.0);
    out.frame.resize(n);
    out.h1.assign(n, Mat2::Zero());
    out.h2.assign(n, Mat2::Zero());
    out.mean_curvature.assign(n, Vec4::Zero());
    out.norm_sq_a.assign(n, 0.0);
    out.norm_sq_h.assign(n, 0.0);
    out.cos_alpha.assign(n, 0.0);
    out.norm_sq_nabla_j.assign(n, 0.0);
    out.interior.assign(n, 0);

    const double tol = degenerate_threshold(surface, opts);

    for (std::size_t i = 0; i < surface.nu; ++i) {
        for (std::size_t j = 0; j < surface.nv; ++j) {
            const std::size_t idx = surface.index(i, j);
            Vec4 fu, fv;
            first_derivatives(surface, i, j, fu, fv);

            Mat2 g;
            g(0, 0) = fu.squaredNorm();
            g(1, 1) = fv.squaredNorm();
            g(0, 1) = g(1, 0) = fu.dot(fv);
            const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
            if (!(det > tol))
                throw DegenerateMetric("degenerate metric at grid point (" +
                                       std::to_string(i) + "," + std::to_string(j) +
                                       "), det g = " + std::to_string(det));
            Mat2 inv;
            inv(0, 0) = g(1, 1) / det;
            inv(1, 1) = g(0, 0) / det;
            inv(0, 1) = inv(1, 0) = -g(0, 1) / det;

            out.g[idx] = g;
            out.inv_g[idx] = inv;
            out.area_element[idx] = std::sqrt(det);
            out.cos_alpha[idx] = structure.form(fu, fv) / out.area_element[idx];
            out.frame[idx] = frame_from_tangents(fu, fv, det, tol);

            if (!surface.is_interior(i, j)) continue;
            out.interior[idx] = 1;

            Vec4 fuu, fuv, fvv;
            second_derivatives(surface, i, j, fuu, fuv, fvv);

            // Coordinate components h^a_ij = <dd_ij F, v_a>, then transformed
            // into the adapted orthonormal tangent frame via the change of
            // basis e_a = B^i_a d_i F.
            const AdaptedFrame& fr = out.frame[idx];
            Mat2 B; // columns: frame vectors in coordinate basis
            const double len1 = std::sqrt(g(0, 0));
            B(0, 0) = 1.0 / len1;
            B(1, 0) = 0.0;
            // e2 = (fv - <fv,e1> e1)/|..| expressed in (fu, fv)
            const double proj = g(0, 1) / len1;
            const double len2 = std::sqrt(g(1, 1) - proj * proj);
            B(0, 1) = -proj / (len1 * len2);
            B(1, 1) = 1.0 / len2;

            for (int a = 0; a < 2; ++a) {
                const Vec4& nrm = a == 0 ? fr.v1 : fr.v2;
                Mat2 hc;
                hc(0, 0) = fuu.dot(nrm);
                hc(0, 1) = hc(1, 0) = fuv.dot(nrm);
                hc(1, 1) = fvv.dot(nrm);
                (a == 0 ? out.h1[idx] : out.h2[idx]) = B.transpose() * hc * B;
            }

            const Mat2& h1 = out.h1[idx];
            const Mat2& h2 = out.h2[idx];
            const double H1 = h1.trace(), H2 = h2.trace();
            out.mean_curvature[idx] = H1 * fr.v1 + H2 * fr.v2;
            out.norm_sq_h[idx] = H1 * H1 + H2 * H2;
            out.norm_sq_a[idx] = h1.squaredNorm() + h2.squaredNorm();
            out.norm_sq_nabla_j[idx] = nabla_j_squared_from_h(h1, h2);
        }
    }
    return out;
}

MetricField first_fundamental_form(const SurfaceGrid& surface,
                                   const GeometryOptions& opts) {
    const std::size_t n = surface.size();
    MetricField out;
    out.g.resize(n);
    out.inv_g.resize(n);
    out.area_element.assign(n, 0.0);
    const double tol = degenerate_threshold(surface, opts);
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            const std::size_t idx = surface.index(i, j);
            Vec4 fu, fv;
            first_derivatives(surface, i, j, fu, fv);
            Mat2 g;
            g(0, 0) = fu.squaredNorm();
            g(1, 1) = fv.squaredNorm();
            g(0, 1) = g(1, 0) = fu.dot(fv);
            const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
            if (!(det > tol))
                throw DegenerateMetric("degenerate metric at grid point (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
            Mat2 inv;
            inv(0, 0) = g(1, 1) / det;
            inv(1, 1) = g(0, 0) / det;
            inv(0, 1) = inv(1, 0) = -g(0, 1) / det;
            out.g[idx] = g;
            out.inv_g[idx] = inv;
            out.area_element[idx] = std::sqrt(det);
        }
    return out;
}

AdaptedFrame build_adapted_frame(const SurfaceGrid& surface, std::size_t i,
                                 std::size_t j, const GeometryOptions& opts) {
    Vec4 fu, fv;
    first_derivatives(surface, i, j, fu, fv);
    const double det =
        fu.squaredNorm() * fv.squaredNorm() - fu.dot(fv) * fu.dot(fv);
    return frame_from_tangents(fu, fv, det, degenerate_threshold(surface, opts));
}

std::vector<double> kahler_angle(const SurfaceGrid& surface,
                                 const KahlerStructure& structure,
                                 const GeometryOptions& opts) {
    const MetricField metric = first_fundamental_form(surface, opts);
    std::vector<double> out(surface.size(), 0.0);
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            const std::size_t idx = surface.index(i, j);
            Vec4 fu, fv;
            first_derivatives(surface, i, j, fu, fv);
            out[idx] = structure.form(fu, fv) / metric.area_element[idx];
        }
    return out;
}

std::vector<double> laplace_beltrami(const SurfaceGrid& surface,
                                     const std::vector<double>& f,
                                     const GeometryOptions& opts) {
    const MetricField metric = first_fundamental_form(surface, opts);
    const std::size_t n = surface.size();
    std::vector<double> out(n, 0.0);

    // sqrt(g) g^{ij} at every point; conservative fluxes use half-point
    // averages for the diagonal terms and centered nesting for the mixed ones.
    std::vector<double> w11(n), w12(n), w22(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double a = metric.area_element[idx];
        w11[idx] = a * metric.inv_g[idx](0, 0);
        w12[idx] = a * metric.inv_g[idx](0, 1);
        w22[idx] = a * metric.inv_g[idx](1, 1);
    }

    const bool periodic = surface.topology == Topology::Torus;
    for (std::size_t i = 0; i < surface.nu; ++i) {
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            // patch interior still needs both neighbors for the divergence
            if (!periodic && (i < 1 || j < 1 || i + 1 >= surface.nu || j + 1 >= surface.nv))
                continue;
            auto iu = [&](long d) {
                return periodic ? surface.wrap_u(static_cast<long>(i) + d)
                                : static_cast<std::size_t>(static_cast<long>(i) + d);
            };
            auto jv = [&](long d) {
                return periodic ? surface.wrap_v(static_cast<long>(j) + d)
                                : static_cast<std::size_t>(static_cast<long>(j) + d);
            };
            const std::size_t c = surface.index(i, j);
            const std::size_t e = surface.index(iu(1), j), w = surface.index(iu(-1), j);
            const std::size_t nn = surface.index(i, jv(1)), ss = surface.index(i, jv(-1));

            const double hu2 = surface.hu * surface.hu;
            const double hv2 = surface.hv * surface.hv;

            double acc = 0.0;
            acc += (0.5 * (w11[c] + w11[e]) * (f[e] - f[c]) -
                    0.5 * (w11[c] + w11[w]) * (f[c] - f[w])) / hu2;
            acc += (0.5 * (w22[c] + w22[nn]) * (f[nn] - f[c]) -
                    0.5 * (w22[c] + w22[ss]) * (f[c] - f[ss])) / hv2;

            // mixed terms d_u(sqrt g g^{12} d_v f) + d_v(sqrt g g^{12} d_u f)
            auto dv_at = [&](std::size_t ii, std::size_t jj) {
                double du, dv;
                scalar_gradient(surface, f, ii, jj, du, dv);
                return dv;
            };
            auto du_at = [&](std::size_t ii, std::size_t jj) {
                double du, dv;
                scalar_gradient(surface, f, ii, jj, du, dv);
                return du;
            };
            acc += (w12[e] * dv_at(iu(1), j) - w12[w] * dv_at(iu(-1), j)) /
                   (2.0 * surface.hu);
            acc += (w12[nn] * du_at(i, jv(1)) - w12[ss] * du_at(i, jv(-1))) /
                   (2.0 * surface.hv);

            out[c] = acc / metric.area_element[c];
        }
    }
    return out;
}

std::vector<Vec4> position_normal_component(const SurfaceGrid& surface,
                                            const GeometryField& geom,
                                            const Vec4& x0) {
    std::vector<Vec4> out(surface.size(), Vec4::Zero());
    for (std::size_t idx = 0; idx < surface.size(); ++idx) {
        const AdaptedFrame& fr = geom.frame[idx];
        const Vec4 d = surface.positions[idx] - x0;
        out[idx] = d.dot(fr.v1) * fr.v1 + d.dot(fr.v2) * fr.v2;
    }
    return out;
}

double integrate_scalar(const SurfaceGrid& surface, const GeometryField& geom,
                        const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            const std::size_t idx = surface.index(i, j);
            acc += f[idx] * geom.area_element[idx];
        }
    return acc * surface.hu * surface.hv;
}

double surface_area(const SurfaceGrid& surface, const GeometryField& geom) {
    double acc = 0.0;
    for (std::size_t i = 0; i < surface.nu; ++i)
        for (std::size_t j = 0; j < surface.nv; ++j) {
            if (!surface.is_interior(i, j)) continue;
            acc += geom.area_element[surface.index(i, j)];
        }
    return acc * surface.hu * surface.hv;
}

double min_physical_spacing(const SurfaceGrid& surface, const GeometryField& geom) {
    double m = std::numeric_limits<double>::max();
    for (std::size_t idx = 0; idx < surface.size(); ++idx) {
        m = std::min(m, std::sqrt(geom.g[idx](0, 0)) * surface.hu);
        m = std::min(m, std::sqrt(geom.g[idx](1, 1)) * surface.hv);
    }
    return m;
}

} // namespace mcf4
