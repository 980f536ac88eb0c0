#ifndef MCF4_GEOMETRY_HPP
#define MCF4_GEOMETRY_HPP

#include <optional>
#include <vector>

#include "mcf4/kahler.hpp"
#include "mcf4/surface.hpp"

namespace mcf4 {

/// Orthonormal oriented frame adapted to the surface: (e1,e2) span the
/// discrete tangent plane, (v1,v2) its orthogonal complement, and
/// det(e1,e2,v1,v2) = +1.
struct AdaptedFrame {
    Vec4 e1, e2, v1, v2;

    /// Largest deviation of the frame Gram matrix from the identity.
    double gram_error() const;
    double determinant() const;
};

struct GeometryOptions {
    /// Mesh-collapse guard: det g <= degenerate_tol raises DegenerateMetric.
    /// When unset, 1e-12 times the squared mean area element of the surface
    /// itself is used.
    std::optional<double> degenerate_tol;
};

/// Per-point output of the full geometry pass. The second fundamental form
/// is stored in the adapted orthonormal frame, so |A|^2 and H are plain
/// component sums.
struct GeometryField {
    std::size_t nu = 0, nv = 0;
    std::vector<Mat2> g;
    std::vector<Mat2> inv_g;
    std::vector<double> area_element; // sqrt(det g)
    std::vector<AdaptedFrame> frame;
    std::vector<Mat2> h1, h2;         // adapted-frame second fundamental form
    std::vector<Vec4> mean_curvature; // H, points inward for a shrinking sphere
    std::vector<double> norm_sq_a;    // |A|^2
    std::vector<double> norm_sq_h;    // |H|^2
    std::vector<double> cos_alpha;
    std::vector<double> norm_sq_nabla_j; // |nabla-bar J|^2
    /// true where second-derivative quantities are defined (interior of a
    /// patch, everywhere on a torus)
    std::vector<char> interior;

    std::size_t index(std::size_t i, std::size_t j) const { return i * nv + j; }
};

/// Everything at once; the individual operations below are thin wrappers.
GeometryField compute_geometry(const SurfaceGrid& surface,
                               const KahlerStructure& structure,
                               const GeometryOptions& opts = {});

/// First fundamental form only: g, its inverse and sqrt(det g) everywhere
/// (one-sided stencils on a patch boundary).
struct MetricField {
    std::vector<Mat2> g;
    std::vector<Mat2> inv_g;
    std::vector<double> area_element;
};
MetricField first_fundamental_form(const SurfaceGrid& surface,
                                   const GeometryOptions& opts = {});

AdaptedFrame build_adapted_frame(const SurfaceGrid& surface, std::size_t i,
                                 std::size_t j, const GeometryOptions& opts = {});

std::vector<double> kahler_angle(const SurfaceGrid& surface,
                                 const KahlerStructure& structure,
                                 const GeometryOptions& opts = {});

/// Four-term expression of |nabla-bar J|^2 from adapted-frame h; satisfies
/// the pointwise bound |nabla-bar J|^2 >= |H|^2 / 2.
double nabla_j_squared_from_h(const Mat2& h1, const Mat2& h2);

/// Discrete Laplace-Beltrami in divergence form,
/// (1/sqrt g) d_i (sqrt g g^{ij} d_j f); entries valid at interior points.
std::vector<double> laplace_beltrami(const SurfaceGrid& surface,
                                     const std::vector<double>& f,
                                     const GeometryOptions& opts = {});

/// Projection of F - X0 onto the normal bundle, per point.
std::vector<Vec4> position_normal_component(const SurfaceGrid& surface,
                                            const GeometryField& geom,
                                            const Vec4& x0);

/// Midpoint quadrature of f against the area measure; interior points only
/// on a patch.
double integrate_scalar(const SurfaceGrid& surface, const GeometryField& geom,
                        const std::vector<double>& f);

/// Total area by the same rule (f = 1).
double surface_area(const SurfaceGrid& surface, const GeometryField& geom);

/// Minimum physical edge length of the mesh, min over points of
/// sqrt(g_11) hu and sqrt(g_22) hv. This is the scale that enters the
/// parabolic step-size restriction.
double min_physical_spacing(const SurfaceGrid& surface, const GeometryField& geom);

} // namespace mcf4

#endif
