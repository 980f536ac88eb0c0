#ifndef MCF4_SURFACE_HPP
#define MCF4_SURFACE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "mcf4/errors.hpp"
#include "mcf4/types.hpp"

namespace mcf4 {

enum class Topology {
    Torus, ///< doubly periodic parameter grid
    Patch  ///< Dirichlet-pinned boundary ring, geometry on the interior
};

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Discretized immersion F : parameter grid -> R^4. Positions are stored
/// row-major, index = i * nv + j with i the u-axis and j the v-axis.
///
/// A torus immersion may close up only modulo a lattice translation (a graph
/// over the flat torus: F(u + period, v) = F(u, v) + period_u). The period
/// vectors make the wrap stencils act on the honest periodic lift.
struct SurfaceGrid {
    Topology topology = Topology::Torus;
    std::size_t nu = 0, nv = 0;
    double hu = 0.0, hv = 0.0;
    double time = 0.0;
    Vec4 period_u = Vec4::Zero();
    Vec4 period_v = Vec4::Zero();
    std::vector<Vec4> positions;

    SurfaceGrid() = default;
    SurfaceGrid(Topology topo, std::size_t nu_, std::size_t nv_, double hu_, double hv_);

    std::size_t size() const { return nu * nv; }
    std::size_t index(std::size_t i, std::size_t j) const { return i * nv + j; }

    Vec4& at(std::size_t i, std::size_t j) { return positions[index(i, j)]; }
    const Vec4& at(std::size_t i, std::size_t j) const { return positions[index(i, j)]; }

    /// Periodic wrap (torus) or clamped identity (patch callers never wrap).
    std::size_t wrap_u(long i) const;
    std::size_t wrap_v(long j) const;

    /// Position at (i, j) on the periodic lift: out-of-range torus indices
    /// wrap and pick up the corresponding period translations.
    Vec4 position_lifted(long i, long j) const;

    bool is_boundary(std::size_t i, std::size_t j) const {
        return topology == Topology::Patch &&
               (i == 0 || j == 0 || i + 1 == nu || j + 1 == nv);
    }

    /// Points where second-derivative geometry is defined: every point for a
    /// torus, the interior for a patch.
    bool is_interior(std::size_t i, std::size_t j) const {
        return !is_boundary(i, j);
    }

    void check_valid() const;
};

/// First-order parameter derivatives (d/du F, d/dv F) at a grid point.
/// Central differences at interior points, one-sided second order on a
/// patch boundary.
void first_derivatives(const SurfaceGrid& s, std::size_t i, std::size_t j,
                       Vec4& fu, Vec4& fv);

/// Second parameter derivatives; valid only at interior points.
void second_derivatives(const SurfaceGrid& s, std::size_t i, std::size_t j,
                        Vec4& fuu, Vec4& fuv, Vec4& fvv);

/// Scalar-field versions of the same stencils.
void scalar_gradient(const SurfaceGrid& s, const std::vector<double>& f,
                     std::size_t i, std::size_t j, double& fu, double& fv);

} // namespace mcf4

#endif
