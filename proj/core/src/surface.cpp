#include "mcf4/surface.hpp"

#include <cmath>

namespace mcf4 {

std::string to_string(Topology t) {
    return t == Topology::Torus ? "torus" : "patch";
}

Topology topology_from_string(const std::string& s) {
    if (s == "torus") return Topology::Torus;
    if (s == "patch") return Topology::Patch;
    throw ValidationError("unknown topology '" + s + "'");
}

SurfaceGrid::SurfaceGrid(Topology topo, std::size_t nu_, std::size_t nv_,
                         double hu_, double hv_)
    : topology(topo), nu(nu_), nv(nv_), hu(hu_), hv(hv_),
      positions(nu_ * nv_, Vec4::Zero()) {
    check_valid();
}

void SurfaceGrid::check_valid() const {
    if (nu < 8 || nv < 8)
        throw ValidationError("grid resolution must be at least 8x8");
    if (!(hu > 0.0) || !(hv > 0.0))
        throw ValidationError("parameter spacings must be positive");
}

std::size_t SurfaceGrid::wrap_u(long i) const {
    const long n = static_cast<long>(nu);
    long r = i % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

std::size_t SurfaceGrid::wrap_v(long j) const {
    const long n = static_cast<long>(nv);
    long r = j % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

Vec4 SurfaceGrid::position_lifted(long i, long j) const {
    const long n_u = static_cast<long>(nu), n_v = static_cast<long>(nv);
    if (topology == Topology::Patch)
        return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    long wi = i % n_u, wj = j % n_v;
    long ki = (i - wi) / n_u, kj = (j - wj) / n_v;
    if (wi < 0) { wi += n_u; ki -= 1; }
    if (wj < 0) { wj += n_v; kj -= 1; }
    Vec4 p = at(static_cast<std::size_t>(wi), static_cast<std::size_t>(wj));
    if (ki != 0) p += static_cast<double>(ki) * period_u;
    if (kj != 0) p += static_cast<double>(kj) * period_v;
    return p;
}

namespace {

// One-sided second-order derivative at a patch edge, central otherwise.
template <typename Access>
auto axis_derivative(const Access& value, long k, long n, bool periodic, double h)
    -> decltype(value(0)) {
    if (periodic) return (value(k + 1) - value(k - 1)) / (2.0 * h);
    if (k == 0)
        return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * h);
    if (k == n - 1)
        return (3.0 * value(n - 1) - 4.0 * value(n - 2) + value(n - 3)) / (2.0 * h);
    return (value(k + 1) - value(k - 1)) / (2.0 * h);
}

} // namespace

void first_derivatives(const SurfaceGrid& s, std::size_t i, std::size_t j,
                       Vec4& fu, Vec4& fv) {
    const bool periodic = s.topology == Topology::Torus;
    const long nu = static_cast<long>(s.nu), nv = static_cast<long>(s.nv);
    const long li = static_cast<long>(i), lj = static_cast<long>(j);
    fu = axis_derivative([&](long k) -> Vec4 { return s.position_lifted(k, lj); },
                         li, nu, periodic, s.hu);
    fv = axis_derivative([&](long k) -> Vec4 { return s.position_lifted(li, k); },
                         lj, nv, periodic, s.hv);
}

void second_derivatives(const SurfaceGrid& s, std::size_t i, std::size_t j,
                        Vec4& fuu, Vec4& fuv, Vec4& fvv) {
    const long li = static_cast<long>(i), lj = static_cast<long>(j);
    const Vec4 c = s.at(i, j);
    fuu = (s.position_lifted(li + 1, lj) - 2.0 * c + s.position_lifted(li - 1, lj)) /
          (s.hu * s.hu);
    fvv = (s.position_lifted(li, lj + 1) - 2.0 * c + s.position_lifted(li, lj - 1)) /
          (s.hv * s.hv);
    fuv = (s.position_lifted(li + 1, lj + 1) - s.position_lifted(li + 1, lj - 1) -
           s.position_lifted(li - 1, lj + 1) + s.position_lifted(li - 1, lj - 1)) /
          (4.0 * s.hu * s.hv);
}

void scalar_gradient(const SurfaceGrid& s, const std::vector<double>& f,
                     std::size_t i, std::size_t j, double& fu, double& fv) {
    const bool periodic = s.topology == Topology::Torus;
    const long nu = static_cast<long>(s.nu), nv = static_cast<long>(s.nv);
    // scalar fields are genuinely periodic on a torus (no lattice shift)
    fu = axis_derivative([&](long k) { return f[s.index(s.wrap_u(k), j)]; },
                         static_cast<long>(i), nu, periodic, s.hu);
    fv = axis_derivative([&](long k) { return f[s.index(i, s.wrap_v(k))]; },
                         static_cast<long>(j), nv, periodic, s.hv);
}

} // namespace mcf4
