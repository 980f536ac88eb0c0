#ifndef MCF4_KAHLER_HPP
#define MCF4_KAHLER_HPP

#include "mcf4/types.hpp"

namespace mcf4 {

/// Constant Kaehler structure on R^4 = C^2, identified via
/// z = x1 + i x2, w = x3 + i x4.
///
/// Conventions (fixed once for the whole project):
///   omega = dx1^dx2 + dx3^dx4,
///   J dx1 = dx2, J dx3 = dx4,
///   <X,Y> = omega(X, JY).
struct KahlerStructure {
    Mat4 omega;       // omega(X,Y) = X^T * omega * Y, antisymmetric
    Mat4 J;           // J^2 = -Id, orthogonal
    double orientation = 1.0;

    static KahlerStructure standard();

    double form(const Vec4& x, const Vec4& y) const {
        return x.dot(omega * y);
    }

    /// Largest violation of the defining identities: J^2 = -Id,
    /// J orthogonal, <X,Y> = omega(X,JY). Zero for a valid structure.
    double consistency_error() const;
};

/// Basis of the self-dual / anti-self-dual 2-forms on R^4 with comass one:
///   self-dual:      dx12+dx34, dx13+dx42, dx14+dx23
///   anti-self-dual: dx12-dx34, dx13-dx42, dx14-dx23
/// Evaluated on an oriented orthonormal plane basis, each lies in [-1,1].
Mat4 twistor_basis_form(int k, bool self_dual);

/// Coordinates of an oriented plane span(u,v) on the chosen chirality sphere:
/// (omega_I(u,v), omega_J(u,v), omega_K(u,v)). For orthonormal (u,v) this
/// vector has unit Euclidean norm on either sphere.
Vec3 twistor_coordinates(const Vec4& u, const Vec4& v, bool self_dual);

} // namespace mcf4

#endif
