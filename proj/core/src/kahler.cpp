#include "mcf4/kahler.hpp"

#include <algorithm>
#include <cmath>

namespace mcf4 {

namespace {

Mat4 wedge_matrix(int i, int j, double sign) {
    Mat4 m = Mat4::Zero();
    m(i, j) = sign;
    m(j, i) = -sign;
    return m;
}

} // namespace

KahlerStructure KahlerStructure::standard() {
    KahlerStructure s;
    s.omega = wedge_matrix(0, 1, 1.0) + wedge_matrix(2, 3, 1.0);
    s.J = Mat4::Zero();
    // J maps the x1-axis to the x2-axis and the x3-axis to the x4-axis.
    s.J(1, 0) = 1.0;
    s.J(0, 1) = -1.0;
    s.J(3, 2) = 1.0;
    s.J(2, 3) = -1.0;
    s.orientation = 1.0;
    return s;
}

double KahlerStructure::consistency_error() const {
    double err = (J * J + Mat4::Identity()).cwiseAbs().maxCoeff();
    err = std::max(err, (J.transpose() * J - Mat4::Identity()).cwiseAbs().maxCoeff());
    // <X,Y> = omega(X,JY)  <=>  omega * J = Id.
    err = std::max(err, (omega * J - Mat4::Identity()).cwiseAbs().maxCoeff());
    return err;
}

Mat4 twistor_basis_form(int k, bool self_dual) {
    const double s = self_dual ? 1.0 : -1.0;
    switch (k) {
    case 0: return wedge_matrix(0, 1, 1.0) + wedge_matrix(2, 3, s);
    case 1: return wedge_matrix(0, 2, 1.0) + wedge_matrix(3, 1, s);
    default: return wedge_matrix(0, 3, 1.0) + wedge_matrix(1, 2, s);
    }
}

Vec3 twistor_coordinates(const Vec4& u, const Vec4& v, bool self_dual) {
    auto beta = [&](int i, int j) { return u(i) * v(j) - u(j) * v(i); };
    const double s = self_dual ? 1.0 : -1.0;
    return Vec3(beta(0, 1) + s * beta(2, 3),
                beta(0, 2) - s * beta(1, 3),
                beta(0, 3) + s * beta(1, 2));
}

} // namespace mcf4
