#ifndef MCF4_TYPES_HPP
#define MCF4_TYPES_HPP

#include <Eigen/Dense>

namespace mcf4 {

using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

} // namespace mcf4

#endif
