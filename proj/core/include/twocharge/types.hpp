#pragma once

#include <Eigen/Core>

namespace twocharge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Packed (r1, v1, r2, v2) layout used by the integrator.
using Vec12 = Eigen::Matrix<double, 12, 1>;

}  // namespace twocharge
