#pragma once

#include "twocharge/types.hpp"
#include "twocharge/units.hpp"

namespace twocharge {

struct AccelPair {
  Vec3 a1 = Vec3::Zero();
  Vec3 a2 = Vec3::Zero();
};

/// Above this 1-norm condition number the coupled acceleration system is
/// treated as degenerate.
inline constexpr double kMaxCompositeCondition = 1e12;

/// Solves the coupled block system
///   eta a1 = m11inv (f1 - m12 a2)
///       a2 = m22inv (f2 - m21 a1)
/// through the closed-form composite inverses. Throws Error(degenerate).
AccelPair accel_linear_solve(const Vec3& f1, const Vec3& f2, const Mat3& m12, const Mat3& m21,
                             const Mat3& m11inv, const Mat3& m22inv, double eta);

/// Instantaneous vector field H^(0): every delayed quantity is replaced by
/// its present value. Returns dX/dt = (v1, a1, v2, a2) packed as a StateVector.
StateVector h0_field(const StateVector& x, const SystemParams& params);

/// Accelerations of H^(0) alone.
AccelPair instantaneous_accelerations(const StateVector& x, const SystemParams& params);

}  // namespace twocharge
