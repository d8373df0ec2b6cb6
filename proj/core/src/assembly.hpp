#pragma once

// Dimension-generic pieces shared by the instantaneous and delayed field
// assemblers. D = 2 is the planar fast path, D = 3 the general one.

#include <cmath>

#include <Eigen/LU>

#include "twocharge/error.hpp"
#include "twocharge/forces.hpp"
#include "twocharge/instantaneous.hpp"
#include "twocharge/units.hpp"

namespace twocharge::detail {

template <int D>
using VecD = Eigen::Matrix<double, D, 1>;
template <int D>
using MatD = Eigen::Matrix<double, D, D>;

template <int D>
VecD<D> project(const Vec3& v) {
  if constexpr (D == 3) {
    return v;
  } else {
    return v.head<2>();
  }
}

template <int D>
Vec3 lift(const VecD<D>& v) {
  if constexpr (D == 3) {
    return v;
  } else {
    return Vec3(v.x(), v.y(), 0.0);
  }
}

template <int D>
double one_norm(const MatD<D>& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

template <int D>
MatD<D> guarded_inverse(const MatD<D>& m, const char* what) {
  MatD<D> inv;
  bool invertible = false;
  m.computeInverseWithCheck(inv, invertible);
  if (!invertible || !inv.allFinite()) {
    throw Error(ErrorKind::degenerate, std::string(what) + " is singular");
  }
  const double cond = one_norm<D>(m) * one_norm<D>(inv);
  if (!(cond <= kMaxCompositeCondition)) {
    throw Error(ErrorKind::degenerate,
                std::string(what) + " condition number " + std::to_string(cond) + " exceeds limit");
  }
  return inv;
}

template <int D>
struct AccelPairD {
  VecD<D> a1;
  VecD<D> a2;
};

template <int D>
AccelPairD<D> solve_coupled(const VecD<D>& f1, const VecD<D>& f2, const MatD<D>& m12,
                            const MatD<D>& m21, const MatD<D>& m11inv, const MatD<D>& m22inv,
                            double eta) {
  const MatD<D> p1 = m11inv * m12;  // M11^-1 M12
  const MatD<D> p2 = m22inv * m21;  // M22^-1 M21
  const MatD<D> id = MatD<D>::Identity();
  const MatD<D> c1 = guarded_inverse<D>(id - (p1 * p2) / eta, "particle-1 composite matrix");
  const MatD<D> c2 = guarded_inverse<D>(id - (p2 * p1) / eta, "particle-2 composite matrix");
  const VecD<D> g1 = m11inv * f1;
  const VecD<D> g2 = m22inv * f2;
  AccelPairD<D> out;
  out.a1 = c1 * (g1 - p1 * g2) / eta;
  out.a2 = c2 * (g2 - p2 * g1 / eta);
  return out;
}

template <int D>
FieldEvalInputT<D> field_input(const Vec3& r_self, const Vec3& v_self, const Vec3& r_other,
                               const Vec3& v_other, Branch branch) {
  FieldEvalInputT<D> in;
  in.r_self = project<D>(r_self);
  in.v_self = project<D>(v_self);
  in.r_other = project<D>(r_other);
  in.v_other = project<D>(v_other);
  in.branch = branch;
  return in;
}

// Adds w * k into acc, skipping branches whose weight is exactly zero.
template <int D>
void accumulate(ForceKernelT<D>& acc, const ForceKernelT<D>& k, double w) {
  acc.f += w * k.f;
  acc.coupling += w * k.coupling;
}

template <int D>
ForceKernelT<D> zero_kernel() {
  return ForceKernelT<D>{VecD<D>::Zero(), MatD<D>::Zero()};
}

}  // namespace twocharge::detail
