#pragma once

#include "twocharge/error.hpp"
#include "twocharge/types.hpp"

namespace twocharge {

enum class Branch { retarded, advanced };

/// Below this value of |1 -/+ n.v_other| a kernel evaluation is rejected.
inline constexpr double kLightConeThreshold = 1e-9;

/// Present state of the charge feeling the field and the delayed state of the
/// charge producing it.
template <int D>
struct FieldEvalInputT {
  Eigen::Matrix<double, D, 1> r_self;
  Eigen::Matrix<double, D, 1> v_self;
  Eigen::Matrix<double, D, 1> r_other;
  Eigen::Matrix<double, D, 1> v_other;
  Branch branch = Branch::retarded;
};

/// Lorentz force on the self charge split as  f - coupling * a_other,
/// where a_other is the acceleration of the source charge at its delayed time.
template <int D>
struct ForceKernelT {
  Eigen::Matrix<double, D, 1> f;
  Eigen::Matrix<double, D, D> coupling;
};

using FieldEvalInput = FieldEvalInputT<3>;
using PlanarFieldEvalInput = FieldEvalInputT<2>;
using ForceKernel = ForceKernelT<3>;
using PlanarForceKernel = ForceKernelT<2>;

/// (r_self - r_other) / |r_self - r_other|, i.e. the direction from the
/// source's delayed position to the present position of the self charge.
Vec3 unit_separation(const FieldEvalInput& input);

/// Full three-dimensional kernel for charge-sign product `sign`.
ForceKernel force_kernel(const FieldEvalInput& input, int sign);

/// Planar kernel; throws Error(validation) if any z component is nonzero.
PlanarForceKernel planar_force_kernel(const FieldEvalInput& input, int sign);
PlanarForceKernel planar_force_kernel(const PlanarFieldEvalInput& input, int sign);

/// Dimension-generic entry used by the field assemblers (D = 2 or 3).
template <int D>
ForceKernelT<D> kernel(const FieldEvalInputT<D>& input, int sign);

/// gamma I + gamma^3 v v^T
Mat3 mass_matrix(const Vec3& v);
/// gamma^-1 (I - v v^T)
Mat3 mass_matrix_inverse(const Vec3& v);

template <int D>
Eigen::Matrix<double, D, D> mass_matrix_inverse(const Eigen::Matrix<double, D, 1>& v);

/// (1/2 + alpha) retarded + (1/2 - alpha) advanced
template <int D>
ForceKernelT<D> alpha_mix(const ForceKernelT<D>& retarded, const ForceKernelT<D>& advanced,
                          double alpha);

template <>
ForceKernelT<2> kernel<2>(const FieldEvalInputT<2>& input, int sign);
template <>
ForceKernelT<3> kernel<3>(const FieldEvalInputT<3>& input, int sign);
extern template Eigen::Matrix<double, 2, 2> mass_matrix_inverse<2>(const Eigen::Matrix<double, 2, 1>&);
extern template Eigen::Matrix<double, 3, 3> mass_matrix_inverse<3>(const Eigen::Matrix<double, 3, 1>&);
extern template ForceKernelT<2> alpha_mix<2>(const ForceKernelT<2>&, const ForceKernelT<2>&, double);
extern template ForceKernelT<3> alpha_mix<3>(const ForceKernelT<3>&, const ForceKernelT<3>&, double);

}  // namespace twocharge
