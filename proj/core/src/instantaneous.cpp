#include "twocharge/instantaneous.hpp"

#include "assembly.hpp"

namespace twocharge {

namespace {

template <int D>
AccelPair instantaneous_impl(const StateVector& x, const SystemParams& params) {
  using namespace detail;
  ForceKernelT<D> k1 = zero_kernel<D>();
  ForceKernelT<D> k2 = zero_kernel<D>();
  const double wr = params.retarded_weight();
  const double wa = params.advanced_weight();
  for (const auto& [branch, w] : {std::pair{Branch::retarded, wr}, std::pair{Branch::advanced, wa}}) {
    if (w == 0.0) {
      continue;
    }
    accumulate<D>(k1, kernel<D>(field_input<D>(x.r1, x.v1, x.r2, x.v2, branch), params.sign), w);
    accumulate<D>(k2, kernel<D>(field_input<D>(x.r2, x.v2, x.r1, x.v1, branch), params.sign), w);
  }
  const auto acc = solve_coupled<D>(k1.f, k2.f, k1.coupling, k2.coupling,
                                    mass_matrix_inverse<D>(project<D>(x.v1)),
                                    mass_matrix_inverse<D>(project<D>(x.v2)), params.eta);
  return AccelPair{lift<D>(acc.a1), lift<D>(acc.a2)};
}

}  // namespace

AccelPair accel_linear_solve(const Vec3& f1, const Vec3& f2, const Mat3& m12, const Mat3& m21,
                             const Mat3& m11inv, const Mat3& m22inv, double eta) {
  const auto acc = detail::solve_coupled<3>(f1, f2, m12, m21, m11inv, m22inv, eta);
  return AccelPair{acc.a1, acc.a2};
}

AccelPair instantaneous_accelerations(const StateVector& x, const SystemParams& params) {
  validate_state(x);
  return x.planar() ? instantaneous_impl<2>(x, params) : instantaneous_impl<3>(x, params);
}

StateVector h0_field(const StateVector& x, const SystemParams& params) {
  const AccelPair acc = instantaneous_accelerations(x, params);
  return StateVector{x.v1, acc.a1, x.v2, acc.a2};
}

}  // namespace twocharge
