#include "twocharge/units.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twocharge/error.hpp"

namespace twocharge {

SystemParams make_params(double eta, int sign, double alpha) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorKind::validation,
                "mass ratio eta must be positive and finite, got " + std::to_string(eta));
  }
  if (sign != -1 && sign != 1) {
    throw Error(ErrorKind::validation,
                "charge sign product must be -1 or +1, got " + std::to_string(sign));
  }
  if (!(std::abs(alpha) <= 0.5)) {
    throw Error(ErrorKind::validation,
                "alpha must lie in [-1/2, 1/2], got " + std::to_string(alpha));
  }
  return SystemParams{eta, sign, alpha};
}

Vec12 StateVector::pack() const {
  Vec12 out;
  out << r1, v1, r2, v2;
  return out;
}

StateVector StateVector::unpack(const Vec12& packed) {
  StateVector x;
  x.r1 = packed.segment<3>(0);
  x.v1 = packed.segment<3>(3);
  x.r2 = packed.segment<3>(6);
  x.v2 = packed.segment<3>(9);
  return x;
}

double StateVector::max_speed() const { return std::max(v1.norm(), v2.norm()); }

bool StateVector::planar() const noexcept {
  return r1.z() == 0.0 && v1.z() == 0.0 && r2.z() == 0.0 && v2.z() == 0.0;
}

void validate_state(const StateVector& x) {
  if (!x.pack().allFinite()) {
    throw Error(ErrorKind::domain, "state contains non-finite components");
  }
  if (x.v1.squaredNorm() >= 1.0 || x.v2.squaredNorm() >= 1.0) {
    throw Error(ErrorKind::superluminal, "particle speed must stay below c = 1");
  }
  if (x.r1 == x.r2) {
    throw Error(ErrorKind::singularity, "charges occupy the same point");
  }
}

ScaleFactors scale_factors(const PhysicalCharges& c) {
  if (c.q1 == 0.0 || c.q2 == 0.0) {
    throw Error(ErrorKind::validation, "charges must be nonzero");
  }
  if (!(c.m1 > 0.0) || !(c.m2 > 0.0)) {
    throw Error(ErrorKind::validation, "masses must be positive");
  }
  const double cc = si::speed_of_light;
  const double length = std::abs(c.q1) * std::abs(c.q2) /
                        (4.0 * std::numbers::pi * si::vacuum_permittivity * c.m2 * cc * cc);
  return ScaleFactors{length, length / cc};
}

DimensionlessSystem physical_to_dimensionless(const PhysicalCharges& charges,
                                              const PhysicalState& state,
                                              double alpha) {
  const ScaleFactors scale = scale_factors(charges);
  const int sign = (charges.q1 * charges.q2 > 0.0) ? 1 : -1;
  DimensionlessSystem out;
  out.params = make_params(charges.m1 / charges.m2, sign, alpha);
  out.scale = scale;
  out.state.r1 = state.r1 / scale.length;
  out.state.r2 = state.r2 / scale.length;
  out.state.v1 = state.v1 / si::speed_of_light;
  out.state.v2 = state.v2 / si::speed_of_light;
  return out;
}

PhysicalState dimensionless_to_physical(const StateVector& state, const ScaleFactors& scale) {
  PhysicalState out;
  out.r1 = state.r1 * scale.length;
  out.r2 = state.r2 * scale.length;
  out.v1 = state.v1 * si::speed_of_light;
  out.v2 = state.v2 * si::speed_of_light;
  return out;
}

StateVector circular_initial_condition(const SystemParams& params, double r0) {
  if (params.sign != -1) {
    throw Error(ErrorKind::validation, "circular orbit requires attracting charges (sign = -1)");
  }
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw Error(ErrorKind::validation, "orbit separation r0 must be positive and finite");
  }
  const double eta = params.eta;
  // eta * v1^2 / rho1 = v2^2 / rho2 = 1 / r0^2, rho1 + rho2 = r0, eta rho1 = rho2.
  const double speed1 = std::sqrt(1.0 / (eta * (1.0 + eta) * r0));
  const double speed2 = std::sqrt(eta / ((1.0 + eta) * r0));
  if (speed1 >= 1.0 || speed2 >= 1.0) {
    throw Error(ErrorKind::validation,
                "r0 = " + std::to_string(r0) + " gives a superluminal Newtonian orbit");
  }
  StateVector x;
  x.r1 = Vec3(-r0 / (1.0 + eta), 0.0, 0.0);
  x.r2 = Vec3(r0 * eta / (1.0 + eta), 0.0, 0.0);
  x.v1 = Vec3(0.0, speed1, 0.0);
  x.v2 = Vec3(0.0, -speed2, 0.0);
  return x;
}

}  // namespace twocharge
