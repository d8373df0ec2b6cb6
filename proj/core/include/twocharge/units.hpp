#pragma once

#include "twocharge/error.hpp"
#include "twocharge/types.hpp"

namespace twocharge {

/// Dimensionless parameters of the two-charge system.
///   eta   = m1 / m2
///   sign  = sgn(q1 q2)
///   alpha = retarded/advanced mixing; +1/2 fully retarded, -1/2 fully advanced
struct SystemParams {
  double eta = 1.0;
  int sign = -1;
  double alpha = 0.5;

  double retarded_weight() const noexcept { return 0.5 + alpha; }
  double advanced_weight() const noexcept { return 0.5 - alpha; }
};

/// Validates and builds a parameter record. Throws Error(validation).
SystemParams make_params(double eta, int sign, double alpha);

/// Positions and velocities of both charges in scaled units (c = 1).
struct StateVector {
  Vec3 r1 = Vec3::Zero();
  Vec3 v1 = Vec3::Zero();
  Vec3 r2 = Vec3::Zero();
  Vec3 v2 = Vec3::Zero();

  Vec12 pack() const;
  static StateVector unpack(const Vec12& packed);

  double separation() const { return (r2 - r1).norm(); }
  double max_speed() const;
  /// Every z component is exactly zero.
  bool planar() const noexcept;
};

/// Throws if a speed is >= 1 or the charges coincide.
void validate_state(const StateVector& x);

namespace si {
inline constexpr double speed_of_light = 299792458.0;          // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double electron_mass = 9.1093837015e-31;      // kg
inline constexpr double proton_mass = 1.67262192369e-27;       // kg
inline constexpr double elementary_charge = 1.602176634e-19;   // C
}  // namespace si

/// Charges (C) and masses (kg) of the two particles.
struct PhysicalCharges {
  double q1 = 0.0;
  double q2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// SI positions (m) and velocities (m/s).
struct PhysicalState {
  Vec3 r1 = Vec3::Zero();
  Vec3 v1 = Vec3::Zero();
  Vec3 r2 = Vec3::Zero();
  Vec3 v2 = Vec3::Zero();
};

/// Length unit L = |q1 q2| / (4 pi eps0 m2 c^2) and time unit T = L / c.
struct ScaleFactors {
  double length = 1.0;
  double time = 1.0;
};

ScaleFactors scale_factors(const PhysicalCharges& charges);

struct DimensionlessSystem {
  SystemParams params;
  StateVector state;
  ScaleFactors scale;
};

/// Converts SI inputs into scaled units. `alpha` is not a physical input and
/// is passed through into the parameter record.
DimensionlessSystem physical_to_dimensionless(const PhysicalCharges& charges,
                                              const PhysicalState& state,
                                              double alpha = 0.5);

PhysicalState dimensionless_to_physical(const StateVector& state,
                                        const ScaleFactors& scale);

/// Non-relativistic Coulomb circular orbit at separation r0, centre of mass
/// at the origin, charges on the x axis, particle 1 moving +y and particle 2
/// moving -y. Requires an attractive system.
StateVector circular_initial_condition(const SystemParams& params, double r0);

}  // namespace twocharge
