#pragma once

#include <vector>

#include "twocharge/delay.hpp"
#include "twocharge/ode.hpp"
#include "twocharge/units.hpp"

namespace twocharge {

/// Numerical settings used while building and integrating one level.
struct LevelTolerances {
  Tolerances integration;
  double delay_tol = kDefaultDelayTolerance;
  /// Finite-difference step for delayed accelerations, as a fraction of the
  /// present separation.
  double dtau_factor = 1e-3;
};

enum class CachePolicy {
  per_evaluation,  ///< one backward and one forward flow shared by all four delays
  none,            ///< a fresh flow for every delay solve
};

struct LevelConfig {
  int level = 0;
  LevelTolerances tolerances;
  /// Optional overrides indexed by level; missing entries use `tolerances`.
  std::vector<LevelTolerances> per_level;
  CachePolicy cache = CachePolicy::per_evaluation;
  AccelMode accel_mode = AccelMode::forward_difference;
  /// Initial flow horizon in units of the present separation.
  double horizon_factor = 2.0;
  /// Lower-level flows stop when a speed reaches this value.
  double inner_speed_limit = 0.995;
  bool planar_fast_path = true;

  const LevelTolerances& at(int n) const;
};

void validate(const LevelConfig& cfg);

/// Delays and the lower-level extended flow evaluated at them. ret1/adv1 are
/// taken at tau1_*, ret2/adv2 at tau2_*. Branches with zero weight are
/// skipped and flagged.
struct DelayedStates {
  DelayTimes times;
  ExtendedState ret1;
  ExtendedState ret2;
  ExtendedState adv1;
  ExtendedState adv2;
  bool has_retarded = false;
  bool has_advanced = false;
};

/// Delayed data that H^(n) feeds into the field equations. For n = 0 every
/// delay is zero and the accelerations come from H^(0) itself.
DelayedStates delayed_states(int n, const StateVector& x, const SystemParams& params,
                             const LevelConfig& cfg);

/// H^(n)(x). n = 0 is the instantaneous field; n >= 1 integrates the level
/// n-1 flow through x, solves the light-cone equations on it and assembles
/// the delayed field equations.
StateVector h_field(int n, const StateVector& x, const SystemParams& params,
                    const LevelConfig& cfg);

/// Same, at cfg.level.
StateVector h_field(const StateVector& x, const SystemParams& params, const LevelConfig& cfg);

/// H^(n) as a callable; errors it raises carry level annotations.
VectorField level_field(int n, const SystemParams& params, const LevelConfig& cfg);

struct Trajectory {
  SystemParams params;
  int level = 0;
  TrajectorySegment segment;
  Termination termination = Termination::reached_target;
  double termination_time = 0.0;
};

/// Integrates H^(n) from x0 under `stop`. A negative stop.t_limit integrates
/// into the past.
Trajectory trajectory(int n, const StateVector& x0, const SystemParams& params,
                      const LevelConfig& cfg, const StopCondition& stop);

}  // namespace twocharge
