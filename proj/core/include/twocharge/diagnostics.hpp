#pragma once

#include <cstddef>
#include <vector>

#include "twocharge/iterated.hpp"

namespace twocharge {

/// eta gamma1 v1 + gamma2 v2.
Vec3 total_momentum(const StateVector& x, const SystemParams& params);

/// d(p1 + p2)/dt from the present state and its delayed data: the sum of
/// both particles' alpha-mixed field terms, coupling terms included.
Vec3 self_force(const StateVector& present, const DelayedStates& delayed,
                const SystemParams& params);

/// Time at which max(|v1|, |v2|) crosses `v_threshold` on a trajectory
/// stopped by the speed threshold.
double singularity_time(const Trajectory& traj, double v_threshold);

struct DistanceReport {
  int n_from = 0;
  int n_to = 0;
  double t_max = 0.0;
  double d_r1 = 0.0;
  double d_r2 = 0.0;
};

constexpr std::size_t kDefaultDistanceGrid = 2000;

/// Time-averaged distance between the positions of two trajectories on
/// [0, t_max] (trapezoid rule, uniform grid). t_max <= 0 selects the common
/// coverage of both runs.
DistanceReport trajectory_distance(const Trajectory& a, const Trajectory& b, double t_max = 0.0,
                                   std::size_t grid = kDefaultDistanceGrid);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = slope x + intercept.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twocharge
