#pragma once

#include "twocharge/error.hpp"
#include "twocharge/ode.hpp"
#include "twocharge/types.hpp"

namespace twocharge {

enum class Direction { past, future };

inline constexpr int kMaxBisectionIterations = 200;
inline constexpr double kDefaultDelayTolerance = 1e-10;

/// Offsets from the present instant of the four light-cone intersections.
/// tau1_* lie on particle 1's worldline (seen from particle 2), tau2_* on
/// particle 2's (seen from particle 1).
struct DelayTimes {
  double tau1_ret = 0.0;
  double tau2_ret = 0.0;
  double tau1_adv = 0.0;
  double tau2_adv = 0.0;
};

struct DelayRoot {
  double tau = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Raised when the flow does not reach far enough to bracket a root.
class FlowTooShort : public Error {
 public:
  FlowTooShort(const std::string& message, double required_span);
  /// Span (in |tau|) the caller should integrate to before retrying.
  double required_span() const noexcept { return required_span_; }

 private:
  double required_span_;
};

/// tau + |r_other - r_j(tau)| (past) or tau - |r_other - r_j(tau)| (future).
/// `particle` selects the worldline j (1 or 2) inside the joint flow.
double light_cone_residual(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                           double tau, Direction direction);

/// Interval [lo, hi] around the light-cone root. Starts from 2 R0 and doubles;
/// R0 / (1 - beta_max) bounds the search, beta_max being the fastest knot
/// speed of particle j on the flow.
Bracket bracket_delay(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                      Direction direction);

DelayRoot solve_retarded(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                         double tol = kDefaultDelayTolerance);

DelayRoot solve_advanced(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                         double tol = kDefaultDelayTolerance);

}  // namespace twocharge
