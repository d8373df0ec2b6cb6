#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "twocharge/error.hpp"
#include "twocharge/types.hpp"
#include "twocharge/units.hpp"

namespace twocharge {

/// Autonomous vector field X -> dX/dt. The derivative of (r1, v1, r2, v2) is
/// returned in the same slots, i.e. (v1, a1, v2, a2) for the dynamics fields.
using VectorField = std::function<StateVector(const StateVector&)>;

struct Tolerances {
  double abs = 1e-9;
  double rel = 1e-9;
};

/// Early termination rule checked after every accepted step.
struct StopCondition {
  double v_threshold = 0.8;     ///< stop when max(|v1|, |v2|) reaches this
  double min_separation = 1e-6; ///< stop when |r1 - r2| falls to this
  double t_limit = std::numeric_limits<double>::infinity();  ///< bound on |t|
};

void validate(const StopCondition& stop);

enum class Termination {
  reached_target,
  time_limit,
  speed_threshold,
  separation_floor,
  predicate,
  step_underflow,
};

std::string_view to_string(Termination reason) noexcept;

struct Knot {
  double t = 0.0;
  Vec12 x = Vec12::Zero();
  Vec12 dx = Vec12::Zero();
};

/// Dense-output solution of one vector field starting at t = 0, forward or
/// backward in time. Immutable once built; cubic Hermite interpolation on the
/// stored (state, derivative) knots.
class TrajectorySegment {
 public:
  TrajectorySegment(std::string field_id, VectorField field, std::vector<Knot> knots,
                    Termination termination, double last_step);

  const std::string& field_id() const noexcept { return field_id_; }
  const VectorField& field() const noexcept { return field_; }
  const std::vector<Knot>& knots() const noexcept { return knots_; }
  Termination termination() const noexcept { return termination_; }
  /// Signed size of the last accepted step, used to resume integration.
  double last_step() const noexcept { return last_step_; }

  double t_start() const noexcept { return knots_.front().t; }
  double t_end() const noexcept { return knots_.back().t; }
  double t_min() const noexcept { return std::min(t_start(), t_end()); }
  double t_max() const noexcept { return std::max(t_start(), t_end()); }
  /// +1 for forward segments, -1 for backward ones (+1 when only one knot).
  int direction() const noexcept { return t_end() < t_start() ? -1 : 1; }
  double span() const noexcept { return t_max() - t_min(); }

  bool covers(double t) const noexcept { return t >= t_min() && t <= t_max(); }

  /// Interpolated state; exact at knot times. Throws Error(domain) outside.
  StateVector state_at(double t) const;
  /// Time derivative of the interpolant.
  StateVector derivative_at(double t) const;

  /// Largest knot speed of particle 1 or 2.
  double max_knot_speed(int particle) const;

 private:
  Vec12 interpolate(double t, Vec12* derivative) const;

  std::string field_id_;
  VectorField field_;
  std::vector<Knot> knots_;
  Termination termination_;
  double last_step_;
};

/// Thrown when the step size underflows; carries the segment built so far.
class IntegrationStall : public Error {
 public:
  IntegrationStall(const std::string& message, std::shared_ptr<const TrajectorySegment> partial,
                   int level = -1);
  std::shared_ptr<const TrajectorySegment> partial_ptr() const noexcept { return partial_; }
  const TrajectorySegment& partial() const noexcept { return *partial_; }

 private:
  std::shared_ptr<const TrajectorySegment> partial_;
};

struct IntegrateOptions {
  std::string field_id = "field";
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 10'000'000;
  /// Optional extra stop predicate evaluated on every accepted knot.
  std::function<bool(const Knot&)> until;
};

/// Embedded Runge-Kutta-Fehlberg 4(5) integration from t = 0 toward
/// `t_target` (either sign), advancing with the fifth-order solution.
TrajectorySegment integrate(const VectorField& field, const StateVector& x0, double t_target,
                            const Tolerances& tol, const StopCondition& stop,
                            const IntegrateOptions& options = {});

/// Continues `segment` from its last knot toward `t_target` (same direction).
TrajectorySegment extend(const TrajectorySegment& segment, double t_target, const Tolerances& tol,
                         const StopCondition& stop, const IntegrateOptions& options = {});

/// State with accelerations: (r1, v1, a1, r2, v2, a2).
struct ExtendedState {
  Vec3 r1 = Vec3::Zero();
  Vec3 v1 = Vec3::Zero();
  Vec3 a1 = Vec3::Zero();
  Vec3 r2 = Vec3::Zero();
  Vec3 v2 = Vec3::Zero();
  Vec3 a2 = Vec3::Zero();
};

enum class AccelMode {
  forward_difference,  ///< (v(tau + dtau) - v(tau)) / dtau on the interpolant
  exact,               ///< re-evaluate the segment's field at the interpolated state
};

/// Extended flow at `tau`. In forward-difference mode a backward difference
/// is used when tau + dtau lies outside the segment.
ExtendedState eval_flow(const TrajectorySegment& segment, double tau, AccelMode mode,
                        double dtau);

}  // namespace twocharge
