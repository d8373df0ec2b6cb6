#include "twocharge/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace twocharge {

FlowTooShort::FlowTooShort(const std::string& message, double required_span)
    : Error(ErrorKind::flow_too_short, message), required_span_(required_span) {}

namespace {

Vec3 position(const TrajectorySegment& flow, int particle, double tau) {
  const StateVector x = flow.state_at(tau);
  return particle == 1 ? x.r1 : x.r2;
}

void check_particle(int particle) {
  if (particle != 1 && particle != 2) {
    throw Error(ErrorKind::validation, "particle index must be 1 or 2");
  }
}

double sign_of(Direction direction) { return direction == Direction::past ? -1.0 : 1.0; }

// s - |r_other - r_j(dir * s)| for s = |tau| >= 0: negative at s = 0 and
// strictly increasing on sub-luminal flows.
double normalized_residual(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                           double s, Direction direction) {
  return s - (r_other - position(flow, particle, sign_of(direction) * s)).norm();
}

double available_span(const TrajectorySegment& flow, Direction direction) {
  return direction == Direction::past ? std::max(0.0, -flow.t_min())
                                      : std::max(0.0, flow.t_max());
}

DelayRoot solve(const TrajectorySegment& flow, int particle, const Vec3& r_other, double tol,
                Direction direction) {
  if (!(tol > 0.0)) {
    throw Error(ErrorKind::validation, "delay tolerance must be positive");
  }
  const Bracket b = bracket_delay(flow, particle, r_other, direction);
  const double dir = sign_of(direction);
  double lo = 0.0;                       // residual < 0
  double hi = std::max(std::abs(b.lo), std::abs(b.hi));  // residual >= 0
  for (int it = 1; it <= kMaxBisectionIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double q = normalized_residual(flow, particle, r_other, mid, direction);
    if (std::abs(q) < tol) {
      return DelayRoot{dir * mid, std::abs(q), it};
    }
    if (q < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo == 0.0) break;
  }
  throw Error(ErrorKind::convergence, "light-cone bisection did not reach residual " +
                                          std::to_string(tol));
}

}  // namespace

double light_cone_residual(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                           double tau, Direction direction) {
  check_particle(particle);
  const double distance = (r_other - position(flow, particle, tau)).norm();
  return direction == Direction::past ? tau + distance : tau - distance;
}

Bracket bracket_delay(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                      Direction direction) {
  check_particle(particle);
  const double r0 = (r_other - position(flow, particle, 0.0)).norm();
  const double beta_max = flow.max_knot_speed(particle);
  if (beta_max >= 1.0) {
    throw Error(ErrorKind::no_root, "flow carries a superluminal knot");
  }
  const double hard_bound = r0 / (1.0 - beta_max);
  const double span = available_span(flow, direction);
  const double dir = sign_of(direction);
  if (r0 == 0.0) {
    return Bracket{0.0, 0.0};
  }
  if (span == 0.0) {
    throw FlowTooShort("flow does not extend in the requested time direction",
                       std::min(2.0 * r0, hard_bound));
  }
  double guess = 2.0 * r0;
  while (true) {
    const double probe = std::min(guess, span);
    if (normalized_residual(flow, particle, r_other, probe, direction) >= 0.0) {
      return dir < 0.0 ? Bracket{-probe, 0.0} : Bracket{0.0, probe};
    }
    if (probe >= hard_bound) {
      throw Error(ErrorKind::no_root,
                  "no light-cone root within the sub-luminal bound " + std::to_string(hard_bound));
    }
    if (probe == span) {
      throw FlowTooShort("flow span " + std::to_string(span) + " does not bracket the root",
                         std::min(hard_bound, std::max(guess, span + r0)));
    }
    guess *= 2.0;
  }
}

DelayRoot solve_retarded(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                         double tol) {
  return solve(flow, particle, r_other, tol, Direction::past);
}

DelayRoot solve_advanced(const TrajectorySegment& flow, int particle, const Vec3& r_other,
                         double tol) {
  return solve(flow, particle, r_other, tol, Direction::future);
}

}  // namespace twocharge
