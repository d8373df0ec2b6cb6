#include "twocharge/ode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace twocharge {

std::string_view to_string(Termination reason) noexcept {
  switch (reason) {
    case Termination::reached_target: return "reached_target";
    case Termination::time_limit: return "time_limit";
    case Termination::speed_threshold: return "speed_threshold";
    case Termination::separation_floor: return "separation_floor";
    case Termination::predicate: return "predicate";
    case Termination::step_underflow: return "step_underflow";
  }
  return "unknown";
}

void validate(const StopCondition& stop) {
  if (!(stop.v_threshold > 0.0 && stop.v_threshold < 1.0)) {
    throw Error(ErrorKind::validation, "speed threshold must lie in (0, 1)");
  }
  if (!(stop.min_separation > 0.0) || !std::isfinite(stop.min_separation)) {
    throw Error(ErrorKind::validation, "minimum separation must be positive and finite");
  }
  if (std::isnan(stop.t_limit)) {
    throw Error(ErrorKind::validation, "time limit must not be NaN");
  }
}

// ---------------------------------------------------------------------------
// TrajectorySegment

TrajectorySegment::TrajectorySegment(std::string field_id, VectorField field,
                                     std::vector<Knot> knots, Termination termination,
                                     double last_step)
    : field_id_(std::move(field_id)),
      field_(std::move(field)),
      knots_(std::move(knots)),
      termination_(termination),
      last_step_(last_step) {
  if (knots_.empty()) {
    throw Error(ErrorKind::domain, "trajectory segment needs at least one knot");
  }
}

Vec12 TrajectorySegment::interpolate(double t, Vec12* derivative) const {
  if (!covers(t)) {
    throw Error(ErrorKind::domain, "time " + std::to_string(t) + " outside segment [" +
                                       std::to_string(t_min()) + ", " +
                                       std::to_string(t_max()) + "]");
  }
  const double dir = direction();
  const auto it = std::partition_point(knots_.begin(), knots_.end(),
                                       [&](const Knot& k) { return dir * k.t < dir * t; });
  if (it != knots_.end() && it->t == t) {
    if (derivative != nullptr) {
      *derivative = it->dx;
    }
    return it->x;
  }
  const Knot& k1 = *it;
  const Knot& k0 = *(it - 1);
  const double h = k1.t - k0.t;
  const double s = (t - k0.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  if (derivative != nullptr) {
    *derivative = ((6.0 * s2 - 6.0 * s) / h) * k0.x + (3.0 * s2 - 4.0 * s + 1.0) * k0.dx +
                  ((6.0 * s - 6.0 * s2) / h) * k1.x + (3.0 * s2 - 2.0 * s) * k1.dx;
  }
  return (2.0 * s3 - 3.0 * s2 + 1.0) * k0.x + ((s3 - 2.0 * s2 + s) * h) * k0.dx +
         (3.0 * s2 - 2.0 * s3) * k1.x + ((s3 - s2) * h) * k1.dx;
}

StateVector TrajectorySegment::state_at(double t) const {
  return StateVector::unpack(interpolate(t, nullptr));
}

StateVector TrajectorySegment::derivative_at(double t) const {
  Vec12 d;
  interpolate(t, &d);
  return StateVector::unpack(d);
}

double TrajectorySegment::max_knot_speed(int particle) const {
  const int offset = (particle == 1) ? 3 : 9;
  double best = 0.0;
  for (const Knot& k : knots_) {
    best = std::max(best, k.x.segment<3>(offset).norm());
  }
  return best;
}

IntegrationStall::IntegrationStall(const std::string& message,
                                   std::shared_ptr<const TrajectorySegment> partial, int level)
    : Error(ErrorKind::integration_stall, message, level), partial_(std::move(partial)) {}

// ---------------------------------------------------------------------------
// Runge-Kutta-Fehlberg 4(5)

namespace {

namespace rkf {
constexpr double c2 = 1.0 / 4.0, c3 = 3.0 / 8.0, c4 = 12.0 / 13.0, c6 = 1.0 / 2.0;
constexpr double a21 = 1.0 / 4.0;
constexpr double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
constexpr double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0, a43 = 7296.0 / 2197.0;
constexpr double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0, a54 = -845.0 / 4104.0;
constexpr double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0, a64 = 1859.0 / 4104.0,
                 a65 = -11.0 / 40.0;
// fifth-order weights
constexpr double b1 = 16.0 / 135.0, b3 = 6656.0 / 12825.0, b4 = 28561.0 / 56430.0,
                 b5 = -9.0 / 50.0, b6 = 2.0 / 55.0;
// fifth minus fourth order
constexpr double e1 = b1 - 25.0 / 216.0, e3 = b3 - 1408.0 / 2565.0, e4 = b4 - 2197.0 / 4104.0,
                 e5 = b5 + 1.0 / 5.0, e6 = b6;
}  // namespace rkf

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
constexpr double kRejectShrink = 0.25;
constexpr double kEventResolution = 1e-9;
constexpr int kEventSamples = 8;

bool superluminal(const Vec12& x) {
  return x.segment<3>(3).squaredNorm() >= 1.0 || x.segment<3>(9).squaredNorm() >= 1.0;
}

double max_speed(const Vec12& x) {
  return std::max(x.segment<3>(3).norm(), x.segment<3>(9).norm());
}

double separation(const Vec12& x) { return (x.segment<3>(6) - x.segment<3>(0)).norm(); }

class Stepper {
 public:
  Stepper(const VectorField& field, const Tolerances& tol, const StopCondition& stop,
          const IntegrateOptions& options)
      : field_(field), tol_(tol), stop_(stop), options_(options) {
    if (!(tol.abs > 0.0) || !(tol.rel > 0.0)) {
      throw Error(ErrorKind::validation, "integration tolerances must be positive");
    }
    validate(stop);
  }

  TrajectorySegment run(std::vector<Knot> knots, double t_target, double h) {
    knots_ = std::move(knots);
    const Knot& first = knots_.back();
    const double dir = (t_target < first.t) ? -1.0 : 1.0;
    double t_end = t_target;
    Termination on_arrival = Termination::reached_target;
    if (std::abs(t_target) > stop_.t_limit) {
      t_end = dir * stop_.t_limit;
      on_arrival = Termination::time_limit;
    }

    if (auto reason = initial_stop(first)) {
      return finish(*reason, 0.0);
    }
    if (h == 0.0 || std::signbit(h) != std::signbit(dir)) {
      h = dir * initial_step(first, std::abs(t_end - first.t), dir);
    }

    std::size_t steps = 0;
    while (dir * (t_end - knots_.back().t) > 0.0) {
      const Knot& cur = knots_.back();
      const double remaining = t_end - cur.t;
      h = dir * std::min({std::abs(h), options_.max_step, std::abs(remaining)});
      const bool last = std::abs(h) >= std::abs(remaining);
      if (last) {
        h = remaining;
      }
      if (std::abs(h) < 1e-12 * std::max(1.0, std::abs(cur.t)) ||
          ++steps > options_.max_steps) {
        const std::string where = "step size underflow at t = " + std::to_string(cur.t);
        if (inner_failure_) {
          stall("lower-level flow: " + inner_failure_->message() + " (" + where + ")",
                inner_failure_->level());
        }
        stall(where);
      }

      Vec12 y_new;
      double err = 0.0;
      if (!attempt(cur, h, y_new, err)) {
        h *= kRejectShrink;
        continue;
      }
      if (err > 1.0) {
        h *= std::max(kMinFactor, kSafety * std::pow(err, -0.2));
        continue;
      }
      Knot next;
      next.t = last ? t_end : cur.t + h;
      next.x = y_new;
      if (!evaluate(next.x, next.dx)) {
        h *= kRejectShrink;
        continue;
      }
      knots_.push_back(next);
      last_step_ = h;
      inner_failure_.reset();

      if (auto reason = check_events()) {
        return finish(*reason, h);
      }
      if (options_.until && options_.until(knots_.back())) {
        return finish(Termination::predicate, h);
      }
      const double factor =
          (err == 0.0) ? kMaxFactor
                       : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
      h *= factor;
    }
    return finish(on_arrival, h);
  }

 private:
  // Field evaluation that converts "bad trial state" failures into a
  // rejection signal for step control.
  bool evaluate(const Vec12& y, Vec12& dy) {
    if (superluminal(y)) {
      return false;
    }
    try {
      dy = field_(StateVector::unpack(y)).pack();
    } catch (const IntegrationStall& e) {
      if (knots_.empty()) throw;
      inner_failure_ = e;
      return false;
    } catch (const Error& e) {
      if (is_recoverable_by_step_control(e.kind())) {
        return false;
      }
      throw;
    }
    return dy.allFinite();
  }

  bool attempt(const Knot& cur, double h, Vec12& y_new, double& err) {
    using namespace rkf;
    const Vec12& y = cur.x;
    const Vec12& k1 = cur.dx;
    Vec12 k2, k3, k4, k5, k6;
    if (!evaluate(y + h * (a21 * k1), k2)) return false;
    if (!evaluate(y + h * (a31 * k1 + a32 * k2), k3)) return false;
    if (!evaluate(y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4)) return false;
    if (!evaluate(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5)) return false;
    if (!evaluate(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6)) {
      return false;
    }
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec12 delta = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6);
    const Vec12 scale =
        (tol_.abs + tol_.rel * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
    err = std::sqrt((delta.cwiseQuotient(scale)).squaredNorm() / 12.0);
    return std::isfinite(err) && y_new.allFinite();
  }

  double rms_scaled(const Vec12& v, const Vec12& y) const {
    const Vec12 scale = (tol_.abs + tol_.rel * y.cwiseAbs().array()).matrix();
    return std::sqrt(v.cwiseQuotient(scale).squaredNorm() / 12.0);
  }

  // Starting step estimate after Hairer, Norsett & Wanner.
  double initial_step(const Knot& k, double interval, double dir) {
    const double d0 = rms_scaled(k.x, k.x);
    const double d1 = rms_scaled(k.dx, k.x);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, interval);
    Vec12 f1;
    double d2 = 0.0;
    if (interval > 0.0 && evaluate(k.x + (dir * h0) * k.dx, f1)) {
      d2 = rms_scaled(f1 - k.dx, k.x) / h0;
    }
    double h1;
    if (std::max(d1, d2) <= 1e-15) {
      h1 = interval;  // field is locally constant
    } else {
      h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    }
    return std::min({100.0 * h0, h1, interval, options_.max_step});
  }

  std::optional<Termination> initial_stop(const Knot& k) const {
    if (max_speed(k.x) >= stop_.v_threshold) return Termination::speed_threshold;
    if (separation(k.x) <= stop_.min_separation) return Termination::separation_floor;
    return std::nullopt;
  }

  // Locates the crossing of a threshold inside the last step by bisection on
  // the Hermite interpolant and truncates the segment there.
  std::optional<Termination> check_events() {
    const Knot prev = knots_[knots_.size() - 2];
    const Knot cur = knots_.back();
    const TrajectorySegment step("step", field_, {prev, cur}, Termination::reached_target, 0.0);
    auto is_fast = [&](const Vec12& y) { return max_speed(y) >= stop_.v_threshold; };
    auto is_close = [&](const Vec12& y) { return separation(y) <= stop_.min_separation; };
    // Scan the interpolant as well as the end point so that a threshold
    // touched and left within one long step is still seen.
    auto first_hit = [&](auto&& triggered) -> std::optional<double> {
      for (int i = 1; i <= kEventSamples; ++i) {
        const double t = (i == kEventSamples)
                             ? cur.t
                             : prev.t + (cur.t - prev.t) * (static_cast<double>(i) / kEventSamples);
        if (triggered(i == kEventSamples ? cur.x : step.state_at(t).pack())) return t;
      }
      return std::nullopt;
    };
    const auto fast_at = first_hit(is_fast);
    const auto close_at = first_hit(is_close);
    const bool fast = fast_at.has_value();
    const bool close = close_at.has_value();
    if (!fast && !close) {
      return std::nullopt;
    }
    auto crossing = [&](auto&& triggered, double upper) {
      double lo = upper - (cur.t - prev.t) / kEventSamples;
      double hi = upper;
      while (std::abs(hi - lo) > kEventResolution) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (triggered(step.state_at(mid).pack())) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return hi;
    };
    const double dir = (cur.t < prev.t) ? -1.0 : 1.0;
    double t_stop = cur.t;
    Termination reason = Termination::speed_threshold;
    if (fast) {
      t_stop = crossing(is_fast, *fast_at);
    }
    if (close) {
      const double t_close = crossing(is_close, *close_at);
      if (!fast || dir * t_close < dir * t_stop) {
        t_stop = t_close;
        reason = Termination::separation_floor;
      }
    }
    if (t_stop != cur.t) {
      Knot truncated;
      truncated.t = t_stop;
      truncated.x = step.state_at(t_stop).pack();
      if (!evaluate(truncated.x, truncated.dx)) {
        truncated.dx = step.derivative_at(t_stop).pack();
      }
      knots_.back() = truncated;
    }
    return reason;
  }

  [[noreturn]] void stall(const std::string& message, int level = -1) {
    auto partial = std::make_shared<const TrajectorySegment>(
        options_.field_id, field_, knots_, Termination::step_underflow, last_step_);
    throw IntegrationStall(message, std::move(partial), level);
  }

  TrajectorySegment finish(Termination reason, double h) {
    if (h != 0.0) last_step_ = h;
    return TrajectorySegment(options_.field_id, field_, std::move(knots_), reason, last_step_);
  }

  const VectorField& field_;
  Tolerances tol_;
  StopCondition stop_;
  const IntegrateOptions& options_;
  std::vector<Knot> knots_;
  std::optional<Error> inner_failure_;
  double last_step_ = 0.0;
};

}  // namespace

TrajectorySegment integrate(const VectorField& field, const StateVector& x0, double t_target,
                            const Tolerances& tol, const StopCondition& stop,
                            const IntegrateOptions& options) {
  validate_state(x0);
  Knot start;
  start.t = 0.0;
  start.x = x0.pack();
  start.dx = field(x0).pack();
  Stepper stepper(field, tol, stop, options);
  return stepper.run({start}, t_target, 0.0);
}

TrajectorySegment extend(const TrajectorySegment& segment, double t_target, const Tolerances& tol,
                         const StopCondition& stop, const IntegrateOptions& options) {
  if (segment.knots().size() > 1 &&
      (t_target - segment.t_end()) * segment.direction() < 0.0) {
    throw Error(ErrorKind::domain, "extension target lies behind the segment end");
  }
  IntegrateOptions opts = options;
  opts.field_id = segment.field_id();
  Stepper stepper(segment.field(), tol, stop, opts);
  return stepper.run(segment.knots(), t_target, segment.last_step());
}

ExtendedState eval_flow(const TrajectorySegment& segment, double tau, AccelMode mode,
                        double dtau) {
  const StateVector x = segment.state_at(tau);
  ExtendedState out;
  out.r1 = x.r1;
  out.v1 = x.v1;
  out.r2 = x.r2;
  out.v2 = x.v2;
  if (mode == AccelMode::exact) {
    const StateVector dx = segment.field()(x);
    out.a1 = dx.v1;
    out.a2 = dx.v2;
    return out;
  }
  if (!(dtau > 0.0)) {
    throw Error(ErrorKind::validation, "finite-difference step must be positive");
  }
  if (segment.covers(tau + dtau)) {
    const StateVector ahead = segment.state_at(tau + dtau);
    out.a1 = (ahead.v1 - x.v1) / dtau;
    out.a2 = (ahead.v2 - x.v2) / dtau;
  } else if (segment.covers(tau - dtau)) {
    const StateVector behind = segment.state_at(tau - dtau);
    out.a1 = (x.v1 - behind.v1) / dtau;
    out.a2 = (x.v2 - behind.v2) / dtau;
  } else {
    throw Error(ErrorKind::domain, "segment too short for a finite-difference acceleration");
  }
  return out;
}

}  // namespace twocharge
