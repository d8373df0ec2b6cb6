#include "twocharge/iterated.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "assembly.hpp"
#include "twocharge/instantaneous.hpp"

namespace twocharge {

const LevelTolerances& LevelConfig::at(int n) const {
  if (n >= 0 && static_cast<std::size_t>(n) < per_level.size()) {
    return per_level[static_cast<std::size_t>(n)];
  }
  return tolerances;
}

void validate(const LevelConfig& cfg) {
  if (cfg.level < 0) {
    throw Error(ErrorKind::validation, "level must be non-negative");
  }
  auto check = [](const LevelTolerances& t) {
    if (!(t.integration.abs > 0.0) || !(t.integration.rel > 0.0) || !(t.delay_tol > 0.0) ||
        !(t.dtau_factor > 0.0)) {
      throw Error(ErrorKind::validation, "level tolerances must be positive");
    }
  };
  check(cfg.tolerances);
  for (const auto& t : cfg.per_level) check(t);
  if (!(cfg.horizon_factor > 0.0)) {
    throw Error(ErrorKind::validation, "flow horizon factor must be positive");
  }
  if (!(cfg.inner_speed_limit > 0.0 && cfg.inner_speed_limit < 1.0)) {
    throw Error(ErrorKind::validation, "inner speed limit must lie in (0, 1)");
  }
}

namespace {

constexpr int kMaxFlowExtensions = 64;

std::string field_name(int n) { return "H" + std::to_string(n); }

// Rethrows the active Error tagged with `level`, keeping stall payloads.
[[noreturn]] void rethrow_at_level(int level) {
  try {
    throw;
  } catch (const IntegrationStall& e) {
    if (e.level() >= 0) throw;
    throw IntegrationStall(e.message(), e.partial_ptr(), level);
  } catch (const Error& e) {
    if (e.level() >= 0) throw;
    throw e.at_level(level);
  }
}

// Light-cone residual of both particles at a knot, relative to the present
// positions: |tau| - |r_other - r_j(tau)| (>= 0 once the root is passed).
struct ConeTest {
  Vec3 r1_now;
  Vec3 r2_now;

  bool passed(const Knot& k) const {
    const double s = std::abs(k.t);
    return s - (r2_now - k.x.segment<3>(0)).norm() >= 0.0 &&
           s - (r1_now - k.x.segment<3>(6)).norm() >= 0.0;
  }
};

// Level n-1 flow through x in one time direction, integrated until the light
// cones requested in `cone` are crossed.
class LowerFlow {
 public:
  LowerFlow(int n, const StateVector& x, const SystemParams& params, const LevelConfig& cfg,
            Direction direction)
      : n_(n), params_(params), cfg_(cfg), direction_(direction) {
    const double separation = x.separation();
    step_ = separation;
    cone_ = ConeTest{x.r1, x.r2};
    stop_.v_threshold = cfg.inner_speed_limit;
    stop_.min_separation = 1e-9 * separation;
    options_.field_id = field_name(n - 1);
    options_.until = [cone = cone_](const Knot& k) { return cone.passed(k); };
    const double target = sign() * cfg.horizon_factor * separation;
    try {
      segment_.emplace(integrate(level_field(n - 1, params, cfg), x, target,
                                 cfg.at(n - 1).integration, stop_, options_));
    } catch (const Error&) {
      rethrow_at_level(n - 1);
    }
  }

  const TrajectorySegment& segment() const { return *segment_; }

  // Solves one light-cone equation, extending the flow on demand.
  DelayRoot solve(int particle, const Vec3& r_other, double tol) {
    for (int attempt = 0;; ++attempt) {
      try {
        return direction_ == Direction::past ? solve_retarded(*segment_, particle, r_other, tol)
                                             : solve_advanced(*segment_, particle, r_other, tol);
      } catch (const FlowTooShort& e) {
        if (attempt >= kMaxFlowExtensions) {
          throw Error(ErrorKind::no_root, "flow extension limit reached", n_);
        }
        grow(std::max(e.required_span(), segment_->span() + step_));
      }
    }
  }

  // Makes sure tau + dtau is available for the forward difference. Growth
  // goes in fixed increments so the knots do not depend on which root asked.
  void ensure_covers(double tau) {
    for (int attempt = 0; !segment_->covers(tau); ++attempt) {
      if (attempt >= kMaxFlowExtensions) {
        throw Error(ErrorKind::no_root, "flow extension limit reached", n_);
      }
      grow(segment_->span() + step_);
    }
  }

 private:
  double sign() const { return direction_ == Direction::past ? -1.0 : 1.0; }

  void grow(double span) {
    const Termination t = segment_->termination();
    if (t == Termination::speed_threshold || t == Termination::separation_floor) {
      throw Error(ErrorKind::integration_stall,
                  "lower-level flow ended (" + std::string(to_string(t)) +
                      ") before the light cone was reached",
                  n_ - 1);
    }
    IntegrateOptions opts = options_;
    opts.until = nullptr;
    try {
      segment_.emplace(extend(*segment_, sign() * span, cfg_.at(n_ - 1).integration, stop_, opts));
    } catch (const Error&) {
      rethrow_at_level(n_ - 1);
    }
  }

  int n_;
  SystemParams params_;
  const LevelConfig& cfg_;
  Direction direction_;
  double step_ = 0.0;
  ConeTest cone_{};
  StopCondition stop_;
  IntegrateOptions options_;
  std::optional<TrajectorySegment> segment_;
};

ExtendedState evaluate_at(LowerFlow& flow, double tau, const LevelConfig& cfg, double dtau) {
  if (cfg.accel_mode == AccelMode::forward_difference && tau > 0.0) {
    flow.ensure_covers(tau + dtau);
  }
  return eval_flow(flow.segment(), tau, cfg.accel_mode, dtau);
}

DelayedStates delayed_from_flows(int n, const StateVector& x, const SystemParams& params,
                                 const LevelConfig& cfg) {
  DelayedStates out;
  out.has_retarded = params.retarded_weight() != 0.0;
  out.has_advanced = params.advanced_weight() != 0.0;
  const double tol = cfg.at(n).delay_tol;
  const double dtau = cfg.at(n).dtau_factor * x.separation();

  auto branch = [&](Direction direction, double& tau1, double& tau2, ExtendedState& s1,
                    ExtendedState& s2) {
    if (cfg.cache == CachePolicy::per_evaluation) {
      LowerFlow flow(n, x, params, cfg, direction);
      tau1 = flow.solve(1, x.r2, tol).tau;
      tau2 = flow.solve(2, x.r1, tol).tau;
      s1 = evaluate_at(flow, tau1, cfg, dtau);
      s2 = evaluate_at(flow, tau2, cfg, dtau);
    } else {
      LowerFlow flow1(n, x, params, cfg, direction);
      tau1 = flow1.solve(1, x.r2, tol).tau;
      s1 = evaluate_at(flow1, tau1, cfg, dtau);
      LowerFlow flow2(n, x, params, cfg, direction);
      tau2 = flow2.solve(2, x.r1, tol).tau;
      s2 = evaluate_at(flow2, tau2, cfg, dtau);
    }
  };
  if (out.has_retarded) {
    branch(Direction::past, out.times.tau1_ret, out.times.tau2_ret, out.ret1, out.ret2);
  }
  if (out.has_advanced) {
    branch(Direction::future, out.times.tau1_adv, out.times.tau2_adv, out.adv1, out.adv2);
  }
  return out;
}

bool planar(const ExtendedState& s) {
  return s.r1.z() == 0.0 && s.v1.z() == 0.0 && s.a1.z() == 0.0 && s.r2.z() == 0.0 &&
         s.v2.z() == 0.0 && s.a2.z() == 0.0;
}

bool all_planar(const StateVector& x, const DelayedStates& d) {
  if (!x.planar()) return false;
  if (d.has_retarded && !(planar(d.ret1) && planar(d.ret2))) return false;
  if (d.has_advanced && !(planar(d.adv1) && planar(d.adv2))) return false;
  return true;
}

// Explicit delayed field equations:
//   eta a1 = M11^-1 sum_b w_b (F1_b - M12_b a2(tau2_b))
//       a2 = M22^-1 sum_b w_b (F2_b - M21_b a1(tau1_b))
template <int D>
AccelPair assemble(const StateVector& x, const DelayedStates& d, const SystemParams& params) {
  using namespace detail;
  VecD<D> rhs1 = VecD<D>::Zero();
  VecD<D> rhs2 = VecD<D>::Zero();
  auto add = [&](const ExtendedState& at1, const ExtendedState& at2, Branch branch, double w) {
    const auto k1 = kernel<D>(field_input<D>(x.r1, x.v1, at2.r2, at2.v2, branch), params.sign);
    const auto k2 = kernel<D>(field_input<D>(x.r2, x.v2, at1.r1, at1.v1, branch), params.sign);
    rhs1 += w * (k1.f - k1.coupling * project<D>(at2.a2));
    rhs2 += w * (k2.f - k2.coupling * project<D>(at1.a1));
  };
  if (d.has_retarded) add(d.ret1, d.ret2, Branch::retarded, params.retarded_weight());
  if (d.has_advanced) add(d.adv1, d.adv2, Branch::advanced, params.advanced_weight());
  const VecD<D> a1 = mass_matrix_inverse<D>(project<D>(x.v1)) * rhs1 / params.eta;
  const VecD<D> a2 = mass_matrix_inverse<D>(project<D>(x.v2)) * rhs2;
  return AccelPair{lift<D>(a1), lift<D>(a2)};
}

}  // namespace

DelayedStates delayed_states(int n, const StateVector& x, const SystemParams& params,
                             const LevelConfig& cfg) {
  if (n < 0) {
    throw Error(ErrorKind::validation, "level must be non-negative");
  }
  validate_state(x);
  if (n == 0) {
    const AccelPair acc = instantaneous_accelerations(x, params);
    ExtendedState now{x.r1, x.v1, acc.a1, x.r2, x.v2, acc.a2};
    DelayedStates out;
    out.ret1 = out.ret2 = out.adv1 = out.adv2 = now;
    out.has_retarded = params.retarded_weight() != 0.0;
    out.has_advanced = params.advanced_weight() != 0.0;
    return out;
  }
  try {
    return delayed_from_flows(n, x, params, cfg);
  } catch (const Error&) {
    rethrow_at_level(n);
  }
}

StateVector h_field(int n, const StateVector& x, const SystemParams& params,
                    const LevelConfig& cfg) {
  if (n == 0) {
    return h0_field(x, params);
  }
  const DelayedStates d = delayed_states(n, x, params, cfg);
  try {
    const AccelPair acc = (cfg.planar_fast_path && all_planar(x, d))
                              ? assemble<2>(x, d, params)
                              : assemble<3>(x, d, params);
    return StateVector{x.v1, acc.a1, x.v2, acc.a2};
  } catch (const Error&) {
    rethrow_at_level(n);
  }
}

StateVector h_field(const StateVector& x, const SystemParams& params, const LevelConfig& cfg) {
  return h_field(cfg.level, x, params, cfg);
}

VectorField level_field(int n, const SystemParams& params, const LevelConfig& cfg) {
  if (n == 0) {
    return [params](const StateVector& x) {
      try {
        return h0_field(x, params);
      } catch (const Error&) {
        rethrow_at_level(0);
      }
    };
  }
  return [n, params, cfg](const StateVector& x) { return h_field(n, x, params, cfg); };
}

Trajectory trajectory(int n, const StateVector& x0, const SystemParams& params,
                      const LevelConfig& cfg, const StopCondition& stop) {
  validate(cfg);
  if (n < 0) {
    throw Error(ErrorKind::validation, "level must be non-negative");
  }
  StopCondition s = stop;
  s.t_limit = std::abs(stop.t_limit);
  const double target = std::copysign(std::numeric_limits<double>::infinity(), stop.t_limit);
  IntegrateOptions options;
  options.field_id = field_name(n);
  try {
    TrajectorySegment seg =
        integrate(level_field(n, params, cfg), x0, target, cfg.at(n).integration, s, options);
    const Termination reason = seg.termination();
    const double t_end = seg.t_end();
    return Trajectory{params, n, std::move(seg), reason, t_end};
  } catch (const IntegrationStall& e) {
    throw IntegrationStall(e.message(), e.partial_ptr(), e.level() >= 0 ? e.level() : n);
  }
}

}  // namespace twocharge
