#include "twocharge/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "twocharge/forces.hpp"

namespace twocharge {

Vec3 total_momentum(const StateVector& x, const SystemParams& params) {
  auto gamma = [](const Vec3& v) {
    const double v2 = v.squaredNorm();
    if (!(v2 < 1.0)) {
      throw Error(ErrorKind::superluminal, "speed must be below 1");
    }
    return 1.0 / std::sqrt(1.0 - v2);
  };
  return params.eta * gamma(x.v1) * x.v1 + gamma(x.v2) * x.v2;
}

Vec3 self_force(const StateVector& present, const DelayedStates& delayed,
                const SystemParams& params) {
  Vec3 total = Vec3::Zero();
  auto add = [&](const ExtendedState& at1, const ExtendedState& at2, Branch branch, double w) {
    const ForceKernel k1 = force_kernel(
        FieldEvalInput{present.r1, present.v1, at2.r2, at2.v2, branch}, params.sign);
    const ForceKernel k2 = force_kernel(
        FieldEvalInput{present.r2, present.v2, at1.r1, at1.v1, branch}, params.sign);
    total += w * (k1.f + k2.f - (k2.coupling * at1.a1 + k1.coupling * at2.a2));
  };
  if (delayed.has_retarded) {
    add(delayed.ret1, delayed.ret2, Branch::retarded, params.retarded_weight());
  }
  if (delayed.has_advanced) {
    add(delayed.adv1, delayed.adv2, Branch::advanced, params.advanced_weight());
  }
  return total;
}

double singularity_time(const Trajectory& traj, double v_threshold) {
  if (traj.termination != Termination::speed_threshold) {
    throw Error(ErrorKind::not_applicable,
                "trajectory ended by " + std::string(to_string(traj.termination)) +
                    ", not by the speed threshold");
  }
  const auto& knots = traj.segment.knots();
  auto speed = [](const Vec12& x) {
    return std::max(x.segment<3>(3).norm(), x.segment<3>(9).norm());
  };
  auto excess = [&](double t) {
    const StateVector s = traj.segment.state_at(t);
    return std::max(s.v1.norm(), s.v2.norm()) - v_threshold;
  };
  std::size_t i = 1;
  while (i < knots.size() && speed(knots[i].x) < v_threshold) ++i;
  if (i == knots.size()) {
    throw Error(ErrorKind::not_applicable, "speed never reaches the threshold");
  }
  double lo = knots[i - 1].t;
  double hi = knots[i].t;
  if (speed(knots[i - 1].x) >= v_threshold) return lo;
  while (std::abs(hi - lo) > 1e-9 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (excess(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

DistanceReport trajectory_distance(const Trajectory& a, const Trajectory& b, double t_max,
                                   std::size_t grid) {
  if (grid < 2) {
    throw Error(ErrorKind::validation, "distance grid needs at least two points");
  }
  if (a.segment.direction() != b.segment.direction()) {
    throw Error(ErrorKind::domain, "trajectories run in opposite time directions");
  }
  const int dir = a.segment.direction();
  const double common = std::min(a.segment.span(), b.segment.span());
  if (!(t_max > 0.0)) {
    t_max = common;
  }
  if (t_max > common || !(t_max > 0.0)) {
    throw Error(ErrorKind::domain, "trajectories do not cover the requested interval");
  }
  double sum1 = 0.0;
  double sum2 = 0.0;
  const double h = t_max / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = (i + 1 == grid) ? t_max : h * static_cast<double>(i);
    const double w = (i == 0 || i + 1 == grid) ? 0.5 : 1.0;
    const StateVector sa = a.segment.state_at(dir * t);
    const StateVector sb = b.segment.state_at(dir * t);
    sum1 += w * (sb.r1 - sa.r1).norm();
    sum2 += w * (sb.r2 - sa.r2).norm();
  }
  return DistanceReport{a.level, b.level, t_max, sum1 * h / t_max, sum2 * h / t_max};
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::validation, "linear fit needs two or more matching points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::domain, "linear fit needs distinct abscissae");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace twocharge
