#include "twocharge/forces.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "twocharge/error.hpp"

namespace twocharge {

namespace {

template <int D>
void check_speeds(const FieldEvalInputT<D>& in) {
  if (in.v_self.squaredNorm() >= 1.0 || in.v_other.squaredNorm() >= 1.0) {
    throw Error(ErrorKind::superluminal, "field evaluation with speed >= 1");
  }
}

// Shared geometry of a kernel evaluation: n, R, u = n -/+ beta and the
// light-cone denominator 1 -/+ n.beta.
template <int D>
struct Geometry {
  Eigen::Matrix<double, D, 1> n;
  Eigen::Matrix<double, D, 1> u;
  double distance;
  double denom;
};

template <int D>
Geometry<D> geometry(const FieldEvalInputT<D>& in) {
  check_speeds(in);
  const Eigen::Matrix<double, D, 1> d = in.r_self - in.r_other;
  const double distance = d.norm();
  if (!(distance > 0.0)) {
    throw Error(ErrorKind::singularity, "field source and field point coincide");
  }
  const Eigen::Matrix<double, D, 1> n = d / distance;
  const double s = (in.branch == Branch::retarded) ? -1.0 : 1.0;
  const double denom = 1.0 + s * n.dot(in.v_other);
  if (std::abs(denom) < kLightConeThreshold) {
    throw Error(ErrorKind::light_cone,
                "light-cone denominator " + std::to_string(denom) + " below threshold");
  }
  return Geometry<D>{n, n + s * in.v_other, distance, denom};
}

ForceKernel kernel3(const FieldEvalInput& in, int sign) {
  const Geometry<3> g = geometry(in);
  const double d3 = g.denom * g.denom * g.denom;
  const double velocity_factor =
      sign * (1.0 - in.v_other.squaredNorm()) / (d3 * g.distance * g.distance);

  ForceKernel k;
  // E + v x (n x E) with the velocity field E ~ u.
  k.f = velocity_factor * (g.u + in.v_self.cross(g.n.cross(g.u)));

  // Acceleration field n x (u x a) = (u n^T - (n.u) I) a, then the same
  // E + v x (n x E) map for the magnetic part.
  const Mat3 field_map = g.u * g.n.transpose() - g.n.dot(g.u) * Mat3::Identity();
  Mat3 cross_v;
  cross_v << 0.0, -in.v_self.z(), in.v_self.y(),
             in.v_self.z(), 0.0, -in.v_self.x(),
             -in.v_self.y(), in.v_self.x(), 0.0;
  Mat3 cross_n;
  cross_n << 0.0, -g.n.z(), g.n.y(),
             g.n.z(), 0.0, -g.n.x(),
             -g.n.y(), g.n.x(), 0.0;
  const Mat3 lorentz = Mat3::Identity() + cross_v * cross_n;
  k.coupling = (-sign / (d3 * g.distance)) * (lorentz * field_map);
  return k;
}

PlanarForceKernel kernel2(const PlanarFieldEvalInput& in, int sign) {
  const Geometry<2> g = geometry(in);
  const double d3 = g.denom * g.denom * g.denom;
  const double velocity_factor =
      sign * (1.0 - in.v_other.squaredNorm()) / (d3 * g.distance * g.distance);
  const Vec2& n = g.n;
  const Vec2& u = g.u;
  const Vec2& v = in.v_self;

  PlanarForceKernel k;
  const double nxu = n.x() * u.y() - n.y() * u.x();
  k.f = velocity_factor * (u + nxu * Vec2(v.y(), -v.x()));

  // In the plane the acceleration term collapses to a rank-one map.
  const Vec2 column(n.y() - v.y(), v.x() - n.x());
  const Vec2 row(-u.y(), u.x());
  k.coupling = (-sign / (d3 * g.distance)) * (column * row.transpose());
  return k;
}

}  // namespace

template <>
ForceKernelT<3> kernel<3>(const FieldEvalInputT<3>& input, int sign) {
  return kernel3(input, sign);
}

template <>
ForceKernelT<2> kernel<2>(const FieldEvalInputT<2>& input, int sign) {
  return kernel2(input, sign);
}

Vec3 unit_separation(const FieldEvalInput& input) {
  const Vec3 d = input.r_self - input.r_other;
  const double distance = d.norm();
  if (!(distance > 0.0)) {
    throw Error(ErrorKind::singularity, "field source and field point coincide");
  }
  return d / distance;
}

ForceKernel force_kernel(const FieldEvalInput& input, int sign) { return kernel3(input, sign); }

PlanarForceKernel planar_force_kernel(const PlanarFieldEvalInput& input, int sign) {
  return kernel2(input, sign);
}

PlanarForceKernel planar_force_kernel(const FieldEvalInput& input, int sign) {
  if (input.r_self.z() != 0.0 || input.v_self.z() != 0.0 || input.r_other.z() != 0.0 ||
      input.v_other.z() != 0.0) {
    throw Error(ErrorKind::validation, "planar kernel requires all z components to be zero");
  }
  PlanarFieldEvalInput p;
  p.r_self = input.r_self.head<2>();
  p.v_self = input.v_self.head<2>();
  p.r_other = input.r_other.head<2>();
  p.v_other = input.v_other.head<2>();
  p.branch = input.branch;
  return kernel2(p, sign);
}

Mat3 mass_matrix(const Vec3& v) {
  const double v2 = v.squaredNorm();
  if (v2 >= 1.0) {
    throw Error(ErrorKind::superluminal, "mass matrix requires |v| < 1");
  }
  const double gamma = 1.0 / std::sqrt(1.0 - v2);
  return gamma * Mat3::Identity() + gamma * gamma * gamma * (v * v.transpose());
}

template <int D>
Eigen::Matrix<double, D, D> mass_matrix_inverse(const Eigen::Matrix<double, D, 1>& v) {
  const double v2 = v.squaredNorm();
  if (v2 >= 1.0) {
    throw Error(ErrorKind::superluminal, "mass matrix requires |v| < 1");
  }
  using MatD = Eigen::Matrix<double, D, D>;
  return std::sqrt(1.0 - v2) * (MatD::Identity() - v * v.transpose());
}

Mat3 mass_matrix_inverse(const Vec3& v) { return mass_matrix_inverse<3>(v); }

template <int D>
ForceKernelT<D> alpha_mix(const ForceKernelT<D>& retarded, const ForceKernelT<D>& advanced,
                          double alpha) {
  if (!(std::abs(alpha) <= 0.5)) {
    throw Error(ErrorKind::validation, "alpha must lie in [-1/2, 1/2]");
  }
  const double wr = 0.5 + alpha;
  const double wa = 0.5 - alpha;
  return ForceKernelT<D>{wr * retarded.f + wa * advanced.f,
                         wr * retarded.coupling + wa * advanced.coupling};
}

template Eigen::Matrix<double, 2, 2> mass_matrix_inverse<2>(const Eigen::Matrix<double, 2, 1>&);
template Eigen::Matrix<double, 3, 3> mass_matrix_inverse<3>(const Eigen::Matrix<double, 3, 1>&);
template ForceKernelT<2> alpha_mix<2>(const ForceKernelT<2>&, const ForceKernelT<2>&, double);
template ForceKernelT<3> alpha_mix<3>(const ForceKernelT<3>&, const ForceKernelT<3>&, double);

}  // namespace twocharge
