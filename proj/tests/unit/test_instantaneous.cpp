#include <gtest/gtest.h>

#include <random>

#include <Eigen/LU>

#include "twocharge/forces.hpp"
#include "twocharge/instantaneous.hpp"

using namespace twocharge;

namespace {

StateVector random_state(std::mt19937_64& rng, bool planar) {
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> vel(-0.4, 0.4);
  auto p = [&] { return Vec3(pos(rng), pos(rng), planar ? 0.0 : pos(rng)); };
  auto v = [&] { return Vec3(vel(rng), vel(rng), planar ? 0.0 : vel(rng)); };
  return StateVector{p(), v(), p(), v()};
}

// Full 6x6 block solve of
//   eta M11 a1 + M12 a2 = F1
//   M21 a1 + M22 a2     = F2
AccelPair block_solve(const StateVector& x, const SystemParams& p) {
  Vec3 F1 = Vec3::Zero(), F2 = Vec3::Zero();
  Mat3 M12 = Mat3::Zero(), M21 = Mat3::Zero();
  for (Branch b : {Branch::retarded, Branch::advanced}) {
    const double w = b == Branch::retarded ? p.retarded_weight() : p.advanced_weight();
    if (w == 0.0) continue;
    const ForceKernel k1 = force_kernel({x.r1, x.v1, x.r2, x.v2, b}, p.sign);
    const ForceKernel k2 = force_kernel({x.r2, x.v2, x.r1, x.v1, b}, p.sign);
    F1 += w * k1.f;
    F2 += w * k2.f;
    M12 += w * k1.coupling;
    M21 += w * k2.coupling;
  }
  Eigen::Matrix<double, 6, 6> A;
  A << p.eta * mass_matrix(x.v1), M12, M21, mass_matrix(x.v2);
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << F1, F2;
  const Eigen::Matrix<double, 6, 1> a = A.fullPivLu().solve(rhs);
  return AccelPair{a.head<3>(), a.tail<3>()};
}

}  // namespace

TEST(Instantaneous, MatchesBlockSolve) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const StateVector x = random_state(rng, i % 2 == 0);
    if (x.separation() < 0.5) continue;
    for (double alpha : {0.5, 0.0, -0.5, 0.2}) {
      for (double eta : {1.0, 3.7}) {
        const SystemParams p = make_params(eta, i % 3 == 0 ? 1 : -1, alpha);
        const AccelPair got = instantaneous_accelerations(x, p);
        const AccelPair want = block_solve(x, p);
        const double scale = std::max(1e-300, want.a1.norm() + want.a2.norm());
        EXPECT_LT((got.a1 - want.a1).norm() / scale, 1e-12);
        EXPECT_LT((got.a2 - want.a2).norm() / scale, 1e-12);
      }
    }
  }
}

TEST(Instantaneous, FieldLayout) {
  const SystemParams p = make_params(2.0, -1, 0.5);
  const StateVector x{{-1, 0, 0}, {0, 0.1, 0}, {3, 0, 0}, {0, -0.2, 0}};
  const StateVector d = h0_field(x, p);
  const AccelPair a = instantaneous_accelerations(x, p);
  EXPECT_EQ(d.r1, x.v1);
  EXPECT_EQ(d.r2, x.v2);
  EXPECT_EQ(d.v1, a.a1);
  EXPECT_EQ(d.v2, a.a2);
}

TEST(Instantaneous, StaticCoulomb) {
  const SystemParams p = make_params(4.0, -1, 0.0);
  const StateVector x{{0, 0, 0}, {0, 0, 0}, {2, 0, 0}, {0, 0, 0}};
  const AccelPair a = instantaneous_accelerations(x, p);
  EXPECT_NEAR(a.a1.x(), 0.25 / 4.0, 1e-15);
  EXPECT_NEAR(a.a2.x(), -0.25, 1e-15);
}

TEST(Instantaneous, ExchangeSymmetry) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    StateVector x = random_state(rng, i % 2 == 0);
    x.r2 = -x.r1;
    x.v2 = -x.v1;
    if (x.separation() < 0.5) continue;
    for (double alpha : {0.5, 0.0}) {
      const AccelPair a = instantaneous_accelerations(x, make_params(1.0, -1, alpha));
      EXPECT_LT((a.a1 + a.a2).norm(), 1e-10 * std::max(1.0, a.a1.norm()));
    }
  }
}

TEST(Instantaneous, PlanarStaysPlanar) {
  const SystemParams p = make_params(1.0, -1, 0.5);
  const StateVector x = circular_initial_condition(p, 50.0);
  const AccelPair a = instantaneous_accelerations(x, p);
  EXPECT_EQ(a.a1.z(), 0.0);
  EXPECT_EQ(a.a2.z(), 0.0);
}

TEST(Instantaneous, DegenerateSystem) {
  const Mat3 I = Mat3::Identity();
  try {
    accel_linear_solve(Vec3(1, 0, 0), Vec3(0, 1, 0), I, I, I, I, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

TEST(Instantaneous, UncoupledSolve) {
  const Mat3 Z = Mat3::Zero();
  const Vec3 v1(0.3, 0, 0), v2(0, 0.4, 0);
  const AccelPair a = accel_linear_solve(Vec3(1, 2, 3), Vec3(-1, 0, 1), Z, Z,
                                         mass_matrix_inverse(v1), mass_matrix_inverse(v2), 2.0);
  EXPECT_LT((2.0 * mass_matrix(v1) * a.a1 - Vec3(1, 2, 3)).norm(), 1e-14);
  EXPECT_LT((mass_matrix(v2) * a.a2 - Vec3(-1, 0, 1)).norm(), 1e-14);
}

TEST(Instantaneous, InvalidStates) {
  const SystemParams p = make_params(1.0, -1, 0.5);
  EXPECT_THROW(h0_field(StateVector{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, p), Error);
  EXPECT_THROW(h0_field(StateVector{{0, 0, 0}, {1.1, 0, 0}, {1, 0, 0}, {0, 0, 0}}, p), Error);
}
