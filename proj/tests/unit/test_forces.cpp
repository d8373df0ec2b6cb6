#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "twocharge/forces.hpp"

using namespace twocharge;

namespace {

struct Pair {
  Vec3 r1, v1, r2ret, v2ret;  // particle 1 now, particle 2 at its delayed time
  Vec3 r2, v2, r1ret, v1ret;  // particle 2 now, particle 1 at its delayed time
};

Vec3 random_velocity(std::mt19937_64& rng, double vmax) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v;
  do {
    v = {u(rng), u(rng), u(rng)};
  } while (v.norm() > 1.0);
  return vmax * v;
}

Pair random_pair(std::mt19937_64& rng, bool planar = false) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  auto p = [&] { return Vec3(pos(rng), pos(rng), planar ? 0.0 : pos(rng)); };
  auto v = [&] {
    Vec3 w = random_velocity(rng, 0.7);
    if (planar) w.z() = 0.0;
    return w;
  };
  return Pair{p(), v(), p(), v(), p(), v(), p(), v()};
}

// Retarded-field expressions written out component by component.
Vec3 F1_ret(const Vec3& r1, const Vec3& v1, const Vec3& r2, const Vec3& v2, int S) {
  const Vec3 e = (r1 - r2).normalized();
  const double pre = S * (1 - v2.dot(v2)) / (std::pow(1 - v2.dot(e), 3) * (r1 - r2).squaredNorm());
  return pre * Vec3(v1.y() * (v2.x() * e.y() - v2.y() * e.x()) +
                        v1.z() * (v2.x() * e.z() - v2.z() * e.x()) - v2.x() + e.x(),
                    v1.x() * (v2.y() * e.x() - v2.x() * e.y()) +
                        v1.z() * (v2.y() * e.z() - v2.z() * e.y()) - v2.y() + e.y(),
                    v1.x() * (v2.z() * e.x() - v2.x() * e.z()) +
                        v1.y() * (v2.z() * e.y() - v2.y() * e.z()) - v2.z() + e.z());
}

Vec3 F2_ret(const Vec3& r2, const Vec3& v2, const Vec3& r1, const Vec3& v1, int S) {
  const Vec3 e = (r2 - r1).normalized();
  const double pre = S * (1 - v1.dot(v1)) / (std::pow(v1.dot(e) - 1, 3) * (r2 - r1).squaredNorm());
  return pre * Vec3(v2.y() * (v1.y() * e.x() - v1.x() * e.y()) +
                        v2.z() * (v1.z() * e.x() - v1.x() * e.z()) + v1.x() - e.x(),
                    v2.x() * (v1.x() * e.y() - v1.y() * e.x()) +
                        v2.z() * (v1.z() * e.y() - v1.y() * e.z()) + v1.y() - e.y(),
                    v2.x() * (v1.x() * e.z() - v1.z() * e.x()) +
                        v2.y() * (v1.y() * e.z() - v1.z() * e.y()) + v1.z() - e.z());
}

Mat3 M12_ret(const Vec3& r1, const Vec3& v1, const Vec3& r2, const Vec3& v2, int S) {
  const Vec3 e = (r1 - r2).normalized();
  const double ex = e.x(), ey = e.y(), ez = e.z();
  const double ux = v2.x(), uy = v2.y(), uz = v2.z();
  const double wx = v1.x(), wy = v1.y(), wz = v1.z();
  Mat3 L;
  L(0, 0) = (-uz * ey + uy * ez) * (-wy * ez + wz * ey) + (uy - ey) * (wy - ey) + (uz - ez) * (wz - ez);
  L(0, 1) = (-ux * ez + uz * ex) * (-wy * ez + wz * ey) - (ux - ex) * (wy - ey);
  L(0, 2) = (-uy * ex + ux * ey) * (-wy * ez + wz * ey) - (ux - ex) * (wz - ez);
  L(1, 0) = (-uy * ez + uz * ey) * (-wx * ez + wz * ex) - (uy - ey) * (wx - ex);
  L(1, 1) = (-uz * ex + ux * ez) * (-wx * ez + wz * ex) + (ux - ex) * (wx - ex) + (uz - ez) * (wz - ez);
  L(1, 2) = (-ux * ey + uy * ex) * (-wx * ez + wz * ex) - (uy - ey) * (wz - ez);
  L(2, 0) = (-uz * ey + uy * ez) * (-wx * ey + wy * ex) - (uz - ez) * (wx - ex);
  L(2, 1) = (-ux * ez + uz * ex) * (-wx * ey + wy * ex) - (uz - ez) * (wy - ey);
  L(2, 2) = (-uy * ex + ux * ey) * (-wx * ey + wy * ex) + (uy - ey) * (wy - ey) + (ux - ex) * (wx - ex);
  return S / (std::pow(1 - v2.dot(e), 3) * (r2 - r1).norm()) * L;
}

Mat3 M21_ret(const Vec3& r2, const Vec3& v2, const Vec3& r1, const Vec3& v1, int S) {
  const Vec3 e = (r2 - r1).normalized();
  const double ex = e.x(), ey = e.y(), ez = e.z();
  const double ux = v1.x(), uy = v1.y(), uz = v1.z();
  const double wx = v2.x(), wy = v2.y(), wz = v2.z();
  Mat3 L;
  L(0, 0) = (wy * ez - wz * ey) * (uy * ez - uz * ey) - (wy - ey) * (uy - ey) - (wz - ez) * (uz - ez);
  L(0, 1) = (wz * ey - wy * ez) * (ux * ez - uz * ex) + (wy - ey) * (ux - ex);
  L(0, 2) = (wy * ez - wz * ey) * (ux * ey - uy * ex) + (wz - ez) * (ux - ex);
  L(1, 0) = (wz * ex - wx * ez) * (uy * ez - uz * ey) + (wx - ex) * (uy - ey);
  L(1, 1) = (wx * ez - wz * ex) * (ux * ez - uz * ex) - (wx - ex) * (ux - ex) - (wz - ez) * (uz - ez);
  L(1, 2) = (wz * ex - wx * ez) * (ux * ey - uy * ex) + (wz - ez) * (uy - ey);
  L(2, 0) = (wx * ey - wy * ex) * (uy * ez - uz * ey) + (wx - ex) * (uz - ez);
  L(2, 1) = (wy * ex - wx * ey) * (ux * ez - uz * ex) + (wy - ey) * (uz - ez);
  L(2, 2) = (wx * ey - wy * ex) * (ux * ey - uy * ex) - (wx - ex) * (ux - ex) - (wy - ey) * (uy - ey);
  return S / (std::pow(v1.dot(e) - 1, 3) * (r2 - r1).norm()) * L;
}

// Planar expressions for both branches. `adv` selects the advanced one.
Vec2 F1_planar(const Vec2& r1, const Vec2& v1, const Vec2& r2, const Vec2& v2, int S, bool adv) {
  const Vec2 e = (r1 - r2).normalized();
  if (!adv) {
    const double pre = S * (1 - v2.dot(v2)) / (std::pow(1 - v2.dot(e), 3) * (r1 - r2).squaredNorm());
    return pre * Vec2(v1.y() * (v2.x() * e.y() - v2.y() * e.x()) - v2.x() + e.x(),
                      v1.x() * (v2.y() * e.x() - v2.x() * e.y()) - v2.y() + e.y());
  }
  const double pre = S * (1 - v2.dot(v2)) / (std::pow(1 + v2.dot(e), 3) * (r1 - r2).squaredNorm());
  return pre * Vec2(v1.y() * (v2.y() * e.x() - v2.x() * e.y()) + v2.x() + e.x(),
                    v1.x() * (v2.x() * e.y() - v2.y() * e.x()) + v2.y() + e.y());
}

Vec2 F2_planar(const Vec2& r2, const Vec2& v2, const Vec2& r1, const Vec2& v1, int S, bool adv) {
  const Vec2 e = (r2 - r1).normalized();
  if (!adv) {
    const double pre = S * (1 - v1.dot(v1)) / (std::pow(v1.dot(e) - 1, 3) * (r2 - r1).squaredNorm());
    return pre * Vec2(v2.y() * (v1.y() * e.x() - v1.x() * e.y()) + v1.x() - e.x(),
                      v2.x() * (v1.x() * e.y() - v1.y() * e.x()) + v1.y() - e.y());
  }
  const double pre = -S * (1 - v1.dot(v1)) / (std::pow(v1.dot(e) + 1, 3) * (r2 - r1).squaredNorm());
  return pre * Vec2(v2.y() * (v1.x() * e.y() - v1.y() * e.x()) - v1.x() - e.x(),
                    v2.x() * (v1.y() * e.x() - v1.x() * e.y()) - v1.y() - e.y());
}

Mat2 M12_planar(const Vec2& r1, const Vec2& v1, const Vec2& r2, const Vec2& v2, int S, bool adv) {
  const Vec2 e = (r1 - r2).normalized();
  Mat2 L;
  if (!adv) {
    L << (v2.y() - e.y()) * (v1.y() - e.y()), -(v2.x() - e.x()) * (v1.y() - e.y()),
        -(v2.y() - e.y()) * (v1.x() - e.x()), (v2.x() - e.x()) * (v1.x() - e.x());
    return S * L / (std::pow(1 - v2.dot(e), 3) * (r1 - r2).norm());
  }
  L << -(v2.y() + e.y()) * (v1.y() - e.y()), (v2.x() + e.x()) * (v1.y() - e.y()),
      (v2.y() + e.y()) * (v1.x() - e.x()), -(v2.x() + e.x()) * (v1.x() - e.x());
  return S * L / (std::pow(1 + v2.dot(e), 3) * (r1 - r2).norm());
}

Mat2 M21_planar(const Vec2& r2, const Vec2& v2, const Vec2& r1, const Vec2& v1, int S, bool adv) {
  const Vec2 e = (r2 - r1).normalized();
  Mat2 L;
  if (!adv) {
    L << -(v2.y() - e.y()) * (v1.y() - e.y()), (v2.y() - e.y()) * (v1.x() - e.x()),
        (v2.x() - e.x()) * (v1.y() - e.y()), -(v2.x() - e.x()) * (v1.x() - e.x());
    return S * L / (std::pow(v1.dot(e) - 1, 3) * (r2 - r1).norm());
  }
  L << (v2.y() - e.y()) * (v1.y() + e.y()), -(v2.y() - e.y()) * (v1.x() + e.x()),
      -(v2.x() - e.x()) * (v1.y() + e.y()), (v2.x() - e.x()) * (v1.x() + e.x());
  return -S * L / (std::pow(v1.dot(e) + 1, 3) * (r2 - r1).norm());
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST(Kernel, UnitSeparation) {
  FieldEvalInput in{{3, 4, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, Branch::retarded};
  const Vec3 n = unit_separation(in);
  EXPECT_DOUBLE_EQ(n.x(), 0.6);
  EXPECT_DOUBLE_EQ(n.y(), 0.8);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Pair p = random_pair(rng);
    EXPECT_NEAR(unit_separation({p.r1, p.v1, p.r2ret, p.v2ret, Branch::retarded}).norm(), 1.0,
                1e-14);
  }
}

TEST(Kernel, CoulombStaticLimit) {
  for (double r : {0.5, 1.0, 3.0, 50.0, 1234.5}) {
    for (int S : {-1, 1}) {
      for (Branch b : {Branch::retarded, Branch::advanced}) {
        const ForceKernel k =
            force_kernel({{r, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, b}, S);
        EXPECT_NEAR(k.f.norm(), 1.0 / (r * r), 1e-14 / (r * r));
        EXPECT_NEAR(k.f.x(), S / (r * r), 1e-14 / (r * r));
      }
    }
  }
}

TEST(Kernel, RetardedMatchesComponentFormulas) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Pair p = random_pair(rng);
    for (int S : {-1, 1}) {
      const ForceKernel k1 = force_kernel({p.r1, p.v1, p.r2ret, p.v2ret, Branch::retarded}, S);
      const ForceKernel k2 = force_kernel({p.r2, p.v2, p.r1ret, p.v1ret, Branch::retarded}, S);
      EXPECT_LT(rel(k1.f, F1_ret(p.r1, p.v1, p.r2ret, p.v2ret, S)), 1e-12);
      EXPECT_LT(rel(k2.f, F2_ret(p.r2, p.v2, p.r1ret, p.v1ret, S)), 1e-12);
      EXPECT_LT(rel(k1.coupling, M12_ret(p.r1, p.v1, p.r2ret, p.v2ret, S)), 1e-12);
      EXPECT_LT(rel(k2.coupling, M21_ret(p.r2, p.v2, p.r1ret, p.v1ret, S)), 1e-12);
    }
  }
}

TEST(Kernel, PlanarMatchesComponentFormulas) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const Pair p = random_pair(rng, true);
    auto xy = [](const Vec3& v) { return Vec2(v.x(), v.y()); };
    for (int S : {-1, 1}) {
      for (Branch b : {Branch::retarded, Branch::advanced}) {
        const bool adv = b == Branch::advanced;
        const PlanarForceKernel k1 = planar_force_kernel(FieldEvalInput{p.r1, p.v1, p.r2ret, p.v2ret, b}, S);
        const PlanarForceKernel k2 = planar_force_kernel(FieldEvalInput{p.r2, p.v2, p.r1ret, p.v1ret, b}, S);
        EXPECT_LT(rel(k1.f, F1_planar(xy(p.r1), xy(p.v1), xy(p.r2ret), xy(p.v2ret), S, adv)), 1e-12);
        EXPECT_LT(rel(k2.f, F2_planar(xy(p.r2), xy(p.v2), xy(p.r1ret), xy(p.v1ret), S, adv)), 1e-12);
        EXPECT_LT(rel(k1.coupling, M12_planar(xy(p.r1), xy(p.v1), xy(p.r2ret), xy(p.v2ret), S, adv)),
                  1e-12);
        EXPECT_LT(rel(k2.coupling, M21_planar(xy(p.r2), xy(p.v2), xy(p.r1ret), xy(p.v1ret), S, adv)),
                  1e-12);
      }
    }
  }
}

TEST(Kernel, PlanarEqualsThreeDimensional) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const Pair p = random_pair(rng, true);
    for (Branch b : {Branch::retarded, Branch::advanced}) {
      const FieldEvalInput in{p.r1, p.v1, p.r2ret, p.v2ret, b};
      const ForceKernel k3 = force_kernel(in, -1);
      const PlanarForceKernel k2 = planar_force_kernel(in, -1);
      EXPECT_LT((k3.f.head<2>() - k2.f).norm(), 1e-13 * std::max(1.0, k3.f.norm()));
      EXPECT_EQ(k3.f.z(), 0.0);
      EXPECT_LT((k3.coupling.topLeftCorner<2, 2>() - k2.coupling).norm(),
                1e-13 * std::max(1.0, k3.coupling.norm()));
      EXPECT_EQ(k3.coupling.row(2).head<2>().norm(), 0.0);
    }
  }
}

TEST(Kernel, PlanarRejectsOutOfPlaneInput) {
  EXPECT_THROW(planar_force_kernel(FieldEvalInput{{1, 0, 0.1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, Branch::retarded}, -1),
               Error);
}

TEST(Kernel, AdvancedIsRetardedWithReversedSourceVelocity) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const Pair p = random_pair(rng);
    const ForceKernel adv = force_kernel({p.r1, p.v1, p.r2ret, p.v2ret, Branch::advanced}, -1);
    const ForceKernel ret = force_kernel({p.r1, p.v1, p.r2ret, -p.v2ret, Branch::retarded}, -1);
    EXPECT_LT(rel(adv.f, ret.f), 1e-13);
    EXPECT_LT(rel(adv.coupling, ret.coupling), 1e-13);
  }
}

TEST(Kernel, SingularInputs) {
  auto kind_of = [](const FieldEvalInput& in) {
    try {
      force_kernel(in, -1);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  EXPECT_EQ(kind_of({{1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, Branch::retarded}),
            ErrorKind::singularity);
  EXPECT_EQ(kind_of({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1.0, 0, 0}, Branch::retarded}),
            ErrorKind::superluminal);
  // source moving straight at the field point: 1 - n.v -> 0
  EXPECT_EQ(kind_of({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1.0 - 1e-12, 0, 0}, Branch::retarded}),
            ErrorKind::light_cone);
  EXPECT_EQ(kind_of({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {-(1.0 - 1e-12), 0, 0}, Branch::advanced}),
            ErrorKind::light_cone);
}

TEST(MassMatrix, InverseIdentity) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = random_velocity(rng, 0.99);
    EXPECT_LT((mass_matrix(v) * mass_matrix_inverse(v) - Mat3::Identity()).norm(), 1e-12);
  }
  EXPECT_EQ(mass_matrix(Vec3::Zero()), Mat3::Identity());
  const Vec3 v(0.6, 0, 0);
  EXPECT_DOUBLE_EQ(mass_matrix(v)(0, 0), 1.25 * 1.25 * 1.25);
  EXPECT_DOUBLE_EQ(mass_matrix(v)(1, 1), 1.25);
}

TEST(MassMatrix, ProjectorIdempotence) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> logspeed(std::log(1e-8), std::log(0.99));
  for (int i = 0; i < 500; ++i) {
    const Vec3 v = random_velocity(rng, 1.0).normalized() * std::exp(logspeed(rng));
    const Mat3 Q = v * v.transpose() / v.squaredNorm();
    EXPECT_LT((Q * Q - Q).norm(), 1e-13);
  }
}

TEST(MassMatrix, PlanarInverseMatches) {
  const Vec2 v(0.3, -0.5);
  const Mat3 m = mass_matrix_inverse(Vec3(0.3, -0.5, 0.0));
  EXPECT_LT((mass_matrix_inverse<2>(v) - m.topLeftCorner<2, 2>()).norm(), 1e-15);
}

TEST(AlphaMix, Weights) {
  ForceKernel r{Vec3(1, 0, 0), Mat3::Identity()};
  ForceKernel a{Vec3(0, 1, 0), 2.0 * Mat3::Identity()};
  const ForceKernel half = alpha_mix<3>(r, a, 0.5);
  EXPECT_EQ(half.f, r.f);
  EXPECT_EQ(half.coupling, r.coupling);
  const ForceKernel sym = alpha_mix<3>(r, a, 0.0);
  EXPECT_EQ(sym.f, Vec3(0.5, 0.5, 0));
  EXPECT_EQ(sym.coupling, 1.5 * Mat3::Identity());
  const ForceKernel adv = alpha_mix<3>(r, a, -0.5);
  EXPECT_EQ(adv.f, a.f);
  EXPECT_THROW(alpha_mix<3>(r, a, 0.7), Error);
}
