#include "flexctl/discretizer.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace flexctl {
namespace {

using validation::zoh_oracle;

TEST(Discretize, ZeroDynamics) {
  const auto m = discretize_zoh<3>(Matrix3::Zero(), Vector3(1000, 0, 0), 0.07);
  EXPECT_EQ(m.F, Matrix3::Identity());
  EXPECT_LT(max_norm(m.G - Vector3(70, 0, 0)), 1e-12);
  EXPECT_EQ(m.h, 0.07);
}

TEST(Discretize, ScalarClosedForm) {
  Eigen::Matrix<double, 1, 1> a, b;
  a << -2.0;
  b << 1.0;
  const auto m = discretize_zoh<1>(a, b, 0.1);
  EXPECT_NEAR(m.F(0, 0), 0.8187307530779818, 1e-15);
  EXPECT_NEAR(m.G(0, 0), 0.09063462346100909, 1e-15);
}

TEST(Discretize, MotorMatchesAugmentedOracle) {
  const MotorParams p;
  const auto cm = continuous_matrices(p);
  const auto m = discretize(p, 0.11);
  const auto z = zoh_oracle(cm.A, cm.B, 0.11);
  EXPECT_LT(max_norm(m.F - z.F) / max_norm(z.F), 1e-8);
  EXPECT_LT(max_norm(m.G - z.G) / max_norm(z.G), 1e-8);
}

TEST(Discretize, RejectsPeriodBelowFloor) {
  EXPECT_THROW(discretize(MotorParams{}, 5e-5), SamplingTooSmall);
  EXPECT_THROW(discretize(MotorParams{}, 0.0), SamplingTooSmall);
  EXPECT_NO_THROW(discretize(MotorParams{}, 1e-4));
}

TEST(RotationalRow, ZeroDynamicsAndOracle) {
  const auto z0 = discretize_zoh<3>(Matrix3::Zero(), Vector3(1, 0, 0), 0.1);
  EXPECT_EQ(rotational_row(z0), Vector3(0, 1, 0));

  const MotorParams p;
  const auto cm = continuous_matrices(p);
  const auto m = discretize(p, 0.11);
  const Vector3 want = zoh_oracle(cm.A, cm.B, 0.11).F.row(1).transpose();
  EXPECT_LT(max_norm(rotational_row(m) - want), 1e-10);
}

TEST(RotationalRow, PredictsVelocityWithoutInput) {
  const MotorParams p;
  const auto m = discretize(p, 0.08);
  const PlantState x{0.4, 5, 0.1};
  const double u = 3.5;
  const PlantState next = step(m, x, u);
  EXPECT_NEAR(rotational_row(m).dot(x.vec()), next.omega - m.G(1) * u, 1e-12);
}

TEST(DiscretizeProperties, Semigroup) {
  const MotorParams p;
  validation::Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    const double h1 = rng.uniform(0.001, 0.2), h2 = rng.uniform(0.001, 0.2);
    const Matrix3 joint = discretize(p, h1 + h2).F;
    const Matrix3 split = discretize(p, h2).F * discretize(p, h1).F;
    EXPECT_LT(max_norm(joint - split), 1e-8 * (1.0 + max_norm(joint)));
  }
}

TEST(DiscretizeProperties, SecondOrderSmallPeriod) {
  const MotorParams p;
  const Matrix3 A = continuous_matrices(p).A;
  std::vector<double> c;
  for (double h : {1e-4, 5e-5, 2.5e-5}) {
    const Matrix3 F = discretize(p, h, 1e-9).F;
    c.push_back(max_norm(F - (Matrix3::Identity() + A * h)) / (h * h));
  }
  EXPECT_NEAR(c[1] / c[0], 1.0, 0.05);
  EXPECT_NEAR(c[2] / c[1], 1.0, 0.05);
  EXPECT_NEAR(c[2], max_norm((A * A).eval()) / 2.0, 0.05 * c[2]);
}

TEST(DiscretizeProperties, InputMatrixLinearity) {
  const auto cm = continuous_matrices(MotorParams{});
  const auto m1 = discretize_zoh<3>(cm.A, cm.B, 0.13);
  const auto m2 = discretize_zoh<3>(cm.A, Vector3(cm.B * 4.0), 0.13);
  EXPECT_EQ(m2.G, (m1.G * 4.0).eval());
  EXPECT_EQ(m1.F, m2.F);
}

TEST(DiscretizeProperties, ApproachesIdentity) {
  const auto m = discretize(MotorParams{}, 1e-7, 1e-9);
  EXPECT_LT(max_norm(m.F - Matrix3::Identity()), 2e-4);
  EXPECT_LT(max_norm(m.G), 2e-4);
}

}  // namespace
}  // namespace flexctl
