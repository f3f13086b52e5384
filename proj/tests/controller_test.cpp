#include "flexctl/controller.hpp"

#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

#include "flexctl/stability.hpp"
#include "test_util.hpp"

namespace flexctl {
namespace {

const PlantState kInitial{0.4, 5.0, 0.1};
const DesiredState kTarget{2.0, 0.0, 0.0};

TEST(DynamicGain, StandardPeriodGivesSumOfGains) {
  const GainSet g;
  const auto r = dynamic_gain(kInitial, 0.0, g.h_s, g, GuardSet{}, MotorParams{});
  ASSERT_FALSE(r.fallback);
  EXPECT_NEAR(r.k_E, 1335.0, 1e-9);
}

TEST(DynamicGain, ConstantMode) {
  GainSet g;
  g.gain_mode = GainMode::constant;
  for (double h : {0.05, 0.11, 0.2}) {
    EXPECT_EQ(dynamic_gain(kInitial, 3.0, h, g, GuardSet{}, MotorParams{}).k_E, 725.0);
  }
}

TEST(DynamicGain, ZeroStateFallsBack) {
  const auto r = dynamic_gain({0, 0, 0}, 0.0, 0.07, GainSet{}, GuardSet{}, MotorParams{});
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.k_E, 725.0);
}

TEST(DynamicGain, RejectsSmallPeriod) {
  EXPECT_THROW(dynamic_gain(kInitial, 0.0, 5e-5, GainSet{}, GuardSet{}, MotorParams{}),
               SamplingTooSmall);
}

TEST(DynamicGain, StaysWithinClamp) {
  const MotorParams p;
  const GainSet g;
  const GuardSet guards;
  validation::Rng rng(5);
  int clamped = 0;
  for (int t = 0; t < 500; ++t) {
    const PlantState x{rng.uniform(-5, 5), rng.uniform(-20, 20), rng.uniform(-5, 5)};
    const auto r = dynamic_gain(x, rng.uniform(-45, 45), rng.uniform(0.05, 0.2), g, guards, p);
    if (r.fallback) continue;
    EXPECT_GE(r.k_E, g.K_c);
    EXPECT_LE(r.k_E, guards.k_E_max);
    clamped += r.clamped ? 1 : 0;
  }
  EXPECT_GT(clamped, 0);  // sign-mismatched rate ratios do occur
}

TEST(ControlInput, OriginHitsEnergyFloor) {
  const auto m = discretize(MotorParams{}, 0.1);
  const auto out = control_input({0, 0, 0}, {}, m, GainSet{}, GuardSet{}, MotorParams{}, 0.0);
  EXPECT_EQ(out.guard_event, GuardEvent::energy_floor);
  EXPECT_EQ(out.u, 0.0);
  EXPECT_FALSE(out.saturated);
}

TEST(ControlInput, RejectsSmallPeriod) {
  auto m = discretize(MotorParams{}, 1e-3);
  m.h = 5e-5;
  EXPECT_THROW(control_input(kInitial, kTarget, m, GainSet{}, GuardSet{}, MotorParams{}, 0.0),
               SamplingTooSmall);
}

TEST(ControlInput, InitialStateSaturates) {
  const MotorParams p;
  const auto m = discretize(p, 0.11);
  const auto out = control_input(kInitial, kTarget, m, GainSet{}, GuardSet{}, p, 0.0);
  EXPECT_EQ(out.guard_event, GuardEvent::none);
  EXPECT_GT(out.u_raw, 45.0);
  EXPECT_EQ(out.u, 45.0);
  EXPECT_TRUE(out.saturated);
}

TEST(ControlInput, LargeTrackingErrorSaturates) {
  const MotorParams p;
  const auto m = discretize(p, 0.11);
  // theta - theta_d = -10 with the shaft moving toward the target.
  const auto neg = control_input({0.0, 50.0, -8.0}, kTarget, m, GainSet{}, GuardSet{}, p, 0.0);
  EXPECT_LT(neg.u_raw, -45.0);
  EXPECT_EQ(neg.u, -45.0);
  EXPECT_TRUE(neg.saturated);
  // theta - theta_d = +10 moving away stays inside the limit at h_s.
  const auto pos = control_input({0.0, 50.0, 12.0}, kTarget, m, GainSet{}, GuardSet{}, p, 0.0);
  EXPECT_NEAR(pos.u_raw, 18.6, 0.05);
  EXPECT_FALSE(pos.saturated);
}

TEST(ControlInput, DenominatorFloorHoldsPreviousInput) {
  const MotorParams p;
  const auto m = discretize(p, 0.1);
  // Pick x orthogonal to D Phi B so x^T D Phi B vanishes.
  const Vector3 dphib = energy_matrix(p) * m.phi_Ah * continuous_matrices(p).B;
  const Vector3 x = dphib.cross(Vector3(0, 0, 1)).normalized() * 3.0;
  const auto out =
      control_input(PlantState::from(x), kTarget, m, GainSet{}, GuardSet{}, p, 100.0);
  EXPECT_EQ(out.guard_event, GuardEvent::denominator_floor);
  EXPECT_EQ(out.u, 45.0);
}

TEST(ControlInput, EquilibriumTriggersGainFallback) {
  const MotorParams p;
  const double current = p.K_L * 2.0 / p.K_m;
  const PlantState rest{current, 0.0, 2.0};
  const double u_eq = p.R * current;
  const auto m = discretize(p, 0.07);
  const auto out = control_input(rest, kTarget, m, GainSet{}, GuardSet{}, p, u_eq);
  EXPECT_EQ(out.guard_event, GuardEvent::gain_fallback);
  EXPECT_EQ(out.k_E_used, 725.0);
  EXPECT_NEAR(out.u, u_eq, 1e-9);
}

// The law is V' = 0 solved for u.
TEST(ControlInput, ClosesLyapunovRate) {
  const MotorParams p;
  const GainSet g;
  validation::Rng rng(31337);
  int checked = 0;
  while (checked < 100) {
    const PlantState x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    if (x.vec().norm() > 10.0) continue;
    const DesiredState d{rng.uniform(-3, 3), 0.0, 0.0};
    const auto m = discretize(p, rng.uniform(0.05, 0.2));
    const auto out = control_input(x, d, m, g, GuardSet{}, p, rng.uniform(-45, 45));
    if (out.saturated || out.guard_event != GuardEvent::none) continue;
    const auto terms = v_prime_terms(x, d, out.u, m, g, out.k_E_used, p);
    EXPECT_LE(std::abs(terms.total()), 1e-7 * (1.0 + terms.abs_sum()));
    ++checked;
  }
}

TEST(ControlInput, OutputBoundedAndDeterministic) {
  const MotorParams p;
  const GainSet g;
  validation::Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const PlantState x{rng.uniform(-20, 20), rng.uniform(-100, 100), rng.uniform(-20, 20)};
    const auto m = discretize(p, rng.uniform(0.01, 0.3));
    const double u_prev = rng.uniform(-60, 60);
    const auto a = control_input(x, kTarget, m, g, GuardSet{}, p, u_prev);
    const auto b = control_input(x, kTarget, m, g, GuardSet{}, p, u_prev);
    EXPECT_LE(std::abs(a.u), g.u_sat);
    EXPECT_EQ(std::memcmp(&a.u, &b.u, sizeof a.u), 0);
    EXPECT_EQ(a.k_E_used, b.k_E_used);
  }
}

TEST(GainSetValidation, Rejects) {
  GainSet g;
  g.k_D = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = GainSet{};
  g.K_c = -1.0;
  EXPECT_THROW(g.validate(), ConfigError);
  GuardSet guards;
  guards.eps_c = 0.0;
  EXPECT_THROW(guards.validate(), ConfigError);
}

}  // namespace
}  // namespace flexctl
