#pragma once

// Exact zero-order-hold discretization for a per-step period h:
//   F = e^{A h} = I + A h Phi(A h),  G = h Phi(A h) B.

#include <string>

#include <Eigen/Core>

#include "flexctl/errors.hpp"
#include "flexctl/matseries.hpp"
#include "flexctl/plant.hpp"

namespace flexctl {

inline constexpr double kDefaultMinPeriod = 1e-4;

template <int N>
struct ZohModel {
  Eigen::Matrix<double, N, N> F;
  Eigen::Matrix<double, N, 1> G;
  Eigen::Matrix<double, N, N> phi_Ah;  // Phi(A h), reused by the controller
  double h = 0.0;
};

using DiscreteModel = ZohModel<3>;

template <int N>
ZohModel<N> discretize_zoh(const Eigen::Matrix<double, N, N>& A,
                           const Eigen::Matrix<double, N, 1>& B, double h,
                           double min_period = kDefaultMinPeriod,
                           const SeriesOptions& opts = {}) {
  if (!(h >= min_period)) {
    throw SamplingTooSmall("sampling period " + std::to_string(h) + " below floor " +
                           std::to_string(min_period));
  }
  using Mat = Eigen::Matrix<double, N, N>;
  const Mat Ah = A * h;
  ZohModel<N> m;
  m.h = h;
  m.phi_Ah = phi(Ah, opts);
  m.F = Mat::Identity() + Ah * m.phi_Ah;
  m.G = h * (m.phi_Ah * B);
  return m;
}

inline DiscreteModel discretize(const MotorParams& p, double h,
                                double min_period = kDefaultMinPeriod,
                                const SeriesOptions& opts = {}) {
  const auto cm = continuous_matrices(p);
  return discretize_zoh<3>(cm.A, cm.B, h, min_period, opts);
}

// F_m: the theta_dot row of F, so F_m x is the input-free prediction of
// theta_dot at the next sample.
inline Vector3 rotational_row(const DiscreteModel& m) { return m.F.row(1).transpose(); }

inline PlantState step(const DiscreteModel& m, const PlantState& x, double u) {
  return PlantState::from(m.F * x.vec() + m.G * u);
}

}  // namespace flexctl
