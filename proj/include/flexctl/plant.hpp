#pragma once

// DC motor driving an elastic load. State ordering is [I, theta_dot, theta].

#include <cmath>
#include <string_view>

#include <Eigen/Core>

#include "flexctl/errors.hpp"
#include "flexctl/matseries.hpp"

namespace flexctl {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

// paper_literal keeps the printed model (theta row [0 0 1], input -1/L);
// corrected uses the physical kinematics (theta row [0 1 0], input +1/L).
enum class Fidelity { paper_literal, corrected };

inline std::string_view to_string(Fidelity f) {
  return f == Fidelity::corrected ? "corrected" : "paper_literal";
}

// Defaults are the nominal motor used throughout the tests and the CLI.
struct MotorParams {
  double R = 1.3;     // ohm
  double L = 1e-3;    // henry
  double K_b = 0.5;   // V s / rad
  double K_m = 0.5;   // N m / A
  double J = 0.004;   // kg m^2, motor plus load
  double B_f = 0.04;  // N m s / rad, combined viscous friction
  double K_L = 0.4;   // load stiffness
  Fidelity fidelity = Fidelity::corrected;

  void validate() const {
    for (double v : {R, L, K_b, K_m, J, B_f, K_L}) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("motor parameters must be finite and > 0");
      }
    }
  }
};

struct PlantState {
  double current_I = 0.0;  // A
  double omega = 0.0;      // rad/s
  double theta = 0.0;      // rad

  Vector3 vec() const { return {current_I, omega, theta}; }
  static PlantState from(const Vector3& v) { return {v(0), v(1), v(2)}; }
  bool finite() const {
    return std::isfinite(current_I) && std::isfinite(omega) && std::isfinite(theta);
  }
};

struct DesiredState {
  double theta_d = 0.0;
  double omega_d = 0.0;
  double current_d = 0.0;  // carried for completeness; the control law ignores it
};

struct ContinuousModel {
  Matrix3 A;
  Vector3 B;
};

inline ContinuousModel continuous_matrices(const MotorParams& p) {
  ContinuousModel m;
  m.A << -p.R / p.L, -p.K_b / p.L, 0.0,
         p.K_m / p.J, -p.B_f / p.J, -p.K_L / p.J,
         0.0, 1.0, 0.0;
  m.B << 1.0 / p.L, 0.0, 0.0;
  if (p.fidelity == Fidelity::paper_literal) {
    m.A.row(2) << 0.0, 0.0, 1.0;
    m.B(0) = -1.0 / p.L;
  }
  return m;
}

// D = diag(L, J, K_L)
inline Matrix3 energy_matrix(const MotorParams& p) {
  return Vector3(p.L, p.J, p.K_L).asDiagonal();
}

// E = 1/2 x^T D x
inline double energy(const PlantState& x, const MotorParams& p) {
  return 0.5 * (p.L * x.current_I * x.current_I + p.J * x.omega * x.omega +
                p.K_L * x.theta * x.theta);
}

// Discrete energy rate x^T D Phi(A h) (A x + B u). Equals (E_{k+1} - E_k)/h
// up to the -1/2 dx^T D dx / h curvature term.
inline double energy_rate(const PlantState& x, double u, double h, const MotorParams& p,
                          const SeriesOptions& opts = {}) {
  if (!(h > 0.0)) throw SamplingTooSmall("energy_rate: h must be > 0");
  const auto cm = continuous_matrices(p);
  const Vector3 xv = x.vec();
  const Matrix3 ph = phi(Matrix3(cm.A * h), opts);
  return xv.dot(energy_matrix(p) * (ph * (cm.A * xv + cm.B * u)));
}

}  // namespace flexctl
