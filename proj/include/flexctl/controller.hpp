#pragma once

// Energy-based control law for arbitrarily switching sampling periods.
//
// The input u_k is the value that makes the discrete Lyapunov rate vanish:
//
//   k_E E_k x^T D Phi(A h)(A x + B u) + (k_D/h)(w - w_d)(F_m x - w)
//     + k_P (theta - theta_d) w = 0
//
// with the energy gain k_E retuned per step from the ratio of discrete
// energy rates at the standard period h_s and the current period h_k.

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "flexctl/discretizer.hpp"
#include "flexctl/errors.hpp"
#include "flexctl/matseries.hpp"
#include "flexctl/plant.hpp"

namespace flexctl {

enum class GainMode { dynamic, constant };

inline std::string_view to_string(GainMode m) {
  return m == GainMode::dynamic ? "dynamic" : "constant";
}

struct GainSet {
  double k_E_s = 725.0;  // energy gain at the standard period
  double k_P = 565.0;
  double k_D = 0.07;
  double K_c = 610.0;
  double h_s = 0.11;     // s
  double u_sat = 45.0;   // V
  GainMode gain_mode = GainMode::dynamic;

  void validate() const {
    if (!(k_E_s > 0.0 && k_P > 0.0 && k_D > 0.0 && u_sat > 0.0)) {
      throw ConfigError("gains k_E_s, k_P, k_D and u_sat must be > 0");
    }
    if (!(K_c >= 0.0)) throw ConfigError("gain K_c must be >= 0");
    if (!(h_s > 0.0)) throw ConfigError("standard period h_s must be > 0");
  }
};

struct GuardSet {
  double eps_h = 1e-4;       // s, smallest admissible period
  double eps_c = 1e-6;       // J, energy singularity floor
  double eps_den = 1e-9;     // floor on |k_E E x^T D Phi B|
  double eps_Eprime = 1e-9;  // W, floor on |E'(h_k)| for gain retuning
  double k_E_max = 1e6;

  void validate() const {
    for (double v : {eps_h, eps_c, eps_den, eps_Eprime, k_E_max}) {
      if (!(v > 0.0)) throw ConfigError("guard values must be > 0");
    }
  }
};

enum class GuardEvent { none, energy_floor, denominator_floor, gain_fallback };

inline std::string_view to_string(GuardEvent e) {
  switch (e) {
    case GuardEvent::none: return "none";
    case GuardEvent::energy_floor: return "energy_floor";
    case GuardEvent::denominator_floor: return "denominator_floor";
    case GuardEvent::gain_fallback: return "gain_fallback";
  }
  return "none";
}

struct GainResult {
  double k_E = 0.0;
  bool fallback = false;  // |E'(h_k)| under eps_Eprime, k_E_s returned
  bool clamped = false;   // ratio fell outside [K_c, k_E_max]
};

struct ControlOutput {
  double u = 0.0;
  double u_raw = 0.0;  // before saturation; equals u on guarded steps
  double k_E_used = 0.0;
  bool saturated = false;
  bool gain_clamped = false;
  GuardEvent guard_event = GuardEvent::none;
};

inline void require_period(double h, const GuardSet& guards) {
  if (!(h >= guards.eps_h)) {
    throw SamplingTooSmall("sampling period " + std::to_string(h) + " below eps_h " +
                           std::to_string(guards.eps_h));
  }
}

// k_E(h_k) = k_E_s E'(h_s) / E'(h_k) + K_c, both rates evaluated at the
// current state with the previous input.
inline GainResult dynamic_gain(const PlantState& x, double u_prev, double h_k,
                               const GainSet& gains, const GuardSet& guards,
                               const MotorParams& p, const SeriesOptions& opts = {}) {
  require_period(h_k, guards);
  if (gains.gain_mode == GainMode::constant) return {gains.k_E_s, false, false};

  const double rate_k = energy_rate(x, u_prev, h_k, p, opts);
  if (!(std::abs(rate_k) >= guards.eps_Eprime)) return {gains.k_E_s, true, false};

  const double rate_s = energy_rate(x, u_prev, gains.h_s, p, opts);
  const double ratio = gains.k_E_s * rate_s / rate_k + gains.K_c;
  const double k_E = std::clamp(ratio, gains.K_c, guards.k_E_max);
  return {k_E, false, k_E != ratio};
}

inline ControlOutput control_input(const PlantState& x, const DesiredState& d,
                                   const DiscreteModel& model, const GainSet& gains,
                                   const GuardSet& guards, const MotorParams& p,
                                   double u_prev, const SeriesOptions& opts = {}) {
  const double h = model.h;
  require_period(h, guards);

  const GainResult gain = dynamic_gain(x, u_prev, h, gains, guards, p, opts);
  ControlOutput out;
  out.k_E_used = gain.k_E;
  out.gain_clamped = gain.clamped;

  const double e_k = energy(x, p);
  if (e_k <= guards.eps_c) {
    out.guard_event = GuardEvent::energy_floor;
    return out;
  }

  const auto cm = continuous_matrices(p);
  const Vector3 xv = x.vec();
  const Eigen::RowVector3d xd_phi = xv.transpose() * energy_matrix(p) * model.phi_Ah;
  const double energy_scale = gain.k_E * e_k;

  const double den = energy_scale * xd_phi.dot(cm.B);
  if (!(std::abs(den) >= guards.eps_den)) {
    out.guard_event = GuardEvent::denominator_floor;
    out.u = out.u_raw = std::clamp(u_prev, -gains.u_sat, gains.u_sat);
    return out;
  }

  const double w_err = x.omega - d.omega_d;
  const double num = energy_scale * xd_phi.dot(cm.A * xv) +
                     (gains.k_D / h) * w_err * (rotational_row(model).dot(xv) - x.omega) +
                     gains.k_P * (x.theta - d.theta_d) * x.omega;

  out.u_raw = -num / den;
  out.u = std::clamp(out.u_raw, -gains.u_sat, gains.u_sat);
  out.saturated = out.u != out.u_raw;
  if (gain.fallback) out.guard_event = GuardEvent::gain_fallback;
  return out;
}

}  // namespace flexctl
