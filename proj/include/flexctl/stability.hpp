#pragma once

// Lyapunov candidate, its discrete rate, and the sign conditions derived
// from it.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "flexctl/controller.hpp"
#include "flexctl/csv.hpp"
#include "flexctl/discretizer.hpp"
#include "flexctl/plant.hpp"

namespace flexctl {

// V = 1/2 k_E E^2 + 1/2 k_D (w - w_d)^2 + 1/2 k_P (theta - theta_d)^2
inline double lyapunov(const PlantState& x, const DesiredState& d, double E,
                       const GainSet& gains, double k_E_used) {
  const double w_err = x.omega - d.omega_d;
  const double th_err = x.theta - d.theta_d;
  return 0.5 * k_E_used * E * E + 0.5 * gains.k_D * w_err * w_err +
         0.5 * gains.k_P * th_err * th_err;
}

// The four additive pieces of the discrete rate V'.
struct VPrimeTerms {
  double energy_drift = 0.0;  // k_E E x^T D Phi A x
  double energy_input = 0.0;  // k_E E x^T D Phi B u
  double damping = 0.0;       // (k_D/h)(w - w_d)(F_m x - w)
  double position = 0.0;      // k_P (theta - theta_d) w

  double total() const { return energy_drift + energy_input + damping + position; }
  double abs_sum() const {
    return std::abs(energy_drift) + std::abs(energy_input) + std::abs(damping) +
           std::abs(position);
  }
};

inline VPrimeTerms v_prime_terms(const PlantState& x, const DesiredState& d, double u,
                                 const DiscreteModel& model, const GainSet& gains,
                                 double k_E_used, const MotorParams& p) {
  const auto cm = continuous_matrices(p);
  const Vector3 xv = x.vec();
  const Eigen::RowVector3d xd_phi = xv.transpose() * energy_matrix(p) * model.phi_Ah;
  const double scale = k_E_used * energy(x, p);
  VPrimeTerms t;
  t.energy_drift = scale * xd_phi.dot(cm.A * xv);
  t.energy_input = scale * xd_phi.dot(cm.B) * u;
  t.damping = (gains.k_D / model.h) * (x.omega - d.omega_d) *
              (rotational_row(model).dot(xv) - x.omega);
  t.position = gains.k_P * (x.theta - d.theta_d) * x.omega;
  return t;
}

inline double v_prime(const PlantState& x, const DesiredState& d, double u,
                      const DiscreteModel& model, const GainSet& gains, double k_E_used,
                      const MotorParams& p) {
  return v_prime_terms(x, d, u, model, gains, k_E_used, p).total();
}

// Relative slack used when testing V' <= 0; the control law zeroes V' only
// up to rounding.
inline constexpr double kVPrimeRelTol = 1e-7;

struct LyapunovSample {
  double V = 0.0;
  double V_prime = 0.0;
  bool condition_main = false;    // V' <= 0
  bool V1_ok = false;
  bool V2_ok = false;             // componentwise B u + A x <= 0
  bool boundary_low_ok = false;   // h -> 0 case
  bool boundary_high_ok = false;  // h -> inf case, componentwise
  double V1_margin = 0.0;         // V1 left-hand side
  double V2_margin = 0.0;         // max component of B u + A x
};

// V1 left-hand side: k_P (theta - theta_d) w - (k_D/h)(w - w_d)(F*_m x - w),
// with F*_m = -F_m.
inline double v1_margin(const PlantState& x, const DesiredState& d, const DiscreteModel& model,
                        const GainSet& gains) {
  const double fm_star_x = -rotational_row(model).dot(x.vec());
  return gains.k_P * (x.theta - d.theta_d) * x.omega -
         (gains.k_D / model.h) * (x.omega - d.omega_d) * (fm_star_x - x.omega);
}

inline LyapunovSample check_conditions(const PlantState& x, const DesiredState& d, double u,
                                       const DiscreteModel& model, const GainSet& gains,
                                       double k_E_used, const MotorParams& p) {
  const auto cm = continuous_matrices(p);
  const Vector3 xv = x.vec();
  const VPrimeTerms terms = v_prime_terms(x, d, u, model, gains, k_E_used, p);

  LyapunovSample s;
  s.V = lyapunov(x, d, energy(x, p), gains, k_E_used);
  s.V_prime = terms.total();
  s.condition_main = s.V_prime <= kVPrimeRelTol * (1.0 + terms.abs_sum());

  s.V1_margin = v1_margin(x, d, model, gains);
  s.V1_ok = s.V1_margin <= 0.0;

  const Vector3 flow = cm.B * u + cm.A * xv;
  s.V2_margin = flow.maxCoeff();
  s.V2_ok = s.V2_margin <= 0.0;

  s.boundary_low_ok = gains.k_D * (x.omega - d.omega_d) *
                          (rotational_row(model).dot(xv) - x.omega) <= 0.0;
  s.boundary_high_ok = ((-cm.A * xv).array() <= (cm.B * u).array()).all();
  return s;
}

struct GridAxes {
  std::vector<double> h_values;
  std::vector<double> omega_abs_values;
  double current_I = 0.4;  // held constant over the grid
  double theta = 0.1;      // held constant over the grid
  DesiredState desired{2.0, 0.0, 0.0};
};

// Evenly spaced values; a single point yields {lo}.
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 0) return v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  }
  return v;
}

struct StabilityGrid {
  std::string axis1_name = "h";
  std::vector<double> axis1;
  std::string axis2_name = "omega_abs";
  std::vector<double> axis2;
  std::vector<double> margins;  // axis1-major, size axis1.size() * axis2.size()

  double at(std::size_t i, std::size_t j) const { return margins[i * axis2.size() + j]; }

  std::size_t stable_cells() const {
    std::size_t n = 0;
    for (double m : margins) n += m <= 0.0 ? 1 : 0;
    return n;
  }

  void write_csv(std::ostream& os) const {
    os << "axis1,axis2,V1_margin\n";
    for (std::size_t i = 0; i < axis1.size(); ++i) {
      for (std::size_t j = 0; j < axis2.size(); ++j) {
        os << format_double(axis1[i]) << ',' << format_double(axis2[j]) << ','
           << format_double(at(i, j)) << '\n';
      }
    }
  }
};

// V1 margin over (h, |w|) at fixed current and angle.
inline StabilityGrid stability_map(const MotorParams& p, const GainSet& gains,
                                   const GridAxes& axes, const GuardSet& guards = {},
                                   const SeriesOptions& opts = {}) {
  if (axes.h_values.empty() || axes.omega_abs_values.empty()) {
    throw ConfigError("stability_map: grid axes must be non-empty");
  }
  StabilityGrid g;
  g.axis1 = axes.h_values;
  g.axis2 = axes.omega_abs_values;
  g.margins.reserve(g.axis1.size() * g.axis2.size());
  for (double h : g.axis1) {
    require_period(h, guards);
    const DiscreteModel model = discretize(p, h, guards.eps_h, opts);
    for (double w : g.axis2) {
      const PlantState x{axes.current_I, std::abs(w), axes.theta};
      g.margins.push_back(v1_margin(x, axes.desired, model, gains));
    }
  }
  return g;
}

}  // namespace flexctl
