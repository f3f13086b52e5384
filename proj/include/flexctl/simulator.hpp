#pragma once

// Closed-loop simulation under a switching sampling period. Each step:
// draw h_k, rediscretize, retune k_E, compute u_k, advance with exact ZOH.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <utility>
#include <vector>

#include "flexctl/controller.hpp"
#include "flexctl/csv.hpp"
#include "flexctl/discretizer.hpp"
#include "flexctl/plant.hpp"
#include "flexctl/scheduler.hpp"
#include "flexctl/stability.hpp"

namespace flexctl {

inline constexpr double kDivergenceBound = 1e9;

struct SimConfig {
  MotorParams params;
  GainSet gains;
  GuardSet guards;
  DesiredState desired{2.0, 0.0, 0.0};
  PlantState initial{0.4, 5.0, 0.1};
  ScheduleSpec schedule;
  double duration = 10.0;
  SeriesOptions series;

  void validate() const {
    params.validate();
    gains.validate();
    guards.validate();
    schedule.validate(guards.eps_h);
    series.validate();
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw ConfigError("duration must be finite and > 0");
    }
    if (!initial.finite()) throw ConfigError("initial state must be finite");
    if (!std::isfinite(desired.theta_d) || !std::isfinite(desired.omega_d) ||
        !std::isfinite(desired.current_d)) {
      throw ConfigError("desired state must be finite");
    }
  }
};

// One logged step: the state x_k at time t_k and what was applied over
// [t_k, t_k + h_k).
struct TraceRecord {
  std::int64_t k = 0;
  double t = 0.0;
  double h_k = 0.0;
  PlantState x;
  double u = 0.0;
  double E = 0.0;
  double k_E = 0.0;
  double V = 0.0;
  double V_prime = 0.0;
  bool saturated = false;
  GuardEvent guard_event = GuardEvent::none;
  bool V1_ok = false;
  bool V2_ok = false;
  bool cond_main = false;
};

struct SimTrace {
  std::vector<TraceRecord> records;
  PlantState final_state;
  double final_time = 0.0;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, SimTrace partial)
      : Error(what), partial_(std::move(partial)) {}
  const SimTrace& partial() const { return partial_; }

 private:
  SimTrace partial_;
};

inline bool diverged(const PlantState& x) {
  return !x.finite() || std::abs(x.current_I) > kDivergenceBound ||
         std::abs(x.omega) > kDivergenceBound || std::abs(x.theta) > kDivergenceBound;
}

inline SimTrace run(const SimConfig& cfg) {
  cfg.validate();
  Scheduler scheduler(cfg.schedule);
  SimTrace trace;
  PlantState x = cfg.initial;
  double t = 0.0;
  double u_prev = 0.0;

  for (std::int64_t k = 0; t < cfg.duration; ++k) {
    const double h = scheduler.next_period();
    const DiscreteModel model = discretize(cfg.params, h, cfg.guards.eps_h, cfg.series);
    const ControlOutput ctl = control_input(x, cfg.desired, model, cfg.gains, cfg.guards,
                                            cfg.params, u_prev, cfg.series);
    const LyapunovSample ls = check_conditions(x, cfg.desired, ctl.u, model, cfg.gains,
                                               ctl.k_E_used, cfg.params);

    TraceRecord rec;
    rec.k = k;
    rec.t = t;
    rec.h_k = h;
    rec.x = x;
    rec.u = ctl.u;
    rec.E = energy(x, cfg.params);
    rec.k_E = ctl.k_E_used;
    rec.V = ls.V;
    rec.V_prime = ls.V_prime;
    rec.saturated = ctl.saturated;
    rec.guard_event = ctl.guard_event;
    rec.V1_ok = ls.V1_ok;
    rec.V2_ok = ls.V2_ok;
    rec.cond_main = ls.condition_main;
    trace.records.push_back(rec);

    x = step(model, x, ctl.u);
    t += h;
    u_prev = ctl.u;
    trace.final_state = x;
    trace.final_time = t;

    if (diverged(x)) {
      throw DivergenceError("state magnitude exceeded 1e9 at t = " + format_double(t),
                            std::move(trace));
    }
  }
  return trace;
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& records) {
  os << "k,t,h_k,I,omega,theta,u,E,k_E,V,V_prime,saturated,guard_event,V1_ok,V2_ok,cond_main\n";
  for (const auto& r : records) {
    os << r.k << ',' << format_double(r.t) << ',' << format_double(r.h_k) << ','
       << format_double(r.x.current_I) << ',' << format_double(r.x.omega) << ','
       << format_double(r.x.theta) << ',' << format_double(r.u) << ',' << format_double(r.E)
       << ',' << format_double(r.k_E) << ',' << format_double(r.V) << ','
       << format_double(r.V_prime) << ',' << (r.saturated ? 1 : 0) << ','
       << to_string(r.guard_event) << ',' << (r.V1_ok ? 1 : 0) << ',' << (r.V2_ok ? 1 : 0)
       << ',' << (r.cond_main ? 1 : 0) << '\n';
  }
}

// FNV-1a over the bit patterns of the h_k column.
inline std::uint64_t schedule_hash(const std::vector<TraceRecord>& records) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& r : records) {
    std::uint64_t bits;
    std::memcpy(&bits, &r.h_k, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      hash ^= (bits >> (8 * i)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

struct ModeOutcome {
  SimTrace trace;
  bool diverged = false;
  double theta_error = 0.0;  // |theta - theta_d| at the end of the run
  double omega_error = 0.0;  // |w - w_d| at the end of the run
};

struct ComparisonSummary {
  std::uint64_t seed = 0;
  std::uint64_t schedule_hash = 0;
  double dynamic_theta_error = 0.0;
  double dynamic_omega_error = 0.0;
  double constant_theta_error = 0.0;
  double constant_omega_error = 0.0;
  bool dynamic_diverged = false;
  bool constant_diverged = false;
};

struct Comparison {
  ModeOutcome dynamic;
  ModeOutcome constant;
  ComparisonSummary summary;
};

inline ModeOutcome run_outcome(const SimConfig& cfg) {
  ModeOutcome out;
  try {
    out.trace = run(cfg);
  } catch (const DivergenceError& e) {
    out.trace = e.partial();
    out.diverged = true;
  }
  out.theta_error = std::abs(out.trace.final_state.theta - cfg.desired.theta_d);
  out.omega_error = std::abs(out.trace.final_state.omega - cfg.desired.omega_d);
  return out;
}

// Runs both gain modes on the same seeded period sequence.
inline Comparison compare_gain_modes(const SimConfig& cfg) {
  SimConfig dyn = cfg;
  dyn.gains.gain_mode = GainMode::dynamic;
  SimConfig con = cfg;
  con.gains.gain_mode = GainMode::constant;

  Comparison c;
  c.dynamic = run_outcome(dyn);
  c.constant = run_outcome(con);
  auto& s = c.summary;
  s.seed = cfg.schedule.seed;
  s.schedule_hash = schedule_hash(c.dynamic.trace.records);
  s.dynamic_theta_error = c.dynamic.theta_error;
  s.dynamic_omega_error = c.dynamic.omega_error;
  s.constant_theta_error = c.constant.theta_error;
  s.constant_omega_error = c.constant.omega_error;
  s.dynamic_diverged = c.dynamic.diverged;
  s.constant_diverged = c.constant.diverged;
  return c;
}

inline void write_summary_header(std::ostream& os) {
  os << "seed,schedule_hash,dynamic_theta_error,dynamic_omega_error,constant_theta_error,"
        "constant_omega_error,dynamic_diverged,constant_diverged\n";
}

inline void write_summary_row(std::ostream& os, const ComparisonSummary& s) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(s.schedule_hash));
  os << s.seed << ',' << hash << ',' << format_double(s.dynamic_theta_error) << ','
     << format_double(s.dynamic_omega_error) << ',' << format_double(s.constant_theta_error)
     << ',' << format_double(s.constant_omega_error) << ',' << (s.dynamic_diverged ? 1 : 0)
     << ',' << (s.constant_diverged ? 1 : 0) << '\n';
}

struct CrossCheckResult {
  double max_rel_error = 0.0;
  std::size_t samples = 0;
  double window = 0.0;
};

// Replays the logged piecewise-constant inputs through the continuous model
// with fixed-step RK4 and compares against the ZOH samples inside [0, window].
inline CrossCheckResult cross_check(const SimConfig& cfg, double window = 2.0,
                                    double rk4_step = 1e-5) {
  SimConfig c = cfg;
  c.duration = window;
  const SimTrace trace = run_outcome(c).trace;
  const auto cm = continuous_matrices(cfg.params);

  CrossCheckResult res;
  res.window = window;
  Vector3 x = cfg.initial.vec();
  auto compare = [&](const PlantState& zoh) {
    const Vector3 z = zoh.vec();
    const double scale = std::max(z.cwiseAbs().maxCoeff(), 1e-12);
    res.max_rel_error = std::max(res.max_rel_error, (z - x).cwiseAbs().maxCoeff() / scale);
    ++res.samples;
  };

  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    compare(r.x);
    const auto n = static_cast<int>(std::ceil(r.h_k / rk4_step));
    const double dt = r.h_k / n;
    auto f = [&](const Vector3& s) -> Vector3 { return cm.A * s + cm.B * r.u; };
    for (int j = 0; j < n; ++j) {
      const Vector3 k1 = f(x);
      const Vector3 k2 = f(x + 0.5 * dt * k1);
      const Vector3 k3 = f(x + 0.5 * dt * k2);
      const Vector3 k4 = f(x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  if (!trace.records.empty()) compare(trace.final_state);
  return res;
}

}  // namespace flexctl
