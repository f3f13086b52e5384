#pragma once

// Flat `key = value` configuration text. Lines starting with '#' and blank
// lines are ignored; keys mirror the struct fields, e.g. `params.R = 1.3`.

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "flexctl/csv.hpp"
#include "flexctl/errors.hpp"
#include "flexctl/simulator.hpp"

namespace flexctl {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError("bad number for " + key + ": '" + v + "'");
  return out;
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError("bad unsigned for " + key + ": '" + v + "'");
  return out;
}

}  // namespace detail

inline Fidelity parse_fidelity(const std::string& v) {
  if (v == "corrected") return Fidelity::corrected;
  if (v == "paper_literal") return Fidelity::paper_literal;
  throw ConfigError("fidelity must be corrected|paper_literal, got '" + v + "'");
}

inline GainMode parse_gain_mode(const std::string& v) {
  if (v == "dynamic") return GainMode::dynamic;
  if (v == "constant") return GainMode::constant;
  throw ConfigError("gain mode must be dynamic|constant, got '" + v + "'");
}

inline ScheduleMode parse_schedule_mode(const std::string& v) {
  if (v == "random_hold") return ScheduleMode::random_hold;
  if (v == "per_step") return ScheduleMode::per_step;
  if (v == "fixed") return ScheduleMode::fixed;
  throw ConfigError("schedule mode must be random_hold|per_step|fixed, got '" + v + "'");
}

// Ordered key -> value pairs; later duplicates win.
using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = detail::trim(std::string_view(s).substr(0, eq));
    std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[std::move(key)] = std::move(value);
  }
  return out;
}

namespace detail {

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

template <typename Member>
Setter set_double(Member member) {
  return [member](SimConfig& c, const std::string& k, const std::string& v) {
    member(c) = parse_double(k, v);
  };
}

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"params.R", set_double([](SimConfig& c) -> double& { return c.params.R; })},
      {"params.L", set_double([](SimConfig& c) -> double& { return c.params.L; })},
      {"params.K_b", set_double([](SimConfig& c) -> double& { return c.params.K_b; })},
      {"params.K_m", set_double([](SimConfig& c) -> double& { return c.params.K_m; })},
      {"params.J", set_double([](SimConfig& c) -> double& { return c.params.J; })},
      {"params.B_f", set_double([](SimConfig& c) -> double& { return c.params.B_f; })},
      {"params.K_L", set_double([](SimConfig& c) -> double& { return c.params.K_L; })},
      {"params.fidelity",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.params.fidelity = parse_fidelity(v);
       }},
      {"gains.k_E_s", set_double([](SimConfig& c) -> double& { return c.gains.k_E_s; })},
      {"gains.k_P", set_double([](SimConfig& c) -> double& { return c.gains.k_P; })},
      {"gains.k_D", set_double([](SimConfig& c) -> double& { return c.gains.k_D; })},
      {"gains.K_c", set_double([](SimConfig& c) -> double& { return c.gains.K_c; })},
      {"gains.h_s", set_double([](SimConfig& c) -> double& { return c.gains.h_s; })},
      {"gains.u_sat", set_double([](SimConfig& c) -> double& { return c.gains.u_sat; })},
      {"gains.gain_mode",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.gains.gain_mode = parse_gain_mode(v);
       }},
      {"guards.eps_h", set_double([](SimConfig& c) -> double& { return c.guards.eps_h; })},
      {"guards.eps_c", set_double([](SimConfig& c) -> double& { return c.guards.eps_c; })},
      {"guards.eps_den", set_double([](SimConfig& c) -> double& { return c.guards.eps_den; })},
      {"guards.eps_Eprime",
       set_double([](SimConfig& c) -> double& { return c.guards.eps_Eprime; })},
      {"guards.k_E_max", set_double([](SimConfig& c) -> double& { return c.guards.k_E_max; })},
      {"desired.theta_d", set_double([](SimConfig& c) -> double& { return c.desired.theta_d; })},
      {"desired.omega_d", set_double([](SimConfig& c) -> double& { return c.desired.omega_d; })},
      {"desired.current_d",
       set_double([](SimConfig& c) -> double& { return c.desired.current_d; })},
      {"initial.current_I",
       set_double([](SimConfig& c) -> double& { return c.initial.current_I; })},
      {"initial.omega", set_double([](SimConfig& c) -> double& { return c.initial.omega; })},
      {"initial.theta", set_double([](SimConfig& c) -> double& { return c.initial.theta; })},
      {"schedule.h_min", set_double([](SimConfig& c) -> double& { return c.schedule.h_min; })},
      {"schedule.h_max", set_double([](SimConfig& c) -> double& { return c.schedule.h_max; })},
      {"schedule.seed",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.schedule.seed = parse_uint(k, v);
       }},
      {"schedule.hold_max",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         const auto n = parse_int(k, v);
         if (n < 1 || n > 1'000'000'000) throw ConfigError("schedule.hold_max out of range");
         c.schedule.hold_max = static_cast<int>(n);
       }},
      {"schedule.mode",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.schedule.mode = parse_schedule_mode(v);
       }},
      {"duration", set_double([](SimConfig& c) -> double& { return c.duration; })},
      {"series.tol", set_double([](SimConfig& c) -> double& { return c.series.tol; })},
      {"series.max_terms",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         const auto n = parse_int(k, v);
         if (n < 2 || n > 1'000'000) throw ConfigError("series.max_terms out of range");
         c.series.max_terms = static_cast<int>(n);
       }},
  };
  return table;
}

}  // namespace detail

// Applies every pair to cfg; unknown keys are an error.
inline void apply_config(const ConfigMap& kv, SimConfig& cfg) {
  const auto& table = detail::setters();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
  }
}

inline std::string to_config_text(const SimConfig& c) {
  std::ostringstream os;
  auto put = [&os](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto d = [](double v) { return format_double(v); };
  put("params.R", d(c.params.R));
  put("params.L", d(c.params.L));
  put("params.K_b", d(c.params.K_b));
  put("params.K_m", d(c.params.K_m));
  put("params.J", d(c.params.J));
  put("params.B_f", d(c.params.B_f));
  put("params.K_L", d(c.params.K_L));
  put("params.fidelity", std::string(to_string(c.params.fidelity)));
  put("gains.k_E_s", d(c.gains.k_E_s));
  put("gains.k_P", d(c.gains.k_P));
  put("gains.k_D", d(c.gains.k_D));
  put("gains.K_c", d(c.gains.K_c));
  put("gains.h_s", d(c.gains.h_s));
  put("gains.u_sat", d(c.gains.u_sat));
  put("gains.gain_mode", std::string(to_string(c.gains.gain_mode)));
  put("guards.eps_h", d(c.guards.eps_h));
  put("guards.eps_c", d(c.guards.eps_c));
  put("guards.eps_den", d(c.guards.eps_den));
  put("guards.eps_Eprime", d(c.guards.eps_Eprime));
  put("guards.k_E_max", d(c.guards.k_E_max));
  put("desired.theta_d", d(c.desired.theta_d));
  put("desired.omega_d", d(c.desired.omega_d));
  put("desired.current_d", d(c.desired.current_d));
  put("initial.current_I", d(c.initial.current_I));
  put("initial.omega", d(c.initial.omega));
  put("initial.theta", d(c.initial.theta));
  put("schedule.h_min", d(c.schedule.h_min));
  put("schedule.h_max", d(c.schedule.h_max));
  put("schedule.seed", std::to_string(c.schedule.seed));
  put("schedule.hold_max", std::to_string(c.schedule.hold_max));
  put("schedule.mode", std::string(to_string(c.schedule.mode)));
  put("duration", d(c.duration));
  put("series.tol", d(c.series.tol));
  put("series.max_terms", std::to_string(c.series.max_terms));
  return os.str();
}

}  // namespace flexctl
