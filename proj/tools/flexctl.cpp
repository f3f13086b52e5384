// flexctl: simulate, compare, map and validate the switching-period
// energy-based motor controller.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexctl/flexctl.hpp"
#include "flexctl/validation.hpp"

#ifndef FLEXCTL_VERSION
#define FLEXCTL_VERSION "dev"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;

namespace fs = std::filesystem;
using flexctl::ConfigError;
using flexctl::SimConfig;

struct SharedFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::optional<std::string> gain_mode;
  std::optional<std::string> fidelity;
  std::string out;
};

void add_shared(CLI::App* cmd, SharedFlags& f, const std::string& out_default,
                const std::string& out_help) {
  f.out = out_default;
  cmd->add_option("--config", f.config_path, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "schedule seed (default: $FLEXCTL_SEED or 1)");
  cmd->add_option("--duration", f.duration, "simulated horizon in seconds");
  cmd->add_option("--h-min", f.h_min, "smallest sampling period (s)");
  cmd->add_option("--h-max", f.h_max, "largest sampling period (s)");
  cmd->add_option("--gain-mode", f.gain_mode, "dynamic|constant");
  cmd->add_option("--fidelity", f.fidelity, "corrected|paper_literal");
  cmd->add_option("--out", f.out, out_help)->capture_default_str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Built-in defaults < FLEXCTL_SEED < config file < flags.
SimConfig resolve_config(const SharedFlags& f) {
  SimConfig cfg;
  if (const char* env = std::getenv("FLEXCTL_SEED"); env != nullptr && *env != '\0') {
    flexctl::apply_config({{"schedule.seed", env}}, cfg);
  }
  if (!f.config_path.empty()) {
    flexctl::apply_config(flexctl::parse_config_text(read_file(f.config_path)), cfg);
  }
  if (f.seed) cfg.schedule.seed = *f.seed;
  if (f.duration) cfg.duration = *f.duration;
  if (f.h_min) cfg.schedule.h_min = *f.h_min;
  if (f.h_max) cfg.schedule.h_max = *f.h_max;
  if (f.gain_mode) cfg.gains.gain_mode = flexctl::parse_gain_mode(*f.gain_mode);
  if (f.fidelity) cfg.params.fidelity = flexctl::parse_fidelity(*f.fidelity);
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  return os;
}

void write_manifest(const fs::path& path, const std::string& command,
                    const std::vector<std::string>& argv, const std::string& seeds,
                    const std::vector<fs::path>& outputs, const std::string& config_text) {
  auto os = open_out(path);
  os << "# flexctl run manifest; feed back with --config to reproduce\n";
  os << "# command = " << command << '\n';
  os << "# tool_version = " << FLEXCTL_VERSION << '\n';
  os << "# argv =";
  for (const auto& a : argv) os << ' ' << a;
  os << '\n';
  os << "# seeds = " << seeds << '\n';
  for (const auto& o : outputs) os << "# output = " << o.string() << '\n';
  os << config_text;
}

void write_trace_file(const fs::path& path, const flexctl::SimTrace& trace) {
  auto os = open_out(path);
  flexctl::write_trace_csv(os, trace.records);
}

int cmd_run(const SharedFlags& f, const std::vector<std::string>& argv) {
  const SimConfig cfg = resolve_config(f);
  const fs::path out = f.out;
  const fs::path manifest = out.string() + ".manifest";
  const std::string seeds = std::to_string(cfg.schedule.seed);
  try {
    const auto trace = flexctl::run(cfg);
    write_trace_file(out, trace);
    write_manifest(manifest, "run", argv, seeds, {out}, flexctl::to_config_text(cfg));
    std::cout << "wrote " << out.string() << " (" << trace.records.size() << " steps, final theta "
              << trace.final_state.theta << " rad)\n";
    return kExitOk;
  } catch (const flexctl::DivergenceError& e) {
    write_trace_file(out, e.partial());
    write_manifest(manifest, "run", argv, seeds, {out}, flexctl::to_config_text(cfg));
    std::cerr << "divergence: " << e.what() << " (partial trace in " << out.string() << ")\n";
    return kExitDivergence;
  }
}

// Accepts "N" or "A..B".
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  auto parse = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw ConfigError("");
      return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw ConfigError("bad --seeds value '" + text + "', expected N or A..B");
    }
  };
  if (dots == std::string::npos) return {parse(text)};
  const auto lo = parse(text.substr(0, dots));
  const auto hi = parse(text.substr(dots + 2));
  if (hi < lo || hi - lo >= 100000) throw ConfigError("bad --seeds range '" + text + "'");
  std::vector<std::uint64_t> v;
  for (auto s = lo; s <= hi; ++s) v.push_back(s);
  return v;
}

int cmd_compare(const SharedFlags& f, const std::string& seeds_flag,
                const std::vector<std::string>& argv) {
  const SimConfig base = resolve_config(f);
  const auto seeds = seeds_flag.empty() ? std::vector<std::uint64_t>{base.schedule.seed}
                                        : parse_seed_range(seeds_flag);
  const fs::path dir = f.out;
  const bool sweep = seeds.size() > 1;

  std::vector<fs::path> outputs;
  std::ostringstream summary;
  flexctl::write_summary_header(summary);
  bool any_diverged = false;
  for (const auto seed : seeds) {
    SimConfig cfg = base;
    cfg.schedule.seed = seed;
    const auto c = flexctl::compare_gain_modes(cfg);
    const std::string suffix = sweep ? "_" + std::to_string(seed) : "";
    const fs::path dyn = dir / ("dynamic" + suffix + ".csv");
    const fs::path con = dir / ("constant" + suffix + ".csv");
    write_trace_file(dyn, c.dynamic.trace);
    write_trace_file(con, c.constant.trace);
    outputs.push_back(dyn);
    outputs.push_back(con);
    flexctl::write_summary_row(summary, c.summary);
    any_diverged = any_diverged || c.summary.dynamic_diverged || c.summary.constant_diverged;
  }
  const fs::path sum_path = dir / "summary.csv";
  open_out(sum_path) << summary.str();
  outputs.push_back(sum_path);
  const std::string seed_text =
      sweep ? std::to_string(seeds.front()) + ".." + std::to_string(seeds.back())
            : std::to_string(seeds.front());
  write_manifest(dir / "compare.manifest", "compare", argv, seed_text, outputs,
                 flexctl::to_config_text(base));
  std::cout << summary.str();
  if (any_diverged) {
    std::cerr << "divergence in at least one run; see summary.csv\n";
    return kExitDivergence;
  }
  return kExitOk;
}

struct MapFlags {
  std::string config_path;
  std::optional<std::string> fidelity;
  std::optional<double> kp;
  std::optional<double> kd;
  double h_lo = 0.01;
  double h_hi = 0.3;
  int n_h = 50;
  double omega_max = 10.0;
  int n_omega = 50;
  std::optional<double> current;
  std::optional<double> theta;
  std::optional<double> theta_d;
  std::string out = "stability_map.csv";
};

int cmd_stability_map(const MapFlags& f, const std::vector<std::string>& argv) {
  SharedFlags shared;
  shared.config_path = f.config_path;
  shared.fidelity = f.fidelity;
  SimConfig cfg = resolve_config(shared);
  if (f.kp) cfg.gains.k_P = *f.kp;
  if (f.kd) cfg.gains.k_D = *f.kd;
  cfg.validate();
  if (f.n_h < 1 || f.n_omega < 1) throw ConfigError("grid sizes must be >= 1");
  if (!(f.h_lo <= f.h_hi)) throw ConfigError("--h-min must be <= --h-max");
  if (!(f.omega_max >= 0.0)) throw ConfigError("--omega-max must be >= 0");

  flexctl::GridAxes axes;
  axes.h_values = flexctl::linspace(f.h_lo, f.h_hi, f.n_h);
  axes.omega_abs_values = flexctl::linspace(0.0, f.omega_max, f.n_omega);
  axes.current_I = f.current.value_or(cfg.initial.current_I);
  axes.theta = f.theta.value_or(cfg.initial.theta);
  axes.desired = cfg.desired;
  if (f.theta_d) axes.desired.theta_d = *f.theta_d;

  const auto grid = flexctl::stability_map(cfg.params, cfg.gains, axes, cfg.guards, cfg.series);
  const fs::path out = f.out;
  auto os = open_out(out);
  grid.write_csv(os);
  write_manifest(out.string() + ".manifest", "stability-map", argv, "-", {out},
                 flexctl::to_config_text(cfg));
  std::cout << "wrote " << out.string() << " (" << grid.margins.size() << " cells, "
            << grid.stable_cells() << " with V1 margin <= 0)\n";
  return kExitOk;
}

int cmd_validate(double tol, int max_terms, std::uint64_t seed) {
  flexctl::validation::SuiteOptions opts;
  opts.series.tol = tol;
  opts.series.max_terms = max_terms;
  opts.seed = seed;
  opts.series.validate();

  bool all = true;
  std::cout << std::left << std::setw(48) << "check" << std::setw(8) << "cases" << std::setw(14)
            << "max_error" << std::setw(10) << "tol" << "result\n";
  for (const auto& r : flexctl::validation::run_identity_suite(opts)) {
    all = all && r.passed();
    std::cout << std::left << std::setw(48) << r.name << std::setw(8) << r.cases
              << std::setw(14) << std::setprecision(3) << std::scientific << r.max_error
              << std::setw(10) << r.tolerance << (r.passed() ? "PASS" : "FAIL") << '\n'
              << std::defaultfloat;
  }
  std::cout << (all ? "all identity checks passed\n" : "identity checks FAILED\n");
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching-period energy-based DC motor controller toolkit"};
  app.set_version_flag("--version", FLEXCTL_VERSION);
  app.require_subcommand(1);
  const std::vector<std::string> args(argv, argv + argc);

  SharedFlags run_flags;
  auto* run = app.add_subcommand("run", "closed-loop simulation, writes a trace CSV");
  add_shared(run, run_flags, "trace.csv", "trace CSV path");

  SharedFlags cmp_flags;
  std::string seeds;
  auto* compare = app.add_subcommand("compare", "dynamic vs constant k_E on shared schedules");
  add_shared(compare, cmp_flags, ".", "output directory");
  compare->add_option("--seeds", seeds, "seed or inclusive range A..B (overrides --seed)");

  MapFlags map_flags;
  auto* map = app.add_subcommand("stability-map", "V1 margin over (h, |theta_dot|)");
  map->add_option("--config", map_flags.config_path, "key = value configuration file");
  map->add_option("--fidelity", map_flags.fidelity, "corrected|paper_literal");
  map->add_option("--kp", map_flags.kp, "position gain k_P");
  map->add_option("--kd", map_flags.kd, "damping gain k_D");
  map->add_option("--h-min", map_flags.h_lo, "first h value")->capture_default_str();
  map->add_option("--h-max", map_flags.h_hi, "last h value")->capture_default_str();
  map->add_option("--n-h", map_flags.n_h, "h grid points")->capture_default_str();
  map->add_option("--omega-max", map_flags.omega_max, "largest |theta_dot|")->capture_default_str();
  map->add_option("--n-omega", map_flags.n_omega, "|theta_dot| grid points")->capture_default_str();
  map->add_option("--current", map_flags.current, "fixed current (default: initial state)");
  map->add_option("--theta", map_flags.theta, "fixed angle (default: initial state)");
  map->add_option("--theta-d", map_flags.theta_d, "desired angle");
  map->add_option("--out", map_flags.out, "grid CSV path")->capture_default_str();

  double tol = flexctl::SeriesOptions{}.tol;
  int max_terms = flexctl::SeriesOptions{}.max_terms;
  std::uint64_t vseed = flexctl::validation::SuiteOptions{}.seed;
  auto* validate = app.add_subcommand("validate", "series and discretization identity suite");
  validate->add_option("--tol", tol, "series truncation tolerance")->capture_default_str();
  validate->add_option("--max-terms", max_terms, "series term limit")->capture_default_str();
  validate->add_option("--seed", vseed, "random matrix seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, args);
    if (*compare) return cmd_compare(cmp_flags, seeds, args);
    if (*map) return cmd_stability_map(map_flags, args);
    if (*validate) return cmd_validate(tol, max_terms, vseed);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
