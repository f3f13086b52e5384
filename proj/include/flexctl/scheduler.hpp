#pragma once

// Seeded non-uniform sampling-period sequences.
//
// Generator contract (needed for byte-identical traces):
//   * engine: std::mt19937_64 seeded with splitmix64(seed)
//   * uniform in [0, 1): (next() >> 11) * 2^-53
//   * period: h_min + (h_max - h_min) * uniform
//   * hold count in [1, hold_max]: rejection sampling on next() % hold_max
//   * random_hold draws the period first, then its hold count

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "flexctl/errors.hpp"

namespace flexctl {

enum class ScheduleMode { random_hold, per_step, fixed };

inline std::string_view to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::random_hold: return "random_hold";
    case ScheduleMode::per_step: return "per_step";
    case ScheduleMode::fixed: return "fixed";
  }
  return "random_hold";
}

struct ScheduleSpec {
  double h_min = 0.05;
  double h_max = 0.2;
  std::uint64_t seed = 1;
  int hold_max = 10;
  ScheduleMode mode = ScheduleMode::random_hold;

  void validate(double eps_h) const {
    if (!(h_min >= eps_h)) throw ConfigError("schedule h_min must be >= eps_h");
    if (!(h_min <= h_max)) throw ConfigError("schedule h_min must be <= h_max");
    if (hold_max < 1) throw ConfigError("schedule hold_max must be >= 1");
  }
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Scheduler {
 public:
  explicit Scheduler(const ScheduleSpec& spec) : spec_(spec), engine_(splitmix64(spec.seed)) {}

  double next_period() {
    switch (spec_.mode) {
      case ScheduleMode::fixed:
        return spec_.h_min;
      case ScheduleMode::per_step:
        return draw_period();
      case ScheduleMode::random_hold:
        if (remaining_ == 0) {
          current_ = draw_period();
          remaining_ = draw_hold();
        }
        --remaining_;
        return current_;
    }
    return spec_.h_min;
  }

  const ScheduleSpec& spec() const { return spec_; }

 private:
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double draw_period() {
    const double h = spec_.h_min + (spec_.h_max - spec_.h_min) * uniform01();
    return h > spec_.h_max ? spec_.h_max : h;
  }

  int draw_hold() {
    const auto n = static_cast<std::uint64_t>(spec_.hold_max);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<int>(r % n) + 1;
  }

  ScheduleSpec spec_;
  std::mt19937_64 engine_;
  double current_ = 0.0;
  int remaining_ = 0;
};

}  // namespace flexctl
