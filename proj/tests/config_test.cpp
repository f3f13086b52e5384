#include "flexctl/config.hpp"

#include <gtest/gtest.h>

namespace flexctl {
namespace {

TEST(ConfigText, ParsesCommentsAndWhitespace) {
  const auto kv = parse_config_text(
      "# motor\n"
      "params.R = 2.5\n"
      "\n"
      "   gains.gain_mode=constant  \n"
      "schedule.seed = 77\n");
  ASSERT_EQ(kv.size(), 3u);
  SimConfig cfg;
  apply_config(kv, cfg);
  EXPECT_EQ(cfg.params.R, 2.5);
  EXPECT_EQ(cfg.gains.gain_mode, GainMode::constant);
  EXPECT_EQ(cfg.schedule.seed, 77u);
}

TEST(ConfigText, Errors) {
  SimConfig cfg;
  EXPECT_THROW(parse_config_text("params.R 2.5\n"), ConfigError);
  EXPECT_THROW(apply_config({{"params.Q", "1"}}, cfg), ConfigError);
  EXPECT_THROW(apply_config({{"params.R", "abc"}}, cfg), ConfigError);
  EXPECT_THROW(apply_config({{"params.R", "1.0x"}}, cfg), ConfigError);
  EXPECT_THROW(apply_config({{"params.fidelity", "exact"}}, cfg), ConfigError);
  EXPECT_THROW(apply_config({{"schedule.hold_max", "0"}}, cfg), ConfigError);
}

TEST(ConfigText, RoundTrip) {
  SimConfig a;
  a.params.K_L = 0.123456789012345;
  a.params.fidelity = Fidelity::paper_literal;
  a.gains.gain_mode = GainMode::constant;
  a.schedule.mode = ScheduleMode::per_step;
  a.schedule.seed = 18446744073709551615ULL;
  a.duration = 1.0 / 3.0;
  a.series.max_terms = 80;

  SimConfig b;
  apply_config(parse_config_text(to_config_text(a)), b);
  EXPECT_EQ(to_config_text(a), to_config_text(b));
  EXPECT_EQ(b.params.K_L, a.params.K_L);
  EXPECT_EQ(b.duration, a.duration);
  EXPECT_EQ(b.schedule.seed, a.schedule.seed);
}

}  // namespace
}  // namespace flexctl
