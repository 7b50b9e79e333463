#include "irsrl/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "irsrl/error.hpp"

namespace irsrl::harness {
namespace {

std::string config_error_key(const std::string& text, const Overrides& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

TEST(PresetTest, PaperDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.preset, Preset::paper);
  EXPECT_EQ(c.env.irs_elements, 20);
  EXPECT_EQ(c.env.source_antennas, 5);
  EXPECT_EQ(c.env.window, 5);
  EXPECT_EQ(c.env.episode_len, 300);
  EXPECT_EQ(c.episodes, 50);
  EXPECT_EQ(c.seeds.size(), 10u);
  EXPECT_EQ(c.agent.hidden_sizes, (std::vector<int>{400, 400, 400}));
  EXPECT_EQ(c.agent.fourier_features, 256);
  EXPECT_DOUBLE_EQ(c.agent.fourier_variance, 0.01);
  EXPECT_DOUBLE_EQ(c.agent.gamma, 0.99);
  EXPECT_DOUBLE_EQ(c.agent.tau, 0.005);
  EXPECT_EQ(c.agent.batch_size, 64);
  EXPECT_DOUBLE_EQ(c.agent.learning_rate, 2e-4);
  EXPECT_EQ(c.agent.buffer_capacity, 1'000'000u);
  EXPECT_DOUBLE_EQ(c.env.channel.pathloss_exponent, 2.3);
  EXPECT_DOUBLE_EQ(c.env.channel.multipath_std_db, 0.6);
  EXPECT_DOUBLE_EQ(c.env.channel.shadow_power_db2, 6.0);
  EXPECT_DOUBLE_EQ(c.env.channel.corr_distance, 1.2);
  EXPECT_DOUBLE_EQ(c.env.channel.corr_time, 5.0);
  EXPECT_DOUBLE_EQ(c.env.channel.phase_drift, 0.2);
  EXPECT_DOUBLE_EQ(c.env.channel.noise_var, 0.5);
  EXPECT_DOUBLE_EQ(c.env.channel.tx_power_dbm, 65.0);
}

TEST(PresetTest, DeskIsSmaller) {
  const auto c = parse_config(R"({"preset": "desk"})");
  EXPECT_EQ(c.preset, Preset::desk);
  EXPECT_LT(c.env.irs_elements, 20);
  EXPECT_LT(c.seeds.size(), 10u);
  EXPECT_EQ(config_error_key(R"({"preset": "huge"})"), "preset");
}

TEST(ParseTest, FileKeysOverridePreset) {
  const auto c = parse_config(R"({"preset": "desk", "irs_elements": 12, "corr_time": "inf",
                                  "variant": "ff", "seeds": [4, 9], "hidden_sizes": [8, 8]})");
  EXPECT_EQ(c.env.irs_elements, 12);
  EXPECT_TRUE(std::isinf(c.env.channel.corr_time));
  EXPECT_EQ(c.variant, Variant::ff);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 9}));
  EXPECT_EQ(c.agent_config().critic_input, agent::CriticInput::fourier);
  EXPECT_EQ(c.env_config().variant, env::Variant::base);
  const auto s = parse_config(R"({"variant": "snr-state"})");
  EXPECT_EQ(s.env_config().variant, env::Variant::snr_state);
  EXPECT_EQ(s.agent_config().critic_input, agent::CriticInput::raw);
}

TEST(ParseTest, RejectionsNameTheKey) {
  EXPECT_EQ(config_error_key(R"({"gamma": 1.5})"), "gamma");
  EXPECT_EQ(config_error_key(R"({"gamma": "high"})"), "gamma");
  EXPECT_EQ(config_error_key(R"({"window": 0})"), "window");
  EXPECT_EQ(config_error_key(R"({"irs_elements": 2.5})"), "irs_elements");
  EXPECT_EQ(config_error_key(R"({"learning_rtae": 0.1})"), "learning_rtae");
  EXPECT_EQ(config_error_key(R"({"variant": "big"})"), "variant");
  EXPECT_EQ(config_error_key(R"({"seeds": []})"), "seeds");
  EXPECT_EQ(config_error_key(R"({"seeds": [-1]})"), "seeds");
  EXPECT_EQ(config_error_key(R"({"reward_units": "watts"})"), "reward_units");
  EXPECT_EQ(config_error_key(R"({"dest_cells": [[1, 2]]})"), "dest_cells");
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(ParseTest, OverridesWin) {
  const Overrides o{{"gamma", "0.9"}, {"variant", "ff"}, {"destination_moves", "false"}};
  const auto c = parse_config(R"({"gamma": 0.5})", o);
  EXPECT_DOUBLE_EQ(c.agent.gamma, 0.9);
  EXPECT_EQ(c.variant, Variant::ff);
  EXPECT_FALSE(c.env.destination_moves);
  EXPECT_EQ(config_error_key("{}", {{"gama", "0.9"}}), "gama");
  EXPECT_EQ(config_error_key("{}", {{"gamma", "2"}}), "gamma");
}

TEST(ParseTest, EnvironmentVariablesAreCollected) {
  ::setenv("IRSRL_EPISODES", "7", 1);
  const auto o = overrides_from_environment();
  ::unsetenv("IRSRL_EPISODES");
  ASSERT_EQ(o.count("episodes"), 1u);
  EXPECT_EQ(o.at("episodes"), "7");
  EXPECT_EQ(parse_config("{}", o).episodes, 7);
}

TEST(RoundTripTest, ToJsonParsesBack) {
  for (const char* text : {"{}", R"({"preset": "desk", "corr_time": "inf", "variant": "snr-state",
                                     "dest_cells": [[1, 1, 1]], "reward_units": "linear"})"}) {
    const auto c = parse_config(text);
    const auto back = parse_config(to_json(c));
    EXPECT_TRUE(equivalent(c, back)) << text;
    EXPECT_EQ(to_json(c), to_json(back));
  }
}

TEST(RoundTripTest, EveryKeyIsWritten) {
  const auto doc = nlohmann::json::parse(to_json(parse_config("{}")));
  EXPECT_EQ(doc.size(), config_keys().size());
  for (const auto& k : config_keys()) EXPECT_TRUE(doc.contains(k)) << k;
}

TEST(LoadTest, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/irsrl.json"), ConfigError);
}

TEST(LoadTest, ReadsFile) {
  const auto dir = std::filesystem::path(IRSRL_TEST_TMPDIR) / "config";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.json";
  std::ofstream(path) << R"({"preset": "desk", "episodes": 3})";
  EXPECT_EQ(load_config(path).episodes, 3);
}

TEST(NamesTest, VariantAndPresetStrings) {
  for (auto v : {Variant::base, Variant::snr_state, Variant::ff}) EXPECT_EQ(parse_variant(to_string(v)), v);
  for (auto p : {Preset::paper, Preset::desk}) EXPECT_EQ(parse_preset(to_string(p)), p);
  EXPECT_THROW(parse_variant("other"), DomainError);
}

}  // namespace
}  // namespace irsrl::harness
