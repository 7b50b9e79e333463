#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "irsrl/agent.hpp"
#include "irsrl/env.hpp"

namespace irsrl::harness {

/// Learner variants: base MDP, SNR appended to the state, Fourier-feature critic.
enum class Variant { base, snr_state, ff };

enum class Preset { paper, desk };

std::string to_string(Variant v);
std::string to_string(Preset p);
Variant parse_variant(std::string_view name);  // "base" | "snr-state" | "ff"
Preset parse_preset(std::string_view name);    // "paper" | "desk"

struct ExperimentConfig {
  Preset preset = Preset::paper;
  Variant variant = Variant::base;
  std::vector<std::uint64_t> seeds;
  int episodes = 50;
  std::filesystem::path out_dir = "runs";
  env::EnvConfig env;
  agent::AgentConfig agent;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// env with the variant's MDP flavour applied.
  env::EnvConfig env_config() const;
  /// agent with the variant's critic input applied.
  agent::AgentConfig agent_config() const;
};

/// Fully populated defaults for a preset.
ExperimentConfig preset_config(Preset preset);

/// Environment overrides: config key -> raw value text. Values are parsed as
/// JSON, falling back to a plain string.
using Overrides = std::map<std::string, std::string>;

/// Collects IRSRL_<KEY> variables from the process environment.
Overrides overrides_from_environment();

/// Resolves a flat JSON object: preset defaults, then file keys, then
/// overrides. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text, const Overrides& overrides = {});

/// Reads `path` and applies IRSRL_* overrides from the environment.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key written out explicitly; parse_config(to_json(c)) == c.
std::string to_json(const ExperimentConfig& config, int indent = 2);

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b);

/// Every key parse_config accepts.
const std::vector<std::string>& config_keys();

}  // namespace irsrl::harness
