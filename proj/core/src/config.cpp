#include "irsrl/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irsrl/error.hpp"

extern char** environ;

namespace irsrl::harness {

namespace {

using json = nlohmann::json;

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const json&)> read;
  std::function<json(const ExperimentConfig&)> write;
};

double as_double(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

long long as_integer(const std::string& key, const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ConfigError(key, "expected an integer");
}

int as_int(const std::string& key, const json& v) {
  const long long x = as_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

channel::Vec3 as_vec3(const std::string& key, const json& v) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(key, "expected [x, y, z]");
  return {as_double(key, v[0]), as_double(key, v[1]), as_double(key, v[2])};
}

json vec3_json(const channel::Vec3& p) { return json::array({p.x(), p.y(), p.z()}); }

template <class T>
Field real(std::string key, T ExperimentConfig::*section, double T::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { (c.*section).*member = as_double(key, v); },
          [=](const ExperimentConfig& c) { return json((c.*section).*member); }};
}

template <class T>
Field integer(std::string key, T ExperimentConfig::*section, int T::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { (c.*section).*member = as_int(key, v); },
          [=](const ExperimentConfig& c) { return json((c.*section).*member); }};
}

template <class T>
Field boolean(std::string key, T ExperimentConfig::*section, bool T::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { (c.*section).*member = as_bool(key, v); },
          [=](const ExperimentConfig& c) { return json((c.*section).*member); }};
}

Field channel_real(std::string key, double channel::ChannelParams::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { c.env.channel.*member = as_double(key, v); },
          [=](const ExperimentConfig& c) { return json(c.env.channel.*member); }};
}

Field geometry_real(std::string key, double channel::Geometry::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { c.env.geometry.*member = as_double(key, v); },
          [=](const ExperimentConfig& c) { return json(c.env.geometry.*member); }};
}

Field geometry_point(std::string key, channel::Vec3 channel::Geometry::*member) {
  return {key,
          [=](ExperimentConfig& c, const json& v) { c.env.geometry.*member = as_vec3(key, v); },
          [=](const ExperimentConfig& c) { return vec3_json(c.env.geometry.*member); }};
}

const std::vector<Field>& fields() {
  using agent::AgentConfig;
  using env::EnvConfig;
  static const std::vector<Field> table = {
      {"preset", [](ExperimentConfig&, const json&) {},  // consumed before the table is applied
       [](const ExperimentConfig& c) { return json(to_string(c.preset)); }},
      {"variant",
       [](ExperimentConfig& c, const json& v) {
         try {
           c.variant = parse_variant(as_string("variant", v));
         } catch (const DomainError& e) {
           throw ConfigError("variant", e.what());
         }
       },
       [](const ExperimentConfig& c) { return json(to_string(c.variant)); }},
      {"seeds",
       [](ExperimentConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("seeds", "expected a list of integers");
         c.seeds.clear();
         for (const auto& s : v) {
           const long long x = as_integer("seeds", s);
           if (x < 0) throw ConfigError("seeds", "seeds must be >= 0");
           c.seeds.push_back(static_cast<std::uint64_t>(x));
         }
       },
       [](const ExperimentConfig& c) { return json(c.seeds); }},
      {"episodes", [](ExperimentConfig& c, const json& v) { c.episodes = as_int("episodes", v); },
       [](const ExperimentConfig& c) { return json(c.episodes); }},
      {"out_dir",
       [](ExperimentConfig& c, const json& v) { c.out_dir = as_string("out_dir", v); },
       [](const ExperimentConfig& c) { return json(c.out_dir.string()); }},

      integer("irs_elements", &ExperimentConfig::env, &EnvConfig::irs_elements),
      integer("source_antennas", &ExperimentConfig::env, &EnvConfig::source_antennas),
      integer("window", &ExperimentConfig::env, &EnvConfig::window),
      integer("episode_len", &ExperimentConfig::env, &EnvConfig::episode_len),
      {"reward_units",
       [](ExperimentConfig& c, const json& v) {
         const auto s = as_string("reward_units", v);
         if (s == "db") c.env.reward_units = env::RewardUnits::db;
         else if (s == "linear") c.env.reward_units = env::RewardUnits::linear;
         else throw ConfigError("reward_units", "expected \"db\" or \"linear\"");
       },
       [](const ExperimentConfig& c) {
         return json(c.env.reward_units == env::RewardUnits::db ? "db" : "linear");
       }},
      boolean("destination_moves", &ExperimentConfig::env, &EnvConfig::destination_moves),
      real("snr_feature_scale", &ExperimentConfig::env, &EnvConfig::snr_feature_scale),

      channel_real("pathloss_exponent", &channel::ChannelParams::pathloss_exponent),
      channel_real("multipath_std_db", &channel::ChannelParams::multipath_std_db),
      channel_real("shadow_power_db2", &channel::ChannelParams::shadow_power_db2),
      channel_real("corr_distance", &channel::ChannelParams::corr_distance),
      {"corr_time",
       [](ExperimentConfig& c, const json& v) {
         if (v.is_string() && v.get<std::string>() == "inf") {
           c.env.channel.corr_time = std::numeric_limits<double>::infinity();
         } else {
           c.env.channel.corr_time = as_double("corr_time", v);
         }
       },
       [](const ExperimentConfig& c) {
         return std::isinf(c.env.channel.corr_time) ? json("inf") : json(c.env.channel.corr_time);
       }},
      channel_real("phase_drift", &channel::ChannelParams::phase_drift),
      channel_real("noise_var", &channel::ChannelParams::noise_var),
      channel_real("tx_power_dbm", &channel::ChannelParams::tx_power_dbm),

      geometry_point("source_pos", &channel::Geometry::source_pos),
      geometry_point("irs_pos", &channel::Geometry::irs_pos),
      {"dest_cells",
       [](ExperimentConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("dest_cells", "expected a list of [x, y, z]");
         c.env.geometry.dest_cells.clear();
         for (const auto& p : v) c.env.geometry.dest_cells.push_back(as_vec3("dest_cells", p));
       },
       [](const ExperimentConfig& c) {
         json out = json::array();
         for (const auto& p : c.env.geometry.dest_cells) out.push_back(vec3_json(p));
         return out;
       }},
      geometry_real("cube_side", &channel::Geometry::cube_side),
      geometry_real("cell_side", &channel::Geometry::cell_side),

      real("gamma", &ExperimentConfig::agent, &AgentConfig::gamma),
      real("tau", &ExperimentConfig::agent, &AgentConfig::tau),
      integer("batch_size", &ExperimentConfig::agent, &AgentConfig::batch_size),
      real("learning_rate", &ExperimentConfig::agent, &AgentConfig::learning_rate),
      real("explore_sigma0", &ExperimentConfig::agent, &AgentConfig::explore_sigma0),
      real("explore_decay", &ExperimentConfig::agent, &AgentConfig::explore_decay),
      integer("warmup_steps", &ExperimentConfig::agent, &AgentConfig::warmup_steps),
      integer("updates_per_step", &ExperimentConfig::agent, &AgentConfig::updates_per_step),
      real("fourier_variance", &ExperimentConfig::agent, &AgentConfig::fourier_variance),
      integer("fourier_features", &ExperimentConfig::agent, &AgentConfig::fourier_features),
      {"hidden_sizes",
       [](ExperimentConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("hidden_sizes", "expected a list of integers");
         c.agent.hidden_sizes.clear();
         for (const auto& h : v) c.agent.hidden_sizes.push_back(as_int("hidden_sizes", h));
       },
       [](const ExperimentConfig& c) { return json(c.agent.hidden_sizes); }},
      {"buffer_capacity",
       [](ExperimentConfig& c, const json& v) {
         const long long x = as_integer("buffer_capacity", v);
         if (x < 1) throw ConfigError("buffer_capacity", "must be >= 1");
         c.agent.buffer_capacity = static_cast<std::size_t>(x);
       },
       [](const ExperimentConfig& c) { return json(c.agent.buffer_capacity); }},
      boolean("shared_min_target", &ExperimentConfig::agent, &AgentConfig::shared_min_target),
      real("reward_scale", &ExperimentConfig::agent, &AgentConfig::reward_scale),
      boolean("center_rewards", &ExperimentConfig::agent, &AgentConfig::center_rewards),
  };
  return table;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::snr_state: return "snr-state";
    case Variant::ff: return "ff";
  }
  return "?";
}

std::string to_string(Preset p) { return p == Preset::paper ? "paper" : "desk"; }

Variant parse_variant(std::string_view name) {
  if (name == "base") return Variant::base;
  if (name == "snr-state" || name == "snr_state") return Variant::snr_state;
  if (name == "ff") return Variant::ff;
  throw DomainError(fmt::format("unknown variant '{}' (expected base, snr-state or ff)", name));
}

Preset parse_preset(std::string_view name) {
  if (name == "paper") return Preset::paper;
  if (name == "desk") return Preset::desk;
  throw DomainError(fmt::format("unknown preset '{}' (expected paper or desk)", name));
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds", "must be nonempty");
  if (episodes < 1) throw ConfigError("episodes", "must be >= 1");
  if (out_dir.empty()) throw ConfigError("out_dir", "must be nonempty");
  env.validate();
  agent.validate();
}

env::EnvConfig ExperimentConfig::env_config() const {
  env::EnvConfig e = env;
  e.variant = variant == Variant::snr_state ? env::Variant::snr_state : env::Variant::base;
  return e;
}

agent::AgentConfig ExperimentConfig::agent_config() const {
  agent::AgentConfig a = agent;
  a.critic_input = variant == Variant::ff ? agent::CriticInput::fourier : agent::CriticInput::raw;
  return a;
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  // Paper values; struct defaults already carry the channel and learner constants.
  c.env.irs_elements = 20;
  c.env.source_antennas = 5;
  c.env.window = 5;
  c.env.episode_len = 300;
  c.episodes = 50;
  c.seeds.resize(10);
  std::iota(c.seeds.begin(), c.seeds.end(), 0);
  c.agent.hidden_sizes = {400, 400, 400};
  c.agent.fourier_features = 256;
  if (preset == Preset::desk) {
    c.env.irs_elements = 8;
    c.env.source_antennas = 3;
    c.env.window = 5;
    c.env.episode_len = 200;
    c.episodes = 30;
    c.seeds = {0, 1, 2};
    c.agent.hidden_sizes = {128, 128, 128};
    c.agent.fourier_features = 64;
  }
  return c;
}

Overrides overrides_from_environment() {
  Overrides out;
  constexpr std::string_view prefix = "IRSRL_";
  for (char** e = environ; e && *e; ++e) {
    const std::string_view entry(*e);
    if (entry.substr(0, prefix.size()) != prefix) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string key(entry.substr(prefix.size(), eq - prefix.size()));
    for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out[key] = std::string(entry.substr(eq + 1));
  }
  return out;
}

ExperimentConfig parse_config(std::string_view json_text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", fmt::format("malformed JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

  for (const auto& [key, value] : overrides) {
    if (!find_field(key)) throw ConfigError(key, "unknown key (from IRSRL_ environment override)");
    doc[key] = parse_override_value(value);
  }
  for (const auto& item : doc.items()) {
    if (!find_field(item.key())) throw ConfigError(item.key(), "unknown key");
  }

  Preset preset = Preset::paper;
  if (doc.contains("preset")) {
    try {
      preset = parse_preset(as_string("preset", doc["preset"]));
    } catch (const DomainError& e) {
      throw ConfigError("preset", e.what());
    }
  }
  ExperimentConfig config = preset_config(preset);
  for (const auto& f : fields()) {
    if (doc.contains(f.key)) f.read(config, doc[f.key]);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides_from_environment());
}

std::string to_json(const ExperimentConfig& config, int indent) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.key] = f.write(config);
  return doc.dump(indent);
}

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b) {
  return to_json(a, -1) == to_json(b, -1);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

}  // namespace irsrl::harness
