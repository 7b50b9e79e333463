#include "irsrl/env.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/format.h>

#include "irsrl/error.hpp"
#include "irsrl/signal.hpp"

namespace irsrl::env {

namespace {
constexpr double kPi = std::numbers::pi;
}

void EnvConfig::validate() const {
  if (irs_elements < 1) throw ConfigError("irs_elements", "must be >= 1");
  if (source_antennas < 1) throw ConfigError("source_antennas", "must be >= 1");
  if (window < 1) throw ConfigError("window", "must be >= 1");
  if (episode_len < 1) throw ConfigError("episode_len", "must be >= 1");
  if (!std::isfinite(snr_feature_scale)) throw ConfigError("snr_feature_scale", "must be finite");
  channel.validate();
  geometry.validate();
}

int state_dim(const EnvConfig& config) {
  const int base = 3 + config.window * (3 + config.irs_elements);
  return config.variant == Variant::snr_state ? base + 1 : base;
}

Eigen::VectorXd apply_action(const Eigen::VectorXd& theta_prev, const Eigen::VectorXd& delta) {
  if (theta_prev.size() != delta.size()) {
    throw DimensionError(fmt::format("apply_action: theta has {} entries, action has {}",
                                     theta_prev.size(), delta.size()));
  }
  return (theta_prev + delta).cwiseMax(-kPi).cwiseMin(kPi);
}

std::size_t move_destination(std::size_t cell,
                             const std::vector<std::vector<std::size_t>>& neighbors, Rng& rng) {
  const auto& adj = neighbors.at(cell);
  std::uniform_int_distribution<std::size_t> pick(0, adj.size());
  const std::size_t k = pick(rng);
  return k == 0 ? cell : adj[k - 1];
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : Environment(std::move(config), make_stream(seed, "channel"), make_stream(seed, "motion")) {}

Environment::Environment(EnvConfig config, Rng channel_rng, Rng motion_rng)
    : config_(std::move(config)),
      channel_rng_(std::move(channel_rng)),
      motion_rng_(std::move(motion_rng)) {
  config_.validate();
  neighbors_ = config_.geometry.neighbors();
  site_phases_ = channel::init_phases(config_.geometry.dest_cells.size(), config_.irs_elements,
                                      config_.source_antennas, channel_rng_);
}

Eigen::Vector3d Environment::normalized(std::size_t cell) const {
  return config_.geometry.dest_cells[cell] / config_.geometry.cube_side;
}

double Environment::reward_of(double snr_linear) const {
  return config_.reward_units == RewardUnits::db ? signal::snr_db(snr_linear) : snr_linear;
}

const Eigen::VectorXd& Environment::reset() {
  const auto& p = config_.channel;
  shadowing_ = channel::init_shadowing(config_.geometry, p, channel_rng_);
  phases_ = site_phases_;
  theta_ = Eigen::VectorXd::Zero(config_.irs_elements);
  std::uniform_int_distribution<std::size_t> pick(0, config_.geometry.dest_cells.size() - 1);
  cell_ = pick(motion_rng_);
  t_ = 0;
  started_ = true;

  // Slot-0 snapshot seeds the SNR feature. It is drawn for every variant so
  // that all variants consume the channel stream identically.
  const auto snap =
      channel::sample_channels(0, cell_, shadowing_, phases_, config_.geometry, p, channel_rng_);
  last_reward_db_ =
      signal::snr_db(signal::snr(snap.h, theta_, snap.G, p.tx_power_linear(), p.noise_var));

  history_.assign(static_cast<std::size_t>(config_.window),
                  HistoryEntry{normalized(cell_), Eigen::VectorXd::Zero(config_.irs_elements)});
  assemble_state();
  return state_;
}

StepResult Environment::step(const Eigen::VectorXd& action) {
  if (!started_) throw DomainError("Environment::step called before reset");
  if (done()) throw DomainError("Environment::step called on a finished episode");
  if (action.size() != config_.irs_elements) {
    throw DimensionError(fmt::format("action has {} entries, expected {}", action.size(),
                                     config_.irs_elements));
  }
  if (!action.allFinite() || (action.array().abs() > kPi).any()) {
    throw DomainError("action components must lie in [-pi, pi]");
  }
  const auto& p = config_.channel;
  ++t_;

  shadowing_ = channel::step_shadowing(shadowing_, p, channel_rng_);
  phases_ = channel::step_phases(phases_, p, channel_rng_);

  theta_ = apply_action(theta_, action);

  StepResult out;
  out.snapshot =
      channel::sample_channels(t_, cell_, shadowing_, phases_, config_.geometry, p, channel_rng_);
  out.snr_linear =
      signal::snr(out.snapshot.h, theta_, out.snapshot.G, p.tx_power_linear(), p.noise_var);
  out.snr_bound_linear =
      signal::snr_upper_bound(out.snapshot.h, out.snapshot.G, p.tx_power_linear(), p.noise_var);
  out.reward = reward_of(out.snr_linear);
  out.theta = theta_;
  out.cell = cell_;
  last_reward_db_ = signal::snr_db(out.snr_linear);

  const std::size_t applied_cell = cell_;
  if (config_.destination_moves) cell_ = move_destination(cell_, neighbors_, motion_rng_);

  history_.pop_back();
  history_.push_front(HistoryEntry{normalized(applied_cell), theta_});
  assemble_state();

  out.next_state = state_;
  out.done = done();
  return out;
}

void Environment::assemble_state() {
  const int m = config_.irs_elements;
  state_.resize(state_dim());
  state_.segment<3>(0) = normalized(cell_);
  Eigen::Index offset = 3;
  for (const auto& entry : history_) {
    state_.segment<3>(offset) = entry.pos;
    state_.segment(offset + 3, m) = entry.theta;
    offset += 3 + m;
  }
  if (config_.variant == Variant::snr_state) {
    state_[offset] = config_.snr_feature_scale * last_reward_db_;
  }
}

}  // namespace irsrl::env
