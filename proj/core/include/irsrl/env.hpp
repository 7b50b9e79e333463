#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "irsrl/channel.hpp"
#include "irsrl/rng.hpp"

namespace irsrl::env {

enum class Variant { base, snr_state };
enum class RewardUnits { db, linear };

struct EnvConfig {
  int irs_elements = 20;     // M
  int source_antennas = 5;   // N
  int window = 5;            // W
  int episode_len = 300;
  Variant variant = Variant::base;
  RewardUnits reward_units = RewardUnits::db;
  bool destination_moves = true;
  /// Multiplies the previous-slot SNR (dB) before it enters the snr_state feature.
  double snr_feature_scale = 0.01;
  channel::ChannelParams channel;
  channel::Geometry geometry;

  void validate() const;
};

/// 3 + W (3 + M), plus one for the snr_state variant.
int state_dim(const EnvConfig& config);

/// theta_i = clamp(theta_prev_i + delta_i, -pi, pi).
Eigen::VectorXd apply_action(const Eigen::VectorXd& theta_prev, const Eigen::VectorXd& delta);

/// Uniform over {stay} and the edge neighbors of `cell`.
std::size_t move_destination(std::size_t cell,
                             const std::vector<std::vector<std::size_t>>& neighbors, Rng& rng);

struct StepResult {
  Eigen::VectorXd next_state;
  double reward = 0.0;
  double snr_linear = 0.0;
  /// Upper bound on the SNR of this slot's channel over all phase designs.
  double snr_bound_linear = 0.0;
  Eigen::VectorXd theta;         // applied phases
  std::size_t cell = 0;          // cell where theta was applied
  channel::ChannelSnapshot snapshot;
  bool done = false;
};

/// The phase-control MDP.
///
/// State layout: [x_t, x_{t-1}, theta^{t-1}, ..., x_{t-W}, theta^{t-W}] with
/// positions divided by the cube side, optionally followed by the scaled
/// previous reward. The action is a vector of phase increments.
///
/// Channel phases start every episode from a site configuration drawn once
/// per environment (the geometry-dependent part of the channel) and then
/// drift. Shadowing is redrawn at every reset.
class Environment {
 public:
  /// Derives the "channel" and "motion" substreams of `seed`.
  Environment(EnvConfig config, std::uint64_t seed);
  Environment(EnvConfig config, Rng channel_rng, Rng motion_rng);

  const Eigen::VectorXd& reset();
  StepResult step(const Eigen::VectorXd& action);

  const EnvConfig& config() const { return config_; }
  int state_dim() const { return env::state_dim(config_); }
  const Eigen::VectorXd& state() const { return state_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  std::size_t cell() const { return cell_; }
  long t() const { return t_; }
  bool done() const { return t_ >= config_.episode_len; }
  const channel::ShadowingState& shadowing() const { return shadowing_; }
  const channel::PhaseState& phases() const { return phases_; }
  const channel::PhaseState& site_phases() const { return site_phases_; }

 private:
  struct HistoryEntry {
    Eigen::Vector3d pos;
    Eigen::VectorXd theta;
  };

  Eigen::Vector3d normalized(std::size_t cell) const;
  double reward_of(double snr_linear) const;
  void assemble_state();

  EnvConfig config_;
  Rng channel_rng_;
  Rng motion_rng_;
  std::vector<std::vector<std::size_t>> neighbors_;
  channel::PhaseState site_phases_;

  channel::ShadowingState shadowing_;
  channel::PhaseState phases_;
  Eigen::VectorXd theta_;
  std::size_t cell_ = 0;
  long t_ = 0;
  bool started_ = false;
  double last_reward_db_ = 0.0;
  std::deque<HistoryEntry> history_;  // front = most recent
  Eigen::VectorXd state_;
};

}  // namespace irsrl::env
