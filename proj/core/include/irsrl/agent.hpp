#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irsrl/checkpoint.hpp"
#include "irsrl/env.hpp"
#include "irsrl/nn.hpp"
#include "irsrl/replay.hpp"
#include "irsrl/rng.hpp"

// Twin-critic deterministic actor-critic (DDPG with a clipped double-Q target).
namespace irsrl::agent {

enum class CriticInput { raw, fourier };

struct AgentConfig {
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 64;
  double learning_rate = 2e-4;
  double explore_sigma0 = 0.1 * 3.14159265358979323846;
  double explore_decay = 0.999;  // per episode
  int warmup_steps = 1000;
  int updates_per_step = 1;
  CriticInput critic_input = CriticInput::raw;
  double fourier_variance = 0.01;  // sigma_B^2
  int fourier_features = 256;      // k
  std::vector<int> hidden_sizes{400, 400, 400};
  std::size_t buffer_capacity = 1'000'000;
  bool shared_min_target = true;
  /// Rewards enter the TD targets as (r - baseline) * reward_scale. The
  /// baseline is the replay mean at the first update when center_rewards is
  /// set, else 0.
  double reward_scale = 0.1;
  bool center_rewards = true;

  void validate() const;
};

struct AgentNets {
  nn::Mlp<float> actor;
  std::array<nn::Critic<float>, 2> critics;
  nn::Mlp<float> actor_target;
  std::array<nn::Critic<float>, 2> critic_targets;
  std::shared_ptr<const nn::FourierKernel<float>> kernel;  // null for raw critics
};

struct Optimizers {
  nn::AdamState<float> actor;
  std::array<nn::AdamState<float>, 2> critics;
};

AgentNets make_nets(int state_dim, int action_dim, const AgentConfig& config, Rng& init_rng,
                    Rng& fourier_rng);

Optimizers make_optimizers(const AgentNets& nets, const AgentConfig& config);

/// clamp(pi tanh(actor(s)) + N(0, sigma^2 I), -pi, pi); uniform on [-pi, pi]^M
/// while warming up.
Eigen::VectorXd select_action(const nn::Mlp<float>& actor, const Eigen::VectorXd& state,
                              double sigma, Rng& rng, bool warmup);

/// TD targets for each critic. With a shared target both rows equal
/// r + gamma * min(Q'_1, Q'_2)(s', pi'(s')); otherwise critic j bootstraps
/// from its own target network. No terminal masking.
struct CriticTargets {
  std::array<Eigen::RowVectorXf, 2> y;
};

CriticTargets critic_target(const Batch& batch, const AgentNets& nets, double gamma,
                            bool shared_min = true);

/// One Adam step per critic on the mean squared Bellman error. Returns the
/// pre-step losses.
std::array<double, 2> update_critics(AgentNets& nets, const Batch& batch,
                                     const CriticTargets& targets, Optimizers& opt);

/// One Adam ascent step on mean_b min_j Q_j(s_b, pi(s_b)). Returns the
/// pre-step objective.
double update_actor(AgentNets& nets, const Batch& batch, Optimizers& opt);

/// Polyak-averages all three target networks toward their main networks.
void update_targets(AgentNets& nets, double tau);

/// Swaps the two critics, their targets and optimizer states.
void swap_critics(AgentNets& nets, Optimizers& opt);

std::vector<checkpoint::Tensor> checkpoint_tensors(const AgentNets& nets);
void load_tensors(const std::vector<checkpoint::Tensor>& tensors, AgentNets& nets);

struct UpdateStats {
  std::array<double, 2> critic_loss{};
  double actor_objective = 0.0;
};

/// Networks, optimizers and the reward transform for one training run.
class Agent {
 public:
  Agent(int state_dim, int action_dim, AgentConfig config, Rng init_rng, Rng fourier_rng);

  UpdateStats update(const ReplayBuffer& buffer, Rng& replay_rng);
  UpdateStats update(Batch batch);

  Eigen::VectorXd select_action(const Eigen::VectorXd& state, double sigma, Rng& rng,
                                bool warmup) const {
    return agent::select_action(nets_.actor, state, sigma, rng, warmup);
  }

  /// Fixes the reward baseline used by the TD targets.
  void set_reward_baseline(double baseline) { baseline_ = baseline; }
  std::optional<double> reward_baseline() const { return baseline_; }

  const AgentConfig& config() const { return config_; }
  AgentNets& nets() { return nets_; }
  const AgentNets& nets() const { return nets_; }
  Optimizers& optimizers() { return opt_; }

 private:
  AgentConfig config_;
  AgentNets nets_;
  Optimizers opt_;
  std::optional<double> baseline_;
};

struct EpisodeStats {
  int episode = 0;
  double mean_snr_db = 0.0;
  /// Mean per-slot SNR upper bound (dB); equals the optimum when N = 1.
  double mean_bound_db = 0.0;
  std::optional<double> critic_loss;      // mean over the episode's updates
  std::optional<double> actor_objective;  // in transformed reward units
  double sigma = 0.0;
  double wall_s = 0.0;
  bool diverged = false;
};

struct TrainStats {
  std::vector<EpisodeStats> episodes;
  bool diverged = false;
  std::string divergence_message;
  std::size_t updates = 0;
  std::size_t buffer_size = 0;
};

struct TrainHooks {
  /// Runs after every agent update; tests use it to inject faults.
  std::function<void(std::size_t update_index, AgentNets& nets)> after_update;
};

struct TrainResult {
  TrainStats stats;
  /// Parameters at the end of the last episode that finished without diverging.
  std::vector<checkpoint::Tensor> checkpoint;
};

TrainResult train(const env::EnvConfig& env_config, const AgentConfig& agent_config,
                  std::uint64_t seed, int episodes, const TrainHooks& hooks = {});

}  // namespace irsrl::agent
