#include "irsrl/agent.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "irsrl/error.hpp"
#include "irsrl/signal.hpp"

namespace irsrl::agent {

namespace {

constexpr double kPi = std::numbers::pi;

nn::NetworkSpec spec_for(int in, const std::vector<int>& hidden, int out, nn::OutputHead head) {
  nn::NetworkSpec spec{{in}, head};
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(out);
  return spec;
}

void require_finite(const Eigen::RowVectorXf& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(fmt::format("non-finite {}", what));
}

}  // namespace

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma", "must be in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau", "must be in (0, 1]");
  if (batch_size < 1) throw ConfigError("batch_size", "must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate", "must be >= 0");
  if (!(explore_sigma0 >= 0.0)) throw ConfigError("explore_sigma0", "must be >= 0");
  if (!(explore_decay > 0.0 && explore_decay <= 1.0))
    throw ConfigError("explore_decay", "must be in (0, 1]");
  if (warmup_steps < 0) throw ConfigError("warmup_steps", "must be >= 0");
  if (updates_per_step < 0) throw ConfigError("updates_per_step", "must be >= 0");
  if (!(fourier_variance >= 0.0)) throw ConfigError("fourier_variance", "must be >= 0");
  if (fourier_features < 1) throw ConfigError("fourier_features", "must be >= 1");
  if (hidden_sizes.empty()) throw ConfigError("hidden_sizes", "must list at least one layer");
  for (int h : hidden_sizes) {
    if (h < 1) throw ConfigError("hidden_sizes", "layer widths must be >= 1");
  }
  if (buffer_capacity < static_cast<std::size_t>(batch_size))
    throw ConfigError("buffer_capacity", "must be >= batch_size");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
    throw ConfigError("reward_scale", "must be > 0");
}

AgentNets make_nets(int state_dim, int action_dim, const AgentConfig& config, Rng& init_rng,
                    Rng& fourier_rng) {
  AgentNets nets;
  const bool fourier = config.critic_input == CriticInput::fourier;
  if (fourier) {
    nets.kernel = std::make_shared<const nn::FourierKernel<float>>(
        config.fourier_features, state_dim + action_dim, std::sqrt(config.fourier_variance),
        fourier_rng);
  }
  const int critic_in =
      nn::critic_input_dim(state_dim, action_dim, config.fourier_features, fourier);

  nets.actor = nn::init_params<float>(
      spec_for(state_dim, config.hidden_sizes, action_dim, nn::OutputHead::tanh_scaled_pi),
      init_rng);
  for (auto& critic : nets.critics) {
    critic.net = nn::init_params<float>(
        spec_for(critic_in, config.hidden_sizes, 1, nn::OutputHead::linear), init_rng);
    critic.features = nets.kernel;
    critic.state_dim = state_dim;
    critic.action_dim = action_dim;
  }
  nets.actor_target = nets.actor;
  nets.critic_targets = nets.critics;
  return nets;
}

Optimizers make_optimizers(const AgentNets& nets, const AgentConfig& config) {
  nn::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  return {nn::make_adam(nets.actor.params, adam),
          {nn::make_adam(nets.critics[0].net.params, adam),
           nn::make_adam(nets.critics[1].net.params, adam)}};
}

Eigen::VectorXd select_action(const nn::Mlp<float>& actor, const Eigen::VectorXd& state,
                              double sigma, Rng& rng, bool warmup) {
  const int m = actor.spec.output_size();
  Eigen::VectorXd action(m);
  if (warmup) {
    std::uniform_real_distribution<double> uniform(-kPi, kPi);
    for (int i = 0; i < m; ++i) action[i] = uniform(rng);
    return action;
  }
  const nn::Matrix<float> out = nn::mlp_forward(actor, nn::Matrix<float>(state.cast<float>()));
  action = out.col(0).cast<double>();
  if (!action.allFinite()) throw NumericalError("select_action: non-finite actor output");
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (int i = 0; i < m; ++i) action[i] += normal(rng);
  }
  return action.cwiseMax(-kPi).cwiseMin(kPi);
}

CriticTargets critic_target(const Batch& batch, const AgentNets& nets, double gamma,
                            bool shared_min) {
  if (batch.size() == 0) throw DomainError("critic_target: empty batch");
  const nn::Matrix<float> next_actions = nn::mlp_forward(nets.actor_target, batch.next_states);
  const nn::Matrix<float> q1 = nn::critic_forward(nets.critic_targets[0], batch.next_states, next_actions);
  const nn::Matrix<float> q2 = nn::critic_forward(nets.critic_targets[1], batch.next_states, next_actions);
  const auto g = static_cast<float>(gamma);
  CriticTargets out;
  if (shared_min) {
    const Eigen::RowVectorXf y = batch.rewards + g * q1.cwiseMin(q2);
    out.y = {y, y};
  } else {
    out.y = {batch.rewards + g * q1, batch.rewards + g * q2};
  }
  require_finite(out.y[0], "critic target");
  require_finite(out.y[1], "critic target");
  return out;
}

std::array<double, 2> update_critics(AgentNets& nets, const Batch& batch,
                                     const CriticTargets& targets, Optimizers& opt) {
  std::array<double, 2> losses{};
  const auto n = static_cast<float>(batch.size());
  for (std::size_t j = 0; j < 2; ++j) {
    auto& critic = nets.critics[j];
    nn::CriticCache<float> cache;
    const nn::Matrix<float> q = nn::critic_forward(critic, batch.states, batch.actions, &cache);
    const Eigen::RowVectorXf err = q.row(0) - targets.y[j];
    losses[j] = static_cast<double>(err.squaredNorm()) / batch.size();
    if (!std::isfinite(losses[j])) throw NumericalError("non-finite critic loss");
    // d/dQ of mean (Q - y)^2.
    const nn::Matrix<float> grad = (2.0f / n) * err;
    const auto grads = nn::critic_backward(critic, cache, grad);
    nn::adam_step(critic.net.params, grads.param_grads, opt.critics[j]);
  }
  return losses;
}

double update_actor(AgentNets& nets, const Batch& batch, Optimizers& opt) {
  nn::ForwardCache<float> actor_cache;
  const nn::Matrix<float> actions = nn::mlp_forward(nets.actor, batch.states, &actor_cache);

  std::array<nn::CriticCache<float>, 2> caches;
  const nn::Matrix<float> q1 = nn::critic_forward(nets.critics[0], batch.states, actions, &caches[0]);
  const nn::Matrix<float> q2 = nn::critic_forward(nets.critics[1], batch.states, actions, &caches[1]);

  const Eigen::Index n = batch.size();
  // Ascent on the mean of the smaller estimate: descend on its negation.
  // Ties route the gradient through critic 0.
  nn::Matrix<float> g1 = nn::Matrix<float>::Zero(1, n);
  nn::Matrix<float> g2 = nn::Matrix<float>::Zero(1, n);
  double objective = 0.0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const bool first = q1(0, b) <= q2(0, b);
    objective += first ? q1(0, b) : q2(0, b);
    (first ? g1 : g2)(0, b) = -1.0f / static_cast<float>(n);
  }
  objective /= static_cast<double>(n);
  if (!std::isfinite(objective)) throw NumericalError("non-finite actor objective");

  nn::Matrix<float> action_grad = nn::critic_backward(nets.critics[0], caches[0], g1).action_grad;
  action_grad += nn::critic_backward(nets.critics[1], caches[1], g2).action_grad;
  const auto actor_grads = nn::mlp_backward(nets.actor, actor_cache, action_grad);
  nn::adam_step(nets.actor.params, actor_grads.param_grads, opt.actor);
  return objective;
}

void update_targets(AgentNets& nets, double tau) {
  nn::polyak_update(nets.actor_target.params, nets.actor.params, tau);
  for (std::size_t j = 0; j < 2; ++j) {
    nn::polyak_update(nets.critic_targets[j].net.params, nets.critics[j].net.params, tau);
  }
}

void swap_critics(AgentNets& nets, Optimizers& opt) {
  std::swap(nets.critics[0], nets.critics[1]);
  std::swap(nets.critic_targets[0], nets.critic_targets[1]);
  std::swap(opt.critics[0], opt.critics[1]);
}

std::vector<checkpoint::Tensor> checkpoint_tensors(const AgentNets& nets) {
  std::vector<checkpoint::Tensor> out;
  checkpoint::append_params(out, "actor", nets.actor.params);
  checkpoint::append_params(out, "critic1", nets.critics[0].net.params);
  checkpoint::append_params(out, "critic2", nets.critics[1].net.params);
  checkpoint::append_params(out, "actor_target", nets.actor_target.params);
  checkpoint::append_params(out, "critic1_target", nets.critic_targets[0].net.params);
  checkpoint::append_params(out, "critic2_target", nets.critic_targets[1].net.params);
  if (nets.kernel) out.push_back(checkpoint::matrix_tensor("fourier.B", nets.kernel->projection()));
  return out;
}

void load_tensors(const std::vector<checkpoint::Tensor>& tensors, AgentNets& nets) {
  AgentNets loaded = nets;
  checkpoint::read_params(tensors, "actor", loaded.actor.params);
  checkpoint::read_params(tensors, "critic1", loaded.critics[0].net.params);
  checkpoint::read_params(tensors, "critic2", loaded.critics[1].net.params);
  checkpoint::read_params(tensors, "actor_target", loaded.actor_target.params);
  checkpoint::read_params(tensors, "critic1_target", loaded.critic_targets[0].net.params);
  checkpoint::read_params(tensors, "critic2_target", loaded.critic_targets[1].net.params);
  if (nets.kernel) {
    const auto* b = checkpoint::find(tensors, "fourier.B");
    if (!b) throw IoError("checkpoint is missing 'fourier.B'");
    auto projection = checkpoint::tensor_matrix(*b);
    if (projection.rows() != nets.kernel->projection().rows() ||
        projection.cols() != nets.kernel->projection().cols()) {
      throw IoError("checkpoint Fourier kernel shape does not match");
    }
    loaded.kernel = std::make_shared<const nn::FourierKernel<float>>(std::move(projection));
    for (auto* c : {&loaded.critics[0], &loaded.critics[1], &loaded.critic_targets[0],
                    &loaded.critic_targets[1]}) {
      c->features = loaded.kernel;
    }
  }
  nets = std::move(loaded);
}

Agent::Agent(int state_dim, int action_dim, AgentConfig config, Rng init_rng, Rng fourier_rng)
    : config_(std::move(config)) {
  config_.validate();
  nets_ = make_nets(state_dim, action_dim, config_, init_rng, fourier_rng);
  opt_ = make_optimizers(nets_, config_);
}

UpdateStats Agent::update(const ReplayBuffer& buffer, Rng& replay_rng) {
  if (!baseline_) set_reward_baseline(config_.center_rewards ? buffer.mean_reward() : 0.0);
  return update(buffer.sample(static_cast<std::size_t>(config_.batch_size), replay_rng));
}

UpdateStats Agent::update(Batch batch) {
  const auto baseline = static_cast<float>(baseline_.value_or(0.0));
  batch.rewards = (batch.rewards.array() - baseline) * static_cast<float>(config_.reward_scale);

  UpdateStats stats;
  const auto targets = critic_target(batch, nets_, config_.gamma, config_.shared_min_target);
  stats.critic_loss = update_critics(nets_, batch, targets, opt_);
  stats.actor_objective = update_actor(nets_, batch, opt_);
  update_targets(nets_, config_.tau);
  return stats;
}

TrainResult train(const env::EnvConfig& env_config, const AgentConfig& agent_config,
                  std::uint64_t seed, int episodes, const TrainHooks& hooks) {
  using Clock = std::chrono::steady_clock;
  if (episodes < 1) throw ConfigError("episodes", "must be >= 1");

  env::Environment environment(env_config, seed);
  const int sd = environment.state_dim();
  const int ad = env_config.irs_elements;
  Agent agent(sd, ad, agent_config, make_stream(seed, "init"), make_stream(seed, "fourier"));
  ReplayBuffer buffer(agent_config.buffer_capacity, sd, ad);
  Rng explore_rng = make_stream(seed, "exploration");
  Rng replay_rng = make_stream(seed, "replay");

  TrainResult result;
  result.checkpoint = checkpoint_tensors(agent.nets());
  auto& stats = result.stats;
  std::size_t total_steps = 0;

  for (int ep = 0; ep < episodes && !stats.diverged; ++ep) {
    const auto start = Clock::now();
    EpisodeStats row;
    row.episode = ep;
    row.sigma = agent_config.explore_sigma0 * std::pow(agent_config.explore_decay, ep);

    Eigen::VectorXd state = environment.reset();
    double snr_sum = 0.0;
    double bound_sum = 0.0;
    double loss_sum = 0.0;
    double objective_sum = 0.0;
    std::size_t slots = 0;
    std::size_t ep_updates = 0;

    try {
      while (!environment.done()) {
        const bool warm = total_steps < static_cast<std::size_t>(agent_config.warmup_steps);
        const Eigen::VectorXd action = agent.select_action(state, row.sigma, explore_rng, warm);
        const env::StepResult step = environment.step(action);
        buffer.push({state.cast<float>(), action.cast<float>(), static_cast<float>(step.reward),
                     step.next_state.cast<float>()});
        snr_sum += signal::snr_db(step.snr_linear);
        bound_sum += signal::snr_db(step.snr_bound_linear);
        ++slots;
        ++total_steps;
        state = step.next_state;

        if (warm || buffer.size() < static_cast<std::size_t>(agent_config.batch_size)) continue;
        for (int u = 0; u < agent_config.updates_per_step; ++u) {
          const UpdateStats us = agent.update(buffer, replay_rng);
          ++stats.updates;
          ++ep_updates;
          if (hooks.after_update) hooks.after_update(stats.updates, agent.nets());
          loss_sum += 0.5 * (us.critic_loss[0] + us.critic_loss[1]);
          objective_sum += us.actor_objective;
        }
      }
      if (!agent.nets().actor.params.all_finite()) throw NumericalError("non-finite actor parameters");
    } catch (const NumericalError& e) {
      stats.diverged = true;
      stats.divergence_message = fmt::format("episode {}: {}", ep, e.what());
      row.diverged = true;
    }

    row.mean_snr_db = slots ? snr_sum / static_cast<double>(slots) : std::nan("");
    row.mean_bound_db = slots ? bound_sum / static_cast<double>(slots) : std::nan("");
    if (row.diverged) {
      row.critic_loss = std::nan("");
      row.actor_objective = std::nan("");
    } else if (ep_updates > 0) {
      row.critic_loss = loss_sum / static_cast<double>(ep_updates);
      row.actor_objective = objective_sum / static_cast<double>(ep_updates);
      result.checkpoint = checkpoint_tensors(agent.nets());
    }
    row.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    stats.episodes.push_back(row);
  }
  stats.buffer_size = buffer.size();
  return result;
}

}  // namespace irsrl::agent
