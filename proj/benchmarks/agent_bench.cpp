#include <benchmark/benchmark.h>

#include "irsrl/agent.hpp"

namespace {

using irsrl::Rng;
namespace agent = irsrl::agent;

// Args: hidden width, Fourier critic (0/1). Desk-sized state and action.
void BM_AgentUpdate(benchmark::State& state) {
  agent::AgentConfig cfg;
  const int width = static_cast<int>(state.range(0));
  cfg.hidden_sizes = {width, width, width};
  cfg.fourier_features = 64;
  cfg.critic_input = state.range(1) ? agent::CriticInput::fourier : agent::CriticInput::raw;
  cfg.buffer_capacity = 4096;
  const int sd = 58, ad = 8;
  agent::Agent a(sd, ad, cfg, Rng(1), Rng(2));
  agent::ReplayBuffer buffer(cfg.buffer_capacity, sd, ad);
  Rng rng(3);
  for (int i = 0; i < 1024; ++i) {
    buffer.push({Eigen::VectorXf::Random(sd), Eigen::VectorXf::Random(ad), 40.0f, Eigen::VectorXf::Random(sd)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(a.update(buffer, rng));
}
BENCHMARK(BM_AgentUpdate)->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

}  // namespace
