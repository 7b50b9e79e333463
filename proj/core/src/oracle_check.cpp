#include "irsrl/oracle_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "irsrl/channel.hpp"
#include "irsrl/signal.hpp"

namespace irsrl::harness {

namespace {

constexpr double kPi = std::numbers::pi;

channel::ChannelSnapshot draw_channel(const ExperimentConfig& config, int m, int n, Rng& rng) {
  const auto& geometry = config.env.geometry;
  const auto& params = config.env.channel;
  const auto shadowing = channel::init_shadowing(geometry, params, rng);
  const auto phases = channel::init_phases(geometry.dest_cells.size(), m, n, rng);
  std::uniform_int_distribution<std::size_t> pick(0, geometry.dest_cells.size() - 1);
  return channel::sample_channels(0, pick(rng), shadowing, phases, geometry, params, rng);
}

Eigen::VectorXd random_theta(int m, Rng& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Eigen::VectorXd theta(m);
  for (int i = 0; i < m; ++i) theta[i] = u(rng);
  return theta;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

bool OracleReport::all_passed() const {
  return !properties.empty() &&
         std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

OracleReport oracle_check(const ExperimentConfig& config, const OracleCheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng = make_stream(options.seed, "oracle-check");
  const double power = config.env.channel.tx_power_linear();
  const double noise = config.env.channel.noise_var;
  const int m_full = config.env.irs_elements;
  const int n_full = config.env.source_antennas;
  const int m_small = std::max(1, std::min(m_full, options.max_exhaustive_elements));
  OracleReport report;

  {
    PropertyResult p{"beamformer optimality", true, ""};
    double worst_ratio = 0.0;
    double worst_norm = 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < options.beamformer_instances; ++i) {
      const auto ch = draw_channel(config, m_full, n_full, rng);
      const Eigen::RowVectorXcd c = signal::composite_channel(ch.h, random_theta(m_full, rng), ch.G);
      const Eigen::VectorXcd b = signal::optimal_beamformer(c, power);
      worst_norm = std::max(worst_norm, rel_diff(b.squaredNorm(), power));
      const double best = std::norm((c * b)(0));
      for (int s = 0; s < options.beamformer_samples; ++s) {
        Eigen::VectorXcd other(n_full);
        for (int k = 0; k < n_full; ++k) other[k] = {normal(rng), normal(rng)};
        other *= std::sqrt(power) / other.norm();
        worst_ratio = std::max(worst_ratio, std::norm((c * other)(0)) / best);
      }
    }
    p.passed = worst_ratio <= 1.0 + 1e-12 && worst_norm <= 1e-9;
    p.detail = fmt::format("max sampled/optimal gain {:.6f}, max |‖b‖²-P|/P {:.2e}", worst_ratio,
                           worst_norm);
    report.properties.push_back(p);
  }

  {
    PropertyResult p{"single-antenna closed form", true, ""};
    double worst_bound = 0.0;
    double worst_grid = 0.0;
    for (int i = 0; i < options.closed_form_instances; ++i) {
      const int m = 1 + i % m_small;
      const auto ch = draw_channel(config, m, 1, rng);
      const Eigen::VectorXcd g = ch.G.col(0);
      const auto oracle = signal::phase_oracle_single_antenna(ch.h, g, power, noise);
      const double achieved = signal::snr(ch.h, oracle.theta, ch.G, power, noise);
      const double bound = signal::snr_upper_bound(ch.h, ch.G, power, noise);
      worst_bound = std::max({worst_bound, rel_diff(oracle.snr, bound), rel_diff(achieved, bound)});
      const auto grid = signal::exhaustive_phase_search(ch.h, ch.G, options.grid_levels, power, noise);
      worst_grid = std::max(worst_grid, grid.snr / achieved);
    }
    p.passed = worst_bound <= 1e-9 && worst_grid <= 1.0 + 1e-12;
    p.detail = fmt::format("max rel gap to bound {:.2e}, max grid/closed-form {:.6f} ({} levels)",
                           worst_bound, worst_grid, options.grid_levels);
    report.properties.push_back(p);
  }

  {
    PropertyResult p{"bound chain", true, ""};
    double worst = 0.0;
    for (int i = 0; i < options.bound_instances; ++i) {
      const auto ch = draw_channel(config, m_full, n_full, rng);
      const double bound = signal::snr_upper_bound(ch.h, ch.G, power, noise);
      worst = std::max(worst, signal::snr(ch.h, random_theta(m_full, rng), ch.G, power, noise) / bound);
    }
    for (int i = 0; i < std::min(options.bound_instances, 50); ++i) {
      const auto ch = draw_channel(config, m_small, n_full, rng);
      const double bound = signal::snr_upper_bound(ch.h, ch.G, power, noise);
      const auto grid = signal::exhaustive_phase_search(ch.h, ch.G, 8, power, noise);
      worst = std::max(worst, grid.snr / bound);
    }
    p.passed = worst <= 1.0 + 1e-12;
    p.detail = fmt::format("max snr/bound {:.6f}", worst);
    report.properties.push_back(p);
  }

  {
    PropertyResult p{"single-element phase invariance", true, ""};
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto ch = draw_channel(config, 1, n_full, rng);
      const double ref = signal::snr(ch.h, Eigen::VectorXd::Zero(1), ch.G, power, noise);
      for (int k = 0; k < options.grid_levels; ++k) {
        const Eigen::VectorXd theta =
            Eigen::VectorXd::Constant(1, -kPi + 2.0 * kPi * k / options.grid_levels);
        worst = std::max(worst, rel_diff(signal::snr(ch.h, theta, ch.G, power, noise), ref));
      }
    }
    p.passed = worst <= 1e-9;
    p.detail = fmt::format("max relative spread {:.2e}", worst);
    report.properties.push_back(p);
  }

  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace irsrl::harness
