// irsrl: train, compare, plot and verify IRS phase-control agents.
//
// Exit codes: 0 success, 2 configuration error, 3 run failure, 4 oracle failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "irsrl/config.hpp"
#include "irsrl/error.hpp"
#include "irsrl/experiment.hpp"
#include "irsrl/oracle_check.hpp"
#include "irsrl/plot.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitOracle = 4;

using irsrl::harness::ExperimentConfig;

ExperimentConfig load(const std::string& path, const std::optional<std::string>& variant,
                      const std::optional<std::string>& out) {
  ExperimentConfig config = irsrl::harness::load_config(path);
  if (variant) {
    try {
      config.variant = irsrl::harness::parse_variant(*variant);
    } catch (const irsrl::DomainError& e) {
      throw irsrl::ConfigError("variant", e.what());
    }
  }
  if (out) config.out_dir = *out;
  config.validate();
  return config;
}

int cmd_train(const std::string& config_path, const std::optional<std::string>& variant,
              const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out,
              int jobs) {
  ExperimentConfig config = load(config_path, variant, out);
  if (seed) config.seeds = {*seed};

  const auto result = irsrl::harness::run_experiment(config, {jobs, {}});
  for (const auto& s : result.seeds) {
    const auto& eps = s.stats.episodes;
    const std::string last = eps.empty() ? "-" : fmt::format("{:.3f} dB", eps.back().mean_snr_db);
    fmt::print("seed {:>4}  {:<9}  episodes {:>4}  last mean SNR {}{}\n", s.seed,
               irsrl::harness::to_string(s.status), eps.size(), last,
               s.message.empty() ? "" : "  (" + s.message + ")");
  }
  fmt::print("final performance (last 10 episodes): {:.3f} dB\n",
             irsrl::harness::final_performance(result.rows));
  fmt::print("wrote {}\n", result.metrics_path.string());
  return result.all_failed() ? kExitRun : 0;
}

int cmd_compare(const std::string& config_path, const std::string& sweep,
                std::vector<std::string> values, const std::optional<std::string>& out, int jobs) {
  const ExperimentConfig config = load(config_path, std::nullopt, out);
  irsrl::harness::SweepAxis axis;
  try {
    axis = irsrl::harness::parse_sweep_axis(sweep);
  } catch (const irsrl::DomainError& e) {
    throw irsrl::ConfigError("sweep", e.what());
  }
  if (values.empty()) values = irsrl::harness::default_sweep_values(axis);
  const auto result = irsrl::harness::compare_variants(config, axis, values, {jobs, {}});
  std::cout << result.table;
  fmt::print("wrote {} and {}\n", result.summary_csv.string(), result.plot_svg.string());
  for (const auto& r : result.rows) {
    if (r.seeds_failed < r.seeds_total) return 0;
  }
  return kExitRun;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out,
             const std::string& title) {
  std::vector<std::pair<std::string, std::filesystem::path>> labelled;
  for (const auto& in : inputs) labelled.push_back(irsrl::harness::parse_plot_input(in));
  irsrl::harness::plot_curves(labelled, out, {title});
  fmt::print("wrote {}\n", out);
  return 0;
}

int cmd_oracle_check(const std::string& config_path, std::uint64_t seed) {
  const ExperimentConfig config = load(config_path, std::nullopt, std::nullopt);
  irsrl::harness::OracleCheckOptions options;
  options.seed = seed;
  const auto report = irsrl::harness::oracle_check(config, options);
  for (const auto& p : report.properties) {
    fmt::print("[{}] {}: {}\n", p.passed ? "PASS" : "FAIL", p.name, p.detail);
  }
  fmt::print("{:.2f} s\n", report.seconds);
  return report.all_passed() ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS phase-shift control with deep actor-critic agents"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 1;

  auto* train = app.add_subcommand("train", "train one variant over the configured seeds");
  train->add_option("--config", config_path, "JSON config file")->required();
  train->add_option("--variant", variant, "base | snr-state | ff");
  train->add_option("--seed", seed, "train a single seed");
  train->add_option("--out", out_dir, "output directory");
  train->add_option("--jobs", jobs, "seeds trained in parallel")->check(CLI::PositiveNumber);

  std::string sweep;
  std::vector<std::string> sweep_values;
  auto* compare = app.add_subcommand("compare", "sweep variants, window sizes or IRS sizes");
  compare->add_option("--config", config_path, "JSON config file")->required();
  compare->add_option("--sweep", sweep, "variant | window | irs-size")->required();
  compare->add_option("--values", sweep_values, "override the sweep values");
  compare->add_option("--out", out_dir, "output directory");
  compare->add_option("--jobs", jobs, "seeds trained in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> plot_inputs;
  std::string plot_out;
  std::string plot_title = "training performance";
  auto* plot = app.add_subcommand("plot", "render metrics CSVs as an SVG");
  plot->add_option("--in", plot_inputs, "metrics.csv files, optionally label=path")->required();
  plot->add_option("--out", plot_out, "SVG output path")->required();
  plot->add_option("--title", plot_title, "plot title");

  std::uint64_t oracle_seed = 12345;
  auto* oracle = app.add_subcommand("oracle-check", "verify the signal-model oracles");
  oracle->add_option("--config", config_path, "JSON config file")->required();
  oracle->add_option("--seed", oracle_seed, "seed for the sampled channels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train) return cmd_train(config_path, variant, seed, out_dir, jobs);
    if (*compare) return cmd_compare(config_path, sweep, sweep_values, out_dir, jobs);
    if (*plot) return cmd_plot(plot_inputs, plot_out, plot_title);
    if (*oracle) return cmd_oracle_check(config_path, oracle_seed);
  } catch (const irsrl::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRun;
  }
  return 0;
}
