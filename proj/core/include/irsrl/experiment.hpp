#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irsrl/agent.hpp"
#include "irsrl/config.hpp"

namespace irsrl::harness {

inline constexpr std::string_view kMetricsHeader =
    "seed,episode,mean_snr_db,critic_loss,actor_obj,sigma,wall_s";

struct MetricsRow {
  std::uint64_t seed = 0;
  int episode = 0;
  double mean_snr_db = 0.0;
  std::optional<double> critic_loss;  // empty before the first update, nan on divergence
  std::optional<double> actor_obj;
  double sigma = 0.0;
  double wall_s = 0.0;

  bool diverged() const { return critic_loss && std::isnan(*critic_loss); }
};

std::string format_metrics_row(const MetricsRow& row);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

enum class SeedStatus { completed, diverged, failed };
std::string to_string(SeedStatus s);

struct SeedOutcome {
  std::uint64_t seed = 0;
  SeedStatus status = SeedStatus::completed;
  std::string message;
  agent::TrainStats stats;
  std::filesystem::path checkpoint;
};

struct ExperimentResult {
  std::vector<SeedOutcome> seeds;
  std::vector<MetricsRow> rows;
  std::filesystem::path metrics_path;
  std::filesystem::path manifest_path;

  bool all_failed() const;
};

struct RunOptions {
  /// Worker threads for independent seeds.
  int jobs = 1;
  /// Per-seed training hooks (fault injection in tests).
  std::function<agent::TrainHooks(std::uint64_t seed)> hooks_for_seed;
};

/// Trains every seed of `config` and writes, under config.out_dir:
///   metrics.csv, seed_<s>/checkpoint.irsrl, manifest.json
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Mean reward over each seed's last `last_n` episodes, averaged over seeds.
double final_performance(const std::vector<MetricsRow>& rows, int last_n = 10);

/// Per-seed final performance, in seed order.
std::vector<double> final_performance_per_seed(const std::vector<MetricsRow>& rows, int last_n = 10);

enum class SweepAxis { variant, window, irs_size };
SweepAxis parse_sweep_axis(std::string_view name);  // "variant" | "window" | "irs-size"
std::string to_string(SweepAxis axis);

/// Default sweep values: all variants, W in {1,3,5}, M in {5,...,30}.
std::vector<std::string> default_sweep_values(SweepAxis axis);

struct SweepRow {
  std::string label;
  double final_mean_db = 0.0;
  double final_std_db = 0.0;  // across seeds
  int seeds_total = 0;
  int seeds_diverged = 0;
  int seeds_failed = 0;
  std::filesystem::path metrics_path;
};

struct CompareResult {
  std::vector<SweepRow> rows;
  std::filesystem::path summary_csv;
  std::filesystem::path plot_svg;
  std::string table;
};

/// Runs one experiment per sweep value under out_dir/<axis>-<value>/ and
/// writes summary.csv, summary.txt and a plot for the axis.
CompareResult compare_variants(const ExperimentConfig& config, SweepAxis axis,
                               const std::vector<std::string>& values,
                               const RunOptions& options = {});

}  // namespace irsrl::harness
