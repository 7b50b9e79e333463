#include "irsrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irsrl/checkpoint.hpp"
#include "irsrl/error.hpp"
#include "irsrl/plot.hpp"

namespace irsrl::harness {

namespace {

using json = nlohmann::json;

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.10g}", *v) : ""; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(fmt::format("metrics line {}: '{}' is not a number", line_no, s));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SeedOutcome run_seed(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options) {
  SeedOutcome outcome;
  outcome.seed = seed;
  try {
    const agent::TrainHooks hooks =
        options.hooks_for_seed ? options.hooks_for_seed(seed) : agent::TrainHooks{};
    auto result =
        agent::train(config.env_config(), config.agent_config(), seed, config.episodes, hooks);
    const auto dir = config.out_dir / fmt::format("seed_{}", seed);
    std::filesystem::create_directories(dir);
    outcome.checkpoint = dir / "checkpoint.irsrl";
    checkpoint::save_checkpoint(outcome.checkpoint, result.checkpoint);
    outcome.stats = std::move(result.stats);
    if (outcome.stats.diverged) {
      outcome.status = SeedStatus::diverged;
      outcome.message = outcome.stats.divergence_message;
    }
  } catch (const std::exception& e) {
    outcome.status = SeedStatus::failed;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace

std::string format_metrics_row(const MetricsRow& r) {
  return fmt::format("{},{},{:.10g},{},{},{:.10g},{:.6f}", r.seed, r.episode, r.mean_snr_db,
                     fmt_opt(r.critic_loss), fmt_opt(r.actor_obj), r.sigma, r.wall_s);
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("metrics CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw IoError(fmt::format("unexpected metrics header '{}'", line));

  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7) {
      throw IoError(fmt::format("metrics line {}: expected 7 fields, got {}", line_no, cells.size()));
    }
    MetricsRow r;
    r.seed = static_cast<std::uint64_t>(parse_double(cells[0], line_no));
    r.episode = static_cast<int>(parse_double(cells[1], line_no));
    r.mean_snr_db = parse_double(cells[2], line_no);
    if (!cells[3].empty()) r.critic_loss = parse_double(cells[3], line_no);
    if (!cells[4].empty()) r.actor_obj = parse_double(cells[4], line_no);
    r.sigma = parse_double(cells[5], line_no);
    r.wall_s = parse_double(cells[6], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read metrics file '{}'", path.string()));
  std::stringstream text;
  text << in.rdbuf();
  return parse_metrics_csv(text.str());
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::string text(kMetricsHeader);
  text += '\n';
  for (const auto& r : rows) {
    text += format_metrics_row(r);
    text += '\n';
  }
  write_text(path, text);
}

std::string to_string(SeedStatus s) {
  switch (s) {
    case SeedStatus::completed: return "completed";
    case SeedStatus::diverged: return "diverged";
    case SeedStatus::failed: return "failed";
  }
  return "?";
}

bool ExperimentResult::all_failed() const {
  return std::all_of(seeds.begin(), seeds.end(),
                     [](const SeedOutcome& s) { return s.status == SeedStatus::failed; });
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);

  ExperimentResult result;
  result.seeds.resize(config.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      result.seeds[i] = run_seed(config, config.seeds[i], options);
    }
  };
  const int jobs = std::clamp(options.jobs, 1, static_cast<int>(config.seeds.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (const auto& s : result.seeds) {
    for (const auto& ep : s.stats.episodes) {
      result.rows.push_back({s.seed, ep.episode, ep.mean_snr_db, ep.critic_loss,
                             ep.actor_objective, ep.sigma, ep.wall_s});
    }
  }
  result.metrics_path = config.out_dir / "metrics.csv";
  write_metrics_csv(result.metrics_path, result.rows);

  json manifest;
  manifest["artifact"] = "irsrl";
  manifest["version"] = IRSRL_VERSION;
  manifest["config"] = json::parse(to_json(config));
  manifest["seeds"] = json::array();
  for (const auto& s : result.seeds) {
    manifest["seeds"].push_back({{"seed", s.seed},
                                 {"status", to_string(s.status)},
                                 {"message", s.message},
                                 {"episodes", s.stats.episodes.size()},
                                 {"updates", s.stats.updates},
                                 {"checkpoint", s.checkpoint.empty()
                                                    ? ""
                                                    : std::filesystem::relative(s.checkpoint, config.out_dir).string()}});
  }
  result.manifest_path = config.out_dir / "manifest.json";
  write_text(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

std::vector<double> final_performance_per_seed(const std::vector<MetricsRow>& rows, int last_n) {
  std::map<std::uint64_t, std::vector<std::pair<int, double>>> by_seed;
  for (const auto& r : rows) {
    if (std::isfinite(r.mean_snr_db)) by_seed[r.seed].emplace_back(r.episode, r.mean_snr_db);
  }
  std::vector<double> out;
  for (auto& [seed, eps] : by_seed) {
    std::sort(eps.begin(), eps.end());
    const std::size_t n = std::min(eps.size(), static_cast<std::size_t>(std::max(last_n, 1)));
    double s = 0.0;
    for (std::size_t i = eps.size() - n; i < eps.size(); ++i) s += eps[i].second;
    out.push_back(s / static_cast<double>(n));
  }
  return out;
}

double final_performance(const std::vector<MetricsRow>& rows, int last_n) {
  return mean_of(final_performance_per_seed(rows, last_n));
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "variant") return SweepAxis::variant;
  if (name == "window") return SweepAxis::window;
  if (name == "irs-size" || name == "irs_size") return SweepAxis::irs_size;
  throw DomainError(fmt::format("unknown sweep axis '{}' (expected variant, window or irs-size)", name));
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::variant: return "variant";
    case SweepAxis::window: return "window";
    case SweepAxis::irs_size: return "irs-size";
  }
  return "?";
}

std::vector<std::string> default_sweep_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::variant: return {"base", "snr-state", "ff"};
    case SweepAxis::window: return {"1", "3", "5"};
    case SweepAxis::irs_size: return {"5", "10", "15", "20", "25", "30"};
  }
  return {};
}

CompareResult compare_variants(const ExperimentConfig& config, SweepAxis axis,
                               const std::vector<std::string>& values, const RunOptions& options) {
  if (values.empty()) throw ConfigError("sweep", "no sweep values");
  const std::string axis_name = to_string(axis);

  std::vector<ExperimentConfig> settings;
  for (const auto& value : values) {
    ExperimentConfig c = config;
    try {
      switch (axis) {
        case SweepAxis::variant: c.variant = parse_variant(value); break;
        case SweepAxis::window: c.env.window = std::stoi(value); break;
        case SweepAxis::irs_size: c.env.irs_elements = std::stoi(value); break;
      }
    } catch (const std::logic_error&) {
      throw ConfigError("sweep", fmt::format("bad {} value '{}'", axis_name, value));
    }
    c.out_dir = config.out_dir / fmt::format("{}-{}", axis_name, value);
    c.validate();
    settings.push_back(std::move(c));
  }

  CompareResult out;
  std::vector<Curve> curves;
  Curve final_curve{"final", {}, {}, {}, {}};
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto run = run_experiment(settings[i], options);
    const auto per_seed = final_performance_per_seed(run.rows);
    SweepRow row;
    row.label = values[i];
    row.final_mean_db = mean_of(per_seed);
    row.final_std_db = std_of(per_seed);
    row.seeds_total = static_cast<int>(run.seeds.size());
    for (const auto& s : run.seeds) {
      row.seeds_diverged += s.status == SeedStatus::diverged;
      row.seeds_failed += s.status == SeedStatus::failed;
    }
    row.metrics_path = run.metrics_path;
    out.rows.push_back(row);

    curves.push_back(episode_curve(fmt::format("{}={}", axis_name, values[i]), run.rows));
    if (axis == SweepAxis::irs_size && !per_seed.empty()) {
      final_curve.x.push_back(settings[i].env.irs_elements);
      final_curve.mean.push_back(row.final_mean_db);
      final_curve.lo.push_back(*std::min_element(per_seed.begin(), per_seed.end()));
      final_curve.hi.push_back(*std::max_element(per_seed.begin(), per_seed.end()));
    }
  }

  std::filesystem::create_directories(config.out_dir);
  std::string csv = "setting,final_mean_snr_db,final_std_db,seeds,diverged,failed\n";
  std::string table = fmt::format("{:<14} {:>12} {:>10} {:>6} {:>9} {:>7}\n", axis_name,
                                  "final (dB)", "std (dB)", "seeds", "diverged", "failed");
  for (const auto& r : out.rows) {
    csv += fmt::format("{},{:.10g},{:.10g},{},{},{}\n", r.label, r.final_mean_db, r.final_std_db,
                       r.seeds_total, r.seeds_diverged, r.seeds_failed);
    table += fmt::format("{:<14} {:>12.3f} {:>10.3f} {:>6} {:>9} {:>7}\n", r.label,
                         r.final_mean_db, r.final_std_db, r.seeds_total, r.seeds_diverged,
                         r.seeds_failed);
  }
  out.summary_csv = config.out_dir / fmt::format("summary-{}.csv", axis_name);
  write_text(out.summary_csv, csv);
  write_text(config.out_dir / fmt::format("summary-{}.txt", axis_name), table);
  out.table = table;

  out.plot_svg = config.out_dir / fmt::format("{}.svg", axis_name);
  write_text(out.plot_svg, render_svg(curves, {fmt::format("training curves by {}", axis_name)}));
  if (axis == SweepAxis::irs_size && !final_curve.x.empty()) {
    write_text(config.out_dir / "irs-size-final.svg",
               render_svg({final_curve}, {"final performance by IRS size", "IRS elements M",
                                          "mean SNR, last 10 episodes (dB)"}));
  }
  return out;
}

}  // namespace irsrl::harness
