#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "irsrl/experiment.hpp"

namespace irsrl::harness {

/// Mean across seeds with a min-max band, one point per x value.
struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Aggregates metrics rows by episode, ignoring non-finite rewards.
Curve episode_curve(const std::string& label, const std::vector<MetricsRow>& rows);

struct PlotLabels {
  std::string title;
  std::string x_label = "episode";
  std::string y_label = "mean SNR (dB)";
};

/// Standalone SVG document.
std::string render_svg(const std::vector<Curve>& curves, const PlotLabels& labels);

/// A labelled metrics file. Inputs given as "label=path" keep their label;
/// otherwise the parent directory name (or the file stem) is used.
std::pair<std::string, std::filesystem::path> parse_plot_input(const std::string& arg);

/// Reads each CSV, aggregates it and writes one SVG. Throws IoError on empty
/// or malformed input.
void plot_curves(const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                 const std::filesystem::path& out, const PlotLabels& labels = {});

}  // namespace irsrl::harness
