#include "irsrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::harness {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

Curve episode_curve(const std::string& label, const std::vector<MetricsRow>& rows) {
  std::map<int, std::vector<double>> by_episode;
  for (const auto& r : rows) {
    if (std::isfinite(r.mean_snr_db)) by_episode[r.episode].push_back(r.mean_snr_db);
  }
  Curve c{label, {}, {}, {}, {}};
  for (const auto& [ep, values] : by_episode) {
    double sum = 0.0;
    for (double v : values) sum += v;
    c.x.push_back(ep);
    c.mean.push_back(sum / static_cast<double>(values.size()));
    c.lo.push_back(*std::min_element(values.begin(), values.end()));
    c.hi.push_back(*std::max_element(values.begin(), values.end()));
  }
  return c;
}

std::string render_svg(const std::vector<Curve>& curves, const PlotLabels& labels) {
  Range xr, yr;
  for (const auto& c : curves) {
    for (double x : c.x) xr.add(x);
    for (std::size_t i = 0; i < c.mean.size(); ++i) {
      yr.add(c.lo[i]);
      yr.add(c.hi[i]);
      yr.add(c.mean[i]);
    }
  }
  xr.finish();
  yr.finish();
  const double pad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad;
  yr.hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + plot_w / 2, escape(labels.title));

  // Axes and ticks.
  svg += fmt::format(
      "<g stroke=\"black\" stroke-width=\"1\">\n"
      "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\"/>\n"
      "<line x1=\"{0:.1f}\" y1=\"{3:.1f}\" x2=\"{0:.1f}\" y2=\"{1:.1f}\"/>\n</g>\n",
      kLeft, kTop + plot_h, kLeft + plot_w, kTop);
  for (int i = 0; i <= 5; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>"
        "<text x=\"{0:.1f}\" y=\"{3:.1f}\" text-anchor=\"middle\">{4:.4g}</text>\n",
        px(xv), kTop + plot_h, kTop + plot_h + 5, kTop + plot_h + 18, xv);
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>"
        "<text x=\"{3:.1f}\" y=\"{4:.1f}\" text-anchor=\"end\">{5:.4g}</text>\n",
        kLeft - 5, py(yv), kLeft, kLeft - 8, py(yv) + 4, yv);
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2, kHeight - 12, escape(labels.x_label));
  svg += fmt::format(
      "<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
      kTop + plot_h / 2, escape(labels.y_label));

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (c.x.empty()) continue;

    std::string band;
    for (std::size_t i = 0; i < c.x.size(); ++i) band += fmt::format("{:.2f},{:.2f} ", px(c.x[i]), py(c.hi[i]));
    for (std::size_t i = c.x.size(); i-- > 0;) band += fmt::format("{:.2f},{:.2f} ", px(c.x[i]), py(c.lo[i]));
    band.pop_back();
    svg += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                       band, color);

    std::string line;
    for (std::size_t i = 0; i < c.x.size(); ++i) line += fmt::format("{:.2f},{:.2f} ", px(c.x[i]), py(c.mean[i]));
    line.pop_back();
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       line, color);

    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\"/>"
        "<text x=\"{4:.1f}\" y=\"{5:.1f}\">{6}</text>\n",
        kLeft + plot_w + 15, ly, kLeft + plot_w + 40, color, kLeft + plot_w + 45, ly + 4,
        escape(c.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::pair<std::string, std::filesystem::path> parse_plot_input(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  const std::filesystem::path p(arg);
  const auto parent = p.parent_path().filename().string();
  return {parent.empty() || parent == "." ? p.stem().string() : parent, p};
}

void plot_curves(const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                 const std::filesystem::path& out, const PlotLabels& labels) {
  if (inputs.empty()) throw IoError("plot: no metrics files given");
  std::vector<Curve> curves;
  for (const auto& [label, path] : inputs) {
    const auto rows = read_metrics_csv(path);
    if (rows.empty()) throw IoError(fmt::format("plot: '{}' has no data rows", path.string()));
    curves.push_back(episode_curve(label, rows));
  }
  PlotLabels l = labels;
  if (l.title.empty()) l.title = "training performance";
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write '{}'", out.string()));
  f << render_svg(curves, l);
}

}  // namespace irsrl::harness
