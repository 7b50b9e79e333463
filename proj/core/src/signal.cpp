#include "irsrl/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::signal {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& G) {
  if (h.size() == 0 || G.rows() != h.size() || G.cols() == 0) {
    throw DimensionError(fmt::format("h has {} entries but G is {}x{}", h.size(), G.rows(),
                                     G.cols()));
  }
}

void check_power(double tx_power, double noise_var) {
  if (!(tx_power >= 0.0) || !std::isfinite(tx_power)) throw DomainError("tx_power must be >= 0");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw DomainError("noise_var must be > 0");
}

}  // namespace

double wrap_to_pi(double angle) {
  if (angle >= -kPi && angle <= kPi) return angle;
  double w = std::fmod(angle + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  // Closed at +pi: values congruent to pi map to pi, not -pi.
  if (w == 0.0) return kPi;
  return w - kPi;
}

Eigen::RowVectorXcd composite_channel(const Eigen::VectorXcd& h, const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXcd& G) {
  check_dims(h, G);
  if (theta.size() != h.size()) {
    throw DimensionError(fmt::format("theta has {} entries, expected {}", theta.size(), h.size()));
  }
  Eigen::VectorXcd weights(h.size());
  for (Eigen::Index m = 0; m < h.size(); ++m) {
    weights[m] = std::conj(h[m]) * std::polar(1.0, theta[m]);
  }
  return weights.transpose() * G;
}

Eigen::VectorXcd optimal_beamformer(const Eigen::RowVectorXcd& c, double tx_power) {
  const double norm = c.norm();
  if (!(norm > 0.0)) throw DomainError("optimal_beamformer: composite channel is zero");
  return std::sqrt(tx_power) * c.adjoint() / norm;
}

double snr(const Eigen::VectorXcd& h, const Eigen::VectorXd& theta, const Eigen::MatrixXcd& G,
           double tx_power, double noise_var) {
  check_power(tx_power, noise_var);
  return tx_power * composite_channel(h, theta, G).squaredNorm() / noise_var;
}

double snr_db(double linear) {
  if (!(linear > 0.0)) throw DomainError(fmt::format("snr_db: nonpositive SNR {}", linear));
  return 10.0 * std::log10(linear);
}

PhaseDesign phase_oracle_single_antenna(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                                        double tx_power, double noise_var) {
  if (h.size() != g.size() || h.size() == 0) {
    throw DimensionError(fmt::format("h has {} entries, g has {}", h.size(), g.size()));
  }
  check_power(tx_power, noise_var);
  PhaseDesign out;
  out.theta.resize(h.size());
  double gain = 0.0;
  for (Eigen::Index m = 0; m < h.size(); ++m) {
    out.theta[m] = wrap_to_pi(-std::arg(std::conj(h[m]) * g[m]));
    gain += std::abs(h[m]) * std::abs(g[m]);
  }
  out.snr = tx_power * gain * gain / noise_var;
  return out;
}

double snr_upper_bound(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& G, double tx_power,
                       double noise_var) {
  check_dims(h, G);
  check_power(tx_power, noise_var);
  double gain = 0.0;
  for (Eigen::Index m = 0; m < h.size(); ++m) gain += std::abs(h[m]) * G.row(m).norm();
  return tx_power * gain * gain / noise_var;
}

PhaseDesign exhaustive_phase_search(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& G,
                                    int levels, double tx_power, double noise_var) {
  check_dims(h, G);
  check_power(tx_power, noise_var);
  if (levels < 2) throw DomainError("exhaustive_phase_search: levels must be >= 2");
  const auto m = h.size();
  if (std::pow(static_cast<double>(levels), static_cast<double>(m)) > kExhaustiveGridLimit) {
    throw DomainError(fmt::format("exhaustive_phase_search: {}^{} grid points exceed the limit",
                                  levels, m));
  }

  std::vector<double> grid(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) grid[static_cast<std::size_t>(k)] = -kPi + 2.0 * kPi * k / levels;

  std::vector<int> index(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(m, grid[0]);
  PhaseDesign best{theta, -1.0};
  for (;;) {
    const double value = snr(h, theta, G, tx_power, noise_var);
    // Odometer order is lexicographic, so the first point within tolerance wins ties.
    if (value > best.snr * (1.0 + 1e-12) || best.snr < 0.0) best = {theta, value};

    Eigen::Index pos = m - 1;
    while (pos >= 0) {
      auto& digit = index[static_cast<std::size_t>(pos)];
      if (++digit < levels) {
        theta[pos] = grid[static_cast<std::size_t>(digit)];
        break;
      }
      digit = 0;
      theta[pos] = grid[0];
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

}  // namespace irsrl::signal
