#include "irsrl/channel.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "irsrl/error.hpp"

namespace irsrl::channel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

double magnitude_from_db(double level_db) { return std::pow(10.0, level_db / 20.0); }

}  // namespace

void ChannelParams::validate() const {
  auto require = [](bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
  };
  require(std::isfinite(pathloss_exponent) && pathloss_exponent > 0, "pathloss_exponent",
          "must be > 0");
  require(std::isfinite(multipath_std_db) && multipath_std_db >= 0, "multipath_std_db",
          "must be >= 0");
  require(std::isfinite(shadow_power_db2) && shadow_power_db2 >= 0, "shadow_power_db2",
          "must be >= 0");
  require(std::isfinite(corr_distance) && corr_distance > 0, "corr_distance", "must be > 0");
  require(!std::isnan(corr_time) && corr_time > 0, "corr_time", "must be > 0");
  require(std::isfinite(phase_drift) && phase_drift >= 0, "phase_drift", "must be >= 0");
  require(std::isfinite(noise_var) && noise_var > 0, "noise_var", "must be > 0");
  require(std::isfinite(tx_power_dbm), "tx_power_dbm", "must be finite");
}

double ChannelParams::tx_power_linear() const { return std::pow(10.0, tx_power_dbm / 10.0); }

double ChannelParams::ar_coeff() const { return std::exp(-1.0 / corr_time); }

void Geometry::validate() const {
  if (!(cube_side > 0)) throw ConfigError("cube_side", "must be > 0");
  if (!(cell_side > 0)) throw ConfigError("cell_side", "must be > 0");
  if (dest_cells.empty()) throw ConfigError("dest_cells", "must be nonempty");
  auto inside = [this](const Vec3& p) {
    return p.allFinite() && (p.array() >= 0.0).all() && (p.array() <= cube_side).all();
  };
  if (!inside(source_pos)) throw ConfigError("source_pos", "outside the cube");
  if (!inside(irs_pos)) throw ConfigError("irs_pos", "outside the cube");
  for (const auto& c : dest_cells) {
    if (!inside(c)) throw ConfigError("dest_cells", "cell center outside the cube");
  }
}

std::vector<std::vector<std::size_t>> Geometry::neighbors() const {
  const double tol = 1e-6 * cell_side;
  std::vector<std::vector<std::size_t>> out(dest_cells.size());
  for (std::size_t i = 0; i < dest_cells.size(); ++i) {
    for (std::size_t j = 0; j < dest_cells.size(); ++j) {
      if (i == j) continue;
      const Vec3 d = (dest_cells[i] - dest_cells[j]).cwiseAbs();
      // Edge adjacency: exactly one axis differs by one cell.
      const int moved_axes = (d.array() > tol).count();
      if (moved_axes == 1 && std::abs(d.maxCoeff() - cell_side) <= tol) out[i].push_back(j);
    }
  }
  return out;
}

double pathloss_db(double distance, double exponent) {
  if (!std::isfinite(distance) || distance <= 0.0) {
    throw DomainError(fmt::format("pathloss_db: distance must be finite and > 0, got {}", distance));
  }
  return -10.0 * exponent * std::log10(std::max(distance, kMinDistance));
}

Eigen::MatrixXd spatial_covariance(const std::vector<Vec3>& cells, const ChannelParams& params) {
  if (cells.empty()) throw DomainError("spatial_covariance: no cells");
  const auto n = static_cast<Eigen::Index>(cells.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double dist = (cells[i] - cells[j]).norm();
      k(i, j) = k(j, i) = params.shadow_power_db2 * std::exp(-dist / params.corr_distance);
    }
  }
  return k;
}

ShadowingState init_shadowing(const Geometry& geometry, const ChannelParams& params, Rng& rng) {
  ShadowingState state;
  const auto n = static_cast<Eigen::Index>(geometry.dest_cells.size());
  Eigen::MatrixXd k = spatial_covariance(geometry.dest_cells, params);
  k.diagonal().array() += 1e-10 * params.shadow_power_db2;

  if (params.shadow_power_db2 == 0.0) {
    state.spatial_chol = Eigen::MatrixXd::Zero(n, n);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
      throw DomainError("init_shadowing: spatial covariance is not positive definite");
    }
    state.spatial_chol = llt.matrixL();
  }
  state.ar_coeff = params.ar_coeff();
  state.dest_values = state.spatial_chol * standard_normal(n, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  state.src_irs_value = std::sqrt(params.shadow_power_db2) * normal(rng);
  return state;
}

ShadowingState step_shadowing(const ShadowingState& state, const ChannelParams& params, Rng& rng) {
  ShadowingState next = state;
  const double rho = state.ar_coeff;
  const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const Eigen::VectorXd eps = standard_normal(state.dest_values.size(), rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double eps_src = normal(rng);
  next.dest_values = rho * state.dest_values + innov * (state.spatial_chol * eps);
  next.src_irs_value =
      rho * state.src_irs_value + innov * std::sqrt(params.shadow_power_db2) * eps_src;
  return next;
}

double wrap_two_pi(double phase) {
  double w = std::fmod(phase, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

PhaseState init_phases(std::size_t num_cells, int irs_elements, int source_antennas, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  PhaseState state;
  state.h_phases.resize(static_cast<Eigen::Index>(num_cells), irs_elements);
  state.g_phases.resize(irs_elements, source_antennas);
  for (Eigen::Index i = 0; i < state.h_phases.size(); ++i) {
    state.h_phases.data()[i] = wrap_two_pi(uniform(rng));
  }
  for (Eigen::Index i = 0; i < state.g_phases.size(); ++i) {
    state.g_phases.data()[i] = wrap_two_pi(uniform(rng));
  }
  return state;
}

PhaseState step_phases(const PhaseState& state, const ChannelParams& params, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PhaseState next = state;
  auto drift = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = wrap_two_pi(m.data()[i] + params.phase_drift * normal(rng));
    }
  };
  drift(next.h_phases);
  drift(next.g_phases);
  return next;
}

ChannelSnapshot sample_channels(long t, std::size_t dest_cell, const ShadowingState& shadowing,
                                const PhaseState& phases, const Geometry& geometry,
                                const ChannelParams& params, Rng& rng) {
  if (dest_cell >= geometry.dest_cells.size()) {
    throw DomainError(fmt::format("sample_channels: cell index {} out of range ({} cells)",
                                  dest_cell, geometry.dest_cells.size()));
  }
  const auto m = phases.g_phases.rows();
  const auto n = phases.g_phases.cols();
  const auto cell = static_cast<Eigen::Index>(dest_cell);
  std::normal_distribution<double> normal(0.0, 1.0);

  ChannelSnapshot snap;
  snap.t = t;
  snap.h.resize(m);
  snap.G.resize(m, n);

  const double h_mean = pathloss_db((geometry.irs_pos - geometry.dest_cells[dest_cell]).norm(),
                                    params.pathloss_exponent) +
                        shadowing.dest_values[cell];
  for (Eigen::Index i = 0; i < m; ++i) {
    const double level = h_mean + params.multipath_std_db * normal(rng);
    snap.h[i] = std::polar(magnitude_from_db(level), phases.h_phases(cell, i));
  }

  const double g_mean =
      pathloss_db((geometry.source_pos - geometry.irs_pos).norm(), params.pathloss_exponent) +
      shadowing.src_irs_value;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double level = g_mean + params.multipath_std_db * normal(rng);
      snap.G(i, j) = std::polar(magnitude_from_db(level), phases.g_phases(i, j));
    }
  }
  return snap;
}

}  // namespace irsrl::channel
