#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "irsrl/rng.hpp"

// Spatiotemporally correlated channel generator.
//
// The log-magnitude of every channel coefficient is the sum of a pathloss
// term, a shadowing term shared by all elements of a link, and i.i.d.
// multipath. Shadowing follows a separable exponential covariance in space
// and time, realized as a spatially correlated AR(1) process. Phases follow a
// wrapped Gaussian random walk per element.
namespace irsrl::channel {

using Vec3 = Eigen::Vector3d;

/// Distances below this are clamped before evaluating the pathloss.
inline constexpr double kMinDistance = 0.5;

struct ChannelParams {
  double pathloss_exponent = 2.3;   // l
  double multipath_std_db = 0.6;    // sigma_xi, dB
  double shadow_power_db2 = 6.0;    // eta^2, dB^2
  double corr_distance = 1.2;       // c1, meters
  double corr_time = 5.0;           // c2, slots; +inf freezes shadowing
  double phase_drift = 0.2;         // kappa, rad/slot
  double noise_var = 0.5;           // sigma^2, linear
  double tx_power_dbm = 65.0;       // P_max, dBm

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// P_max in linear milliwatts.
  double tx_power_linear() const;

  /// AR(1) coefficient exp(-1/c2).
  double ar_coeff() const;
};

struct Geometry {
  Vec3 source_pos{10.0, 0.5, 3.0};
  Vec3 irs_pos{10.0, 10.0, 3.0};
  std::vector<Vec3> dest_cells{{14.5, 14.5, 1.5}, {15.5, 14.5, 1.5},
                               {14.5, 15.5, 1.5}, {15.5, 15.5, 1.5}};
  double cube_side = 20.0;
  double cell_side = 1.0;

  void validate() const;

  /// Edge-adjacent cells (center distance equal to cell_side) for each cell.
  std::vector<std::vector<std::size_t>> neighbors() const;
};

struct ShadowingState {
  Eigen::VectorXd dest_values;  // dB, one per destination cell
  double src_irs_value = 0.0;   // dB
  Eigen::MatrixXd spatial_chol; // lower-triangular
  double ar_coeff = 0.0;
};

struct PhaseState {
  Eigen::MatrixXd h_phases;  // cells x M
  Eigen::MatrixXd g_phases;  // M x N
};

struct ChannelSnapshot {
  Eigen::VectorXcd h;  // IRS -> destination, length M
  Eigen::MatrixXcd G;  // source -> IRS, M x N
  long t = 0;
};

double pathloss_db(double distance, double exponent);

Eigen::MatrixXd spatial_covariance(const std::vector<Vec3>& cells, const ChannelParams& params);

ShadowingState init_shadowing(const Geometry& geometry, const ChannelParams& params, Rng& rng);

ShadowingState step_shadowing(const ShadowingState& state, const ChannelParams& params, Rng& rng);

/// Uniform phases in [0, 2pi) for every (cell, element) and (element, antenna).
PhaseState init_phases(std::size_t num_cells, int irs_elements, int source_antennas, Rng& rng);

PhaseState step_phases(const PhaseState& state, const ChannelParams& params, Rng& rng);

/// Maps any angle into [0, 2pi).
double wrap_two_pi(double phase);

ChannelSnapshot sample_channels(long t, std::size_t dest_cell, const ShadowingState& shadowing,
                                const PhaseState& phases, const Geometry& geometry,
                                const ChannelParams& params, Rng& rng);

}  // namespace irsrl::channel
