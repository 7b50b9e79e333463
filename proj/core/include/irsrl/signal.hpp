#pragma once

#include <Eigen/Dense>

// SNR of the IRS-assisted MISO link and reference phase designs.
//
// All arithmetic is complex double. `theta` holds IRS phase shifts in
// [-pi, pi]; the reflection matrix is diag(exp(j*theta)).
namespace irsrl::signal {

struct PhaseDesign {
  Eigen::VectorXd theta;
  double snr = 0.0;  // linear
};

/// Maps an angle into [-pi, pi]; pi itself stays pi.
double wrap_to_pi(double angle);

/// c = h^H diag(exp(j theta)) G, a row vector of length N.
Eigen::RowVectorXcd composite_channel(const Eigen::VectorXcd& h, const Eigen::VectorXd& theta,
                                      const Eigen::MatrixXcd& G);

/// Maximum-ratio transmit weights b = sqrt(P) c^H / ||c||.
Eigen::VectorXcd optimal_beamformer(const Eigen::RowVectorXcd& c, double tx_power);

/// P ||c||^2 / sigma^2, the SNR reached with the optimal beamformer.
double snr(const Eigen::VectorXcd& h, const Eigen::VectorXd& theta, const Eigen::MatrixXcd& G,
           double tx_power, double noise_var);

double snr_db(double linear);

/// Closed-form optimum for a single source antenna: every reflected path is
/// rotated onto the real axis.
PhaseDesign phase_oracle_single_antenna(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                                        double tx_power, double noise_var);

/// P (sum_m |h_m| ||G_m,:||)^2 / sigma^2. Never below snr() for any theta;
/// tight when N = 1.
double snr_upper_bound(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& G, double tx_power,
                       double noise_var);

/// Largest levels^M accepted by exhaustive_phase_search.
inline constexpr double kExhaustiveGridLimit = 1e8;

/// Brute force over the grid {-pi + 2 pi k / levels}^M. Ties (relative 1e-12)
/// go to the lexicographically smallest grid index.
PhaseDesign exhaustive_phase_search(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& G,
                                    int levels, double tx_power, double noise_var);

}  // namespace irsrl::signal
