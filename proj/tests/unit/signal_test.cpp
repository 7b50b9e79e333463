#include "irsrl/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "irsrl/error.hpp"
#include "irsrl/rng.hpp"

namespace irsrl::signal {
namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
const cd kJ{0.0, 1.0};

Eigen::VectorXcd random_vector(int n, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {z(rng), z(rng)};
  return v;
}

Eigen::MatrixXcd random_matrix(int m, int n, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXcd g(m, n);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) g(i, k) = {z(rng), z(rng)};
  }
  return g;
}

Eigen::VectorXd random_theta(int m, Rng& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Eigen::VectorXd t(m);
  for (int i = 0; i < m; ++i) t[i] = u(rng);
  return t;
}

TEST(WrapToPiTest, Boundaries) {
  EXPECT_EQ(wrap_to_pi(kPi), kPi);
  EXPECT_EQ(wrap_to_pi(-kPi), -kPi);
  EXPECT_EQ(wrap_to_pi(0.0), 0.0);
  EXPECT_NEAR(wrap_to_pi(3.0 * kPi), kPi, 1e-12);
  EXPECT_NEAR(wrap_to_pi(2.0 * kPi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(wrap_to_pi(-2.0 * kPi - 0.25), -0.25, 1e-12);
}

TEST(CompositeChannelTest, HandExample) {
  Eigen::VectorXcd h(2);
  h << 1.0, kJ;
  Eigen::MatrixXcd g(2, 1);
  g << 1.0, 1.0;
  const auto c = composite_channel(h, Eigen::VectorXd::Zero(2), g);
  ASSERT_EQ(c.size(), 1);
  EXPECT_NEAR(std::abs(c[0] - cd(1.0, -1.0)), 0.0, 1e-15);
}

TEST(CompositeChannelTest, MatchesDenseProduct) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_vector(3, rng);
    const auto g = random_matrix(3, 2, rng);
    const auto theta = random_theta(3, rng);
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(3, 3);
    for (int i = 0; i < 3; ++i) phi(i, i) = std::polar(1.0, theta[i]);
    const Eigen::RowVectorXcd dense = h.adjoint() * phi * g;
    EXPECT_LT((composite_channel(h, theta, g) - dense).norm(), 1e-12);
  }
}

TEST(CompositeChannelTest, SingleElementMagnitudeIgnoresPhase) {
  Rng rng(2);
  const auto h = random_vector(1, rng);
  const auto g = random_matrix(1, 3, rng);
  const double ref = composite_channel(h, Eigen::VectorXd::Zero(1), g).norm();
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(composite_channel(h, random_theta(1, rng), g).norm(), ref, 1e-12);
  }
}

TEST(CompositeChannelTest, DimensionMismatch) {
  EXPECT_THROW(composite_channel(Eigen::VectorXcd::Ones(2), Eigen::VectorXd::Zero(3),
                                 Eigen::MatrixXcd::Ones(2, 1)),
               DimensionError);
  EXPECT_THROW(composite_channel(Eigen::VectorXcd::Ones(2), Eigen::VectorXd::Zero(2),
                                 Eigen::MatrixXcd::Ones(3, 1)),
               DimensionError);
}

TEST(BeamformerTest, HandExample) {
  Eigen::RowVectorXcd c(2);
  c << 1.0, 0.0;
  const auto b = optimal_beamformer(c, 4.0);
  EXPECT_NEAR(std::abs(b[0] - cd(2.0, 0.0)), 0.0, 1e-15);
  EXPECT_EQ(b[1], cd(0.0, 0.0));
}

TEST(BeamformerTest, PowerAndOptimality) {
  Rng rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::RowVectorXcd c = random_vector(4, rng).transpose();
    const double power = 3.7;
    const auto b = optimal_beamformer(c, power);
    EXPECT_NEAR(b.squaredNorm(), power, 1e-12);
    const double best = std::norm((c * b)(0));
    EXPECT_NEAR(best, power * c.squaredNorm(), 1e-9 * best);
    for (int s = 0; s < 500; ++s) {
      Eigen::VectorXcd other = random_vector(4, rng);
      other *= std::sqrt(power) / other.norm();
      EXPECT_LE(std::norm((c * other)(0)), best * (1.0 + 1e-12));
    }
  }
}

TEST(BeamformerTest, ZeroChannelRejected) {
  EXPECT_THROW(optimal_beamformer(Eigen::RowVectorXcd::Zero(3), 1.0), DomainError);
}

TEST(SnrTest, HandExamples) {
  Eigen::MatrixXcd g1(1, 1);
  g1 << 1.0;
  Eigen::VectorXcd h1(1);
  h1 << 1.0;
  Rng rng(4);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(snr(h1, random_theta(1, rng), g1, 1.0, 1.0), 1.0, 1e-12);

  Eigen::VectorXcd h(2);
  h << 1.0, 1.0;
  Eigen::MatrixXcd g(2, 1);
  g << 1.0, 1.0;
  EXPECT_NEAR(snr(h, Eigen::Vector2d(0.0, 0.0), g, 1.0, 1.0), 4.0, 1e-12);
  EXPECT_NEAR(snr(h, Eigen::Vector2d(0.0, kPi), g, 1.0, 1.0), 0.0, 1e-12);
}

TEST(SnrTest, AgreesWithExplicitBeamformer) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_vector(4, rng);
    const auto g = random_matrix(4, 3, rng);
    const auto theta = random_theta(4, rng);
    const auto c = composite_channel(h, theta, g);
    const auto b = optimal_beamformer(c, 2.0);
    const double expected = std::norm((c * b)(0)) / 0.5;
    EXPECT_NEAR(snr(h, theta, g, 2.0, 0.5), expected, 1e-9 * expected);
  }
}

TEST(SnrDbTest, Values) {
  EXPECT_DOUBLE_EQ(snr_db(1.0), 0.0);
  EXPECT_NEAR(snr_db(100.0), 20.0, 1e-12);
  EXPECT_NEAR(snr_db(4.0), 6.0206, 1e-4);
  EXPECT_THROW(snr_db(0.0), DomainError);
  EXPECT_THROW(snr_db(-1.0), DomainError);
}

TEST(SingleAntennaOracleTest, HandExample) {
  Eigen::VectorXcd h(2);
  h << 1.0, kJ;
  Eigen::VectorXcd g(2);
  g << 1.0, 1.0;
  const auto d = phase_oracle_single_antenna(h, g, 1.0, 1.0);
  EXPECT_NEAR(d.theta[0], 0.0, 1e-12);
  EXPECT_NEAR(d.theta[1], kPi / 2.0, 1e-12);
  EXPECT_NEAR(d.snr, 4.0, 1e-12);
}

TEST(SingleAntennaOracleTest, RealPositiveChannelsGiveZeroPhases) {
  Eigen::VectorXcd h(3), g(3);
  h << 0.5, 2.0, 1.0;
  g << 1.5, 0.1, 3.0;
  const auto d = phase_oracle_single_antenna(h, g, 1.0, 1.0);
  EXPECT_TRUE(d.theta.isZero(1e-15));
}

TEST(SingleAntennaOracleTest, BeatsFineGridAndMeetsBound) {
  Rng rng(6);
  const int levels = 64;
  // With 64 levels each element is within pi/64 of its optimum, so the grid
  // keeps at least cos^2(pi/64) of the optimal SNR.
  const double grid_floor = std::pow(std::cos(kPi / levels), 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_vector(3, rng);
    const Eigen::MatrixXcd g = random_matrix(3, 1, rng);
    const auto opt = phase_oracle_single_antenna(h, g.col(0), 2.0, 0.5);
    const auto grid = exhaustive_phase_search(h, g, levels, 2.0, 0.5);
    EXPECT_LE(grid.snr, opt.snr * (1.0 + 1e-12));
    EXPECT_GE(grid.snr, opt.snr * grid_floor);
    EXPECT_NEAR(opt.snr, snr_upper_bound(h, g, 2.0, 0.5), 1e-9 * opt.snr);
    EXPECT_NEAR(snr(h, opt.theta, g, 2.0, 0.5), opt.snr, 1e-9 * opt.snr);
    EXPECT_LE(opt.theta.cwiseAbs().maxCoeff(), kPi);
  }
}

TEST(UpperBoundTest, LooseForMultiAntenna) {
  Eigen::VectorXcd h(2);
  h << 1.0, 1.0;
  const Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_NEAR(snr_upper_bound(h, g, 1.0, 1.0), 4.0, 1e-12);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(snr(h, random_theta(2, rng), g, 1.0, 1.0), 2.0, 1e-12);
}

TEST(UpperBoundTest, DominatesRandomDesigns) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto h = random_vector(5, rng);
    const auto g = random_matrix(5, 3, rng);
    EXPECT_LE(snr(h, random_theta(5, rng), g, 1.0, 1.0),
              snr_upper_bound(h, g, 1.0, 1.0) * (1.0 + 1e-12));
  }
}

TEST(ExhaustiveSearchTest, SingleElementTieGoesToFirstLevel) {
  Rng rng(9);
  const auto h = random_vector(1, rng);
  const auto g = random_matrix(1, 2, rng);
  const auto d = exhaustive_phase_search(h, g, 8, 1.0, 1.0);
  EXPECT_EQ(d.theta[0], -kPi);
}

TEST(ExhaustiveSearchTest, AlignedRealChannelsGiveEqualPhases) {
  Eigen::VectorXcd h(2);
  h << 1.0, 1.0;
  Eigen::MatrixXcd g(2, 1);
  g << 1.0, 1.0;
  const auto d = exhaustive_phase_search(h, g, 4, 1.0, 1.0);
  // Every design with equal phases is optimal; the first in grid order wins.
  EXPECT_EQ(d.theta[0], d.theta[1]);
  EXPECT_EQ(d.theta[0], -kPi);
  EXPECT_NEAR(d.snr, 4.0, 1e-12);
}

TEST(ExhaustiveSearchTest, GridGuards) {
  const Eigen::VectorXcd h = Eigen::VectorXcd::Ones(5);
  const Eigen::MatrixXcd g = Eigen::MatrixXcd::Ones(5, 1);
  EXPECT_THROW(exhaustive_phase_search(h, g, 100, 1.0, 1.0), DomainError);
  EXPECT_THROW(exhaustive_phase_search(h, g, 1, 1.0, 1.0), DomainError);
}

TEST(ExhaustiveSearchTest, DominatesRandomGridPoints) {
  Rng rng(10);
  const auto h = random_vector(3, rng);
  const auto g = random_matrix(3, 2, rng);
  const auto best = exhaustive_phase_search(h, g, 16, 1.0, 1.0);
  std::uniform_int_distribution<int> level(0, 15);
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd theta(3);
    for (int k = 0; k < 3; ++k) theta[k] = -kPi + 2.0 * kPi * level(rng) / 16.0;
    EXPECT_LE(snr(h, theta, g, 1.0, 1.0), best.snr * (1.0 + 1e-12));
  }
}

TEST(SnrPropertyTest, GlobalPhaseInvariance) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const auto h = random_vector(4, rng);
    const auto g = random_matrix(4, 3, rng);
    const auto theta = random_theta(4, rng);
    const double shift = u(rng);
    Eigen::VectorXd shifted = theta;
    for (auto& v : shifted) v = wrap_to_pi(v + shift);
    const double a = snr(h, theta, g, 1.0, 1.0);
    EXPECT_NEAR(snr(h, shifted, g, 1.0, 1.0), a, 1e-9 * a);
  }
}

TEST(SnrPropertyTest, ElementPermutationInvariance) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto h = random_vector(4, rng);
    const auto g = random_matrix(4, 2, rng);
    const auto theta = random_theta(4, rng);
    Eigen::VectorXi perm(4);
    perm << 2, 0, 3, 1;
    Eigen::VectorXcd hp(4);
    Eigen::MatrixXcd gp(4, 2);
    Eigen::VectorXd tp(4);
    for (int k = 0; k < 4; ++k) {
      hp[k] = h[perm[k]];
      gp.row(k) = g.row(perm[k]);
      tp[k] = theta[perm[k]];
    }
    const double a = snr(h, theta, g, 1.0, 1.0);
    EXPECT_NEAR(snr(hp, tp, gp, 1.0, 1.0), a, 1e-9 * a);
  }
}

TEST(SnrPropertyTest, BoundChain) {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto h = random_vector(3, rng);
    const auto g = random_matrix(3, 2, rng);
    const double random = snr(h, random_theta(3, rng), g, 1.0, 1.0);
    const double grid = exhaustive_phase_search(h, g, 8, 1.0, 1.0).snr;
    const double bound = snr_upper_bound(h, g, 1.0, 1.0);
    EXPECT_LE(grid, bound * (1.0 + 1e-12));
    EXPECT_LE(random, bound * (1.0 + 1e-12));
  }
}

}  // namespace
}  // namespace irsrl::signal
