#include "irsrl/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "irsrl/error.hpp"

namespace irsrl::channel {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST(PathlossTest, ReferenceDistances) {
  EXPECT_DOUBLE_EQ(pathloss_db(1.0, 2.3), 0.0);
  EXPECT_NEAR(pathloss_db(10.0, 2.3), -23.0, 1e-12);
  // Clamped to 0.5 m: -23 * log10(0.5) = 6.92369...
  EXPECT_NEAR(pathloss_db(0.001, 2.3), 6.923689, 1e-6);
  EXPECT_DOUBLE_EQ(pathloss_db(0.001, 2.3), pathloss_db(kMinDistance, 2.3));
}

TEST(PathlossTest, RejectsInvalidDistance) {
  EXPECT_THROW(pathloss_db(0.0, 2.3), DomainError);
  EXPECT_THROW(pathloss_db(-1.0, 2.3), DomainError);
  EXPECT_THROW(pathloss_db(std::nan(""), 2.3), DomainError);
  EXPECT_THROW(pathloss_db(std::numeric_limits<double>::infinity(), 2.3), DomainError);
}

TEST(PathlossTest, StrictlyDecreasingAboveFloor) {
  double prev = pathloss_db(kMinDistance, 2.3);
  for (double d = 0.6; d < 40.0; d += 0.37) {
    const double cur = pathloss_db(d, 2.3);
    EXPECT_LT(cur, prev) << d;
    prev = cur;
  }
}

TEST(SpatialCovarianceTest, KernelValues) {
  ChannelParams p;
  const std::vector<Vec3> cells{{0, 0, 0}, {1.2, 0, 0}, {1e4, 0, 0}};
  const auto k = spatial_covariance(cells, p);
  EXPECT_DOUBLE_EQ(k(0, 0), 6.0);
  EXPECT_NEAR(k(0, 1), 6.0 * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(k(0, 1), 2.2073, 1e-4);
  EXPECT_LT(k(0, 2), 1e-100);
  EXPECT_THROW(spatial_covariance({}, p), DomainError);
}

TEST(SpatialCovarianceTest, SymmetricPsdForRandomCellSets) {
  ChannelParams p;
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> cells;
    for (int i = 0; i < 1 + trial % 12; ++i) cells.push_back({u(rng), u(rng), u(rng)});
    Eigen::MatrixXd k = spatial_covariance(cells, p);
    EXPECT_TRUE(k.isApprox(k.transpose(), 0.0));
    k.diagonal().array() += 1e-10 * p.shadow_power_db2;
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(k).info(), Eigen::Success);
  }
}

TEST(ShadowingTest, ZeroPowerGivesZeroShadowing) {
  ChannelParams p;
  p.shadow_power_db2 = 0.0;
  Geometry g;
  Rng rng(1);
  auto s = init_shadowing(g, p, rng);
  EXPECT_TRUE(s.dest_values.isZero(0.0));
  EXPECT_EQ(s.src_irs_value, 0.0);
  s = step_shadowing(s, p, rng);
  EXPECT_TRUE(s.dest_values.isZero(0.0));
  EXPECT_EQ(s.src_irs_value, 0.0);
}

TEST(ShadowingTest, ArCoefficient) {
  ChannelParams p;
  Geometry g;
  Rng rng(1);
  EXPECT_NEAR(init_shadowing(g, p, rng).ar_coeff, 0.8187307531, 1e-10);
}

TEST(ShadowingTest, InitMatchesSpatialCovariance) {
  ChannelParams p;
  Geometry g;
  Rng rng(2024);
  const int draws = 100000;
  const auto n = static_cast<Eigen::Index>(g.dest_cells.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < draws; ++i) {
    const auto s = init_shadowing(g, p, rng);
    mean += s.dest_values;
    second += s.dest_values * s.dest_values.transpose();
  }
  mean /= draws;
  const Eigen::MatrixXd cov = second / draws - mean * mean.transpose();
  const Eigen::MatrixXd k = spatial_covariance(g.dest_cells, p);
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT((cov - k).norm() / k.norm(), 0.05);
}

TEST(ShadowingTest, FrozenWhenCorrelationTimeInfinite) {
  ChannelParams p;
  p.corr_time = std::numeric_limits<double>::infinity();
  Geometry g;
  Rng rng(3);
  const auto s0 = init_shadowing(g, p, rng);
  EXPECT_EQ(s0.ar_coeff, 1.0);
  auto s = s0;
  for (int i = 0; i < 10; ++i) s = step_shadowing(s, p, rng);
  EXPECT_EQ(s.dest_values, s0.dest_values);
  EXPECT_EQ(s.src_irs_value, s0.src_irs_value);
}

TEST(ShadowingTest, MemorylessWhenCorrelationTimeTiny) {
  ChannelParams p;
  p.corr_time = 1e-9;
  Geometry g;
  Rng rng(4);
  auto s = init_shadowing(g, p, rng);
  s.dest_values.setConstant(100.0);
  s.src_irs_value = -100.0;
  Rng a(99), b(99);
  const auto stepped = step_shadowing(s, p, a);
  const auto fresh = init_shadowing(g, p, b);
  EXPECT_TRUE(stepped.dest_values.isApprox(fresh.dest_values, 1e-12));
  EXPECT_NEAR(stepped.src_irs_value, fresh.src_irs_value, 1e-12);
}

// Lag-d autocorrelation of an AR(1) chain with rho = exp(-1/c2) is exp(-d/c2).
TEST(ShadowingTest, TemporalAutocorrelation) {
  ChannelParams p;
  Geometry g;
  Rng rng(11);
  const int steps = 100000;
  std::vector<double> x(steps);
  auto s = init_shadowing(g, p, rng);
  for (int t = 0; t < steps; ++t) {
    s = step_shadowing(s, p, rng);
    x[t] = s.dest_values[0];
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= steps;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= steps;
  for (int lag : {1, 5, 10}) {
    double c = 0.0;
    for (int t = lag; t < steps; ++t) c += (x[t] - mean) * (x[t - lag] - mean);
    c /= (steps - lag);
    EXPECT_NEAR(c / var, std::exp(-lag / p.corr_time), 0.02) << "lag " << lag;
  }
}

TEST(ShadowingTest, StationaryMarginalVariance) {
  ChannelParams p;
  Geometry g;
  Rng rng(12);
  const int chains = 10000;
  std::vector<ShadowingState> states;
  for (int i = 0; i < chains; ++i) states.push_back(init_shadowing(g, p, rng));
  int done = 0;
  for (int step : {0, 1, 7, 30}) {
    for (auto& s : states) {
      for (int k = done; k < step; ++k) s = step_shadowing(s, p, rng);
    }
    done = step;
    double dest = 0.0, src = 0.0;
    for (const auto& s : states) {
      dest += s.dest_values[2] * s.dest_values[2];
      src += s.src_irs_value * s.src_irs_value;
    }
    EXPECT_NEAR(dest / chains, 6.0, 0.3) << "after steps " << step;
    EXPECT_NEAR(src / chains, 6.0, 0.3) << "after steps " << step;
  }
}

TEST(PhaseTest, WrapArithmetic) {
  EXPECT_NEAR(wrap_two_pi(kTwoPi - 0.01 + 0.02), 0.01, 1e-12);
  EXPECT_EQ(wrap_two_pi(0.0), 0.0);
  EXPECT_EQ(wrap_two_pi(kTwoPi), 0.0);
  EXPECT_NEAR(wrap_two_pi(-0.5), kTwoPi - 0.5, 1e-12);
  EXPECT_LT(wrap_two_pi(-1e-300), kTwoPi);
}

TEST(PhaseTest, ZeroDriftKeepsPhases) {
  ChannelParams p;
  p.phase_drift = 0.0;
  Rng rng(5);
  const auto s0 = init_phases(4, 6, 3, rng);
  auto s = s0;
  for (int i = 0; i < 5; ++i) s = step_phases(s, p, rng);
  EXPECT_EQ(s.h_phases, s0.h_phases);
  EXPECT_EQ(s.g_phases, s0.g_phases);
}

TEST(PhaseTest, PhasesStayWrapped) {
  ChannelParams p;
  p.phase_drift = 3.0;
  Rng rng(6);
  auto s = init_phases(4, 5, 2, rng);
  for (int i = 0; i < 500; ++i) {
    s = step_phases(s, p, rng);
    ASSERT_GE(s.h_phases.minCoeff(), 0.0);
    ASSERT_LT(s.h_phases.maxCoeff(), kTwoPi);
    ASSERT_GE(s.g_phases.minCoeff(), 0.0);
    ASSERT_LT(s.g_phases.maxCoeff(), kTwoPi);
  }
}

// Wrapped Gaussian random walk: E[cos(phi_t - phi_{t-d})] = exp(-kappa^2 d / 2).
TEST(PhaseTest, CircularAutocorrelation) {
  ChannelParams p;
  Rng rng(8);
  const int steps = 100000;
  std::vector<double> phi(steps);
  auto s = init_phases(1, 1, 1, rng);
  for (int t = 0; t < steps; ++t) {
    s = step_phases(s, p, rng);
    phi[t] = s.h_phases(0, 0);
  }
  for (int lag : {1, 5, 10, 25}) {
    double c = 0.0;
    for (int t = lag; t < steps; ++t) c += std::cos(phi[t] - phi[t - lag]);
    c /= (steps - lag);
    EXPECT_NEAR(c, std::exp(-p.phase_drift * p.phase_drift * lag / 2.0), 0.02) << "lag " << lag;
  }
}

Geometry unit_geometry(double distance) {
  Geometry g;
  g.irs_pos = {5.0, 5.0, 5.0};
  g.source_pos = {5.0, 5.0 - distance, 5.0};
  g.dest_cells = {{5.0 + distance, 5.0, 5.0}};
  return g;
}

TEST(SampleChannelsTest, DeterministicMagnitudes) {
  ChannelParams p;
  p.multipath_std_db = 0.0;
  p.shadow_power_db2 = 0.0;
  Rng rng(9);
  PhaseState phases{Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(3, 2)};

  auto g1 = unit_geometry(1.0);
  auto sh = init_shadowing(g1, p, rng);
  auto snap = sample_channels(0, 0, sh, phases, g1, p, rng);
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(snap.h[i].real(), 1.0, 1e-15);
    EXPECT_EQ(snap.h[i].imag(), 0.0);
  }
  EXPECT_TRUE(snap.G.isApprox(Eigen::MatrixXcd::Ones(3, 2), 1e-15));

  auto g10 = unit_geometry(10.0);
  snap = sample_channels(3, 0, sh, phases, g10, p, rng);
  EXPECT_EQ(snap.t, 3);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(snap.h[i]), 0.0707946, 1e-6);
}

TEST(SampleChannelsTest, PhasesComeFromPhaseState) {
  ChannelParams p;
  Rng rng(10);
  Geometry g;
  const auto sh = init_shadowing(g, p, rng);
  const auto phases = init_phases(g.dest_cells.size(), 4, 2, rng);
  const auto snap = sample_channels(0, 2, sh, phases, g, p, rng);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(wrap_two_pi(std::arg(snap.h[i])), phases.h_phases(2, i), 1e-9);
    for (Eigen::Index j = 0; j < 2; ++j) {
      EXPECT_NEAR(wrap_two_pi(std::arg(snap.G(i, j))), phases.g_phases(i, j), 1e-9);
    }
  }
}

TEST(SampleChannelsTest, MultipathSpread) {
  ChannelParams p;
  Rng rng(13);
  Geometry g;
  const auto sh = init_shadowing(g, p, rng);
  const auto phases = init_phases(g.dest_cells.size(), 1, 1, rng);
  const int draws = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double level = 20.0 * std::log10(std::abs(sample_channels(0, 0, sh, phases, g, p, rng).h[0]));
    sum += level;
    sq += level * level;
  }
  const double mean = sum / draws;
  const double stddev = std::sqrt(sq / draws - mean * mean);
  EXPECT_NEAR(stddev, 0.6, 0.6 * 0.02);
}

TEST(SampleChannelsTest, RejectsBadCell) {
  ChannelParams p;
  Rng rng(14);
  Geometry g;
  const auto sh = init_shadowing(g, p, rng);
  const auto phases = init_phases(g.dest_cells.size(), 2, 2, rng);
  EXPECT_THROW(sample_channels(0, g.dest_cells.size(), sh, phases, g, p, rng), DomainError);
}

TEST(SampleChannelsTest, SameSeedSameSequence) {
  ChannelParams p;
  Geometry g;
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    auto sh = init_shadowing(g, p, rng);
    auto ph = init_phases(g.dest_cells.size(), 5, 3, rng);
    std::vector<ChannelSnapshot> out;
    for (int t = 0; t < 20; ++t) {
      sh = step_shadowing(sh, p, rng);
      ph = step_phases(ph, p, rng);
      out.push_back(sample_channels(t, t % 4, sh, ph, g, p, rng));
    }
    return out;
  };
  const auto a = run(42), b = run(42);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].h, b[i].h);
    EXPECT_EQ(a[i].G, b[i].G);
  }
}

TEST(GeometryTest, EdgeNeighborsOfDefaultBlock) {
  Geometry g;
  const auto nb = g.neighbors();
  ASSERT_EQ(nb.size(), 4u);
  for (const auto& n : nb) EXPECT_EQ(n.size(), 2u);  // 2x2 block: no diagonal moves
  EXPECT_NO_THROW(g.validate());
  g.dest_cells = {{30.0, 1.0, 1.0}};
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(ChannelParamsTest, Validation) {
  ChannelParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_NEAR(p.tx_power_linear(), std::pow(10.0, 6.5), 1e-6);
  p.corr_distance = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.noise_var = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace irsrl::channel
