#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsrl/config.hpp"

namespace irsrl::harness {

struct OracleCheckOptions {
  int closed_form_instances = 100;
  int bound_instances = 1000;
  int beamformer_instances = 20;
  int beamformer_samples = 1000;  // random feasible beamformers per instance
  int grid_levels = 16;
  int max_exhaustive_elements = 4;
  std::uint64_t seed = 12345;
};

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleReport {
  std::vector<PropertyResult> properties;
  double seconds = 0.0;

  bool all_passed() const;
};

/// Checks the signal-model oracles on channels drawn from the configured
/// channel model: beamformer optimality, single-antenna closed form versus
/// the bound and an exhaustive grid, the bound chain, single-element phase
/// invariance.
OracleReport oracle_check(const ExperimentConfig& config, const OracleCheckOptions& options = {});

}  // namespace irsrl::harness
