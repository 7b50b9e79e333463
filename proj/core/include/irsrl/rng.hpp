#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace irsrl {

using Rng = std::mt19937_64;

/// Derives an independent generator for a named substream of a master seed.
///
/// Substreams used by training: "channel", "motion", "init", "fourier",
/// "exploration", "replay". Two runs that differ only in the learner still
/// see the same channel and motion realizations for a given seed.
Rng make_stream(std::uint64_t master_seed, std::string_view name);

}  // namespace irsrl
