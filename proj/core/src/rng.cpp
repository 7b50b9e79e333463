#include "irsrl/rng.hpp"

#include <array>

namespace irsrl {

namespace {

// FNV-1a, 64 bit.
std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng make_stream(std::uint64_t master_seed, std::string_view name) {
  const std::uint64_t tag = hash_name(name);
  std::array<std::uint32_t, 4> words{
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace irsrl
