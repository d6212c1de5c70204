#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace surropt {

// std::mt19937_64 has a fully specified output sequence, so streams are
// identical across standard libraries. The std distributions are not, which
// is why uniform draws below are hand-rolled.
using Rng = std::mt19937_64;

/// Named stream tags used to derive independent sub-seeds from one master seed.
enum class Stream : std::uint64_t {
  kTrainingDemand = 1,
  kRolloutDemand = 2,
  kTrainingScenarios = 3,
  kRolloutScenarios = 4,
  kFolds = 5,
  kGbdt = 6,
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic sub-seed for (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(stream), index);
}

/// 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). Unbiased (rejection sampling). n must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

}  // namespace surropt
