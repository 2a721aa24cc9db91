#pragma once

#include <cstdint>
#include <random>

namespace causnet {

// splitmix64 step; used to derive independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d0649fbb9aed1cULL;
  return z ^ (z >> 31);
}

// Deterministic child seed for (replicate, stage) under a master seed.
// Stages: 0 = process-spec draw, 1 = innovation noise. Distinct (replicate,
// stage) pairs map to distinct streams so replicates never share randomness.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t stage) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (0x517cc1b727220a95ULL * (replicate + 1));
  std::uint64_t b = splitmix64(s);
  s = b ^ (0x2545f4914f6cdd1dULL * (stage + 1));
  return splitmix64(s);
}

using rng_engine = std::mt19937_64;

}  // namespace causnet
