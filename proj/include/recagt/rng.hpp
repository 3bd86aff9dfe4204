#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace recagt {

/// One step of the splitmix64 generator; used for seed mixing.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic RNG wrapper.
///
/// The engine (mt19937_64) is pinned by the standard, and all derived draws
/// (bounded integers, unit doubles, sampling) are implemented here instead of
/// relying on std distributions, whose output is implementation-defined.
/// Identical seeds therefore replay identically everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit();

  /// Uniform delay in (0, delta].
  double delay(double delta);

  /// Independent substream keyed by (seed, tag).
  Rng child(std::uint64_t tag) const;

  /// k distinct values from [0, population), in draw order.
  std::vector<std::uint32_t> sample(std::uint32_t population, std::uint32_t k);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace recagt
