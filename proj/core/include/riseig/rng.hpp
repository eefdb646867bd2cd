// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "riseig/types.hpp"

namespace riseig {

/// SplitMix64 step; used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seeded random generator with portable output.
///
/// The engine is std::mt19937_64 but all distributions are produced from raw
/// 64-bit draws (uniform via the 53-bit mantissa trick, normal via
/// Box-Muller), so identical seeds give bit-identical sequences on every
/// platform. Monte-Carlo trials use independent substreams derived from
/// (seed, stream) so results do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Generator for substream `stream` of the master `seed`. A pure function
  /// of its arguments.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double normal();
  /// Circularly-symmetric complex normal CN(0, 1).
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace riseig
