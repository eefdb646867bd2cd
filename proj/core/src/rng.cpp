// SPDX-License-Identifier: Apache-2.0
#include "riseig/rng.hpp"

#include <cmath>
#include <numbers>

namespace riseig {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream;
  const std::uint64_t b = splitmix64(state);
  return Rng(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  // 53 uniform mantissa bits; avoids implementation-defined std distributions.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

Complex Rng::complex_normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-std::log(u1));  // combined 1/sqrt(2) scaling
  const double ang = 2.0 * std::numbers::pi * u2;
  return Complex(mag * std::cos(ang), mag * std::sin(ang));
}

}  // namespace riseig
