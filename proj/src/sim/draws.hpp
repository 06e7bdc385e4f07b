#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "ipr/matching.hpp"

namespace ipr::sim::detail {

// Counter-based draws: every random decision is a pure function of the run
// seed and the decision's coordinates, so runs do not depend on call order
// and two conditions run with one seed share every draw that does not
// depend on the assignment.

inline std::uint64_t key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = seed;
  for (auto p : parts) h = mix_seed(h, p);
  return h;
}

/// Uniform in [0, 1) from the top 53 bits.
inline double unit(std::uint64_t k) { return static_cast<double>(k >> 11) * 0x1.0p-53; }

/// Standard normal via Box-Muller over two derived uniforms.
inline double normal(std::uint64_t k) {
  const double u1 = 1.0 - unit(mix_seed(k, 1));  // (0, 1]
  const double u2 = unit(mix_seed(k, 2));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Streams keep unrelated decisions independent.
enum Stream : std::uint64_t {
  kQuality = 1,
  kDiligence,
  kRatingNoise,
  kAuthorMessage,
  kReviewerReply,
};

}  // namespace ipr::sim::detail
