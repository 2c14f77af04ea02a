#pragma once

#include <random>

namespace hypflux {

/// Uniform double in [0,1) from the top 53 bits of one draw.
/// Unlike std::uniform_real_distribution this gives the same stream everywhere.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_draw(rng);
}

}  // namespace hypflux
