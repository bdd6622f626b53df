#include "reuse/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace reuse {

std::uint64_t hash_coords(std::span<const double> coords) {
  std::uint64_t h = 0xC0D'E5EEDull;
  for (double v : coords) {
    h = fold_key(h, std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

double Rng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_gaussian_;
  }
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;  // keep log() finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace reuse
