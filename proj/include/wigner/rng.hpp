#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace wigner {

// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Reproducible random stream.
///
/// The update rule is fixed so that other implementations can regenerate
/// identical matrices from the same seed:
///
///   state <- state + 0x9E3779B97F4A7C15 (mod 2^64)
///   word  <- mix64(state)
///   uniform = (word >> 11) * 2^-53          in [0, 1)
///
/// Normal variates use the Box-Muller pair
///   r = sqrt(-2 ln(1 - U1)),  g1 = r cos(2 pi U2),  g2 = r sin(2 pi U2)
/// with g1 returned first and g2 cached for the following call.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (cached_normal_) {
      const double g = *cached_normal_;
      cached_normal_.reset();
      return g;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(angle);
    return r * std::cos(angle);
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
  std::optional<double> cached_normal_;
};

}  // namespace wigner
