#pragma once

#include <wigner/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <utility>

namespace wigner {

/// Per-trial seed from the run's master seed:
///
///   h = mix64(master ^ 0x9E3779B97F4A7C15)
///   h = mix64(h ^ (trial * 0xD1B54A32D192ED03))
///   h = mix64(h ^ (n * 0x8CB92BA72F3D8DD7))
///
/// mix64 is a bijection, so two trials with the same master and n never share
/// a seed; collisions across different n are checked per run.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t n) noexcept {
  std::uint64_t h = mix64(master ^ 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (trial * 0xD1B54A32D192ED03ULL));
  h = mix64(h ^ (n * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

/// Number of repeated values among the seeds of a run.
inline std::size_t count_seed_collisions(std::span<const std::uint64_t> seeds) {
  std::set<std::uint64_t> seen;
  std::size_t dup = 0;
  for (auto s : seeds)
    if (!seen.insert(s).second) ++dup;
  return dup;
}

}  // namespace wigner
