#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace aia {

/// The engine is fully specified by the standard; the helpers below avoid the
/// implementation-defined std distributions so seeded runs match across
/// standard libraries.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
inline std::size_t uniform_below(Rng& rng, std::size_t bound) {
  const std::uint64_t range = bound;
  const std::uint64_t limit = Rng::max() - (Rng::max() % range + 1) % range;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return static_cast<std::size_t>(draw % range);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

}  // namespace aia
