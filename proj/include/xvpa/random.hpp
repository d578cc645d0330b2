#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace xvpa {

/// Engine used everywhere randomness is needed. The distributions below are
/// hand-rolled because the standard ones are implementation-defined and the
/// generated corpora must be byte-stable across toolchains.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound); bound must be positive.
inline std::uint64_t uniformBelow(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

/// Uniform integer in [lo, hi].
inline std::int64_t uniformBetween(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniformBelow(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

/// Uniform double in [0, 1).
inline double uniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool chance(Rng& rng, double p) { return uniformUnit(rng) < p; }

/// SplitMix64 step, used to derive independent child seeds from a master seed.
inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <class T>
void shuffle(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniformBelow(rng, i)]);
  }
}

}  // namespace xvpa
