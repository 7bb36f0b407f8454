#ifndef AFFECT_RANDOM_H_
#define AFFECT_RANDOM_H_

// Seeded helpers that do not depend on the standard library's distribution
// implementations, so results are identical across toolchains.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace affect {

using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformRange(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(UniformUnit(rng) * static_cast<double>(n));
}

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace affect

#endif  // AFFECT_RANDOM_H_
