#ifndef GREEDYLAB_RNG_HPP
#define GREEDYLAB_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace greedylab {

// Deterministic across platforms: mt19937_64 is fully specified and the
// mappings below avoid std::uniform_*_distribution, whose output is
// implementation defined.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  // [0, 1)
  double unit() { return double(eng() >> 11) * 0x1.0p-53; }
  // (-1, 1)
  double sym() { return 2.0 * unit() - 1.0; }
  int sign() { return (eng() & 1) ? 1 : -1; }

  // uniform in [0, n), n >= 1
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(eng()) * n) >> 64);
  }
};

// Stable per-purpose stream split: FNV-1a over the tag, mixed with the seed.
inline std::uint64_t sub_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : tag) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  return h ^ (seed * 0x9e3779b97f4a7c15ull);
}

}  // namespace greedylab

#endif
