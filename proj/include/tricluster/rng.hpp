#pragma once

// Portable random stream: std::mt19937_64 (bit-exact by the standard) with
// hand-written range reductions, since the standard distributions are
// implementation-defined and would break cross-platform reproducibility.

#include <cstdint>
#include <random>
#include <utility>

namespace tricluster {

// SplitMix64 finaliser, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix64(seed ^ mix64(stream + 0x51ed270b27e3a1fdULL))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). Lemire's multiply-and-reject method.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tricluster
