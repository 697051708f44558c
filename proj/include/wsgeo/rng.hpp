#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace wsgeo {

// mt19937_64 engine with hand-rolled value transforms. The std distribution
// classes produce implementation-defined sequences, which would break
// byte-identical replay of runs across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, bound) via rejection sampling. bound must be > 0.
  uint64_t below(uint64_t bound);

  // [0, 1) with the full 53-bit mantissa.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the spare draw is cached.
  double gaussian();

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // count distinct indices drawn from [0, population), in draw order.
  std::vector<int> sample_indices(int population, int count);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable sub-seed derivation so independent consumers of one run seed do not
// share streams. FNV-1a over the tag, mixed with the base.
uint64_t derive_seed(uint64_t base, std::string_view tag);

}  // namespace wsgeo
