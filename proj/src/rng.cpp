#include "wsgeo/rng.hpp"

#include <cmath>

#include "wsgeo/error.hpp"

namespace wsgeo {

uint64_t Rng::below(uint64_t bound) {
  if (bound == 0) raise(ErrorKind::Numeric, "Rng::below called with bound 0");
  // Rejection sampling over the largest multiple of bound.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::vector<int> Rng::sample_indices(int population, int count) {
  if (count > population) count = population;
  std::vector<int> pool(static_cast<size_t>(population));
  for (int i = 0; i < population; ++i) pool[static_cast<size_t>(i)] = i;
  std::vector<int> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const uint64_t j = below(static_cast<uint64_t>(population - i)) + static_cast<uint64_t>(i);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    out.push_back(pool[static_cast<size_t>(i)]);
  }
  return out;
}

uint64_t derive_seed(uint64_t base, std::string_view tag) {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  // splitmix-style finalizer over the combination
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace wsgeo
