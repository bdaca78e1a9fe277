#ifndef QAKBP_RANDOM_HPP
#define QAKBP_RANDOM_HPP

// Platform-stable randomness. std::mt19937_64's output sequence is fixed by
// the standard, but the std distributions are not, so bounded draws are
// done here by rejection sampling.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace qakbp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Independent sub-seed for a named purpose (e.g. a split name).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(master ^ fnv1a64(label));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= limit) return r % bound;
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Sort key of item `index` under `seed`. Taking the n smallest keys gives a
// uniform n-subset, and the subsets for growing n are nested.
inline std::uint64_t sample_key(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

// Indices of a seeded uniform n-subset of [0, population), ascending.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<std::size_t> out;
  if (n >= population) {
    out.resize(population);
    for (std::size_t i = 0; i < population; ++i) out[i] = i;
    return out;
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(population);
  for (std::size_t i = 0; i < population; ++i) keyed[i] = {sample_key(seed, i), i};
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n),
                   keyed.end());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(keyed[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qakbp

#endif  // QAKBP_RANDOM_HPP
