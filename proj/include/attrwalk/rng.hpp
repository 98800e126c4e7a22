#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace attrwalk {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Every random decision draws from a stream keyed by (master seed, tag, indices).
// Streams are independent of each other, so adding a stage never shifts the
// randomness consumed by another stage.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed ^ fnv1a64(tag));
  h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ (b + 0xbf58476d1ce4e5b9ULL));
  return h;
}

// mt19937_64 with hand-rolled draws; std::uniform_*_distribution is
// implementation-defined and would break bit-level reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Real in [0, 1) with 53 random bits.
  double next_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace attrwalk
