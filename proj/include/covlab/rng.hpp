#pragma once

#include <cstdint>

namespace covlab {

// splitmix64: tiny, portable, byte-stable across platforms. Fixture
// generation must not depend on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  std::uint64_t range(std::uint64_t lo, std::uint64_t hi_incl) {
    return lo + below(hi_incl - lo + 1);
  }

  bool chance(std::uint32_t num, std::uint32_t den) { return below(den) < num; }

  // Derives an independent stream, order-insensitive across samples.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0x94d049bb133111ebull * (stream + 1)));
    r.next();
    return r;
  }

 private:
  std::uint64_t state_;
};

}  // namespace covlab
