#pragma once

#include <cstdint>
#include <cmath>

namespace noma {

// Deterministic, platform-independent generator ("noma-rng-v1").
// splitmix64 is used both as the stream state update and as the hash that
// derives independent sub-streams, so draws for one device/slot/frame do not
// move when unrelated dimensions of the instance change.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed);
  h = hash_mix(h, tag);
  h = hash_mix(h, a);
  h = hash_mix(h, b);
  h = hash_mix(h, c);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1), never returns an exact endpoint
  double uniform01_open() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // unit-mean exponential, strictly positive
  double exponential1() { return -std::log(uniform01_open()); }

  // uniform integer in [lo, hi] inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + std::int64_t(next_u64() % span);
  }

 private:
  std::uint64_t state_;
};

}  // namespace noma
