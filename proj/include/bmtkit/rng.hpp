#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace bmt {

// splitmix64 step: advances the state and returns a well-mixed 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic generator used everywhere randomness is needed.  Standard
// library distributions and std::shuffle are implementation defined, so the
// few primitives we need are spelled out here once and produce identical
// streams on every platform.
//
// Independent substreams come from fork(): a child generator keyed by a label
// or index, derived from the parent's seed without disturbing its sequence.
// Per-tree and per-round forks make ensemble construction order independent,
// so training with n trees reproduces the first n trees of a larger run.
class rng {
 public:
  explicit rng(std::uint64_t seed) : state_(seed) {
    for (int i = 0; i < 4; ++i) splitmix64(state_);  // decorrelate small seeds
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1) with 53 significant bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // unbiased uniform integer in [0, n); n = 0 returns 0
  std::uint64_t below(std::uint64_t n) {
    if (n < 2) return 0;
    std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r = next_u64();
    while (r < threshold) r = next_u64();
    return r % n;
  }

  rng fork(std::string_view label) const {
    std::uint64_t s = seed_mix(fnv1a64(label));
    return rng(s);
  }

  rng fork(std::uint64_t index) const {
    std::uint64_t x = index;
    return rng(seed_mix(splitmix64(x)));
  }

  // Fisher-Yates, high index down
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_mix(std::uint64_t key) const {
    std::uint64_t s = state_ ^ key;
    return splitmix64(s);
  }

  std::uint64_t state_;
};

}  // namespace bmt
