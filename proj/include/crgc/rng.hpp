#pragma once

#include <cstdint>
#include <string_view>

namespace crgc {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

/// Deterministic splittable generator. Substreams are derived from the seed
/// (not the stream position), so adding a pass never shifts the draws of
/// another pass, and draw sequences are identical across platforms.
class SplitRng {
 public:
  explicit SplitRng(uint64_t seed) : seed_(seed) {
    uint64_t s = seed;
    state_ = splitmix64(s);
  }

  SplitRng substream(std::string_view name) const {
    uint64_t s = seed_ ^ fnv1a64(name);
    return SplitRng(splitmix64(s));
  }

  SplitRng substream(uint64_t index) const {
    uint64_t s = seed_ ^ (0x8f1bbcdcbfa53e0bULL + index * 0x2545f4914f6cdd1dULL);
    return SplitRng(splitmix64(s));
  }

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return splitmix64(state_); }

  bool next_bit() { return next_u64() & 1; }

  // Uniform in [0, bound). Exact for powers of two; otherwise a fixed-point
  // multiply whose bias (< bound / 2^64) is irrelevant at our scales.
  uint64_t next_below(uint64_t bound) {
    if ((bound & (bound - 1)) == 0) return next_u64() & (bound - 1);
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  uint64_t seed_;
  uint64_t state_;
};

}  // namespace crgc
