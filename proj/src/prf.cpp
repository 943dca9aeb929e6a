#include "crgc/prf.hpp"

namespace crgc {

namespace {

inline uint64_t rotl(uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

inline void sipround(uint64_t& v0, uint64_t& v1, uint64_t& v2, uint64_t& v3) {
  v0 += v1;
  v1 = rotl(v1, 13);
  v1 ^= v0;
  v0 = rotl(v0, 32);
  v2 += v3;
  v3 = rotl(v3, 16);
  v3 ^= v2;
  v0 += v3;
  v3 = rotl(v3, 21);
  v3 ^= v0;
  v2 += v1;
  v1 = rotl(v1, 17);
  v1 ^= v2;
  v2 = rotl(v2, 32);
}

}  // namespace

uint64_t siphash24(uint64_t k0, uint64_t k1, uint64_t message) {
  uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
  uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
  uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
  uint64_t v3 = 0x7465646279746573ULL ^ k1;

  v3 ^= message;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  v0 ^= message;

  const uint64_t b = 8ull << 56;  // length block for an 8-byte message
  v3 ^= b;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  v0 ^= b;

  v2 ^= 0xff;
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  sipround(v0, v1, v2, v3);
  return v0 ^ v1 ^ v2 ^ v3;
}

std::array<uint64_t, 3> row_keystream(const Label& ku, const Label& kv, uint64_t tweak) {
  const uint64_t k0 = ku.lo ^ rotl(kv.lo, 1);
  const uint64_t k1 = ku.hi ^ rotl(kv.hi, 1);
  std::array<uint64_t, 3> out;
  for (uint64_t i = 0; i < 3; ++i) out[i] = siphash24(k0, k1, tweak * 4 + i);
  return out;
}

}  // namespace crgc
