#pragma once

#include <array>
#include <cstdint>
#include <cstring>

#include "crgc/rng.hpp"

namespace crgc {

/// SipHash-2-4 with a 128-bit key over an 8-byte message.
uint64_t siphash24(uint64_t k0, uint64_t k1, uint64_t message);

/// 128-bit wire label; the low bit of `lo` is the point-and-permute bit.
struct Label {
  uint64_t lo = 0;
  uint64_t hi = 0;

  bool permute_bit() const { return lo & 1; }

  static Label random(SplitRng& rng) { return Label{rng.next_u64(), rng.next_u64()}; }

  friend Label operator^(Label a, Label b) { return Label{a.lo ^ b.lo, a.hi ^ b.hi}; }
  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;
};

/// 24-byte keystream (16-byte label part + 8-byte authentication tag) keyed by
/// the two input labels and a per-row tweak.
std::array<uint64_t, 3> row_keystream(const Label& ku, const Label& kv, uint64_t tweak);

}  // namespace crgc
