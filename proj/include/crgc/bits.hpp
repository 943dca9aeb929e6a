#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crgc {

/// Ordered sequence of 0/1 values with explicit length. Bit 0 is the least
/// significant bit wherever a numeric interpretation applies (little-endian
/// throughout, including the CLI).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t n, uint8_t fill = 0) : bits_(n, fill ? 1 : 0) {}

  static BitVector from_u64(uint64_t value, size_t width) {
    BitVector v(width);
    for (size_t i = 0; i < width; ++i) v.bits_[i] = (value >> i) & 1;
    if (width < 64 && (value >> width) != 0)
      throw std::invalid_argument("value does not fit in declared width");
    return v;
  }

  /// "0110" -> bits [0,1,1,0] (index 0 first).
  static BitVector from_string(std::string_view s) {
    BitVector v(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bit string must be 0/1");
      v.bits_[i] = s[i] - '0';
    }
    return v;
  }

  uint64_t to_u64() const {
    if (size() > 64) throw std::invalid_argument("bit vector wider than 64 bits");
    uint64_t value = 0;
    for (size_t i = 0; i < size(); ++i) value |= static_cast<uint64_t>(bits_[i] & 1) << i;
    return value;
  }

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  uint8_t operator[](size_t i) const { return bits_[i]; }
  uint8_t& operator[](size_t i) { return bits_[i]; }
  void push_back(uint8_t b) { bits_.push_back(b & 1); }

  std::string to_string() const {
    std::string s(size(), '0');
    for (size_t i = 0; i < size(); ++i) s[i] = '0' + (bits_[i] & 1);
    return s;
  }

  BitVector concat(const BitVector& other) const {
    BitVector out = *this;
    out.bits_.insert(out.bits_.end(), other.bits_.begin(), other.bits_.end());
    return out;
  }

  const std::vector<uint8_t>& raw() const { return bits_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<uint8_t> bits_;
};

/// Packs bits LSB-first into bytes; inverse of unpack_bits.
inline std::vector<uint8_t> pack_bits(const BitVector& v) {
  std::vector<uint8_t> out((v.size() + 7) / 8, 0);
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i]) out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  return out;
}

inline BitVector unpack_bits(const std::vector<uint8_t>& bytes, size_t n_bits) {
  BitVector v(n_bits);
  for (size_t i = 0; i < n_bits; ++i) v[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return v;
}

}  // namespace crgc
