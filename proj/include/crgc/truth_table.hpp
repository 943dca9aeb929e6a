#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace crgc {

enum class Side : uint8_t { left, right };

/// A 2-input gate's output function: 4 entries indexed by position p = 2u + v
/// where u is the left-parent value and v the right-parent value. Entry order
/// in string form is (0,0),(0,1),(1,0),(1,1), so XOR reads "0110".
class TruthTable {
 public:
  constexpr TruthTable() = default;
  constexpr explicit TruthTable(uint8_t raw) : bits_(raw & 0xf) {}

  static constexpr TruthTable from_entries(uint8_t e00, uint8_t e01, uint8_t e10, uint8_t e11) {
    return TruthTable(static_cast<uint8_t>((e00 & 1) | (e01 & 1) << 1 | (e10 & 1) << 2 |
                                           (e11 & 1) << 3));
  }

  static TruthTable from_string(std::string_view s) {
    if (s.size() != 4) throw std::invalid_argument("truth table string must have 4 bits");
    for (char c : s)
      if (c != '0' && c != '1') throw std::invalid_argument("truth table string must be 0/1");
    return from_entries(s[0] - '0', s[1] - '0', s[2] - '0', s[3] - '0');
  }

  constexpr uint8_t entry(int u, int v) const { return (bits_ >> (2 * u + v)) & 1; }
  constexpr uint8_t entry_at(int p) const { return (bits_ >> p) & 1; }

  constexpr TruthTable with_entry(int u, int v, uint8_t bit) const {
    int p = 2 * u + v;
    uint8_t b = bits_;
    b = static_cast<uint8_t>((b & ~(1u << p)) | ((bit & 1u) << p));
    return TruthTable(b);
  }

  /// Internal 4-bit encoding: bit p holds entry p. Stable, used by the codec.
  constexpr uint8_t raw() const { return bits_; }

  std::string to_string() const {
    std::string s(4, '0');
    for (int p = 0; p < 4; ++p) s[p] = '0' + entry_at(p);
    return s;
  }

  constexpr int weight() const {
    return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1) + ((bits_ >> 3) & 1);
  }

  constexpr bool is_balanced() const { return bits_ == 0b0110 || bits_ == 0b1001; }
  constexpr bool is_constant() const { return bits_ == 0b0000 || bits_ == 0b1111; }
  /// Output equals (possibly negated) left parent: "0011" or "1100".
  constexpr bool is_left_passthrough() const { return bits_ == 0b1100 || bits_ == 0b0011; }
  constexpr bool is_right_passthrough() const { return bits_ == 0b1010 || bits_ == 0b0101; }
  /// AND/OR/NAND/NOR family (one entry differs from the other three).
  constexpr bool is_imbalanced_core() const { return weight() == 1 || weight() == 3; }

  friend constexpr bool operator==(TruthTable, TruthTable) = default;

 private:
  uint8_t bits_ = 0;
};

namespace tables {
inline constexpr TruthTable XOR = TruthTable::from_entries(0, 1, 1, 0);
inline constexpr TruthTable XNOR = TruthTable::from_entries(1, 0, 0, 1);
inline constexpr TruthTable AND = TruthTable::from_entries(0, 0, 0, 1);
inline constexpr TruthTable NAND = TruthTable::from_entries(1, 1, 1, 0);
inline constexpr TruthTable OR = TruthTable::from_entries(0, 1, 1, 1);
inline constexpr TruthTable NOR = TruthTable::from_entries(1, 0, 0, 0);
inline constexpr TruthTable LEFT = TruthTable::from_entries(0, 0, 1, 1);       // u
inline constexpr TruthTable NOT_LEFT = TruthTable::from_entries(1, 1, 0, 0);   // !u
inline constexpr TruthTable RIGHT = TruthTable::from_entries(0, 1, 0, 1);      // v
inline constexpr TruthTable NOT_RIGHT = TruthTable::from_entries(1, 0, 1, 0);  // !v
inline constexpr TruthTable ZERO = TruthTable::from_entries(0, 0, 0, 0);
inline constexpr TruthTable ONE = TruthTable::from_entries(1, 1, 1, 1);
// u AND (NOT v), (NOT u) AND v
inline constexpr TruthTable ANDNR = TruthTable::from_entries(0, 0, 1, 0);
inline constexpr TruthTable ANDNL = TruthTable::from_entries(0, 1, 0, 0);
}  // namespace tables

}  // namespace crgc
