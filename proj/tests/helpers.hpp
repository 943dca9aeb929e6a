#pragma once

#include <map>
#include <vector>

#include "crgc/builders.hpp"
#include "crgc/circuit.hpp"
#include "crgc/rng.hpp"

namespace crgc::testing {

inline BitVector random_bits(SplitRng& rng, size_t n) {
  BitVector v(n);
  for (size_t i = 0; i < n; ++i) v[i] = rng.next_bit();
  return v;
}

/// The three-level circuit used throughout: three XOR gates on level 1, two
/// AND gates on level 2 (the second one also reads evaluator input b2), one
/// final XOR on level 3. Leaks every generator bit under the known-circuit
/// analysis and partitions into exactly one non-reusable section.
inline Circuit fig6_circuit() {
  Circuit c;
  c.n_generator_inputs = 3;
  c.n_evaluator_inputs = 3;
  c.gates = {
      Gate{0, 3, 6, tables::XOR},  Gate{1, 4, 7, tables::XOR}, Gate{2, 5, 8, tables::XOR},
      Gate{6, 7, 9, tables::AND},  Gate{8, 5, 10, tables::AND},
      Gate{9, 10, 11, tables::XOR},
  };
  c.output_wires = {11};
  validate(c);
  return c;
}

/// Straightforward demand-driven interpreter, written against the wire
/// semantics rather than the forward sweep; differential oracle for evaluate.
class NaiveInterpreter {
 public:
  explicit NaiveInterpreter(const Circuit& c) : c_(c) {
    for (const Gate& g : c.gates) by_out_[g.out] = g;
  }

  BitVector run(const BitVector& a, const BitVector& b) {
    cache_.clear();
    for (size_t i = 0; i < a.size(); ++i) cache_[static_cast<WireId>(i)] = a[i];
    for (size_t i = 0; i < b.size(); ++i)
      cache_[static_cast<WireId>(a.size() + i)] = b[i];
    BitVector out;
    for (WireId w : c_.output_wires) out.push_back(value(w));
    return out;
  }

 private:
  uint8_t value(WireId w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    const Gate& g = by_out_.at(w);
    uint8_t u = value(g.left);
    uint8_t v = value(g.right);
    uint8_t r = g.table.entry(u, v);
    cache_[w] = r;
    return r;
  }

  const Circuit& c_;
  std::map<WireId, Gate> by_out_;
  std::map<WireId, uint8_t> cache_;
};

/// Exhaustive check of f(a,b) against an integer oracle for every input pair.
template <typename Oracle>
void check_exhaustive(const Circuit& c, Oracle oracle) {
  const uint32_t na = c.n_generator_inputs, nb = c.n_evaluator_inputs;
  for (uint64_t x = 0; x < (1ull << na); ++x) {
    for (uint64_t y = 0; y < (1ull << nb); ++y) {
      BitVector got = evaluate(c, BitVector::from_u64(x, na), BitVector::from_u64(y, nb));
      uint64_t want = oracle(x, y);
      if (got.to_u64() != want) {
        throw std::runtime_error("oracle mismatch at x=" + std::to_string(x) +
                                 " y=" + std::to_string(y) + ": got " +
                                 std::to_string(got.to_u64()) + " want " + std::to_string(want));
      }
    }
  }
}

}  // namespace crgc::testing
