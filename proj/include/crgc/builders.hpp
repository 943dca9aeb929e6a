#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "crgc/circuit.hpp"

namespace crgc {

/// Gate-at-a-time construction; wires are appended densely so the result
/// always satisfies the Circuit invariants.
class CircuitBuilder {
 public:
  CircuitBuilder(uint32_t n_a, uint32_t n_b) {
    c_.n_generator_inputs = n_a;
    c_.n_evaluator_inputs = n_b;
  }

  WireId input(uint32_t i) const { return i; }

  WireId gate(WireId l, WireId r, TruthTable t) {
    WireId out = c_.n_wires();
    c_.gates.push_back(Gate{l, r, out, t});
    return out;
  }

  WireId land(WireId l, WireId r) { return gate(l, r, tables::AND); }
  WireId lor(WireId l, WireId r) { return gate(l, r, tables::OR); }
  WireId lxor(WireId l, WireId r) { return gate(l, r, tables::XOR); }
  WireId lxnor(WireId l, WireId r) { return gate(l, r, tables::XNOR); }
  WireId lnot(WireId x) { return gate(x, x, tables::NOT_LEFT); }
  WireId andn_left(WireId l, WireId r) { return gate(l, r, tables::ANDNL); }   // !l & r
  WireId andn_right(WireId l, WireId r) { return gate(l, r, tables::ANDNR); }  // l & !r

  // out = s ? x : y
  WireId mux(WireId s, WireId x, WireId y) {
    WireId d = lxor(x, y);
    WireId m = land(s, d);
    return lxor(m, y);
  }

  /// Ripple add of two equal-width little-endian words, modulo 2^width.
  std::vector<WireId> add(const std::vector<WireId>& xs, const std::vector<WireId>& ys) {
    std::vector<WireId> sum(xs.size());
    WireId carry = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      WireId t = lxor(xs[i], ys[i]);
      if (i == 0) {
        sum[i] = t;
        if (xs.size() > 1) carry = land(xs[i], ys[i]);
      } else {
        sum[i] = lxor(t, carry);
        if (i + 1 < xs.size()) carry = lor(land(xs[i], ys[i]), land(t, carry));
      }
    }
    return sum;
  }

  Circuit finish(std::vector<WireId> outputs) {
    c_.output_wires = std::move(outputs);
    validate(c_);
    return std::move(c_);
  }

 private:
  Circuit c_;
};

enum class BuilderKind : uint8_t {
  adder,
  subtract,
  multiplier,
  comparator,
  mux,
  linear_query,
  range_max,
  set_intersection,
};

/// Size parameters; meaning per kind:
///   adder/subtract/multiplier/comparator: width-bit operands a, b
///   mux: 1 selector + two width-bit operands (out = s ? x : y)
///   linear_query: `elements` list entries of `width` bits vs one key
///   range_max: `elements` entries of `width` bits, evaluator holds lo/hi indices
///   set_intersection: `elements` generator entries vs `elements_b` evaluator
///     entries, one membership bit per evaluator entry
/// All arithmetic is little-endian, bit 0 = LSB.
struct BuilderParams {
  uint32_t width = 8;
  uint32_t elements = 4;
  uint32_t elements_b = 4;
  /// Overrides how many leading input bits belong to the generator; the
  /// default is the kind's natural split (first operand / list is the
  /// generator's).
  std::optional<uint32_t> generator_inputs;
};

Circuit build_test_circuit(BuilderKind kind, const BuilderParams& params);

BuilderKind builder_kind_from_name(const std::string& name);
const char* builder_kind_name(BuilderKind kind);

/// Deterministic random circuit; parents drawn from earlier wires, tables from
/// all 16 possibilities with `balanced_permille` of them forced balanced
/// (negative = fully uniform). Outputs are the last n_out gates' out wires.
Circuit random_circuit(uint64_t seed, uint32_t n_gates, uint32_t n_a, uint32_t n_b,
                       uint32_t n_out, int balanced_permille = -1);

}  // namespace crgc
