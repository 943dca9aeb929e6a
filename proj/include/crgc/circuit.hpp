#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "crgc/bits.hpp"
#include "crgc/truth_table.hpp"

namespace crgc {

/// Non-negative wire index. Wires [0, |a|) are generator inputs,
/// [|a|, |a|+|b|) are evaluator inputs, every remaining wire is produced by
/// exactly one gate and is numbered above both of its parents.
using WireId = uint32_t;

struct CircuitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Gate {
  WireId left = 0;
  WireId right = 0;
  WireId out = 0;
  TruthTable table;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Boolean-circuit IR. Immutable after construction and safe to share across
/// threads; evaluation keeps its state in a caller-owned scratch buffer.
struct Circuit {
  uint32_t n_generator_inputs = 0;
  uint32_t n_evaluator_inputs = 0;
  std::vector<Gate> gates;            // topological order
  std::vector<WireId> output_wires;   // final outputs, first-class metadata

  uint32_t n_inputs() const { return n_generator_inputs + n_evaluator_inputs; }
  uint32_t n_wires() const { return n_inputs() + static_cast<uint32_t>(gates.size()); }
  bool is_input(WireId w) const { return w < n_inputs(); }
  bool is_generator_input(WireId w) const { return w < n_generator_inputs; }
  bool is_evaluator_input(WireId w) const { return w >= n_generator_inputs && w < n_inputs(); }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// Throws CircuitError if any structural invariant is violated: parents below
/// outputs, dense single-producer wire numbering, topological gate order,
/// distinct produced output wires.
void validate(const Circuit& c);

/// wire -> producing gate index, or -1 for input wires.
std::vector<int32_t> producer_map(const Circuit& c);

/// Per-wire flag: wire appears in c.output_wires.
std::vector<uint8_t> output_wire_mask(const Circuit& c);

/// Per-gate flag: gate's out wire is a final circuit output.
std::vector<uint8_t> output_gate_mask(const Circuit& c);

/// level(w) = 0 for input wires, level(g) = 1 + max(level(left), level(right)).
/// Indexed per wire.
std::vector<uint32_t> levels(const Circuit& c);

/// Fills `wires` (resized to c.n_wires()) with every wire value for inputs
/// (a, b). Reusing the same scratch across calls avoids reallocation; distinct
/// scratches make concurrent evaluation of one Circuit safe.
void evaluate_wires(const Circuit& c, const BitVector& a, const BitVector& b,
                    std::vector<uint8_t>& wires);

/// Values at c.output_wires in order. Total and deterministic.
BitVector evaluate(const Circuit& c, const BitVector& a, const BitVector& b);

}  // namespace crgc
