#include "crgc/circuit.hpp"

#include <algorithm>

namespace crgc {

void validate(const Circuit& c) {
  const uint32_t n_in = c.n_inputs();
  const uint32_t n_wires = c.n_wires();
  std::vector<uint8_t> produced(n_wires, 0);
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.left >= n_wires || g.right >= n_wires || g.out >= n_wires)
      throw CircuitError("gate " + std::to_string(i) + ": wire index out of range");
    if (g.out <= g.left || g.out <= g.right)
      throw CircuitError("gate " + std::to_string(i) +
                         ": output wire not above parents (non-topological numbering)");
    if (g.out < n_in)
      throw CircuitError("gate " + std::to_string(i) + ": output wire collides with an input");
    if (produced[g.out])
      throw CircuitError("wire " + std::to_string(g.out) + " produced by more than one gate");
    // Topological gate order: parents must already be available.
    if (!c.is_input(g.left) && !produced[g.left])
      throw CircuitError("gate " + std::to_string(i) + ": left parent not yet produced");
    if (!c.is_input(g.right) && !produced[g.right])
      throw CircuitError("gate " + std::to_string(i) + ": right parent not yet produced");
    produced[g.out] = 1;
  }
  for (uint32_t w = n_in; w < n_wires; ++w)
    if (!produced[w]) throw CircuitError("wire " + std::to_string(w) + " never produced");

  std::vector<uint8_t> seen(n_wires, 0);
  for (WireId w : c.output_wires) {
    if (w >= n_wires) throw CircuitError("output wire out of range");
    if (c.is_input(w)) throw CircuitError("output wire " + std::to_string(w) + " is an input");
    if (seen[w]) throw CircuitError("duplicate output wire " + std::to_string(w));
    seen[w] = 1;
  }
}

std::vector<int32_t> producer_map(const Circuit& c) {
  std::vector<int32_t> prod(c.n_wires(), -1);
  for (size_t i = 0; i < c.gates.size(); ++i) prod[c.gates[i].out] = static_cast<int32_t>(i);
  return prod;
}

std::vector<uint8_t> output_wire_mask(const Circuit& c) {
  std::vector<uint8_t> mask(c.n_wires(), 0);
  for (WireId w : c.output_wires) mask[w] = 1;
  return mask;
}

std::vector<uint8_t> output_gate_mask(const Circuit& c) {
  auto wires = output_wire_mask(c);
  std::vector<uint8_t> mask(c.gates.size(), 0);
  for (size_t i = 0; i < c.gates.size(); ++i) mask[i] = wires[c.gates[i].out];
  return mask;
}

std::vector<uint32_t> levels(const Circuit& c) {
  std::vector<uint32_t> lvl(c.n_wires(), 0);
  for (const Gate& g : c.gates) lvl[g.out] = 1 + std::max(lvl[g.left], lvl[g.right]);
  return lvl;
}

void evaluate_wires(const Circuit& c, const BitVector& a, const BitVector& b,
                    std::vector<uint8_t>& wires) {
  if (a.size() != c.n_generator_inputs || b.size() != c.n_evaluator_inputs)
    throw CircuitError("input arity mismatch");
  wires.resize(c.n_wires());
  for (size_t i = 0; i < a.size(); ++i) wires[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) wires[c.n_generator_inputs + i] = b[i];
  for (const Gate& g : c.gates) {
    const uint8_t u = wires[g.left];
    const uint8_t v = wires[g.right];
    wires[g.out] = (g.table.raw() >> (2 * u + v)) & 1;
  }
}

BitVector evaluate(const Circuit& c, const BitVector& a, const BitVector& b) {
  std::vector<uint8_t> wires;
  evaluate_wires(c, a, b, wires);
  BitVector out(c.output_wires.size());
  for (size_t i = 0; i < c.output_wires.size(); ++i) out[i] = wires[c.output_wires[i]];
  return out;
}

}  // namespace crgc
