#include "crgc/obfuscate.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace crgc {

TruthTable flip_table_for_parent(TruthTable t, Side which) {
  uint8_t r = t.raw();
  if (which == Side::left) {
    // swap entries (0,v) <-> (1,v): bits 0<->2, 1<->3
    uint8_t lo = r & 0b0011, hi = (r >> 2) & 0b0011;
    return TruthTable(static_cast<uint8_t>((lo << 2) | hi));
  }
  // swap entries (u,0) <-> (u,1): bits 0<->1, 2<->3
  uint8_t even = r & 0b0101, odd = (r >> 1) & 0b0101;
  return TruthTable(static_cast<uint8_t>((even << 1) | odd));
}

TruthTable flip_table_output(TruthTable t) { return TruthTable(static_cast<uint8_t>(~t.raw())); }

TruthTable recover_fixed_integrity(TruthTable child, Side which_parent, uint8_t fixed_value) {
  fixed_value &= 1;
  if (which_parent == Side::left) {
    uint8_t row = static_cast<uint8_t>((child.raw() >> (2 * fixed_value)) & 0b0011);
    return TruthTable(static_cast<uint8_t>(row | (row << 2)));
  }
  uint8_t col = static_cast<uint8_t>((child.raw() >> fixed_value) & 0b0101);
  return TruthTable(static_cast<uint8_t>(col | (col << 1)));
}

TruthTable balanced_completion(TruthTable t, Side fixed_side, uint8_t fixed_value) {
  uint8_t v = fixed_value & 1;
  uint8_t e0, e1;  // restricted entries at the free parent's values 0 and 1
  if (fixed_side == Side::left) {
    e0 = t.entry(v, 0);
    e1 = t.entry(v, 1);
  } else {
    e0 = t.entry(0, v);
    e1 = t.entry(1, v);
  }
  if (e0 == e1) throw std::logic_error("balanced completion needs a non-constant restriction");
  // XOR agrees with entry (u,v') = u^v'; decide the family from the first cell.
  bool is_xor = (fixed_side == Side::left) ? (e0 == v) : (e0 == v);
  return is_xor ? tables::XOR : tables::XNOR;
}

TruthTable partner_table(TruthTable t) {
  if (!t.is_imbalanced_core()) throw std::logic_error("partner swap needs an AND/OR-family table");
  return flip_table_for_parent(flip_table_for_parent(t, Side::left), Side::right);
}

TruthTable obfuscate_fixed_gate(TruthTable t, std::optional<uint8_t> left_fixed,
                                std::optional<uint8_t> right_fixed, int entry_choice,
                                bool level1) {
  if (!left_fixed && !right_fixed)
    throw std::logic_error("obfuscate_fixed_gate called on a gate with no fixed parent");
  if (left_fixed && right_fixed) {
    uint8_t u = *left_fixed & 1, v = *right_fixed & 1;
    TruthTable flipped = t.with_entry(u, v, t.entry(u, v) ^ 1);
    if (!level1) return flipped;
    // One constrained cell; the balanced family is determined by it.
    return (flipped.entry(u, v) == (u ^ v)) ? tables::XOR : tables::XNOR;
  }
  const Side side = left_fixed ? Side::left : Side::right;
  const uint8_t v = (left_fixed ? *left_fixed : *right_fixed) & 1;
  const uint8_t other = static_cast<uint8_t>(entry_choice & 1);
  TruthTable flipped = (side == Side::left)
                           ? t.with_entry(v, other, t.entry(v, other) ^ 1)
                           : t.with_entry(other, v, t.entry(other, v) ^ 1);
  if (!level1) return flipped;
  return balanced_completion(flipped, side, v);
}

TruthTable obfuscate_fixed_gate(TruthTable t, std::optional<uint8_t> left_fixed,
                                std::optional<uint8_t> right_fixed, SplitRng& rng, bool level1) {
  return obfuscate_fixed_gate(t, left_fixed, right_fixed, static_cast<int>(rng.next_bit()),
                              level1);
}

namespace {

// Forwarded prefix wires keep an identity pad; only `own` wires and internal
// wires draw fresh pad bits.
FlipResult flip_with_prefix(const Circuit& c, const BitVector& known_prefix,
                            const BitVector& own, ObfuscationTrace& trace, SplitRng& rng) {
  if (known_prefix.size() + own.size() != c.n_generator_inputs)
    throw CircuitError("generator input arity mismatch");
  FlipResult res;
  res.circuit = c;
  trace.flipped.assign(c.n_wires(), 0);

  res.a_prime = known_prefix;
  for (size_t i = 0; i < own.size(); ++i) {
    uint8_t bit = rng.next_bit();
    res.a_prime.push_back(bit);
    trace.flipped[known_prefix.size() + i] = bit ^ own[i];
  }

  const auto is_out = output_wire_mask(c);
  for (Gate& g : res.circuit.gates) {
    if (trace.flipped[g.left]) g.table = flip_table_for_parent(g.table, Side::left);
    if (trace.flipped[g.right]) g.table = flip_table_for_parent(g.table, Side::right);
    const bool flip = rng.next_bit();
    if (flip && !is_out[g.out]) {
      g.table = flip_table_output(g.table);
      trace.flipped[g.out] = 1;
    }
  }
  return res;
}

}  // namespace

FlipResult bit_flipping(const Circuit& c, const BitVector& a, ObfuscationTrace& trace,
                        SplitRng& rng) {
  return flip_with_prefix(c, BitVector(), a, trace, rng);
}

namespace {

void classify_fixed(const Circuit& c, const BitVector& fixed_inputs,
                    std::vector<uint8_t>& is_fixed, std::vector<uint8_t>& fixed_value) {
  is_fixed.assign(c.n_wires(), 0);
  fixed_value.assign(c.n_wires(), 0);
  for (size_t i = 0; i < fixed_inputs.size(); ++i) {
    is_fixed[i] = 1;
    fixed_value[i] = fixed_inputs[i];
  }
  for (const Gate& g : c.gates) {
    const TruthTable t = g.table;
    const uint8_t vl = fixed_value[g.left];
    const uint8_t vr = fixed_value[g.right];
    if (is_fixed[g.left] && is_fixed[g.right]) {
      fixed_value[g.out] = t.entry(vl, vr);
      is_fixed[g.out] = 1;
    } else if (is_fixed[g.left] && t.entry(vl, 0) == t.entry(vl, 1)) {
      fixed_value[g.out] = t.entry(vl, 0);
      is_fixed[g.out] = 1;
    } else if (is_fixed[g.right] && t.entry(0, vr) == t.entry(1, vr)) {
      fixed_value[g.out] = t.entry(0, vr);
      is_fixed[g.out] = 1;
    }
  }
}

}  // namespace

void classify_fixed_for_input(const Circuit& c, const BitVector& a,
                              std::vector<uint8_t>& is_fixed,
                              std::vector<uint8_t>& fixed_value) {
  if (a.size() != c.n_generator_inputs) throw CircuitError("generator input arity mismatch");
  classify_fixed(c, a, is_fixed, fixed_value);
}

void identify_fixed_gates(Circuit& c, const BitVector& a_prime, ObfuscationTrace& trace) {
  if (trace.flipped.size() != c.n_wires())
    throw CircuitError("trace not initialized: run bit flipping first");
  classify_fixed(c, a_prime, trace.is_fixed, trace.fixed_value);

  // Children of fixed gates stop reading that parent's delivered value, so the
  // later entry flips and re-randomization of fixed gates cannot reach them.
  // Fixed input wires keep their meaning (a' ships as-is) and need no recovery.
  const uint32_t n_in = c.n_inputs();
  for (Gate& g : c.gates) {
    if (g.left >= n_in && trace.is_fixed[g.left])
      g.table = recover_fixed_integrity(g.table, Side::left, trace.fixed_value[g.left]);
    if (g.right >= n_in && trace.is_fixed[g.right])
      g.table = recover_fixed_integrity(g.table, Side::right, trace.fixed_value[g.right]);
  }
}

std::vector<uint8_t> unreachable_behind_barrier(const Circuit& c,
                                                const std::vector<uint8_t>& barrier_per_wire) {
  std::vector<uint8_t> unvisited(c.gates.size(), 1);
  std::vector<uint8_t> pushed(c.gates.size(), 0);
  const auto producer = producer_map(c);
  std::deque<uint32_t> queue;
  for (WireId w : c.output_wires) {
    int32_t g = producer[w];
    if (g >= 0 && !pushed[g]) {
      pushed[g] = 1;
      queue.push_back(static_cast<uint32_t>(g));
    }
  }
  while (!queue.empty()) {
    uint32_t gi = queue.front();
    queue.pop_front();
    unvisited[gi] = 0;
    for (WireId p : {c.gates[gi].left, c.gates[gi].right}) {
      if (barrier_per_wire[p]) continue;
      int32_t pg = producer[p];
      if (pg >= 0 && !pushed[pg]) {
        pushed[pg] = 1;
        queue.push_back(static_cast<uint32_t>(pg));
      }
    }
  }
  return unvisited;
}

void identify_passive_gates(const Circuit& c, ObfuscationTrace& trace) {
  if (trace.is_fixed.size() != c.n_wires())
    throw CircuitError("trace inconsistent: run fixed-gate identification first");
  trace.obfuscatable = unreachable_behind_barrier(c, trace.is_fixed);
}

PassivityProfile passivity_profile(const Circuit& original, uint32_t exact_limit,
                                   uint32_t mc_samples, SplitRng rng) {
  PassivityProfile prof;
  const uint32_t n_a = original.n_generator_inputs;
  const size_t n_gates = original.gates.size();
  std::vector<uint64_t> count(n_gates, 0);
  std::vector<uint8_t> is_fixed, fixed_value;

  auto run_one = [&](const BitVector& a) {
    classify_fixed(original, a, is_fixed, fixed_value);
    auto passive = unreachable_behind_barrier(original, is_fixed);
    for (size_t g = 0; g < n_gates; ++g) count[g] += passive[g];
  };

  if (n_a <= exact_limit) {
    const uint64_t total = 1ull << n_a;
    for (uint64_t v = 0; v < total; ++v) run_one(BitVector::from_u64(v, n_a));
    prof.exact = true;
    prof.samples = total;
    prof.p.resize(n_gates);
    prof.std_error.assign(n_gates, 0.0);
    for (size_t g = 0; g < n_gates; ++g) prof.p[g] = static_cast<double>(count[g]) / total;
  } else {
    for (uint32_t s = 0; s < mc_samples; ++s) {
      BitVector a(n_a);
      for (uint32_t i = 0; i < n_a; ++i) a[i] = rng.next_bit();
      run_one(a);
    }
    prof.exact = false;
    prof.samples = mc_samples;
    prof.p.resize(n_gates);
    prof.std_error.resize(n_gates);
    for (size_t g = 0; g < n_gates; ++g) {
      double p = static_cast<double>(count[g]) / mc_samples;
      prof.p[g] = p;
      prof.std_error[g] = std::sqrt(p * (1.0 - p) / mc_samples);
    }
  }
  return prof;
}

namespace {

TruthTable random_of(SplitRng& rng, TruthTable x, TruthTable y) {
  return rng.next_bit() ? y : x;
}

double next_unit(SplitRng& rng) { return (rng.next_u64() >> 11) * 0x1.0p-53; }

}  // namespace

void obfuscate_passive(Circuit& cprime, const Circuit& original, ObfuscationTrace& trace,
                       ThreatModel model, SplitRng& rng) {
  if (trace.obfuscatable.size() != cprime.gates.size())
    throw CircuitError("trace inconsistent: run passive identification first");
  if (original.gates.size() != cprime.gates.size())
    throw CircuitError("original/obfuscated circuit mismatch");

  const auto lvl = levels(cprime);
  const auto is_out = output_gate_mask(cprime);
  trace.replaced.assign(cprime.gates.size(), 0);
  trace.replacement_admitted.assign(cprime.gates.size(), 0);
  trace.passive_prob.assign(cprime.gates.size(), -1.0);

  PassivityProfile profile;
  if (model == ThreatModel::circuit_known)
    profile = passivity_profile(original, 20, 10000, rng.substream("passivity-profile"));

  SplitRng draw = rng.substream("tables");
  for (size_t i = 0; i < cprime.gates.size(); ++i) {
    if (is_out[i]) continue;  // final output gates are never rewritten
    Gate& g = cprime.gates[i];
    const bool passive = trace.obfuscatable[i];

    if (lvl[g.out] == 1) {
      // Level-1 parents are input wires; a fixed parent is a generator input.
      if (g.table.is_balanced()) {
        if (passive) g.table = random_of(draw, tables::XOR, tables::XNOR);
        continue;
      }
      std::optional<uint8_t> lf, rf;
      if (trace.is_fixed[g.left]) lf = trace.fixed_value[g.left];
      if (trace.is_fixed[g.right]) rf = trace.fixed_value[g.right];
      if (trace.is_fixed[g.out]) {
        g.table = obfuscate_fixed_gate(g.table, lf, rf, draw, /*level1=*/true);
      } else if (lf) {
        g.table = balanced_completion(g.table, Side::left, *lf);
      } else if (rf) {
        g.table = balanced_completion(g.table, Side::right, *rf);
      } else if (passive) {
        g.table = random_of(draw, tables::XOR, tables::XNOR);
      }
      // An imbalanced gate fed by evaluator inputs only cannot be completed
      // without breaking integrity; it carries no generator dependence.
      continue;
    }

    if (!passive) continue;

    if (model == ThreatModel::circuit_hidden) {
      g.table = TruthTable(static_cast<uint8_t>(draw.next_below(16)));
      continue;
    }

    // circuit_known: keep the delivered table inside the flip orbit the
    // evaluator expects from the original gate type.
    const TruthTable orig = original.gates[i].table;
    if (orig.is_balanced()) {
      g.table = random_of(draw, tables::XOR, tables::XNOR);
    } else if (orig.is_constant()) {
      g.table = random_of(draw, tables::ZERO, tables::ONE);
    } else if (orig.is_left_passthrough()) {
      g.table = random_of(draw, tables::LEFT, tables::NOT_LEFT);
    } else if (orig.is_right_passthrough()) {
      g.table = random_of(draw, tables::RIGHT, tables::NOT_RIGHT);
    } else {
      const double p = profile.p[i];
      const double se = profile.exact ? 0.0 : profile.std_error[i];
      trace.passive_prob[i] = p;
      // q = 1/(2p) must stay <= 1; with a Monte Carlo estimate the 3-sigma
      // lower bound decides, failing toward the non-reusable section.
      const bool admitted = (p - 3.0 * se) >= 0.5 && p > 0.0;
      if (!admitted) continue;
      trace.replacement_admitted[i] = 1;
      const double q = 1.0 / (2.0 * p);
      TruthTable base = orig;
      if (next_unit(draw) < q) {
        base = partner_table(orig);
        trace.replaced[i] = 1;
      }
      if (draw.next_bit()) base = flip_table_for_parent(base, Side::left);
      if (draw.next_bit()) base = flip_table_for_parent(base, Side::right);
      if (draw.next_bit()) base = flip_table_output(base);
      g.table = base;
    }
  }
}

namespace {

ConstructResult construct_core(const Circuit& c, const BitVector& known_prefix,
                               const BitVector& own, uint64_t seed, ThreatModel model) {
  if (known_prefix.size() + own.size() != c.n_generator_inputs)
    throw CircuitError("generator input arity mismatch");

  SplitRng rng(seed);
  ObfuscationTrace trace;
  trace.rng_seed = seed;

  SplitRng flip_rng = rng.substream("bit-flipping");
  FlipResult flipped = flip_with_prefix(c, known_prefix, own, trace, flip_rng);

  // Passes 2-4.
  identify_fixed_gates(flipped.circuit, flipped.a_prime, trace);
  identify_passive_gates(flipped.circuit, trace);
  SplitRng obf_rng = rng.substream("obfuscate-passive");
  obfuscate_passive(flipped.circuit, c, trace, model, obf_rng);

  ConstructResult res;
  res.crgc.circuit = std::move(flipped.circuit);
  res.crgc.a_prime = std::move(flipped.a_prime);
  res.crgc.meta.threat_model = model;
  uint64_t commit_state = seed ^ 0xc2b2ae3d27d4eb4fULL;
  res.crgc.meta.seed_commitment = splitmix64(commit_state);
  res.trace = std::move(trace);
  return res;
}

}  // namespace

ConstructResult construct_crgc(const Circuit& c, const BitVector& a, uint64_t seed,
                               ThreatModel model) {
  return construct_core(c, BitVector(), a, seed, model);
}

ConstructResult chain_obfuscate(const Crgc& prev, const BitVector& own_input, uint64_t seed) {
  const uint32_t forwarded = prev.circuit.n_generator_inputs;
  if (prev.a_prime.size() != forwarded)
    throw CircuitError("wire-block mismatch: a' does not cover the declared generator block");
  if (own_input.size() > prev.circuit.n_evaluator_inputs)
    throw CircuitError("wire-block mismatch: own input exceeds remaining evaluator wires");

  Circuit c2 = prev.circuit;
  c2.n_generator_inputs = forwarded + static_cast<uint32_t>(own_input.size());
  c2.n_evaluator_inputs = prev.circuit.n_evaluator_inputs -
                          static_cast<uint32_t>(own_input.size());
  return construct_core(c2, prev.a_prime, own_input, seed, prev.meta.threat_model);
}

}  // namespace crgc
