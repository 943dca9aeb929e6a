#include "crgc/builders.hpp"

#include <stdexcept>
#include <vector>

#include "crgc/rng.hpp"

namespace crgc {

namespace {

std::vector<WireId> input_range(uint32_t start, uint32_t count) {
  std::vector<WireId> ws(count);
  for (uint32_t i = 0; i < count; ++i) ws[i] = start + i;
  return ws;
}

Circuit build_adder(uint32_t w) {
  CircuitBuilder b(w, w);
  std::vector<WireId> sum(w);
  WireId carry = 0;
  for (uint32_t i = 0; i < w; ++i) {
    WireId ai = i, bi = w + i;
    WireId t = b.lxor(ai, bi);
    if (i == 0) {
      sum[i] = t;
      carry = b.land(ai, bi);
    } else {
      sum[i] = b.lxor(t, carry);
      if (i + 1 < w) {
        WireId u = b.land(ai, bi);
        WireId v = b.land(t, carry);
        carry = b.lor(u, v);
      }
    }
  }
  return b.finish(sum);
}

Circuit build_subtract(uint32_t w) {
  CircuitBuilder b(w, w);
  std::vector<WireId> diff(w);
  WireId borrow = 0;
  for (uint32_t i = 0; i < w; ++i) {
    WireId ai = i, bi = w + i;
    WireId t = b.lxor(ai, bi);
    if (i == 0) {
      diff[i] = t;
      borrow = b.andn_left(ai, bi);
    } else {
      diff[i] = b.lxor(t, borrow);
      if (i + 1 < w) {
        WireId u = b.andn_left(ai, bi);           // !a & b
        WireId v = b.andn_right(borrow, t);       // borrow & !(a^b)
        borrow = b.lor(u, v);
      }
    }
  }
  return b.finish(diff);
}

// Low w bits of the schoolbook product.
Circuit build_multiplier(uint32_t w) {
  CircuitBuilder b(w, w);
  std::vector<WireId> acc(w);
  for (uint32_t j = 0; j < w; ++j) acc[j] = b.land(0, w + j);  // a0 & b_j
  for (uint32_t i = 1; i < w; ++i) {
    // Add row i (a_i & b_j for j < w - i) into acc starting at bit i.
    WireId carry = 0;
    for (uint32_t j = 0; j + i < w; ++j) {
      WireId pp = b.land(i, w + j);
      uint32_t k = i + j;
      WireId t = b.lxor(acc[k], pp);
      if (j == 0) {
        carry = b.land(acc[k], pp);
        acc[k] = t;
      } else {
        WireId s = b.lxor(t, carry);
        if (j + i + 1 < w) {
          WireId u = b.land(acc[k], pp);
          WireId v = b.land(t, carry);
          carry = b.lor(u, v);
        }
        acc[k] = s;
      }
    }
  }
  return b.finish(acc);
}

// One output bit: a > b, unsigned.
Circuit build_comparator(uint32_t w) {
  CircuitBuilder b(w, w);
  uint32_t msb = w - 1;
  WireId gt = b.andn_right(msb, w + msb);  // a_msb & !b_msb
  if (w == 1) return b.finish({gt});
  WireId eq = b.lxnor(msb, w + msb);
  for (int i = static_cast<int>(w) - 2; i >= 0; --i) {
    WireId gi = b.andn_right(static_cast<WireId>(i), w + static_cast<WireId>(i));
    WireId g = b.land(eq, gi);
    gt = b.lor(gt, g);
    if (i > 0) eq = b.land(eq, b.lxnor(static_cast<WireId>(i), w + static_cast<WireId>(i)));
  }
  return b.finish({gt});
}

// Inputs: s, x[0..w), y[0..w); out = s ? x : y.
Circuit build_mux(uint32_t w, uint32_t n_a) {
  CircuitBuilder b(n_a, 2 * w + 1 - n_a);
  std::vector<WireId> out(w);
  for (uint32_t i = 0; i < w; ++i) out[i] = b.mux(0, 1 + i, 1 + w + i);
  return b.finish(out);
}

// x == y via a zero test of the difference bits. The difference bits fold
// through a prefix-xor chain first (all prefixes zero iff all bits zero), so
// no x-bit sits within one balanced gate of the imbalanced zero-test tree and
// the generator's list survives leakage prediction intact.
WireId equals_block(CircuitBuilder& b, const std::vector<WireId>& xs,
                    const std::vector<WireId>& ys, WireId const0) {
  std::vector<WireId> prefix(xs.size());
  WireId prev = const0;
  for (size_t j = 0; j < xs.size(); ++j) {
    WireId d = b.lxor(xs[j], ys[j]);
    prefix[j] = b.lxor(d, prev);
    prev = prefix[j];
  }
  WireId any = prefix[0];
  for (size_t j = 1; j < prefix.size(); ++j) any = b.lor(any, prefix[j]);
  return b.lnot(any);
}

// Generator: n elements of w bits. Evaluator: one w-bit key. Output: 1 bit.
Circuit build_linear_query(uint32_t n, uint32_t w) {
  CircuitBuilder b(n * w, w);
  auto key = input_range(n * w, w);
  WireId const0 = b.lxor(key[0], key[0]);
  WireId hit = 0;
  for (uint32_t k = 0; k < n; ++k) {
    WireId eq = equals_block(b, input_range(k * w, w), key, const0);
    hit = (k == 0) ? eq : b.lor(hit, eq);
  }
  return b.finish({hit});
}

uint32_t index_width(uint32_t n) {
  uint32_t w = 1;
  while ((1u << w) < n) ++w;
  return w;
}

// state_gt' over constant comparisons: k is a compile-time constant, so each
// step folds the constant bit into the table choice.
WireId const_greater(CircuitBuilder& b, uint32_t k, const std::vector<WireId>& idx,
                     WireId const0) {
  // Returns wire for (k > idx), unsigned, idx given LSB-first.
  if ((idx.size() < 32 ? (k >> idx.size()) : 0) != 0)
    return b.gate(const0, const0, tables::NOT_LEFT);  // k exceeds idx range
  WireId gt = const0;
  WireId eq = 0;  // sentinel; tracked via has_eq
  bool has_eq = false;
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    uint32_t kb = (k >> i) & 1;
    WireId bit = idx[static_cast<size_t>(i)];
    WireId gt_here = kb ? b.gate(bit, bit, tables::NOT_LEFT) : const0;  // kb & !bit
    WireId eq_here = kb ? bit : b.gate(bit, bit, tables::NOT_LEFT);
    if (!has_eq) {
      gt = gt_here;
      eq = eq_here;
      has_eq = true;
    } else {
      gt = b.lor(gt, b.land(eq, gt_here));
      if (i > 0) eq = b.land(eq, eq_here);
    }
  }
  return gt;
}

// Generator: n elements of w bits. Evaluator: lo and hi indices. Output: max
// of elements in [lo, hi], all-zero when the range is empty.
Circuit build_range_max(uint32_t n, uint32_t w) {
  uint32_t iw = index_width(n);
  CircuitBuilder b(n * w, 2 * iw);
  auto lo = input_range(n * w, iw);
  auto hi = input_range(n * w + iw, iw);
  WireId const0 = b.lxor(0, 0);

  std::vector<WireId> best(w, const0);
  bool have_best = false;
  for (uint32_t k = 0; k < n; ++k) {
    WireId ge_lo = const_greater(b, k + 1, lo, const0);  // k+1 > lo  <=>  k >= lo
    WireId gt_hi = const_greater(b, k, hi, const0);
    WireId le_hi = b.gate(gt_hi, gt_hi, tables::NOT_LEFT);
    WireId in_range = b.land(ge_lo, le_hi);

    auto elem = input_range(k * w, w);
    if (!have_best) {
      for (uint32_t j = 0; j < w; ++j) best[j] = b.land(in_range, elem[j]);
      have_best = true;
    } else {
      // greater = elem > best
      WireId gt = b.andn_right(elem[w - 1], best[w - 1]);
      if (w > 1) {
        WireId eq = b.lxnor(elem[w - 1], best[w - 1]);
        for (int i = static_cast<int>(w) - 2; i >= 0; --i) {
          WireId gi = b.andn_right(elem[static_cast<size_t>(i)], best[static_cast<size_t>(i)]);
          gt = b.lor(gt, b.land(eq, gi));
          if (i > 0) eq = b.land(eq, b.lxnor(elem[static_cast<size_t>(i)],
                                             best[static_cast<size_t>(i)]));
        }
      }
      WireId take = b.land(in_range, gt);
      for (uint32_t j = 0; j < w; ++j) best[j] = b.mux(take, elem[j], best[j]);
    }
  }
  return b.finish(best);
}

// Generator: n_a elements. Evaluator: n_b elements. Output bit j: evaluator
// element j occurs in the generator's list.
Circuit build_set_intersection(uint32_t n_a, uint32_t n_b, uint32_t w) {
  CircuitBuilder b(n_a * w, n_b * w);
  WireId const0 = b.lxor(n_a * w, n_a * w);
  std::vector<WireId> out(n_b);
  for (uint32_t j = 0; j < n_b; ++j) {
    auto key = input_range(n_a * w + j * w, w);
    WireId hit = 0;
    for (uint32_t k = 0; k < n_a; ++k) {
      WireId eq = equals_block(b, input_range(k * w, w), key, const0);
      hit = (k == 0) ? eq : b.lor(hit, eq);
    }
    out[j] = hit;
  }
  return b.finish(out);
}

Circuit with_split(Circuit c, std::optional<uint32_t> generator_inputs) {
  if (generator_inputs) {
    uint32_t total = c.n_inputs();
    if (*generator_inputs > total)
      throw std::invalid_argument("generator input split exceeds total inputs");
    c.n_generator_inputs = *generator_inputs;
    c.n_evaluator_inputs = total - *generator_inputs;
  }
  return c;
}

}  // namespace

Circuit build_test_circuit(BuilderKind kind, const BuilderParams& p) {
  const uint32_t w = p.width;
  if (w == 0 || w > 64) throw std::invalid_argument("unsupported width");
  switch (kind) {
    case BuilderKind::adder: return with_split(build_adder(w), p.generator_inputs);
    case BuilderKind::subtract: return with_split(build_subtract(w), p.generator_inputs);
    case BuilderKind::multiplier: return with_split(build_multiplier(w), p.generator_inputs);
    case BuilderKind::comparator: return with_split(build_comparator(w), p.generator_inputs);
    case BuilderKind::mux:
      return build_mux(w, p.generator_inputs.value_or(1 + w));
    case BuilderKind::linear_query:
      if (p.elements == 0) throw std::invalid_argument("unsupported size: zero elements");
      return with_split(build_linear_query(p.elements, w), p.generator_inputs);
    case BuilderKind::range_max:
      if (p.elements == 0) throw std::invalid_argument("unsupported size: zero elements");
      return with_split(build_range_max(p.elements, w), p.generator_inputs);
    case BuilderKind::set_intersection:
      if (p.elements == 0 || p.elements_b == 0)
        throw std::invalid_argument("unsupported size: zero elements");
      return with_split(build_set_intersection(p.elements, p.elements_b, w), p.generator_inputs);
  }
  throw std::invalid_argument("unknown builder kind");
}

BuilderKind builder_kind_from_name(const std::string& name) {
  if (name == "adder") return BuilderKind::adder;
  if (name == "subtract") return BuilderKind::subtract;
  if (name == "multiplier") return BuilderKind::multiplier;
  if (name == "comparator") return BuilderKind::comparator;
  if (name == "mux") return BuilderKind::mux;
  if (name == "linear_query") return BuilderKind::linear_query;
  if (name == "range_max") return BuilderKind::range_max;
  if (name == "set_intersection") return BuilderKind::set_intersection;
  throw std::invalid_argument("unknown builder kind: " + name);
}

const char* builder_kind_name(BuilderKind kind) {
  switch (kind) {
    case BuilderKind::adder: return "adder";
    case BuilderKind::subtract: return "subtract";
    case BuilderKind::multiplier: return "multiplier";
    case BuilderKind::comparator: return "comparator";
    case BuilderKind::mux: return "mux";
    case BuilderKind::linear_query: return "linear_query";
    case BuilderKind::range_max: return "range_max";
    case BuilderKind::set_intersection: return "set_intersection";
  }
  return "?";
}

Circuit random_circuit(uint64_t seed, uint32_t n_gates, uint32_t n_a, uint32_t n_b,
                       uint32_t n_out, int balanced_permille) {
  if (n_a + n_b == 0) throw std::invalid_argument("infeasible parameters: no input wires");
  if (n_out > n_gates) throw std::invalid_argument("infeasible parameters: n_out > n_gates");
  SplitRng rng = SplitRng(seed).substream("random-circuit");
  Circuit c;
  c.n_generator_inputs = n_a;
  c.n_evaluator_inputs = n_b;
  c.gates.reserve(n_gates);
  for (uint32_t i = 0; i < n_gates; ++i) {
    uint32_t pool = n_a + n_b + i;
    Gate g;
    g.left = static_cast<WireId>(rng.next_below(pool));
    g.right = static_cast<WireId>(rng.next_below(pool));
    g.out = pool;
    if (balanced_permille >= 0 && rng.next_below(1000) < static_cast<uint64_t>(balanced_permille))
      g.table = rng.next_bit() ? tables::XOR : tables::XNOR;
    else
      g.table = TruthTable(static_cast<uint8_t>(rng.next_below(16)));
    c.gates.push_back(g);
  }
  for (uint32_t i = n_gates - n_out; i < n_gates; ++i)
    c.output_wires.push_back(c.gates[i].out);
  validate(c);
  return c;
}

}  // namespace crgc
