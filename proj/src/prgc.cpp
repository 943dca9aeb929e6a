#include "crgc/prgc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace crgc {

uint64_t circuit_content_hash(const Circuit& c) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(c.n_generator_inputs);
  mix(c.n_evaluator_inputs);
  mix(c.gates.size());
  for (const Gate& g : c.gates) {
    mix(g.left);
    mix(g.right);
    mix((static_cast<uint64_t>(g.out) << 8) | g.table.raw());
  }
  mix(c.output_wires.size());
  for (WireId w : c.output_wires) mix(w);
  return h;
}

bool classify_io_gate(uint32_t gate_index, const Circuit& cprime, const ObfuscationTrace& trace,
                      const std::vector<uint32_t>& wire_levels, ThreatModel model) {
  const Gate& g = cprime.gates[gate_index];
  if (g.table.is_balanced()) return true;
  if (wire_levels[g.out] == 1) return true;
  if (!trace.obfuscatable.empty() && trace.obfuscatable[gate_index]) {
    if (model == ThreatModel::circuit_hidden) return true;
    // circuit_known: a passive AND/OR-family gate is only safe when the
    // replacement rule admitted it (q <= 1).
    const bool core = gate_index < trace.passive_prob.size() &&
                      trace.passive_prob[gate_index] >= 0.0;
    if (core && !trace.replacement_admitted[gate_index]) return false;
    return true;
  }
  return false;
}

ReplacementProbability replacement_probability(uint32_t gate_index,
                                               const PassivityProfile& profile) {
  ReplacementProbability r;
  r.p = profile.p[gate_index];
  r.exact = profile.exact;
  r.std_error = profile.exact ? 0.0 : profile.std_error[gate_index];
  r.samples = profile.samples;
  if (r.p <= 0.0) {
    r.q = 0.0;
    r.overflow = true;
    return r;
  }
  r.q = 1.0 / (2.0 * r.p);
  // Conservative: the 3-sigma lower bound on p must still keep q <= 1.
  r.overflow = (r.p - 3.0 * r.std_error) < 0.5;
  return r;
}

ReplacementProbability replacement_probability(uint32_t gate_index, const Circuit& original,
                                               uint32_t exact_limit, uint32_t mc_samples,
                                               uint64_t sample_seed) {
  return replacement_probability(
      gate_index, passivity_profile(original, exact_limit, mc_samples, SplitRng(sample_seed)));
}

namespace {

struct UnionFind {
  std::vector<uint32_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(uint32_t a, uint32_t b) { parent[find(a)] = find(b); }
};

std::vector<std::vector<uint32_t>> consumer_map(const Circuit& c) {
  std::vector<std::vector<uint32_t>> consumers(c.n_wires());
  for (uint32_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    consumers[g.left].push_back(i);
    if (g.right != g.left) consumers[g.right].push_back(i);
  }
  return consumers;
}

}  // namespace

SectionPlan partition(const Circuit& cprime, const ObfuscationTrace& trace, ThreatModel model,
                      bool one_section) {
  const uint32_t n = static_cast<uint32_t>(cprime.gates.size());
  const auto lvl = levels(cprime);
  const auto out_wire = output_wire_mask(cprime);
  const auto producer = producer_map(cprime);
  const auto consumers = consumer_map(cprime);

  std::vector<uint8_t> in_section(n, 0);
  for (uint32_t i = 0; i < n; ++i)
    in_section[i] = !classify_io_gate(i, cprime, trace, lvl, model);

  UnionFind uf(n);
  {
    // Gates sharing any wire land in one section.
    std::vector<int64_t> last(cprime.n_wires(), -1);
    int64_t first_sectioned = -1;
    for (uint32_t i = 0; i < n; ++i) {
      if (!in_section[i]) continue;
      if (one_section) {
        if (first_sectioned < 0) first_sectioned = i;
        else uf.unite(static_cast<uint32_t>(first_sectioned), i);
      }
      const Gate& g = cprime.gates[i];
      for (WireId w : {g.left, g.right, g.out}) {
        if (last[w] >= 0) uf.unite(static_cast<uint32_t>(last[w]), i);
        last[w] = i;
      }
    }
  }

  auto absorb = [&](uint32_t gate, uint32_t into) {
    in_section[gate] = 1;
    uf.unite(gate, into);
  };

  bool changed = true;
  while (changed) {
    changed = false;

    // Extension: a section output gate must be balanced or a final output;
    // otherwise its consumers join the section.
    for (uint32_t i = 0; i < n; ++i) {
      if (!in_section[i]) continue;
      const Gate& g = cprime.gates[i];
      if (g.table.is_balanced() || out_wire[g.out]) continue;
      for (uint32_t c : consumers[g.out]) {
        if (!in_section[c] || uf.find(c) != uf.find(i)) {
          absorb(c, i);
          changed = true;
        }
      }
    }

    // Convexity: any gate on a path leaving and re-entering one section is
    // absorbed, so each section can run atomically.
    std::map<uint32_t, std::vector<uint32_t>> groups;
    for (uint32_t i = 0; i < n; ++i)
      if (in_section[i]) groups[uf.find(i)].push_back(i);
    for (auto& [root, members] : groups) {
      std::vector<uint8_t> fwd(n, 0), bwd(n, 0), inside(n, 0);
      for (uint32_t m : members) inside[m] = 1;
      // forward reachability from the section
      for (uint32_t i = 0; i < n; ++i) {
        if (inside[i]) continue;
        const Gate& g = cprime.gates[i];
        auto from = [&](WireId w) {
          int32_t p = producer[w];
          return p >= 0 && (inside[p] || fwd[p]);
        };
        fwd[i] = from(g.left) || from(g.right);
      }
      // backward reachability into the section
      for (int32_t i = static_cast<int32_t>(n) - 1; i >= 0; --i) {
        if (inside[i]) continue;
        const Gate& g = cprime.gates[i];
        for (uint32_t c : consumers[g.out]) {
          if (inside[c] || bwd[c]) {
            bwd[i] = 1;
            break;
          }
        }
      }
      for (uint32_t i = 0; i < n; ++i) {
        if (!inside[i] && fwd[i] && bwd[i]) {
          absorb(i, root);
          changed = true;
        }
      }
    }
  }

  SectionPlan plan;
  plan.reusable.assign(n, 1);
  plan.gate_section.assign(n, SectionPlan::kNoSection);

  // Deterministic section ids: ascending first gate index.
  std::map<uint32_t, std::vector<uint32_t>> groups;
  for (uint32_t i = 0; i < n; ++i) {
    if (in_section[i]) {
      plan.reusable[i] = 0;
      groups[uf.find(i)].push_back(i);
    }
  }
  std::vector<std::vector<uint32_t>> ordered;
  for (auto& [root, members] : groups) ordered.push_back(members);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  for (uint32_t sid = 0; sid < ordered.size(); ++sid) {
    NonReusableSection s;
    s.gates = ordered[sid];
    for (uint32_t gi : s.gates) plan.gate_section[gi] = sid;
    std::set<WireId> distinct;
    for (uint32_t gi : s.gates) {
      const Gate& g = cprime.gates[gi];
      for (WireId w : {g.left, g.right}) {
        int32_t p = producer[w];
        const bool internal = p >= 0 && plan.gate_section[static_cast<uint32_t>(p)] ==
                                            plan.gate_section[gi];
        if (internal) continue;
        s.input_uses.push_back(w);
        if (distinct.insert(w).second) s.input_wires.push_back(w);
      }
      bool exits = out_wire[g.out] != 0;
      for (uint32_t c : consumers[g.out])
        exits = exits || plan.gate_section[c] != sid;
      if (exits) {
        s.output_wires.push_back(g.out);
        s.output_gates.push_back(gi);
      }
    }
    plan.sections.push_back(std::move(s));
  }

  // Execution schedule over units (reusable gates and whole sections).
  {
    const uint32_t n_units = n + static_cast<uint32_t>(plan.sections.size());
    auto unit_of = [&](uint32_t gate) {
      return plan.gate_section[gate] == SectionPlan::kNoSection ? gate
                                                                : n + plan.gate_section[gate];
    };
    std::vector<uint32_t> indegree(n_units, 0);
    std::vector<std::vector<uint32_t>> succ(n_units);
    for (uint32_t i = 0; i < n; ++i) {
      const Gate& g = cprime.gates[i];
      for (WireId w : {g.left, g.right}) {
        int32_t p = producer[w];
        if (p < 0) continue;
        uint32_t from = unit_of(static_cast<uint32_t>(p)), to = unit_of(i);
        if (from == to) continue;
        succ[from].push_back(to);
        indegree[to]++;
      }
    }
    std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
    auto enabled = [&](uint32_t u) { ready.push(u); };
    for (uint32_t u = 0; u < n_units; ++u) {
      bool exists = u < n ? plan.gate_section[u] == SectionPlan::kNoSection : true;
      if (exists && indegree[u] == 0) enabled(u);
    }
    while (!ready.empty()) {
      uint32_t u = ready.top();
      ready.pop();
      if (u < n) plan.schedule.push_back({0, u});
      else plan.schedule.push_back({1, u - n});
      for (uint32_t v : succ[u])
        if (--indegree[v] == 0) enabled(v);
    }
  }

  if (!trace.replacement_admitted.empty()) {
    for (uint32_t i = 0; i < n; ++i)
      if (trace.replacement_admitted[i])
        plan.admitted_p.emplace_back(i, trace.passive_prob[i]);
  }

  plan.circuit_hash = circuit_content_hash(redact_sections(cprime, plan));
  validate_plan(cprime, plan);
  return plan;
}

Circuit redact_sections(const Circuit& cprime, const SectionPlan& plan) {
  Circuit pub = cprime;
  for (uint32_t i = 0; i < pub.gates.size(); ++i)
    if (plan.gate_section[i] != SectionPlan::kNoSection) pub.gates[i].table = TruthTable(0);
  return pub;
}

void validate_plan(const Circuit& cprime, const SectionPlan& plan) {
  const uint32_t n = static_cast<uint32_t>(cprime.gates.size());
  auto fail = [](const std::string& what) { throw ProtocolError("invalid plan: " + what); };
  if (plan.reusable.size() != n || plan.gate_section.size() != n) fail("size mismatch");

  const auto out_wire = output_wire_mask(cprime);
  const auto producer = producer_map(cprime);
  std::vector<uint8_t> covered(n, 0);
  for (uint32_t sid = 0; sid < plan.sections.size(); ++sid) {
    const auto& s = plan.sections[sid];
    if (s.gates.empty()) fail("empty section");
    for (size_t k = 0; k < s.gates.size(); ++k) {
      uint32_t gi = s.gates[k];
      if (gi >= n || covered[gi] || plan.gate_section[gi] != sid || plan.reusable[gi])
        fail("coverage");
      if (k > 0 && s.gates[k - 1] >= gi) fail("section gates not ascending");
      covered[gi] = 1;
    }
    for (WireId w : s.input_wires) {
      int32_t p = producer[w];
      if (p >= 0 && plan.gate_section[static_cast<uint32_t>(p)] == sid)
        fail("section input produced inside");
    }
    for (size_t k = 0; k < s.output_gates.size(); ++k) {
      uint32_t gi = s.output_gates[k];
      if (cprime.gates[gi].out != s.output_wires[k]) fail("output wire/gate mismatch");
      if (!cprime.gates[gi].table.is_balanced() && !out_wire[cprime.gates[gi].out])
        fail("section output gate neither balanced nor final");
    }
  }
  for (uint32_t i = 0; i < n; ++i) {
    if (plan.reusable[i] != (plan.gate_section[i] == SectionPlan::kNoSection ? 1 : 0))
      fail("reusable flag inconsistent");
    if (!plan.reusable[i] && !covered[i]) fail("sectioned gate in no section");
  }

  // Convexity: no outside gate lies on a section-to-same-section path.
  const auto consumers = consumer_map(cprime);
  for (uint32_t sid = 0; sid < plan.sections.size(); ++sid) {
    std::vector<uint8_t> fwd(n, 0), bwd(n, 0);
    for (uint32_t i = 0; i < n; ++i) {
      if (plan.gate_section[i] == sid) continue;
      const Gate& g = cprime.gates[i];
      auto from = [&](WireId w) {
        int32_t p = producer[w];
        return p >= 0 && (plan.gate_section[static_cast<uint32_t>(p)] == sid ||
                          fwd[static_cast<uint32_t>(p)]);
      };
      fwd[i] = from(g.left) || from(g.right);
    }
    for (int32_t i = static_cast<int32_t>(n) - 1; i >= 0; --i) {
      if (plan.gate_section[i] == sid) continue;
      for (uint32_t c : consumers[cprime.gates[i].out])
        if (plan.gate_section[c] == sid || bwd[c]) {
          bwd[i] = 1;
          break;
        }
    }
    for (uint32_t i = 0; i < n; ++i)
      if (plan.gate_section[i] != sid && fwd[i] && bwd[i]) fail("section not convex");
  }

  // Schedule: a valid topological order over units.
  {
    std::vector<uint8_t> done_gate(n, 0);
    std::vector<uint8_t> done_section(plan.sections.size(), 0);
    auto wire_ready = [&](WireId w) {
      int32_t p = producer[w];
      return p < 0 || done_gate[static_cast<uint32_t>(p)];
    };
    for (const auto& step : plan.schedule) {
      if (!step.is_section) {
        uint32_t gi = step.index;
        if (gi >= n || done_gate[gi] || !plan.reusable[gi]) fail("schedule gate step");
        if (!wire_ready(cprime.gates[gi].left) || !wire_ready(cprime.gates[gi].right))
          fail("schedule ordering");
        done_gate[gi] = 1;
      } else {
        if (step.index >= plan.sections.size() || done_section[step.index])
          fail("schedule section step");
        const auto& s = plan.sections[step.index];
        for (WireId w : s.input_uses)
          if (!wire_ready(w)) fail("schedule ordering (section)");
        for (uint32_t gi : s.gates) done_gate[gi] = 1;
        done_section[step.index] = 1;
      }
    }
    for (uint32_t i = 0; i < n; ++i)
      if (!done_gate[i]) fail("schedule incomplete");
  }
}

// ---- garbling ----

namespace {

std::pair<Label, Label> fresh_pair(SplitRng& rng) {
  Label l0 = Label::random(rng);
  Label l1 = Label::random(rng);
  l1.lo = (l1.lo & ~1ull) | ((~l0.lo) & 1ull);  // complementary permute bits
  return {l0, l1};
}

std::vector<uint8_t> label_bytes(const Label& l) {
  std::vector<uint8_t> b(16);
  for (int i = 0; i < 8; ++i) b[i] = (l.lo >> (8 * i)) & 0xff;
  for (int i = 0; i < 8; ++i) b[8 + i] = (l.hi >> (8 * i)) & 0xff;
  return b;
}

Label label_from_bytes(const std::vector<uint8_t>& b) {
  Label l;
  for (int i = 0; i < 8; ++i) l.lo |= static_cast<uint64_t>(b[i]) << (8 * i);
  for (int i = 0; i < 8; ++i) l.hi |= static_cast<uint64_t>(b[8 + i]) << (8 * i);
  return l;
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

}  // namespace

GarbledSection garble_section(const NonReusableSection& s, const Circuit& cprime,
                              uint64_t eval_index, SplitRng& rng) {
  GarbledSection gs;
  gs.eval_index = eval_index;

  std::map<WireId, std::pair<Label, Label>> pairs;
  for (WireId w : s.input_wires) {
    auto p = fresh_pair(rng);
    pairs[w] = p;
    gs.input_labels.push_back(p);
    gs.all_labels.push_back(p.first);
    gs.all_labels.push_back(p.second);
  }
  for (uint32_t gi : s.gates) {
    auto p = fresh_pair(rng);
    pairs[cprime.gates[gi].out] = p;
    gs.all_labels.push_back(p.first);
    gs.all_labels.push_back(p.second);
  }

  for (size_t k = 0; k < s.gates.size(); ++k) {
    const Gate& g = cprime.gates[s.gates[k]];
    const auto& pl = pairs.at(g.left);
    const auto& pr = pairs.at(g.right);
    const auto& po = pairs.at(g.out);
    GarbledGate gg;
    for (int du = 0; du < 2; ++du) {
      for (int dv = 0; dv < 2; ++dv) {
        const Label& ku = du ? pl.second : pl.first;
        const Label& kv = dv ? pr.second : pr.first;
        const uint8_t ov = g.table.entry(du, dv);
        const Label& ko = ov ? po.second : po.first;
        const int row = (static_cast<int>(ku.permute_bit()) << 1) |
                        static_cast<int>(kv.permute_bit());
        const uint64_t tweak = (static_cast<uint64_t>(k) << 2) | static_cast<uint64_t>(row);
        auto ks = row_keystream(ku, kv, tweak);
        // The tag binds the output label and the row position, so flipping
        // any ciphertext byte fails authentication.
        const uint64_t tag = siphash24(ko.lo, ko.hi, tweak);
        gg.rows[row] = {ks[0] ^ ko.lo, ks[1] ^ ko.hi, ks[2] ^ tag};
      }
    }
    gs.gates.push_back(gg);
  }

  for (WireId w : s.output_wires) {
    const auto& pw = pairs.at(w);
    const uint8_t flip = rng.next_bit();
    gs.refresh_flips.push_back(flip);
    std::array<uint8_t, 2> d{};
    d[pw.first.permute_bit() ? 1 : 0] = flip;
    d[pw.second.permute_bit() ? 1 : 0] = 1 ^ flip;
    gs.decode.push_back(d);
  }
  return gs;
}

std::vector<uint8_t> encode_garbled_section(const GarbledSection& gs) {
  std::vector<uint8_t> out;
  put_u32(out, gs.section);
  put_u64(out, gs.eval_index);
  put_u32(out, static_cast<uint32_t>(gs.gates.size()));
  for (const GarbledGate& g : gs.gates)
    for (const auto& row : g.rows)
      for (uint64_t wrd : row) put_u64(out, wrd);
  put_u32(out, static_cast<uint32_t>(gs.decode.size()));
  for (const auto& d : gs.decode) {
    out.push_back(d[0]);
    out.push_back(d[1]);
  }
  return out;
}

GarbledSectionView decode_garbled_section(const std::vector<uint8_t>& bytes) {
  size_t pos = 0;
  auto need = [&](size_t k) {
    if (pos + k > bytes.size()) throw ProtocolError("garbled section truncated");
  };
  auto get_u32 = [&]() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[pos++]) << (8 * i);
    return v;
  };
  auto get_u64 = [&]() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[pos++]) << (8 * i);
    return v;
  };
  GarbledSectionView view;
  view.section = get_u32();
  view.eval_index = get_u64();
  const uint32_t n_gates = get_u32();
  if (n_gates > (bytes.size() - pos) / sizeof(GarbledGate))
    throw ProtocolError("garbled section truncated");
  view.gates.resize(n_gates);
  for (uint32_t i = 0; i < n_gates; ++i)
    for (auto& row : view.gates[i].rows)
      for (uint64_t& wrd : row) wrd = get_u64();
  const uint32_t n_out = get_u32();
  if (n_out > (bytes.size() - pos) / 2) throw ProtocolError("garbled section truncated");
  view.decode.resize(n_out);
  for (uint32_t i = 0; i < n_out; ++i) {
    need(2);
    view.decode[i][0] = bytes[pos++] & 1;
    view.decode[i][1] = bytes[pos++] & 1;
  }
  if (pos != bytes.size()) throw ProtocolError("garbled section has trailing bytes");
  return view;
}

std::vector<uint8_t> evaluate_garbled_section(const GarbledSectionView& view,
                                              const NonReusableSection& s,
                                              const Circuit& circuit,
                                              const std::vector<Label>& labels_per_use) {
  if (view.gates.size() != s.gates.size() || view.decode.size() != s.output_wires.size())
    throw ProtocolError("garbled section does not match the plan");
  if (labels_per_use.size() != s.input_uses.size())
    throw ProtocolError("input label count does not match the plan");

  std::map<WireId, Label> labels;
  for (size_t i = 0; i < s.input_uses.size(); ++i) {
    auto [it, inserted] = labels.emplace(s.input_uses[i], labels_per_use[i]);
    if (!inserted && !(it->second == labels_per_use[i]))
      throw ProtocolError("inconsistent labels for one input wire");
  }

  for (size_t k = 0; k < s.gates.size(); ++k) {
    const Gate& g = circuit.gates[s.gates[k]];
    const Label ku = labels.at(g.left);
    const Label kv = labels.at(g.right);
    const int row = (static_cast<int>(ku.permute_bit()) << 1) |
                    static_cast<int>(kv.permute_bit());
    const uint64_t tweak = (static_cast<uint64_t>(k) << 2) | static_cast<uint64_t>(row);
    auto ks = row_keystream(ku, kv, tweak);
    const auto& ct = view.gates[k].rows[row];
    const Label lab{ct[0] ^ ks[0], ct[1] ^ ks[1]};
    if ((ct[2] ^ ks[2]) != siphash24(lab.lo, lab.hi, tweak))
      throw ProtocolError("garbled row failed authentication");
    labels[g.out] = lab;
  }

  std::vector<uint8_t> out;
  for (size_t i = 0; i < s.output_wires.size(); ++i) {
    const Label l = labels.at(s.output_wires[i]);
    out.push_back(view.decode[i][l.permute_bit() ? 1 : 0]);
  }
  return out;
}

// ---- in-process generator ----

InProcessGenerator::InProcessGenerator(Crgc crgc, SectionPlan plan, uint64_t seed,
                                       std::unique_ptr<OtEndpoint> ot)
    : crgc_(std::move(crgc)),
      plan_(std::move(plan)),
      rng_(SplitRng(seed).substream("prgc-generator")),
      ot_(ot ? std::move(ot) : std::make_unique<IdealOt>()) {
  if (plan_.circuit_hash != circuit_content_hash(redact_sections(crgc_.circuit, plan_)))
    throw ProtocolError("plan does not match circuit");
}

void InProcessGenerator::begin_eval() {
  ++eval_count_;
  bytes_eval_ = 0;
  section_ot_done_.assign(plan_.sections.size(), 0);
  current_.clear();

  SplitRng eval_rng = rng_.substream(eval_count_);
  for (uint32_t sid = 0; sid < plan_.sections.size(); ++sid) {
    SplitRng srng = eval_rng.substream(sid);
    GarbledSection gs = garble_section(plan_.sections[sid], crgc_.circuit, eval_count_, srng);
    gs.section = sid;
    label_log_.insert(label_log_.end(), gs.all_labels.begin(), gs.all_labels.end());
    current_.push_back(std::move(gs));
  }

  // Refresh-flip parities: section outputs carry this evaluation's fresh
  // flips; balanced reusable gates propagate them, passthroughs forward one
  // side, everything else on a live path is level-1 or passive.
  parity_.assign(crgc_.circuit.n_wires(), 0);
  for (const auto& gs : current_) {
    const auto& s = plan_.sections[gs.section];
    for (size_t k = 0; k < s.output_wires.size(); ++k)
      parity_[s.output_wires[k]] = gs.refresh_flips[k];
  }
  for (uint32_t i = 0; i < crgc_.circuit.gates.size(); ++i) {
    if (!plan_.reusable[i]) continue;
    const Gate& g = crgc_.circuit.gates[i];
    const TruthTable t = g.table;
    if (t.is_balanced()) parity_[g.out] = parity_[g.left] ^ parity_[g.right];
    else if (t.is_left_passthrough()) parity_[g.out] = parity_[g.left];
    else if (t.is_right_passthrough()) parity_[g.out] = parity_[g.right];
    else parity_[g.out] = 0;
  }
}

std::vector<std::vector<uint8_t>> InProcessGenerator::fetch_garbled_sections() {
  if (eval_count_ == 0) throw ProtocolError("begin_eval not called");
  std::vector<std::vector<uint8_t>> out;
  for (const auto& gs : current_) {
    out.push_back(encode_garbled_section(gs));
    bytes_eval_ += out.back().size();
  }
  return out;
}

std::vector<Label> InProcessGenerator::ot_section_inputs(uint32_t section,
                                                         const std::vector<uint8_t>& choices) {
  if (eval_count_ == 0) throw ProtocolError("begin_eval not called");
  if (section >= plan_.sections.size()) throw ProtocolError("unknown section");
  if (section_ot_done_[section]) throw ProtocolError("section inputs already transferred");
  const auto& s = plan_.sections[section];
  if (choices.size() != s.input_uses.size()) throw ProtocolError("choice count mismatch");

  std::map<WireId, size_t> wire_index;
  for (size_t i = 0; i < s.input_wires.size(); ++i) wire_index[s.input_wires[i]] = i;

  std::vector<Label> out;
  for (size_t i = 0; i < s.input_uses.size(); ++i) {
    const WireId w = s.input_uses[i];
    const auto& pair = current_[section].input_labels[wire_index.at(w)];
    const uint8_t rho = parity_[w];
    // Message order absorbs the accumulated refresh parity: the evaluator's
    // held (refreshed) bit selects the label for the underlying value.
    const Label& m0 = rho ? pair.second : pair.first;
    const Label& m1 = rho ? pair.first : pair.second;
    auto res = ot_->transfer(label_bytes(m0), label_bytes(m1), choices[i] & 1);
    ++ot_count_;
    bytes_eval_ += 16;
    out.push_back(label_from_bytes(res));
  }
  section_ot_done_[section] = 1;
  return out;
}

BitVector InProcessGenerator::ot_outputs(const BitVector& delivered) {
  if (eval_count_ == 0) throw ProtocolError("begin_eval not called");
  for (uint8_t done : section_ot_done_)
    if (!done) throw ProtocolError("output transfer before all sections ran");
  if (delivered.size() != crgc_.circuit.output_wires.size())
    throw ProtocolError("output arity mismatch");
  BitVector out(delivered.size());
  for (size_t k = 0; k < delivered.size(); ++k) {
    const uint8_t rho = parity_[crgc_.circuit.output_wires[k]];
    auto res = ot_->transfer({rho}, {static_cast<uint8_t>(1 ^ rho)}, delivered[k] & 1);
    ++ot_count_;
    bytes_eval_ += 1;
    out[k] = res[0] & 1;
  }
  return out;
}

// ---- evaluator ----

BitVector evaluate_prgc(const SectionPlan& plan, const Circuit& circuit,
                        const BitVector& a_prime, GeneratorSide& generator,
                        const BitVector& b) {
  if (plan.circuit_hash != circuit_content_hash(redact_sections(circuit, plan)))
    throw ProtocolError("plan does not match circuit");
  if (a_prime.size() != circuit.n_generator_inputs || b.size() != circuit.n_evaluator_inputs)
    throw ProtocolError("input arity mismatch");

  std::vector<uint8_t> values(circuit.n_wires(), 0);
  for (size_t i = 0; i < a_prime.size(); ++i) values[i] = a_prime[i];
  for (size_t i = 0; i < b.size(); ++i) values[circuit.n_generator_inputs + i] = b[i];

  generator.begin_eval();
  auto encoded = generator.fetch_garbled_sections();
  if (encoded.size() != plan.sections.size())
    throw ProtocolError("garbled section count mismatch");

  for (const auto& step : plan.schedule) {
    if (!step.is_section) {
      const Gate& g = circuit.gates[step.index];
      values[g.out] = g.table.entry(values[g.left], values[g.right]);
      continue;
    }
    const auto& s = plan.sections[step.index];
    GarbledSectionView view = decode_garbled_section(encoded[step.index]);
    std::vector<uint8_t> choices;
    choices.reserve(s.input_uses.size());
    for (WireId w : s.input_uses) choices.push_back(values[w]);
    auto labels = generator.ot_section_inputs(step.index, choices);
    auto bits = evaluate_garbled_section(view, s, circuit, labels);
    for (size_t k = 0; k < s.output_wires.size(); ++k) values[s.output_wires[k]] = bits[k];
  }

  BitVector delivered(circuit.output_wires.size());
  for (size_t k = 0; k < circuit.output_wires.size(); ++k)
    delivered[k] = values[circuit.output_wires[k]];
  return generator.ot_outputs(delivered);
}

BitVector evaluate_prgc(const SectionPlan& plan, const Crgc& crgc, GeneratorSide& generator,
                        const BitVector& b) {
  return evaluate_prgc(plan, crgc.circuit, crgc.a_prime, generator, b);
}

}  // namespace crgc
