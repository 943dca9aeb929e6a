#include "crgc/leakage.hpp"

#include <deque>
#include <limits>

#include "crgc/obfuscate.hpp"

namespace crgc {

std::vector<uint8_t> potentially_fixed(const Circuit& c) {
  std::vector<uint8_t> pf(c.n_wires(), 0);
  for (uint32_t i = 0; i < c.n_generator_inputs; ++i) pf[i] = 1;
  for (const Gate& g : c.gates) {
    const TruthTable t = g.table;
    if (t.is_constant()) pf[g.out] = 1;
    else if (t.is_balanced()) pf[g.out] = pf[g.left] && pf[g.right];
    else if (t.is_left_passthrough()) pf[g.out] = pf[g.left];
    else if (t.is_right_passthrough()) pf[g.out] = pf[g.right];
    else pf[g.out] = pf[g.left] || pf[g.right];  // AND/OR family
  }
  return pf;
}

std::vector<uint8_t> potentially_intermediary(const Circuit& c,
                                              const std::vector<uint8_t>& pf) {
  return unreachable_behind_barrier(c, pf);
}

std::vector<uint32_t> potentially_revealing(const Circuit& c, const std::vector<uint8_t>& pf,
                                            const std::vector<uint8_t>& pi) {
  std::vector<uint32_t> out;
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.table.is_balanced()) continue;
    if (pf[g.out] || pi[i]) continue;  // potentially passive
    out.push_back(static_cast<uint32_t>(i));
  }
  return out;
}

std::vector<uint32_t> leaked_inputs(const Circuit& c, const std::vector<uint32_t>& revealing,
                                    std::vector<uint8_t>* via_balanced) {
  constexpr uint32_t kInf = std::numeric_limits<uint32_t>::max();
  std::vector<uint32_t> dist(c.n_wires(), kInf);
  const auto producer = producer_map(c);
  std::deque<WireId> queue;  // 0/1-weight BFS

  auto relax = [&](WireId w, uint32_t d, bool front) {
    if (d < dist[w]) {
      dist[w] = d;
      if (front) queue.push_front(w);
      else queue.push_back(w);
    }
  };

  // A revealing gate exposes the true values of the parents its output
  // actually reads: both for the AND/OR family, only the passed parent for
  // passthrough tables (constants are potentially fixed, never revealing).
  for (uint32_t gi : revealing) {
    const Gate& g = c.gates[gi];
    if (g.table.is_left_passthrough()) {
      relax(g.left, 0, true);
    } else if (g.table.is_right_passthrough()) {
      relax(g.right, 0, true);
    } else {
      relax(g.left, 0, true);
      relax(g.right, 0, true);
    }
  }

  while (!queue.empty()) {
    WireId w = queue.front();
    queue.pop_front();
    int32_t pg = producer[w];
    if (pg < 0) continue;  // input wire
    const Gate& g = c.gates[static_cast<size_t>(pg)];
    const TruthTable t = g.table;
    const uint32_t d = dist[w];
    if (t.is_constant()) continue;  // output carries no parent information
    if (t.is_left_passthrough()) {
      relax(g.left, d, true);
    } else if (t.is_right_passthrough()) {
      relax(g.right, d, true);
    } else if (t.is_balanced()) {
      relax(g.left, d + 1, false);
      relax(g.right, d + 1, false);
    } else {
      relax(g.left, d, true);
      relax(g.right, d, true);
    }
  }

  std::vector<uint32_t> leaked;
  if (via_balanced) via_balanced->clear();
  for (uint32_t i = 0; i < c.n_generator_inputs; ++i) {
    if (dist[i] <= 1) {
      leaked.push_back(i);
      if (via_balanced) via_balanced->push_back(dist[i] == 1);
    }
  }
  return leaked;
}

LeakageReport predict(const Circuit& c) {
  LeakageReport r;
  r.n_generator_inputs = c.n_generator_inputs;
  r.n_gates = static_cast<uint32_t>(c.gates.size());
  r.potentially_fixed = potentially_fixed(c);
  r.potentially_intermediary = potentially_intermediary(c, r.potentially_fixed);
  r.potentially_revealing =
      potentially_revealing(c, r.potentially_fixed, r.potentially_intermediary);
  r.leaked_inputs = leaked_inputs(c, r.potentially_revealing, &r.leaked_via_balanced);
  r.lower_bound = true;
  return r;
}

}  // namespace crgc
