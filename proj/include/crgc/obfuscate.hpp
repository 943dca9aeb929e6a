#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crgc/circuit.hpp"
#include "crgc/rng.hpp"

namespace crgc {

enum class ThreatModel : uint8_t {
  /// Evaluator does not know the original circuit; passive gates are
  /// re-generated completely at random. Library default.
  circuit_hidden = 0,
  /// Evaluator knows the original circuit; passive imbalanced gates are
  /// partner-swapped with the calibrated probability before re-randomizing.
  circuit_known = 1,
};

/// Generator-side construction witness. Never shipped to the evaluator; the
/// codec cannot serialize it.
struct ObfuscationTrace {
  std::vector<uint8_t> flipped;      // per wire: one-time-pad bit r
  std::vector<uint8_t> is_fixed;     // per wire
  std::vector<uint8_t> fixed_value;  // per wire, in the obfuscated wire space
  std::vector<uint8_t> obfuscatable; // per gate: true = passive
  std::vector<uint8_t> replaced;     // per gate: partner swap happened (circuit_known)
  std::vector<uint8_t> replacement_admitted;  // per gate: swap probability q <= 1
  std::vector<double> passive_prob;  // per gate: p, < 0 when not computed
  uint64_t rng_seed = 0;
};

struct CrgcMeta {
  ThreatModel threat_model = ThreatModel::circuit_hidden;
  /// Hash commitment to the construction seed; reproducibility witness that
  /// does not reveal the seed.
  uint64_t seed_commitment = 0;

  friend bool operator==(const CrgcMeta&, const CrgcMeta&) = default;
};

/// The obfuscated circuit plus its encoded generator input. Topology is
/// identical to the source circuit; only truth tables differ.
struct Crgc {
  Circuit circuit;
  BitVector a_prime;
  CrgcMeta meta;

  friend bool operator==(const Crgc&, const Crgc&) = default;
};

// ---- truth-table rewrites ----

/// f(u,v) -> f(!u,v) (left) or f(u,!v) (right). Involution.
TruthTable flip_table_for_parent(TruthTable t, Side which);

/// Complements all four entries. Involution.
TruthTable flip_table_output(TruthTable t);

/// Copies the row (left) or column (right) at `fixed_value` over the other
/// one, making the child's output independent of that parent's delivered
/// value. Idempotent on tables already independent of the parent.
TruthTable recover_fixed_integrity(TruthTable child, Side which_parent, uint8_t fixed_value);

/// Flips one of the gate's relevant entries (chosen by `entry_choice` when the
/// restriction leaves two, uniformly at random via the rng overload). For
/// level-1 gates the don't-care entries are then completed to the unique
/// balanced table, so the result is always XOR- or XNOR-shaped.
TruthTable obfuscate_fixed_gate(TruthTable t, std::optional<uint8_t> left_fixed,
                                std::optional<uint8_t> right_fixed, int entry_choice,
                                bool level1);
TruthTable obfuscate_fixed_gate(TruthTable t, std::optional<uint8_t> left_fixed,
                                std::optional<uint8_t> right_fixed, SplitRng& rng, bool level1);

/// Unique balanced table agreeing with row/column `fixed_value` of t on the
/// side `fixed_side` (the other entries are don't-care).
TruthTable balanced_completion(TruthTable t, Side fixed_side, uint8_t fixed_value);

/// AND<->NOR, NAND<->OR: the table whose distinguishing entry sits at the
/// complementary parent values (both inputs negated).
TruthTable partner_table(TruthTable t);

// ---- construction passes ----

struct FlipResult {
  Circuit circuit;
  BitVector a_prime;
};

/// One-time pad over the generator inputs and every internal wire, with
/// compensating truth-table rewrites; gate outputs are flipped with
/// probability 1/2 except final output wires, which never flip. Records the
/// pad in trace.flipped.
FlipResult bit_flipping(const Circuit& c, const BitVector& a, ObfuscationTrace& trace,
                        SplitRng& rng);

/// Classifies fixed wires in the obfuscated wire space (generator inputs are
/// fixed at a'), then rewrites every child of a fixed gate so its table no
/// longer reads that parent's delivered value. c must already be bit-flipped.
/// The circuit state after this call is the pre-obfuscation snapshot the
/// fixedness/passivity oracles run against.
void identify_fixed_gates(Circuit& c, const BitVector& a_prime, ObfuscationTrace& trace);

/// Reverse traversal from the final output gates, stopping at fixed gates;
/// gates never visited are passive (fixed or intermediary, plus dead gates).
/// Final output gates are never passive.
void identify_passive_gates(const Circuit& c, ObfuscationTrace& trace);

/// Per-gate probability, over uniformly random generator inputs, that the
/// gate is passive. Evaluated on the original circuit (passivity does not
/// depend on the pad). Exact enumeration up to `exact_limit` generator bits,
/// Monte Carlo with `mc_samples` draws beyond.
struct PassivityProfile {
  std::vector<double> p;
  std::vector<double> std_error;  // 0 when exact
  bool exact = true;
  uint64_t samples = 0;
};
PassivityProfile passivity_profile(const Circuit& original, uint32_t exact_limit,
                                   uint32_t mc_samples, SplitRng rng);

/// Fixed-gate analysis of the original circuit for one concrete generator
/// input (true wire space). Shared by the passivity profile and the oracles.
void classify_fixed_for_input(const Circuit& c, const BitVector& a,
                              std::vector<uint8_t>& is_fixed,
                              std::vector<uint8_t>& fixed_value);

/// Reverse output-cone traversal with an arbitrary per-wire barrier set;
/// result[g] = true for gates never visited.
std::vector<uint8_t> unreachable_behind_barrier(const Circuit& c,
                                                const std::vector<uint8_t>& barrier_per_wire);

/// Construction step 4. Every non-output level-1 gate that can be completed
/// becomes balanced (fixed gates get their entry flip first); deeper passive
/// gates are re-generated per the threat model. `original` supplies the
/// pre-obfuscation gate types needed for circuit_known partner swaps.
void obfuscate_passive(Circuit& cprime, const Circuit& original, ObfuscationTrace& trace,
                       ThreatModel model, SplitRng& rng);

struct ConstructResult {
  Crgc crgc;
  ObfuscationTrace trace;
};

/// Full pipeline: bit flipping, fixed-gate identification and child recovery,
/// passive identification, obfuscation. Deterministic in (c, a, seed, model).
ConstructResult construct_crgc(const Circuit& c, const BitVector& a, uint64_t seed,
                               ThreatModel model = ThreatModel::circuit_hidden);

/// Re-obfuscates a received obfuscated circuit with this party's own input:
/// the forwarded a' wires keep an identity pad and are treated as known fixed
/// inputs together with own_input. The result declares
/// |prev a'| + |own_input| generator inputs.
ConstructResult chain_obfuscate(const Crgc& prev, const BitVector& own_input, uint64_t seed);

}  // namespace crgc
