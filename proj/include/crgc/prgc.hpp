#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "crgc/circuit.hpp"
#include "crgc/obfuscate.hpp"
#include "crgc/prf.hpp"

namespace crgc {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Stable hash of the full circuit structure; binds plans, caches and network
/// sessions to one circuit.
uint64_t circuit_content_hash(const Circuit& c);

/// Connected group of gates evaluated under Yao garbling each time. Gate
/// indices ascend (so they are topologically ordered); input_uses lists one
/// entry per boundary-parent slot (the OT count), input_wires the distinct
/// boundary wires behind them.
struct NonReusableSection {
  std::vector<uint32_t> gates;
  std::vector<WireId> input_uses;
  std::vector<WireId> input_wires;
  std::vector<WireId> output_wires;   // wires leaving the section or final outputs
  std::vector<uint32_t> output_gates; // producers of output_wires, parallel

  friend bool operator==(const NonReusableSection&, const NonReusableSection&) = default;
};

struct SectionPlan {
  static constexpr uint32_t kNoSection = 0xffffffffu;

  uint64_t circuit_hash = 0;
  std::vector<uint8_t> reusable;       // per gate
  std::vector<uint32_t> gate_section;  // per gate: section index or kNoSection
  std::vector<NonReusableSection> sections;

  /// Execution order: every gate appears exactly once, either as itself or
  /// inside its section's single step.
  struct Step {
    uint8_t is_section = 0;
    uint32_t index = 0;  // gate index or section index
    friend bool operator==(const Step&, const Step&) = default;
  };
  std::vector<Step> schedule;

  /// circuit_known: the generator's passivity probability for each admitted
  /// gate, shipped so both parties can audit the replacement rule.
  std::vector<std::pair<uint32_t, double>> admitted_p;

  friend bool operator==(const SectionPlan&, const SectionPlan&) = default;
};

/// True iff the delivered gate cannot help the evaluator distinguish
/// generator inputs: balanced after flipping, level 1, or passive and
/// re-randomized (under circuit_known, core-family passive gates need the
/// replacement rule's admission).
bool classify_io_gate(uint32_t gate_index, const Circuit& cprime, const ObfuscationTrace& trace,
                      const std::vector<uint32_t>& wire_levels, ThreatModel model);

struct ReplacementProbability {
  double p = 0;
  double q = 0;
  bool overflow = false;  // q > 1 (or p unresolvably small): keep the gate sectioned
  bool exact = true;
  double std_error = 0;
  uint64_t samples = 0;
};

/// Replacement-rule calibration for one gate: p = Pr[gate passive] over uniform
/// generator inputs, q = 1/(2p). Exact enumeration up to exact_limit input
/// bits, Monte Carlo beyond; statistical uncertainty pushing q's confidence
/// interval above 1 counts as overflow (fail toward the non-reusable side).
ReplacementProbability replacement_probability(uint32_t gate_index, const Circuit& original,
                                               uint32_t exact_limit = 20,
                                               uint32_t mc_samples = 10000,
                                               uint64_t sample_seed = 0x9d2c5680);
ReplacementProbability replacement_probability(uint32_t gate_index,
                                               const PassivityProfile& profile);

/// Groups every non-indistinguishable gate into maximal connected sections,
/// extends each section forward until all of its output gates are balanced or
/// final outputs, and closes the sections under convexity so the protocol can
/// run each one atomically. one_section merges everything into a single
/// non-reusable section (the constant-round variant).
SectionPlan partition(const Circuit& cprime, const ObfuscationTrace& trace, ThreatModel model,
                      bool one_section = false);

/// Structural checker used by tests: coverage, section invariants, convexity,
/// schedule validity. Throws ProtocolError with a description.
void validate_plan(const Circuit& cprime, const SectionPlan& plan);

/// Circuit copy with every section gate's table zeroed; what actually ships
/// to the evaluator in the hybrid protocol.
Circuit redact_sections(const Circuit& cprime, const SectionPlan& plan);

// ---- garbling ----

struct GarbledGate {
  // 4 rows, each 16 label bytes + 8 tag bytes, XOR-encrypted under a
  // label-keyed keystream; row order chosen by the input permute bits.
  std::array<std::array<uint64_t, 3>, 4> rows{};
};

/// Generator-side product of garbling one section for one evaluation. Only
/// `gates` and `decode` ship to the evaluator; the label pairs move through
/// OT and refresh_flips never leave the generator.
struct GarbledSection {
  uint32_t section = 0;
  uint64_t eval_index = 0;
  std::vector<std::pair<Label, Label>> input_labels;  // per distinct input wire
  std::vector<GarbledGate> gates;                     // per section gate, in order
  std::vector<std::array<uint8_t, 2>> decode;         // per output wire, by permute bit
  std::vector<uint8_t> refresh_flips;                 // per output wire
  std::vector<Label> all_labels;                      // every label drawn (freshness audits)
};

GarbledSection garble_section(const NonReusableSection& s, const Circuit& cprime,
                              uint64_t eval_index, SplitRng& rng);

/// Evaluator-visible bytes of a garbled section (tables + decode map).
std::vector<uint8_t> encode_garbled_section(const GarbledSection& gs);

struct GarbledSectionView {
  uint32_t section = 0;
  uint64_t eval_index = 0;
  std::vector<GarbledGate> gates;
  std::vector<std::array<uint8_t, 2>> decode;
};
GarbledSectionView decode_garbled_section(const std::vector<uint8_t>& bytes);

/// Runs the evaluator's half of one garbled section: one label per input use
/// (labels for repeated uses of one wire must agree), authenticated row
/// decryption per gate, decode map on the outputs. Returns the refreshed
/// output bits in section output order. Throws ProtocolError on any tag
/// failure.
std::vector<uint8_t> evaluate_garbled_section(const GarbledSectionView& view,
                                              const NonReusableSection& s,
                                              const Circuit& circuit,
                                              const std::vector<Label>& labels_per_use);

// ---- oblivious transfer contract ----

/// Two-message OT: the receiver learns exactly messages[choice], the sender
/// learns nothing about choice.
class OtEndpoint {
 public:
  virtual ~OtEndpoint() = default;
  virtual std::vector<uint8_t> transfer(const std::vector<uint8_t>& m0,
                                        const std::vector<uint8_t>& m1, bool choice) = 0;
};

/// In-process ideal functionality. The sender-side view records only the
/// message pairs, never a function of the choice bits; tests compare views
/// across different choice vectors for byte equality.
class IdealOt final : public OtEndpoint {
 public:
  std::vector<uint8_t> transfer(const std::vector<uint8_t>& m0, const std::vector<uint8_t>& m1,
                                bool choice) override {
    sender_view_.push_back(m0);
    sender_view_.push_back(m1);
    return choice ? m1 : m0;
  }
  const std::vector<std::vector<uint8_t>>& sender_view() const { return sender_view_; }

 private:
  std::vector<std::vector<uint8_t>> sender_view_;
};

// ---- protocol engines ----

/// Generator-side surface of one evaluation cycle; implemented in-process
/// here and over the wire by the net module.
class GeneratorSide {
 public:
  virtual ~GeneratorSide() = default;
  virtual void begin_eval() = 0;
  /// Encoded garbled sections for this evaluation, indexed by section id.
  virtual std::vector<std::vector<uint8_t>> fetch_garbled_sections() = 0;
  /// One label per input use; choice bits are the evaluator's held values.
  virtual std::vector<Label> ot_section_inputs(uint32_t section,
                                               const std::vector<uint8_t>& choices) = 0;
  /// Final-output unflip: one OT per output wire, choice = delivered bit.
  virtual BitVector ot_outputs(const BitVector& delivered) = 0;
};

class InProcessGenerator final : public GeneratorSide {
 public:
  /// Default transfers run over the ideal in-process functionality; pass a
  /// different OtEndpoint to plug in an external OT provider.
  InProcessGenerator(Crgc crgc, SectionPlan plan, uint64_t seed,
                     std::unique_ptr<OtEndpoint> ot = nullptr);

  void begin_eval() override;
  std::vector<std::vector<uint8_t>> fetch_garbled_sections() override;
  std::vector<Label> ot_section_inputs(uint32_t section,
                                       const std::vector<uint8_t>& choices) override;
  BitVector ot_outputs(const BitVector& delivered) override;

  // instrumentation
  uint64_t evals_started() const { return eval_count_; }
  uint64_t ot_transfers() const { return ot_count_; }
  uint64_t bytes_sent_current_eval() const { return bytes_eval_; }
  const std::vector<Label>& label_log() const { return label_log_; }
  OtEndpoint& ot_channel() { return *ot_; }

 private:
  Crgc crgc_;
  SectionPlan plan_;
  SplitRng rng_;
  uint64_t eval_count_ = 0;
  uint64_t ot_count_ = 0;
  uint64_t bytes_eval_ = 0;
  std::vector<GarbledSection> current_;
  std::vector<uint8_t> parity_;  // per wire: accumulated refresh flips
  std::vector<uint8_t> section_ot_done_;
  std::vector<Label> label_log_;
  std::unique_ptr<OtEndpoint> ot_;
};

/// Full evaluator run for one input b: local evaluation of reusable gates,
/// per-section OT + garbled evaluation, final-output unflip OTs. The circuit
/// may be the redacted copy; section tables are never read.
BitVector evaluate_prgc(const SectionPlan& plan, const Circuit& circuit,
                        const BitVector& a_prime, GeneratorSide& generator, const BitVector& b);
BitVector evaluate_prgc(const SectionPlan& plan, const Crgc& crgc, GeneratorSide& generator,
                        const BitVector& b);

}  // namespace crgc
