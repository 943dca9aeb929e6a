#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crgc/circuit.hpp"

namespace crgc {

/// Evaluator-perspective analysis of an obfuscated circuit under the
/// known-circuit threat model. Pure function of the original circuit; the
/// leaked-input set is a lower bound on real leakage (combined
/// equation-system attacks are out of scope).
struct LeakageReport {
  std::vector<uint8_t> potentially_fixed;         // per wire
  std::vector<uint8_t> potentially_intermediary;  // per gate
  std::vector<uint32_t> potentially_revealing;    // gate indices, ascending
  std::vector<uint32_t> leaked_inputs;            // generator input indices, ascending
  /// Parallel to leaked_inputs: 1 when the shortest witness path crosses one
  /// balanced gate (the boundary case of the path rule), 0 for direct leaks.
  std::vector<uint8_t> leaked_via_balanced;
  uint32_t n_generator_inputs = 0;
  uint32_t n_gates = 0;
  bool lower_bound = true;

  /// "x/y" as in a leaked-inputs summary column.
  std::string summary() const {
    return std::to_string(leaked_inputs.size()) + "/" + std::to_string(n_generator_inputs);
  }

  friend bool operator==(const LeakageReport&, const LeakageReport&) = default;
};

/// Per-wire flags: could this wire be fixed for *some* generator input?
/// Generator inputs yes, evaluator inputs no; gates per table class
/// (imbalanced-core: either parent; balanced: both parents; passthrough: the
/// passed parent; constants: always).
std::vector<uint8_t> potentially_fixed(const Circuit& c);

/// Reverse output traversal treating every potentially fixed wire as fixed.
std::vector<uint8_t> potentially_intermediary(const Circuit& c, const std::vector<uint8_t>& pf);

/// Gates that are neither balanced nor potentially passive; their parents'
/// true values are exposed to an evaluator who knows the original circuit.
std::vector<uint32_t> potentially_revealing(const Circuit& c, const std::vector<uint8_t>& pf,
                                            const std::vector<uint8_t>& pi);

/// Generator inputs reachable backward from a revealed wire through at most
/// one balanced gate (0/1-weight shortest path; passthrough gates propagate
/// only their passed parent at weight 0, constants propagate nothing).
std::vector<uint32_t> leaked_inputs(const Circuit& c, const std::vector<uint32_t>& revealing,
                                    std::vector<uint8_t>* via_balanced = nullptr);

LeakageReport predict(const Circuit& c);

}  // namespace crgc
