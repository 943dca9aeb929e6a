#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crgc/circuit.hpp"
#include "crgc/leakage.hpp"
#include "crgc/obfuscate.hpp"
#include "crgc/prgc.hpp"

namespace crgc {

/// Binary file format (".crgc"): fixed magic, version, kind tag, optional
/// deflate of the body, content hash for corruption detection. Parent ids are
/// delta-encoded against the gate's own output wire id (garbled circuits have
/// strong wire locality); 4-bit tables pack two per byte. Field-by-field
/// layout in docs/format.md. All multi-byte integers little-endian.
enum class PayloadKind : uint8_t {
  circuit = 0,
  crgc = 1,
  section_plan = 2,
  leakage_report = 3,
};

struct CodecError : std::runtime_error {
  enum class Kind {
    truncated,
    bad_magic,
    bad_version,
    bad_kind,
    hash_mismatch,
    malformed,
    invariant,
  };
  CodecError(Kind k, size_t off, const std::string& what)
      : std::runtime_error(what + " (byte offset " + std::to_string(off) + ")"),
        kind(k),
        offset(off) {}
  Kind kind;
  size_t offset;
};

struct EncodeOptions {
  bool compress = true;
};

std::vector<uint8_t> encode(const Circuit& c, EncodeOptions opts = {});
std::vector<uint8_t> encode(const Crgc& g, EncodeOptions opts = {});
std::vector<uint8_t> encode(const SectionPlan& p, EncodeOptions opts = {});
std::vector<uint8_t> encode(const LeakageReport& r, EncodeOptions opts = {});

PayloadKind peek_kind(std::span<const uint8_t> bytes);

Circuit decode_circuit(std::span<const uint8_t> bytes);
Crgc decode_crgc(std::span<const uint8_t> bytes);
SectionPlan decode_section_plan(std::span<const uint8_t> bytes);
LeakageReport decode_leakage_report(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

}  // namespace crgc
