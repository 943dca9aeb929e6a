#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "crgc/circuit.hpp"

namespace crgc {

/// Parses a Bristol-fashion circuit. Both common headers are accepted:
///   old style:  "<ngates> <nwires>" / "<n_a> <n_b> <n_out>"
///   new style:  "<ngates> <nwires>" / "<niv> <s1> ... <s_niv>" / "<nov> <t1> ... <t_nov>"
/// Gate lines are "<n_in> <n_out> <inputs...> <outputs...> <TAG>" with TAG in
/// {XOR, XNOR, AND, NAND, OR, NOR, INV, NOT, EQW, TT:bbbb}. Outputs are the
/// trailing wires. 1-input gates are canonicalized to 2-input self-parented
/// gates (INV -> table 1100, EQW -> 0011). Non-topological files are rejected,
/// never re-sorted: silent reordering would desynchronize wire ids from
/// external tools.
Circuit parse_bristol(std::string_view text);
Circuit parse_bristol(std::istream& in);
Circuit parse_bristol_file(const std::string& path);

/// Old-style header, LF line endings. Tables with no standard tag are written
/// as "TT:<e00><e01><e10><e11>". When output wires are not already the
/// trailing wires in order, copy gates are appended to relocate them, so the
/// round trip preserves semantics (and structure whenever no relocation was
/// needed).
std::string write_bristol(const Circuit& c);
void write_bristol_file(const Circuit& c, const std::string& path);

}  // namespace crgc
