#include "crgc/bristol.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

namespace crgc {

namespace {

struct Tokenizer {
  std::string_view text;
  size_t pos = 0;
  size_t line = 1;

  // Returns tokens of the next non-empty line, or empty at EOF.
  std::vector<std::string_view> next_line() {
    while (pos < text.size()) {
      size_t eol = text.find('\n', pos);
      std::string_view ln = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - pos);
      pos = eol == std::string_view::npos ? text.size() : eol + 1;
      ++line;
      if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
      std::vector<std::string_view> toks;
      size_t i = 0;
      while (i < ln.size()) {
        while (i < ln.size() && (ln[i] == ' ' || ln[i] == '\t')) ++i;
        size_t j = i;
        while (j < ln.size() && ln[j] != ' ' && ln[j] != '\t') ++j;
        if (j > i) toks.push_back(ln.substr(i, j - i));
        i = j;
      }
      if (!toks.empty()) return toks;
    }
    return {};
  }
};

uint64_t to_uint(std::string_view tok, const char* what) {
  uint64_t v = 0;
  if (tok.empty()) throw CircuitError(std::string("malformed header: empty ") + what);
  for (char ch : tok) {
    if (ch < '0' || ch > '9')
      throw CircuitError(std::string("malformed ") + what + ": '" + std::string(tok) + "'");
    v = v * 10 + static_cast<uint64_t>(ch - '0');
  }
  return v;
}

bool all_numeric(const std::vector<std::string_view>& toks) {
  for (auto t : toks)
    for (char ch : t)
      if (ch < '0' || ch > '9') return false;
  return !toks.empty();
}

std::optional<TruthTable> table_for_tag(std::string_view tag) {
  if (tag == "XOR") return tables::XOR;
  if (tag == "XNOR") return tables::XNOR;
  if (tag == "AND") return tables::AND;
  if (tag == "NAND") return tables::NAND;
  if (tag == "OR") return tables::OR;
  if (tag == "NOR") return tables::NOR;
  if (tag.size() == 7 && tag.substr(0, 3) == "TT:") return TruthTable::from_string(tag.substr(3));
  return std::nullopt;
}

}  // namespace

Circuit parse_bristol(std::string_view text) {
  Tokenizer tk{text};

  auto header = tk.next_line();
  if (header.size() != 2 || !all_numeric(header))
    throw CircuitError("malformed header: expected '<ngates> <nwires>'");
  const uint64_t n_gates = to_uint(header[0], "gate count");
  const uint64_t n_wires = to_uint(header[1], "wire count");

  auto io_line = tk.next_line();
  if (!all_numeric(io_line)) throw CircuitError("malformed header: expected input/output arities");

  uint64_t n_a = 0, n_b = 0, n_out = 0;
  std::vector<std::string_view> first_gate_line;
  // New style: "<niv> <sizes...>" followed by "<nov> <sizes...>".
  if (io_line.size() >= 2 && to_uint(io_line[0], "input count") == io_line.size() - 1) {
    auto out_line = tk.next_line();
    bool new_style = all_numeric(out_line) && out_line.size() >= 2 &&
                     to_uint(out_line[0], "output count") == out_line.size() - 1;
    uint64_t in_sum = 0;
    for (size_t i = 1; i < io_line.size(); ++i) in_sum += to_uint(io_line[i], "input arity");
    if (new_style && in_sum + n_gates == n_wires) {
      n_a = to_uint(io_line[1], "input arity");
      for (size_t i = 2; i < io_line.size(); ++i) n_b += to_uint(io_line[i], "input arity");
      for (size_t i = 1; i < out_line.size(); ++i) n_out += to_uint(out_line[i], "output arity");
    } else if (io_line.size() == 3) {
      // Old style after all; out_line was the first gate.
      n_a = to_uint(io_line[0], "input arity");
      n_b = to_uint(io_line[1], "input arity");
      n_out = to_uint(io_line[2], "output arity");
      first_gate_line = out_line;
    } else {
      throw CircuitError("malformed header: inconsistent input/output arities");
    }
  } else if (io_line.size() == 3) {
    n_a = to_uint(io_line[0], "input arity");
    n_b = to_uint(io_line[1], "input arity");
    n_out = to_uint(io_line[2], "output arity");
  } else {
    throw CircuitError("malformed header: expected '<n_a> <n_b> <n_out>'");
  }

  if (n_a + n_b + n_gates != n_wires)
    throw CircuitError("malformed header: wire count does not match inputs + gates");
  if (n_out > n_gates) throw CircuitError("malformed header: more outputs than gates");

  Circuit c;
  c.n_generator_inputs = static_cast<uint32_t>(n_a);
  c.n_evaluator_inputs = static_cast<uint32_t>(n_b);
  c.gates.reserve(n_gates);

  std::vector<uint8_t> produced(n_wires, 0);
  auto wire_ready = [&](uint64_t w) { return w < n_a + n_b || produced[w]; };

  for (uint64_t i = 0; i < n_gates; ++i) {
    std::vector<std::string_view> toks = first_gate_line.empty() ? tk.next_line()
                                                                 : std::move(first_gate_line);
    first_gate_line.clear();
    if (toks.empty()) throw CircuitError("unexpected end of file: expected gate line");
    if (toks.size() < 4) throw CircuitError("malformed gate line " + std::to_string(i));
    const uint64_t in_arity = to_uint(toks[0], "gate input arity");
    const uint64_t out_arity = to_uint(toks[1], "gate output arity");
    if (out_arity != 1) throw CircuitError("multi-output gates are not supported");
    if (in_arity != 1 && in_arity != 2)
      throw CircuitError("unsupported gate input arity " + std::to_string(in_arity));
    if (toks.size() != 2 + in_arity + out_arity + 1)
      throw CircuitError("malformed gate line " + std::to_string(i));

    std::string_view tag = toks.back();
    Gate g;
    if (in_arity == 1) {
      const uint64_t x = to_uint(toks[2], "wire id");
      g.left = g.right = static_cast<WireId>(x);
      g.out = static_cast<WireId>(to_uint(toks[3], "wire id"));
      if (tag == "INV" || tag == "NOT") {
        g.table = tables::NOT_LEFT;
      } else if (tag == "EQW") {
        g.table = tables::LEFT;
      } else {
        throw CircuitError("unknown gate tag '" + std::string(tag) + "'");
      }
    } else {
      g.left = static_cast<WireId>(to_uint(toks[2], "wire id"));
      g.right = static_cast<WireId>(to_uint(toks[3], "wire id"));
      g.out = static_cast<WireId>(to_uint(toks[4], "wire id"));
      auto table = table_for_tag(tag);
      if (!table) throw CircuitError("unknown gate tag '" + std::string(tag) + "'");
      g.table = *table;
    }

    if (g.left >= n_wires || g.right >= n_wires || g.out >= n_wires)
      throw CircuitError("wire index out of range on gate line " + std::to_string(i));
    if (g.out <= g.left || g.out <= g.right || g.out < n_a + n_b || produced[g.out] ||
        !wire_ready(g.left) || !wire_ready(g.right))
      throw CircuitError("non-topological gate order at gate line " + std::to_string(i));
    produced[g.out] = 1;
    c.gates.push_back(g);
  }

  c.output_wires.reserve(n_out);
  for (uint64_t w = n_wires - n_out; w < n_wires; ++w)
    c.output_wires.push_back(static_cast<WireId>(w));
  validate(c);
  return c;
}

Circuit parse_bristol(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  return parse_bristol(std::string_view(s));
}

Circuit parse_bristol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CircuitError("cannot open circuit file: " + path);
  return parse_bristol(in);
}

std::string write_bristol(const Circuit& c) {
  validate(c);
  Circuit relocated;
  const Circuit* src = &c;

  // Outputs must be the trailing wires; append copy gates when they are not.
  bool trailing = c.output_wires.size() <= c.gates.size();
  if (trailing) {
    WireId base = c.n_wires() - static_cast<uint32_t>(c.output_wires.size());
    for (size_t i = 0; i < c.output_wires.size(); ++i)
      if (c.output_wires[i] != base + i) trailing = false;
  }
  if (!trailing) {
    relocated = c;
    relocated.output_wires.clear();
    for (WireId w : c.output_wires) {
      WireId out = relocated.n_wires();
      relocated.gates.push_back(Gate{w, w, out, tables::LEFT});
      relocated.output_wires.push_back(out);
    }
    src = &relocated;
  }

  std::string out;
  out += std::to_string(src->gates.size()) + " " + std::to_string(src->n_wires()) + "\n";
  out += std::to_string(src->n_generator_inputs) + " " + std::to_string(src->n_evaluator_inputs) +
         " " + std::to_string(src->output_wires.size()) + "\n";
  for (const Gate& g : src->gates) {
    if (g.left == g.right && g.table == tables::NOT_LEFT) {
      out += "1 1 " + std::to_string(g.left) + " " + std::to_string(g.out) + " INV\n";
      continue;
    }
    if (g.left == g.right && g.table == tables::LEFT) {
      out += "1 1 " + std::to_string(g.left) + " " + std::to_string(g.out) + " EQW\n";
      continue;
    }
    const char* tag = nullptr;
    if (g.table == tables::XOR) tag = "XOR";
    else if (g.table == tables::XNOR) tag = "XNOR";
    else if (g.table == tables::AND) tag = "AND";
    else if (g.table == tables::NAND) tag = "NAND";
    else if (g.table == tables::OR) tag = "OR";
    else if (g.table == tables::NOR) tag = "NOR";
    out += "2 1 " + std::to_string(g.left) + " " + std::to_string(g.right) + " " +
           std::to_string(g.out) + " ";
    if (tag) out += tag;
    else out += "TT:" + g.table.to_string();
    out += "\n";
  }
  return out;
}

void write_bristol_file(const Circuit& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CircuitError("cannot open output file: " + path);
  out << write_bristol(c);
}

}  // namespace crgc
