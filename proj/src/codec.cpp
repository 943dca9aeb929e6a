#include "crgc/codec.hpp"
#include <algorithm>

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace crgc {

namespace {

constexpr uint8_t kMagic[4] = {'R', 'G', 'C', '1'};
constexpr uint16_t kVersion = 1;
constexpr size_t kHeaderSize = 4 + 2 + 1 + 1 + 8 + 8;
constexpr uint8_t kFlagDeflate = 0x01;

class Writer {
 public:
  void u8(uint8_t v) { out_.push_back(v); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back((v >> (8 * i)) & 0xff);
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back((v >> (8 * i)) & 0xff);
  }
  void varint(uint64_t v) {
    while (v >= 0x80) {
      out_.push_back(static_cast<uint8_t>(v) | 0x80);
      v >>= 7;
    }
    out_.push_back(static_cast<uint8_t>(v));
  }
  void zigzag(int64_t v) {
    varint((static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63));
  }
  void bytes(const std::vector<uint8_t>& b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const uint8_t> data, size_t base_offset)
      : data_(data), base_(base_offset) {}

  size_t offset() const { return base_ + pos_; }
  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

  uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  uint16_t u16() {
    need(2);
    uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  uint64_t varint() {
    uint64_t v = 0;
    int shift = 0;
    while (true) {
      need(1);
      uint8_t byte = data_[pos_++];
      if (shift >= 64 || (shift == 63 && (byte & 0x7e)))
        throw CodecError(CodecError::Kind::malformed, offset(), "varint overflow");
      v |= static_cast<uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return v;
      shift += 7;
    }
  }
  int64_t zigzag() {
    uint64_t v = varint();
    return static_cast<int64_t>((v >> 1) ^ (~(v & 1) + 1));
  }
  std::vector<uint8_t> bytes(size_t n) {
    need(n);
    std::vector<uint8_t> b(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return b;
  }

 private:
  void need(size_t n) const {
    if (pos_ + n > data_.size())
      throw CodecError(CodecError::Kind::truncated, base_ + data_.size(),
                       "payload truncated");
  }
  std::span<const uint8_t> data_;
  size_t base_;
  size_t pos_ = 0;
};

void write_circuit_body(Writer& w, const Circuit& c) {
  w.u64(c.n_generator_inputs);
  w.u64(c.n_evaluator_inputs);
  w.u64(c.gates.size());
  w.u64(c.output_wires.size());
  int64_t prev_out = static_cast<int64_t>(c.n_inputs()) - 1;
  for (const Gate& g : c.gates) {
    w.zigzag(static_cast<int64_t>(g.out) - prev_out);
    w.varint(g.out - g.left);
    w.varint(g.out - g.right);
    prev_out = g.out;
  }
  for (size_t i = 0; i < c.gates.size(); i += 2) {
    uint8_t packed = c.gates[i].table.raw();
    if (i + 1 < c.gates.size()) packed |= static_cast<uint8_t>(c.gates[i + 1].table.raw() << 4);
    w.u8(packed);
  }
  int64_t prev = -1;
  for (WireId o : c.output_wires) {
    w.zigzag(static_cast<int64_t>(o) - prev);
    prev = o;
  }
}

Circuit read_circuit_body(Reader& r) {
  Circuit c;
  const uint64_t n_gen = r.u64();
  const uint64_t n_eval = r.u64();
  const uint64_t n_gates = r.u64();
  const uint64_t n_out = r.u64();
  if (n_gen > 0xffffffffull || n_eval > 0xffffffffull || n_gates > 0xffffffffull ||
      n_gen + n_eval + n_gates > 0xffffffffull || n_gates > r.remaining())
    throw CodecError(CodecError::Kind::malformed, r.offset(), "implausible counts");
  if (n_out > n_gates)
    throw CodecError(CodecError::Kind::malformed, r.offset(), "more outputs than gates");
  c.n_generator_inputs = static_cast<uint32_t>(n_gen);
  c.n_evaluator_inputs = static_cast<uint32_t>(n_eval);
  c.gates.reserve(std::min(n_gates, r.remaining()));  // gates need >= 1 byte each
  const uint64_t n_wires = n_gen + n_eval + n_gates;
  int64_t prev_out = static_cast<int64_t>(n_gen + n_eval) - 1;
  for (uint64_t i = 0; i < n_gates; ++i) {
    Gate g;
    int64_t out = prev_out + r.zigzag();
    uint64_t dl = r.varint();
    uint64_t dr = r.varint();
    if (out < 0 || out >= static_cast<int64_t>(n_wires) || dl == 0 || dr == 0 ||
        dl > static_cast<uint64_t>(out) || dr > static_cast<uint64_t>(out))
      throw CodecError(CodecError::Kind::malformed, r.offset(), "gate wiring out of range");
    g.out = static_cast<WireId>(out);
    g.left = static_cast<WireId>(out - static_cast<int64_t>(dl));
    g.right = static_cast<WireId>(out - static_cast<int64_t>(dr));
    prev_out = out;
    c.gates.push_back(g);
  }
  for (uint64_t i = 0; i < n_gates; i += 2) {
    uint8_t packed = r.u8();
    c.gates[i].table = TruthTable(packed & 0xf);
    if (i + 1 < n_gates) c.gates[i + 1].table = TruthTable(packed >> 4);
  }
  int64_t prev = -1;
  for (uint64_t i = 0; i < n_out; ++i) {
    int64_t o = prev + r.zigzag();
    if (o < 0 || o >= static_cast<int64_t>(n_wires))
      throw CodecError(CodecError::Kind::malformed, r.offset(), "output wire out of range");
    c.output_wires.push_back(static_cast<WireId>(o));
    prev = o;
  }
  try {
    validate(c);
  } catch (const CircuitError& e) {
    throw CodecError(CodecError::Kind::invariant, r.offset(), e.what());
  }
  return c;
}

void write_u32_list(Writer& w, const std::vector<uint32_t>& xs) {
  w.varint(xs.size());
  int64_t prev = -1;
  for (uint32_t x : xs) {
    w.zigzag(static_cast<int64_t>(x) - prev);
    prev = x;
  }
}

std::vector<uint32_t> read_u32_list(Reader& r, uint64_t max_value) {
  const uint64_t n = r.varint();
  // each element occupies at least one payload byte
  if (n > max_value + 1 || n > r.remaining())
    throw CodecError(CodecError::Kind::malformed, r.offset(), "list longer than universe");
  std::vector<uint32_t> xs;
  xs.reserve(n);
  int64_t prev = -1;
  for (uint64_t i = 0; i < n; ++i) {
    int64_t x = prev + r.zigzag();
    if (x < 0 || x > static_cast<int64_t>(max_value))
      throw CodecError(CodecError::Kind::malformed, r.offset(), "list element out of range");
    xs.push_back(static_cast<uint32_t>(x));
    prev = x;
  }
  return xs;
}

void write_bit_list(Writer& w, const std::vector<uint8_t>& bits) {
  w.varint(bits.size());
  uint8_t acc = 0;
  int k = 0;
  for (uint8_t b : bits) {
    acc |= static_cast<uint8_t>((b & 1) << k);
    if (++k == 8) {
      w.u8(acc);
      acc = 0;
      k = 0;
    }
  }
  if (k) w.u8(acc);
}

std::vector<uint8_t> read_bit_list(Reader& r, uint64_t expect_size) {
  const uint64_t n = r.varint();
  if (n != expect_size || (n + 7) / 8 > r.remaining())
    throw CodecError(CodecError::Kind::malformed, r.offset(), "bit list size mismatch");
  std::vector<uint8_t> bits(n);
  auto packed = r.bytes((n + 7) / 8);
  for (uint64_t i = 0; i < n; ++i) bits[i] = (packed[i / 8] >> (i % 8)) & 1;
  return bits;
}

std::vector<uint8_t> deflate_bytes(const std::vector<uint8_t>& in) {
  uLongf bound = compressBound(static_cast<uLong>(in.size()));
  std::vector<uint8_t> out(bound);
  if (compress2(out.data(), &bound, in.data(), static_cast<uLong>(in.size()), 6) != Z_OK)
    throw std::runtime_error("deflate failed");
  out.resize(bound);
  return out;
}

std::vector<uint8_t> inflate_bytes(const std::vector<uint8_t>& in, uint64_t expect,
                                   size_t offset) {
  std::vector<uint8_t> out(expect);
  uLongf len = static_cast<uLongf>(expect);
  int rc = uncompress(out.data(), &len, in.data(), static_cast<uLong>(in.size()));
  if (rc != Z_OK || len != expect)
    throw CodecError(CodecError::Kind::malformed, offset, "compressed body is corrupt");
  return out;
}

std::vector<uint8_t> seal(PayloadKind kind, std::vector<uint8_t> body, EncodeOptions opts) {
  Writer w;
  for (uint8_t m : kMagic) w.u8(m);
  w.u16(kVersion);
  w.u8(static_cast<uint8_t>(kind));
  std::vector<uint8_t> payload;
  uint8_t flags = 0;
  if (opts.compress) {
    payload = deflate_bytes(body);
    if (payload.size() < body.size()) flags = kFlagDeflate;
    else payload.clear();
  }
  w.u8(flags);
  w.u64(body.size());
  w.u64(fnv1a64(body.data(), body.size()));
  if (flags & kFlagDeflate) w.bytes(payload);
  else w.bytes(body);
  return w.take();
}

Reader open_sealed(std::span<const uint8_t> bytes, PayloadKind expect,
                   std::vector<uint8_t>& storage) {
  if (bytes.size() < kHeaderSize)
    throw CodecError(CodecError::Kind::truncated, bytes.size(), "file shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CodecError(CodecError::Kind::bad_magic, 0, "bad magic bytes");
  uint16_t version = static_cast<uint16_t>(bytes[4]) | (static_cast<uint16_t>(bytes[5]) << 8);
  if (version != kVersion)
    throw CodecError(CodecError::Kind::bad_version, 4,
                     "unsupported version " + std::to_string(version));
  PayloadKind kind = static_cast<PayloadKind>(bytes[6]);
  if (bytes[6] > static_cast<uint8_t>(PayloadKind::leakage_report))
    throw CodecError(CodecError::Kind::bad_kind, 6, "unknown payload kind");
  if (kind != expect)
    throw CodecError(CodecError::Kind::bad_kind, 6, "payload kind does not match request");
  uint8_t flags = bytes[7];
  uint64_t body_len = 0, hash = 0;
  for (int i = 0; i < 8; ++i) body_len |= static_cast<uint64_t>(bytes[8 + i]) << (8 * i);
  for (int i = 0; i < 8; ++i) hash |= static_cast<uint64_t>(bytes[16 + i]) << (8 * i);
  std::vector<uint8_t> raw(bytes.begin() + kHeaderSize, bytes.end());
  if (flags & kFlagDeflate) {
    // deflate cannot expand more than ~1032x; anything beyond is a forged
    // length, rejected before allocating.
    if (body_len > (1ull << 33) || body_len > raw.size() * 1100 + 1024)
      throw CodecError(CodecError::Kind::malformed, 8, "implausible body size");
    storage = inflate_bytes(raw, body_len, kHeaderSize);
  } else {
    if (raw.size() != body_len)
      throw CodecError(CodecError::Kind::truncated, bytes.size(),
                       "body length does not match header");
    storage = std::move(raw);
  }
  if (fnv1a64(storage.data(), storage.size()) != hash)
    throw CodecError(CodecError::Kind::hash_mismatch, kHeaderSize,
                     "content hash mismatch (corrupt body)");
  return Reader(std::span<const uint8_t>(storage), kHeaderSize);
}

void expect_done(Reader& r) {
  if (!r.done())
    throw CodecError(CodecError::Kind::malformed, r.offset(), "trailing bytes after payload");
}

}  // namespace

std::vector<uint8_t> encode(const Circuit& c, EncodeOptions opts) {
  Writer w;
  write_circuit_body(w, c);
  return seal(PayloadKind::circuit, w.take(), opts);
}

std::vector<uint8_t> encode(const Crgc& g, EncodeOptions opts) {
  Writer w;
  write_circuit_body(w, g.circuit);
  w.u8(static_cast<uint8_t>(g.meta.threat_model));
  w.u64(g.meta.seed_commitment);
  write_bit_list(w, g.a_prime.raw());
  return seal(PayloadKind::crgc, w.take(), opts);
}

std::vector<uint8_t> encode(const SectionPlan& p, EncodeOptions opts) {
  Writer w;
  w.u64(p.circuit_hash);
  w.varint(p.reusable.size());
  write_bit_list(w, p.reusable);
  w.varint(p.sections.size());
  for (const auto& s : p.sections) {
    write_u32_list(w, s.gates);
    write_u32_list(w, s.input_uses);
    write_u32_list(w, s.input_wires);
    write_u32_list(w, s.output_wires);
    write_u32_list(w, s.output_gates);
  }
  w.varint(p.schedule.size());
  for (const auto& st : p.schedule)
    w.varint((static_cast<uint64_t>(st.index) << 1) | st.is_section);
  w.varint(p.admitted_p.size());
  for (const auto& [gate, prob] : p.admitted_p) {
    w.varint(gate);
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(prob));
    std::memcpy(&bits, &prob, 8);
    w.u64(bits);
  }
  return seal(PayloadKind::section_plan, w.take(), opts);
}

std::vector<uint8_t> encode(const LeakageReport& r, EncodeOptions opts) {
  Writer w;
  w.u64(r.n_generator_inputs);
  w.u64(r.n_gates);
  w.varint(r.potentially_fixed.size());
  write_bit_list(w, r.potentially_fixed);
  write_bit_list(w, r.potentially_intermediary);
  write_u32_list(w, r.potentially_revealing);
  write_u32_list(w, r.leaked_inputs);
  write_bit_list(w, r.leaked_via_balanced);
  w.u8(r.lower_bound ? 1 : 0);
  return seal(PayloadKind::leakage_report, w.take(), opts);
}

PayloadKind peek_kind(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHeaderSize)
    throw CodecError(CodecError::Kind::truncated, bytes.size(), "file shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CodecError(CodecError::Kind::bad_magic, 0, "bad magic bytes");
  if (bytes[6] > static_cast<uint8_t>(PayloadKind::leakage_report))
    throw CodecError(CodecError::Kind::bad_kind, 6, "unknown payload kind");
  return static_cast<PayloadKind>(bytes[6]);
}

Circuit decode_circuit(std::span<const uint8_t> bytes) {
  std::vector<uint8_t> storage;
  Reader r = open_sealed(bytes, PayloadKind::circuit, storage);
  Circuit c = read_circuit_body(r);
  expect_done(r);
  return c;
}

Crgc decode_crgc(std::span<const uint8_t> bytes) {
  std::vector<uint8_t> storage;
  Reader r = open_sealed(bytes, PayloadKind::crgc, storage);
  Crgc g;
  g.circuit = read_circuit_body(r);
  uint8_t tm = r.u8();
  if (tm > static_cast<uint8_t>(ThreatModel::circuit_known))
    throw CodecError(CodecError::Kind::malformed, r.offset(), "unknown threat model");
  g.meta.threat_model = static_cast<ThreatModel>(tm);
  g.meta.seed_commitment = r.u64();
  auto bits = read_bit_list(r, g.circuit.n_generator_inputs);
  g.a_prime = BitVector(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) g.a_prime[i] = bits[i];
  expect_done(r);
  return g;
}

SectionPlan decode_section_plan(std::span<const uint8_t> bytes) {
  std::vector<uint8_t> storage;
  Reader r = open_sealed(bytes, PayloadKind::section_plan, storage);
  SectionPlan p;
  p.circuit_hash = r.u64();
  const uint64_t n = r.varint();
  if (n > 0xffffffffull)
    throw CodecError(CodecError::Kind::malformed, r.offset(), "implausible gate count");
  p.reusable = read_bit_list(r, n);
  const uint64_t n_sections = r.varint();
  if (n_sections > n)
    throw CodecError(CodecError::Kind::malformed, r.offset(), "more sections than gates");
  p.gate_section.assign(n, SectionPlan::kNoSection);
  for (uint64_t sid = 0; sid < n_sections; ++sid) {
    NonReusableSection s;
    s.gates = read_u32_list(r, n ? n - 1 : 0);
    const uint64_t wire_max = 0xffffffffull;
    s.input_uses = read_u32_list(r, wire_max);
    s.input_wires = read_u32_list(r, wire_max);
    s.output_wires = read_u32_list(r, wire_max);
    s.output_gates = read_u32_list(r, n ? n - 1 : 0);
    for (uint32_t g : s.gates) {
      if (p.gate_section[g] != SectionPlan::kNoSection)
        throw CodecError(CodecError::Kind::invariant, r.offset(), "gate in two sections");
      p.gate_section[g] = static_cast<uint32_t>(sid);
    }
    p.sections.push_back(std::move(s));
  }
  const uint64_t n_steps = r.varint();
  if (n_steps > n + n_sections)
    throw CodecError(CodecError::Kind::malformed, r.offset(), "implausible schedule");
  for (uint64_t i = 0; i < n_steps; ++i) {
    uint64_t v = r.varint();
    SectionPlan::Step st;
    st.is_section = v & 1;
    st.index = static_cast<uint32_t>(v >> 1);
    p.schedule.push_back(st);
  }
  const uint64_t n_admitted = r.varint();
  if (n_admitted > n)
    throw CodecError(CodecError::Kind::malformed, r.offset(), "implausible admitted list");
  for (uint64_t i = 0; i < n_admitted; ++i) {
    uint64_t gate = r.varint();
    uint64_t bits = r.u64();
    double prob;
    std::memcpy(&prob, &bits, 8);
    p.admitted_p.emplace_back(static_cast<uint32_t>(gate), prob);
  }
  expect_done(r);
  // Cross-field consistency so a decoded plan can never drive the protocol
  // off a cliff.
  for (const auto& st : p.schedule) {
    if (st.is_section ? st.index >= p.sections.size() : st.index >= n)
      throw CodecError(CodecError::Kind::invariant, r.offset(), "schedule step out of range");
  }
  for (uint64_t i = 0; i < n; ++i) {
    bool reusable = p.reusable[i];
    if (reusable != (p.gate_section[i] == SectionPlan::kNoSection))
      throw CodecError(CodecError::Kind::invariant, r.offset(), "reusable flags inconsistent");
  }
  return p;
}

LeakageReport decode_leakage_report(std::span<const uint8_t> bytes) {
  std::vector<uint8_t> storage;
  Reader r = open_sealed(bytes, PayloadKind::leakage_report, storage);
  LeakageReport rep;
  rep.n_generator_inputs = static_cast<uint32_t>(r.u64());
  rep.n_gates = static_cast<uint32_t>(r.u64());
  const uint64_t n_wires = r.varint();
  rep.potentially_fixed = read_bit_list(r, n_wires);
  rep.potentially_intermediary = read_bit_list(r, rep.n_gates);
  rep.potentially_revealing = read_u32_list(r, rep.n_gates ? rep.n_gates - 1 : 0);
  rep.leaked_inputs =
      read_u32_list(r, rep.n_generator_inputs ? rep.n_generator_inputs - 1 : 0);
  rep.leaked_via_balanced = read_bit_list(r, rep.leaked_inputs.size());
  rep.lower_bound = r.u8() & 1;
  expect_done(r);
  return rep;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace crgc
