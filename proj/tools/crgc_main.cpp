// Command-line driver: build, analyze, partition, serve, evaluate and
// benchmark reusable garbled circuits.

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "crgc/bristol.hpp"
#include "crgc/builders.hpp"
#include "crgc/codec.hpp"
#include "crgc/leakage.hpp"
#include "crgc/net.hpp"
#include "crgc/obfuscate.hpp"
#include "crgc/prgc.hpp"

using json = nlohmann::json;
using namespace crgc;

namespace {

// Exit code classes: 0 success, 2 usage, 3 I/O, 4 file format, 5 protocol.
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitProtocol = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// "adder:8", "linear_query:1000x32", "set_intersection:16x8x12"
Circuit build_from_spec(const std::string& spec) {
  std::string name = spec;
  std::vector<uint64_t> dims;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t x = rest.find('x', pos);
      std::string tok = rest.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
      try {
        dims.push_back(std::stoull(tok));
      } catch (const std::exception&) {
        throw UsageError("bad builder size '" + tok + "' in " + spec);
      }
      if (x == std::string::npos) break;
      pos = x + 1;
    }
  }
  BuilderKind kind = builder_kind_from_name(name);
  BuilderParams p;
  switch (kind) {
    case BuilderKind::adder:
    case BuilderKind::subtract:
    case BuilderKind::multiplier:
    case BuilderKind::comparator:
    case BuilderKind::mux:
      if (dims.size() > 1) throw UsageError("expected " + name + ":<width>");
      if (!dims.empty()) p.width = static_cast<uint32_t>(dims[0]);
      break;
    case BuilderKind::linear_query:
    case BuilderKind::range_max:
      if (dims.size() != 2) throw UsageError("expected " + name + ":<elements>x<width>");
      p.elements = static_cast<uint32_t>(dims[0]);
      p.width = static_cast<uint32_t>(dims[1]);
      break;
    case BuilderKind::set_intersection:
      if (dims.size() != 3)
        throw UsageError("expected set_intersection:<elems_a>x<elems_b>x<width>");
      p.elements = static_cast<uint32_t>(dims[0]);
      p.elements_b = static_cast<uint32_t>(dims[1]);
      p.width = static_cast<uint32_t>(dims[2]);
      break;
  }
  return build_test_circuit(kind, p);
}

Circuit load_circuit(const std::string& circuit_path, const std::string& builder_spec) {
  if (circuit_path.empty() == builder_spec.empty())
    throw UsageError("give exactly one of --circuit and --builder");
  if (!builder_spec.empty()) return build_from_spec(builder_spec);
  if (circuit_path.size() > 5 && circuit_path.substr(circuit_path.size() - 5) == ".crgc")
    return decode_circuit(read_file(circuit_path));
  return parse_bristol_file(circuit_path);
}

// Accepts decimal, 0x hex, 0b bit strings (value interpretation, bit 0 =
// LSB), or "random". Width defaults to the declared arity.
BitVector parse_bits(const std::string& text, size_t width, uint64_t seed,
                     const char* what) {
  if (text == "random") {
    SplitRng rng = SplitRng(seed).substream("cli-random-input");
    BitVector v(width);
    for (size_t i = 0; i < width; ++i) v[i] = rng.next_bit();
    return v;
  }
  try {
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) {
      std::string bits = text.substr(2);
      if (bits.size() > width) throw UsageError("");
      BitVector v(width);
      for (size_t i = 0; i < bits.size(); ++i) {
        char ch = bits[bits.size() - 1 - i];
        if (ch != '0' && ch != '1') throw UsageError("");
        v[i] = ch - '0';
      }
      return v;
    }
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
      std::string hex = text.substr(2);
      if (hex.size() * 4 > width + 3) throw UsageError("");
      BitVector v(width);
      for (size_t i = 0; i < hex.size(); ++i) {
        char ch = hex[hex.size() - 1 - i];
        int nib = ch >= '0' && ch <= '9'   ? ch - '0'
                  : ch >= 'a' && ch <= 'f' ? ch - 'a' + 10
                  : ch >= 'A' && ch <= 'F' ? ch - 'A' + 10
                                           : -1;
        if (nib < 0) throw UsageError("");
        for (int b = 0; b < 4; ++b) {
          size_t idx = 4 * i + b;
          uint8_t bit = (nib >> b) & 1;
          if (idx >= width) {
            if (bit) throw UsageError("");
          } else {
            v[idx] = bit;
          }
        }
      }
      return v;
    }
    if (width > 64) throw UsageError("");
    return BitVector::from_u64(std::stoull(text), width);
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " value '" + text + "' does not fit " +
                     std::to_string(width) + " bits (decimal, 0x, 0b, or 'random')");
  }
}

std::string bits_to_string(const BitVector& v) {
  std::string s = v.to_string();
  if (v.size() <= 64) s += " (" + std::to_string(v.to_u64()) + ")";
  return s;
}

std::vector<BitVector> parse_b_list(const std::vector<std::string>& b_values,
                                    const std::string& b_file, size_t width, uint64_t seed) {
  std::vector<BitVector> bs;
  for (const std::string& v : b_values) {
    std::string tok;
    std::stringstream ss(v);
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) bs.push_back(parse_bits(tok, width, seed + bs.size(), "--b"));
  }
  if (!b_file.empty()) {
    std::ifstream in(b_file);
    if (!in) throw std::ios_base::failure("cannot open " + b_file);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) bs.push_back(parse_bits(line, width, seed + bs.size(), "--b-file"));
    }
  }
  return bs;
}

json leakage_json(const LeakageReport& r) {
  size_t pf_gates = 0;
  for (size_t w = r.potentially_fixed.size() - r.n_gates; w < r.potentially_fixed.size(); ++w)
    pf_gates += r.potentially_fixed[w];
  size_t pi = 0;
  for (uint8_t b : r.potentially_intermediary) pi += b;
  json leaks = json::array();
  for (size_t i = 0; i < r.leaked_inputs.size(); ++i)
    leaks.push_back({{"input", r.leaked_inputs[i]},
                     {"via_one_balanced_gate", r.leaked_via_balanced[i] != 0}});
  return json{{"inputs_leaked", r.leaked_inputs.size()},
              {"generator_inputs", r.n_generator_inputs},
              {"summary", r.summary()},
              {"potentially_fixed_gates", pf_gates},
              {"potentially_intermediary_gates", pi},
              {"potentially_revealing_gates", r.potentially_revealing.size()},
              {"leaked", leaks},
              {"lower_bound", r.lower_bound}};
}

void print_leakage(const LeakageReport& r) {
  std::cout << "inputs leaked: " << r.summary() << "\n";
  size_t pi = 0;
  for (uint8_t b : r.potentially_intermediary) pi += b;
  std::cout << "potentially revealing gates: " << r.potentially_revealing.size()
            << ", potentially intermediary gates: " << pi << "\n";
  for (size_t i = 0; i < r.leaked_inputs.size(); ++i) {
    std::cout << "  leaked generator input " << r.leaked_inputs[i]
              << (r.leaked_via_balanced[i] ? " (through one balanced gate)" : "") << "\n";
  }
  if (r.lower_bound && !r.leaked_inputs.empty())
    std::cout << "note: prediction is a lower bound on real leakage\n";
}

ThreatModel parse_threat_model(const std::string& s) {
  if (s == "hidden" || s == "circuit_hidden") return ThreatModel::circuit_hidden;
  if (s == "known" || s == "circuit_known") return ThreatModel::circuit_known;
  throw UsageError("unknown threat model '" + s + "' (hidden|known)");
}

std::pair<std::string, uint16_t> parse_host_port(const std::string& s) {
  auto colon = s.rfind(':');
  if (colon == std::string::npos) throw UsageError("expected host:port, got '" + s + "'");
  std::string host = s.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("bad port in '" + s + "'");
  }
  if (port < 0 || port > 65535) throw UsageError("bad port in '" + s + "'");
  return {host, static_cast<uint16_t>(port)};
}

std::atomic<bool> g_stop{false};

// ---- subcommands ----

int cmd_gen(const std::string& circuit_path, const std::string& builder_spec,
            const std::string& a_text, int a_width, uint64_t seed, const std::string& model,
            bool no_compress, std::string out_path) {
  Circuit c = load_circuit(circuit_path, builder_spec);
  const size_t width = a_width > 0 ? static_cast<size_t>(a_width) : c.n_generator_inputs;
  if (width != c.n_generator_inputs)
    throw UsageError("--a-width " + std::to_string(width) + " does not match the circuit's " +
                     std::to_string(c.n_generator_inputs) + " generator inputs");
  BitVector a = parse_bits(a_text, width, seed, "--a");

  auto t0 = std::chrono::steady_clock::now();
  auto res = construct_crgc(c, a, seed, parse_threat_model(model));
  double construct_s = seconds_since(t0);

  auto report = predict(c);
  auto bytes = encode(res.crgc, {.compress = !no_compress});
  auto raw_bytes = encode(res.crgc, {.compress = false});
  std::string text = write_bristol(c);

  if (out_path.empty())
    out_path = (builder_spec.empty() ? std::filesystem::path(circuit_path).stem().string()
                                     : builder_spec) +
               ".crgc";
  for (char& ch : out_path)
    if (ch == ':') ch = '_';
  write_file(out_path, bytes);

  std::cout << "gates: " << c.gates.size() << ", generator inputs: " << c.n_generator_inputs
            << ", evaluator inputs: " << c.n_evaluator_inputs << "\n";
  std::cout << "construction: " << construct_s << " s ("
            << static_cast<uint64_t>(c.gates.size() / std::max(construct_s, 1e-9))
            << " gates/s)\n";
  print_leakage(report);
  std::cout << "sizes: bristol text " << text.size() << " B, raw binary " << raw_bytes.size()
            << " B, file " << bytes.size() << " B ("
            << (100.0 * bytes.size() / std::max<size_t>(text.size(), 1)) << "% of text)\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& crgc_path, const std::vector<std::string>& b_values,
             const std::string& b_file, bool as_json) {
  Crgc g = decode_crgc(read_file(crgc_path));
  auto bs = parse_b_list(b_values, b_file, g.circuit.n_evaluator_inputs, 1);
  if (bs.empty()) return 0;

  std::vector<uint8_t> scratch;
  std::vector<BitVector> outs;
  auto t0 = std::chrono::steady_clock::now();
  for (const BitVector& b : bs) {
    evaluate_wires(g.circuit, g.a_prime, b, scratch);
    BitVector out(g.circuit.output_wires.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = scratch[g.circuit.output_wires[i]];
    outs.push_back(std::move(out));
  }
  double secs = seconds_since(t0);
  double gps = g.circuit.gates.size() * static_cast<double>(bs.size()) / std::max(secs, 1e-9);

  if (as_json) {
    json j;
    j["outputs"] = json::array();
    for (const auto& o : outs) j["outputs"].push_back(o.to_string());
    j["evaluations"] = bs.size();
    j["seconds"] = secs;
    j["gates_per_second"] = gps;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& o : outs) std::cout << bits_to_string(o) << "\n";
    std::cerr << bs.size() << " evaluations in " << secs << " s ("
              << static_cast<uint64_t>(gps) << " gates/s)\n";
  }
  return 0;
}

int cmd_leak(const std::string& circuit_path, const std::string& builder_spec, bool as_json,
             const std::string& out_path) {
  Circuit c = load_circuit(circuit_path, builder_spec);
  auto report = predict(c);
  if (!out_path.empty()) write_file(out_path, encode(report));
  if (as_json) std::cout << leakage_json(report).dump(2) << "\n";
  else print_leakage(report);
  return 0;
}

int cmd_partition(const std::string& circuit_path, const std::string& builder_spec,
                  const std::string& a_text, uint64_t seed, const std::string& model,
                  bool one_section, bool as_json, const std::string& out_path) {
  Circuit c = load_circuit(circuit_path, builder_spec);
  BitVector a = parse_bits(a_text, c.n_generator_inputs, seed, "--a");
  ThreatModel tm = parse_threat_model(model);
  auto res = construct_crgc(c, a, seed, tm);
  SectionPlan plan = partition(res.crgc.circuit, res.trace, tm, one_section);
  if (!out_path.empty()) write_file(out_path, encode(plan));

  size_t reusable = 0;
  for (uint8_t r : plan.reusable) reusable += r;
  if (as_json) {
    json sections = json::array();
    for (const auto& s : plan.sections)
      sections.push_back({{"gates", s.gates.size()},
                          {"input_uses", s.input_uses.size()},
                          {"outputs", s.output_wires.size()}});
    json j{{"gates", c.gates.size()},
           {"reusable_gates", reusable},
           {"sections", sections}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "gates: " << c.gates.size() << ", reusable: " << reusable << " ("
              << (100.0 * reusable / std::max<size_t>(c.gates.size(), 1)) << "%)\n";
    std::cout << "non-reusable sections: " << plan.sections.size() << "\n";
    for (size_t i = 0; i < plan.sections.size(); ++i) {
      const auto& s = plan.sections[i];
      std::cout << "  section " << i << ": " << s.gates.size() << " gates, "
                << s.input_uses.size() << " input-wire transfers, " << s.output_wires.size()
                << " outputs\n";
    }
  }
  return 0;
}

int cmd_serve(const std::string& listen, const std::string& mode_s,
              const std::string& circuit_path, const std::string& builder_spec,
              const std::string& a_text, uint64_t seed, const std::string& model,
              bool one_section) {
  auto [host, port] = parse_host_port(listen);
  ServeMode mode = mode_s == "prgc" ? ServeMode::prgc : ServeMode::crgc;
  if (mode_s != "prgc" && mode_s != "crgc") throw UsageError("--mode must be crgc or prgc");

  Circuit c = load_circuit(circuit_path, builder_spec);
  BitVector a = parse_bits(a_text, c.n_generator_inputs, seed, "--a");
  ThreatModel tm = parse_threat_model(model);
  auto res = construct_crgc(c, a, seed, tm);
  SectionPlan plan;
  if (mode == ServeMode::prgc) plan = partition(res.crgc.circuit, res.trace, tm, one_section);

  GeneratorServer::Options opt;
  opt.host = host;
  opt.port = port;
  opt.mode = mode;
  opt.protocol_seed = seed ^ 0xabcdef12345678ULL;
  GeneratorServer server(res.crgc, plan, opt);
  server.start();
  std::cout << "serving " << (mode == ServeMode::prgc ? "prgc" : "crgc") << " on " << host << ":"
            << server.port() << " (" << c.gates.size() << " gates)\n";
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  std::cout << "served " << server.sessions_served() << " sessions\n";
  return 0;
}

int cmd_client(const std::string& connect, const std::vector<std::string>& b_values,
               const std::string& b_file, const std::string& cache_dir, bool as_json) {
  auto [host, port] = parse_host_port(connect);
  EvaluatorOptions opt;
  opt.host = host;
  opt.port = port;
  opt.cache_dir = cache_dir;

  // The evaluator's input width comes from the served circuit: fetch (or
  // revalidate) the material first, then parse the inputs against it.
  auto probe = run_evaluator(opt, {});
  std::string root = cache_dir;
  if (root.empty()) {
    if (const char* env = std::getenv("CRGC_CACHE_DIR"); env && *env) root = env;
    else root = "crgc-cache";
  }
  uint32_t width = 0;
  {
    std::ifstream latest(root + "/" + host + "_" + std::to_string(port) + ".latest");
    std::string hex;
    if (!(latest >> hex)) throw NetError("no cached material after download");
    Crgc g = decode_crgc(read_file(root + "/" + hex + ".crgc"));
    width = g.circuit.n_evaluator_inputs;
  }
  auto bs = parse_b_list(b_values, b_file, width, 1);
  auto res = run_evaluator(opt, bs);
  res.bytes_downloaded += probe.bytes_downloaded;
  res.from_cache = probe.from_cache && res.from_cache;

  if (as_json) {
    json j;
    j["outputs"] = json::array();
    for (const auto& o : res.outputs) j["outputs"].push_back(o.to_string());
    j["mode"] = res.mode == ServeMode::prgc ? "prgc" : "crgc";
    j["from_cache"] = res.from_cache;
    j["bytes_downloaded"] = res.bytes_downloaded;
    j["bytes_per_eval_total"] = res.bytes_per_eval_total;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& o : res.outputs) std::cout << bits_to_string(o) << "\n";
    std::cerr << "mode: " << (res.mode == ServeMode::prgc ? "prgc" : "crgc")
              << (res.from_cache ? ", cache hit" : "")
              << ", downloaded " << res.bytes_downloaded << " B, protocol "
              << res.bytes_per_eval_total << " B\n";
  }
  return 0;
}

int cmd_bench(const std::string& builder_spec, const std::string& a_text, uint64_t seed,
              int evals, bool prgc_leg, bool as_json) {
  Circuit c = build_from_spec(builder_spec);
  BitVector a = parse_bits(a_text, c.n_generator_inputs, seed, "--a");
  const double gates = static_cast<double>(c.gates.size());
  json legs = json::array();
  auto add_leg = [&](const std::string& name, double secs, json extra = {}) {
    json leg{{"name", name}, {"seconds", secs}};
    leg["gates_per_second"] = gates / std::max(secs, 1e-9);
    for (auto& [k, v] : extra.items()) leg[k] = v;
    legs.push_back(leg);
  };

  auto t0 = std::chrono::steady_clock::now();
  auto res = construct_crgc(c, a, seed);
  double construct_s = seconds_since(t0);
  add_leg("construct", construct_s);

  t0 = std::chrono::steady_clock::now();
  auto report = predict(c);
  add_leg("leakage_predict", seconds_since(t0), {{"inputs_leaked", report.leaked_inputs.size()}});

  SplitRng brng(seed + 1);
  std::vector<uint8_t> scratch;
  std::vector<BitVector> bs;
  for (int i = 0; i < std::max(evals, 1); ++i) {
    BitVector b(c.n_evaluator_inputs);
    for (size_t k = 0; k < b.size(); ++k) b[k] = brng.next_bit();
    bs.push_back(std::move(b));
  }
  t0 = std::chrono::steady_clock::now();
  for (const auto& b : bs) evaluate_wires(res.crgc.circuit, res.crgc.a_prime, b, scratch);
  double eval_s = seconds_since(t0) / bs.size();
  add_leg("evaluate", eval_s, {{"evaluations", bs.size()}});

  t0 = std::chrono::steady_clock::now();
  auto bytes = encode(res.crgc);
  add_leg("encode_compress", seconds_since(t0), {{"bytes", bytes.size()}});

  t0 = std::chrono::steady_clock::now();
  Crgc back = decode_crgc(bytes);
  add_leg("decode", seconds_since(t0));

  // Disk import leg: the evaluator's cold-start path.
  const std::string tmp = "bench-tmp.crgc";
  t0 = std::chrono::steady_clock::now();
  write_file(tmp, bytes);
  auto re_read = read_file(tmp);
  Crgc from_disk = decode_crgc(re_read);
  add_leg("disk_import", seconds_since(t0), {{"bytes", re_read.size()}});
  std::filesystem::remove(tmp);
  if (from_disk.circuit.gates.size() != c.gates.size()) return kExitFormat;

  // Network send leg over a local socket pair.
  {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) == 0) {
      t0 = std::chrono::steady_clock::now();
      std::thread writer([&] {
        size_t off = 0;
        while (off < bytes.size()) {
          ssize_t n = ::write(sv[0], bytes.data() + off, bytes.size() - off);
          if (n <= 0) break;
          off += static_cast<size_t>(n);
        }
        ::shutdown(sv[0], SHUT_WR);
      });
      std::vector<uint8_t> received(bytes.size());
      size_t off = 0;
      while (off < received.size()) {
        ssize_t n = ::read(sv[1], received.data() + off, received.size() - off);
        if (n <= 0) break;
        off += static_cast<size_t>(n);
      }
      writer.join();
      add_leg("network_send", seconds_since(t0), {{"bytes", bytes.size()}});
      ::close(sv[0]);
      ::close(sv[1]);
    }
  }

  if (prgc_leg) {
    ThreatModel tm = ThreatModel::circuit_hidden;
    t0 = std::chrono::steady_clock::now();
    SectionPlan plan = partition(res.crgc.circuit, res.trace, tm);
    add_leg("partition", seconds_since(t0), {{"sections", plan.sections.size()}});
    InProcessGenerator gen(res.crgc, plan, seed + 2);
    t0 = std::chrono::steady_clock::now();
    uint64_t proto_bytes = 0;
    for (const auto& b : bs) {
      evaluate_prgc(plan, res.crgc, gen, b);
      proto_bytes += gen.bytes_sent_current_eval();
    }
    add_leg("prgc_evaluate", seconds_since(t0) / bs.size(),
            {{"bytes_per_eval", proto_bytes / bs.size()}});
  }

  json out{{"circuit", builder_spec},
           {"gates", c.gates.size()},
           {"generator_inputs", c.n_generator_inputs},
           {"evaluator_inputs", c.n_evaluator_inputs},
           {"seed", seed},
           {"legs", legs}};
  if (builder_spec.rfind("linear_query", 0) == 0 || builder_spec.rfind("range_max", 0) == 0 ||
      builder_spec.rfind("set_intersection", 0) == 0) {
    auto colon = builder_spec.find(':');
    uint64_t elements = std::stoull(builder_spec.substr(colon + 1));
    out["elements"] = elements;
    for (auto& leg : out["legs"])
      leg["elements_per_second"] = elements / std::max(leg["seconds"].get<double>(), 1e-9);
  }
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "circuit " << builder_spec << ": " << c.gates.size() << " gates\n";
    for (auto& leg : out["legs"]) {
      std::cout << "  " << leg["name"].get<std::string>() << ": " << leg["seconds"].get<double>()
                << " s, " << static_cast<uint64_t>(leg["gates_per_second"].get<double>())
                << " gates/s";
      if (leg.contains("elements_per_second"))
        std::cout << ", " << static_cast<uint64_t>(leg["elements_per_second"].get<double>())
                  << " elements/s";
      if (leg.contains("bytes")) std::cout << ", " << leg["bytes"].get<uint64_t>() << " B";
      std::cout << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reusable garbled circuit toolkit"};
  app.require_subcommand(1);

  std::string circuit_path, builder_spec, a_text = "random", out_path, model = "hidden";
  std::string crgc_path, b_file, listen = "127.0.0.1:7155", connect = "127.0.0.1:7155";
  std::string cache_dir, mode = "crgc";
  std::vector<std::string> b_values;
  uint64_t seed = 1;
  int a_width = 0, evals = 8;
  bool no_compress = false, as_json = false, one_section = false, prgc_leg = false;

  auto add_circuit_opts = [&](CLI::App* cmd) {
    cmd->add_option("--circuit", circuit_path, "Bristol-fashion or .crgc circuit file");
    cmd->add_option("--builder", builder_spec,
                    "builder spec: adder:8 | subtract:64 | multiplier:16 | comparator:32 | "
                    "mux:8 | linear_query:1000x32 | range_max:64x8 | "
                    "set_intersection:16x8x12");
  };

  CLI::App* gen = app.add_subcommand("gen", "construct a reusable garbled circuit file");
  add_circuit_opts(gen);
  gen->add_option("--a", a_text, "generator input (decimal, 0x, 0b, or 'random')");
  gen->add_option("--a-width", a_width, "declared width of --a (must match the circuit)");
  gen->add_option("--seed", seed, "construction seed");
  gen->add_option("--threat-model", model, "hidden|known");
  gen->add_flag("--no-compress", no_compress, "skip the compression stage");
  gen->add_option("--out", out_path, "output path (default: <circuit>.crgc)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a .crgc file on evaluator inputs");
  eval->add_option("--crgc", crgc_path, "input .crgc file")->required();
  eval->add_option("--b", b_values, "evaluator input(s), comma separated");
  eval->add_option("--b-file", b_file, "file with one evaluator input per line");
  eval->add_flag("--json", as_json, "machine-readable output");

  CLI::App* leak = app.add_subcommand("leak", "predict generator-input leakage of a circuit");
  add_circuit_opts(leak);
  leak->add_flag("--json", as_json, "machine-readable output");
  leak->add_option("--out", out_path, "write the structured report to this file");

  CLI::App* part = app.add_subcommand("partition", "split a circuit into reusable and "
                                                   "non-reusable sections");
  add_circuit_opts(part);
  part->add_option("--a", a_text, "generator input");
  part->add_option("--seed", seed, "construction seed");
  part->add_option("--threat-model", model, "hidden|known");
  part->add_flag("--one-section", one_section, "merge everything into one section");
  part->add_flag("--json", as_json, "machine-readable output");
  part->add_option("--out", out_path, "write the encoded plan to this file");

  CLI::App* serve = app.add_subcommand("serve", "serve a circuit to evaluators");
  add_circuit_opts(serve);
  serve->add_option("--listen", listen, "host:port (default 127.0.0.1:7155)");
  serve->add_option("--mode", mode, "crgc|prgc");
  serve->add_option("--a", a_text, "generator input");
  serve->add_option("--seed", seed, "construction seed");
  serve->add_option("--threat-model", model, "hidden|known");
  serve->add_flag("--one-section", one_section, "single non-reusable section");

  CLI::App* client = app.add_subcommand("client", "evaluate against a serving generator");
  client->add_option("--connect", connect, "host:port");
  client->add_option("--b", b_values, "evaluator input(s), comma separated");
  client->add_option("--b-file", b_file, "file with one evaluator input per line");
  client->add_option("--cache", cache_dir, "cache directory (or $CRGC_CACHE_DIR)");
  client->add_flag("--json", as_json, "machine-readable output");

  CLI::App* bench = app.add_subcommand("bench", "time construction, analysis, evaluation and "
                                                "shipping legs");
  bench->add_option("--builder", builder_spec, "builder spec")->required();
  bench->add_option("--a", a_text, "generator input (default random)");
  bench->add_option("--seed", seed, "seed");
  bench->add_option("--evals", evals, "evaluations per timing sample");
  bench->add_flag("--prgc", prgc_leg, "also time the hybrid per-evaluation protocol");
  bench->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(circuit_path, builder_spec, a_text, a_width, seed, model, no_compress,
                     out_path);
    if (eval->parsed()) return cmd_eval(crgc_path, b_values, b_file, as_json);
    if (leak->parsed()) return cmd_leak(circuit_path, builder_spec, as_json, out_path);
    if (part->parsed())
      return cmd_partition(circuit_path, builder_spec, a_text, seed, model, one_section,
                           as_json, out_path);
    if (serve->parsed())
      return cmd_serve(listen, mode, circuit_path, builder_spec, a_text, seed, model,
                       one_section);
    if (client->parsed()) return cmd_client(connect, b_values, b_file, cache_dir, as_json);
    if (bench->parsed()) return cmd_bench(builder_spec, a_text, seed, evals, prgc_leg, as_json);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CodecError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const CircuitError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const NetError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}
