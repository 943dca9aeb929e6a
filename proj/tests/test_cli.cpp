#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "crgc/codec.hpp"

#ifndef CRGC_TOOL_PATH
#error "CRGC_TOOL_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(CRGC_TOOL_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = ::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("crgc-cli-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("gen then eval composes to the plain semantics") {
  TempDir dir;
  auto out = (dir.path / "adder8.crgc").string();
  auto g = run("gen --builder adder:8 --a 3 --seed 7 --out " + out);
  REQUIRE(g.exit_code == 0);
  CHECK(g.output.find("inputs leaked: 0/8") != std::string::npos);
  CHECK(fs::exists(out));

  auto e = run("eval --crgc " + out + " --b 5");
  REQUIRE(e.exit_code == 0);
  CHECK(e.output.find("(8)") != std::string::npos);

  // 256 sums
  std::string list;
  for (int v = 0; v < 256; ++v) list += (v ? "," : "") + std::to_string(v);
  auto all = run("eval --crgc " + out + " --b " + list + " --json");
  REQUIRE(all.exit_code == 0);
  auto j = nlohmann::json::parse(all.output);
  REQUIRE(j["outputs"].size() == 256);
  for (int v = 0; v < 256; ++v) {
    std::string bits = j["outputs"][v].get<std::string>();
    uint64_t got = 0;
    for (size_t i = 0; i < bits.size(); ++i)
      if (bits[i] == '1') got |= 1ull << i;
    CHECK(got == ((3 + static_cast<uint64_t>(v)) & 0xff));
  }
}

TEST_CASE("gen is byte-reproducible for a fixed seed") {
  TempDir dir;
  auto out1 = (dir.path / "m1.crgc").string();
  auto out2 = (dir.path / "m2.crgc").string();
  REQUIRE(run("gen --builder multiplier:8 --a 77 --seed 9 --out " + out1).exit_code == 0);
  REQUIRE(run("gen --builder multiplier:8 --a 77 --seed 9 --out " + out2).exit_code == 0);
  CHECK(crgc::read_file(out1) == crgc::read_file(out2));
}

TEST_CASE("usage errors exit with the usage class") {
  TempDir dir;
  auto out = (dir.path / "x.crgc").string();
  // --a wider than the circuit's generator arity
  CHECK(run("gen --builder adder:8 --a 3 --a-width 9 --out " + out).exit_code == 2);
  CHECK(run("gen --builder adder:8 --a 0x1ffff --out " + out).exit_code == 2);
  CHECK(run("gen --builder frobnicator:8 --a 0 --out " + out).exit_code == 2);
  CHECK(run("gen --builder adder:8 --circuit also.txt --a 0 --out " + out).exit_code == 2);
  CHECK(run("nonsense-subcommand").exit_code == 2);
}

TEST_CASE("empty b-list exits 0 with no output") {
  TempDir dir;
  auto out = (dir.path / "cmp.crgc").string();
  REQUIRE(run("gen --builder comparator:8 --a 100 --seed 3 --out " + out).exit_code == 0);
  auto e = run("eval --crgc " + out);
  CHECK(e.exit_code == 0);
  CHECK(e.output.empty());
}

TEST_CASE("corrupted file exits with the format class") {
  TempDir dir;
  auto out = (dir.path / "adder.crgc").string();
  REQUIRE(run("gen --builder adder:8 --a 1 --seed 1 --out " + out).exit_code == 0);
  auto bytes = crgc::read_file(out);
  bytes[bytes.size() / 2] ^= 0x80;
  crgc::write_file(out, bytes);
  CHECK(run("eval --crgc " + out + " --b 1").exit_code == 4);

  auto missing = run("eval --crgc " + (dir.path / "nope.crgc").string() + " --b 1");
  CHECK(missing.exit_code == 3);
}

TEST_CASE("leak prints the summary line and is deterministic") {
  auto r1 = run("leak --builder adder:64");
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("inputs leaked: 0/64") != std::string::npos);
  auto r2 = run("leak --builder adder:64");
  CHECK(r1.output == r2.output);

  TempDir dir;
  auto rep = (dir.path / "report.bin").string();
  auto j = run("leak --builder multiplier:16 --json --out " + rep);
  REQUIRE(j.exit_code == 0);
  auto parsed = nlohmann::json::parse(j.output);
  CHECK(parsed["generator_inputs"] == 16);
  CHECK(parsed["inputs_leaked"].get<size_t>() <= 3);
  CHECK(parsed["lower_bound"].get<bool>());
  auto decoded = crgc::decode_leakage_report(crgc::read_file(rep));
  CHECK(decoded.leaked_inputs.size() == parsed["inputs_leaked"].get<size_t>());
}

TEST_CASE("all-balanced circuit reports 0/n") {
  TempDir dir;
  auto path = (dir.path / "xors.txt").string();
  std::ofstream f(path);
  f << "3 7\n2 2 1\n2 1 0 2 4 XOR\n2 1 1 3 5 XOR\n2 1 4 5 6 XNOR\n";
  f.close();
  auto r = run("leak --circuit " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("inputs leaked: 0/2") != std::string::npos);
}

TEST_CASE("partition --json reports sections") {
  auto r = run("partition --builder adder:8 --a 3 --seed 1 --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["gates"] == 34);
  CHECK(j["reusable_gates"].get<size_t>() + [&] {
    size_t s = 0;
    for (auto& sec : j["sections"]) s += sec["gates"].get<size_t>();
    return s;
  }() == 34);

  auto one = run("partition --builder adder:8 --a 3 --seed 1 --one-section --json");
  auto j1 = nlohmann::json::parse(one.output);
  CHECK(j1["sections"].size() <= 1);
}

TEST_CASE("bench emits schema-valid json with stable correctness columns") {
  auto r = run("bench --builder linear_query:200x16 --seed 5 --evals 3 --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j["circuit"] == "linear_query:200x16");
  CHECK(j["gates"].get<uint64_t>() > 1000);
  CHECK(j["elements"] == 200);
  std::vector<std::string> names;
  for (auto& leg : j["legs"]) {
    names.push_back(leg["name"].get<std::string>());
    CHECK(leg["seconds"].is_number());
    CHECK(leg["gates_per_second"].is_number());
    CHECK(leg["elements_per_second"].is_number());
  }
  for (const char* want : {"construct", "leakage_predict", "evaluate", "encode_compress",
                           "decode", "disk_import", "network_send"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());

  // identical seed -> identical correctness-relevant columns
  auto r2 = run("bench --builder linear_query:200x16 --seed 5 --evals 3 --json");
  auto j2 = nlohmann::json::parse(r2.output);
  CHECK(j["gates"] == j2["gates"]);
  for (size_t i = 0; i < j["legs"].size(); ++i) {
    auto &a = j["legs"][i], &b = j2["legs"][i];
    CHECK(a["name"] == b["name"]);
    if (a.contains("bytes")) CHECK(a["bytes"] == b["bytes"]);
    if (a.contains("inputs_leaked")) CHECK(a["inputs_leaked"] == b["inputs_leaked"]);
  }
}

TEST_CASE("gen accepts bristol files and bit-string inputs") {
  TempDir dir;
  auto path = (dir.path / "mini.txt").string();
  std::ofstream f(path);
  f << "2 5\n2 1 2\n2 1 0 2 3 AND\n2 1 3 1 4 XOR\n";
  f.close();
  auto out = (dir.path / "mini.crgc").string();
  auto g = run("gen --circuit " + path + " --a 0b10 --seed 4 --out " + out);
  REQUIRE(g.exit_code == 0);
  // a = 0b10 -> a0=0, a1=1. Outputs: [a0&b0, (a0&b0)^a1] = "01" for both b.
  auto e = run("eval --crgc " + out + " --b 0,1 --json");
  auto j = nlohmann::json::parse(e.output);
  CHECK(j["outputs"][0].get<std::string>() == "01");
  CHECK(j["outputs"][1].get<std::string>() == "01");
}
