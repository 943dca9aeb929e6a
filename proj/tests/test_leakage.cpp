#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "crgc/builders.hpp"
#include "crgc/leakage.hpp"
#include "crgc/obfuscate.hpp"
#include "helpers.hpp"
#include "leak_oracle.hpp"

using namespace crgc;
using crgc::testing::fig6_circuit;
using crgc::testing::random_bits;

TEST_CASE("potentially fixed: rule cases") {
  SUBCASE("imbalanced gate with a generator parent") {
    CircuitBuilder b(1, 1);
    WireId g = b.land(0, 1);
    Circuit c = b.finish({b.lxor(g, 1)});
    auto pf = potentially_fixed(c);
    CHECK(pf[0] == 1);
    CHECK(pf[1] == 0);
    CHECK(pf[g] == 1);
  }
  SUBCASE("balanced gate with one unfixed parent") {
    CircuitBuilder b(1, 1);
    WireId g = b.lxor(0, 1);
    Circuit c = b.finish({b.land(g, 1)});
    CHECK(potentially_fixed(c)[g] == 0);
  }
  SUBCASE("passthrough and constant tables") {
    CircuitBuilder b(1, 1);
    WireId pl = b.gate(0, 1, tables::NOT_LEFT);   // follows left parent (generator)
    WireId pr = b.gate(0, 1, tables::RIGHT);      // follows right parent (evaluator)
    WireId k = b.gate(0, 1, tables::ONE);
    WireId o = b.lor(b.lor(pl, pr), k);
    Circuit c = b.finish({o});
    auto pf = potentially_fixed(c);
    CHECK(pf[pl] == 1);
    CHECK(pf[pr] == 0);
    CHECK(pf[k] == 1);
  }
}

TEST_CASE("potentially fixed is a superset of every actual fixed set") {
  SplitRng arng(71);
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Circuit c = random_circuit(seed + 4000, 100, 6, 6, 4);
    auto pf = potentially_fixed(c);
    // exhaustive over all 64 generator inputs
    std::vector<uint8_t> is_fixed, fixed_value;
    for (uint64_t av = 0; av < 64; ++av) {
      classify_fixed_for_input(c, BitVector::from_u64(av, 6), is_fixed, fixed_value);
      for (uint32_t w = 0; w < c.n_wires(); ++w)
        if (is_fixed[w] && !pf[w]) FAIL("fixed wire ", w, " not potentially fixed, a=", av);
    }
  }
}

TEST_CASE("potentially intermediary is a superset of every actual intermediary set") {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Circuit c = random_circuit(seed + 4600, 90, 5, 5, 3);
    auto pf = potentially_fixed(c);
    auto pi = potentially_intermediary(c, pf);
    std::vector<uint8_t> is_fixed, fixed_value;
    for (uint64_t av = 0; av < 32; ++av) {
      classify_fixed_for_input(c, BitVector::from_u64(av, 5), is_fixed, fixed_value);
      auto passive = unreachable_behind_barrier(c, is_fixed);
      auto prod = producer_map(c);
      for (size_t g = 0; g < c.gates.size(); ++g) {
        bool fixed_gate = is_fixed[c.gates[g].out];
        if (passive[g] && !fixed_gate && !pi[g] && !pf[c.gates[g].out])
          FAIL("intermediary gate ", g, " missed, a=", av);
      }
    }
  }
}

TEST_CASE("potentially intermediary: barrier topology") {
  // Same shape as the intermediary-section circuit, with the two barrier
  // gates only potentially fixed.
  CircuitBuilder b(1, 2);
  WireId g1 = b.lxor(1, 2);
  WireId g2 = b.lxor(1, g1);
  WireId g3 = b.lxor(2, g1);
  WireId g4 = b.lxor(g2, g3);
  WireId f1 = b.land(0, g4);
  WireId f2 = b.land(0, g3);
  Circuit c = b.finish({b.lxor(f1, f2)});
  auto pf = potentially_fixed(c);
  REQUIRE(pf[f1] == 1);
  REQUIRE(pf[f2] == 1);
  auto pi = potentially_intermediary(c, pf);
  auto prod = producer_map(c);
  for (WireId w : {g1, g2, g3, g4}) CHECK(pi[prod[w]] == 1);
}

TEST_CASE("potentially intermediary: only inputs potentially fixed") {
  CircuitBuilder b(1, 1);
  WireId g = b.lxor(0, 1);
  WireId dead = b.lxor(1, 1);
  Circuit c = b.finish({b.lxnor(g, 1)});
  auto pf = potentially_fixed(c);
  auto pi = potentially_intermediary(c, pf);
  auto prod = producer_map(c);
  CHECK(pi[prod[g]] == 0);
  CHECK(pi[prod[dead]] == 1);  // dead gate
}

TEST_CASE("potentially revealing") {
  SUBCASE("level-1 AND over evaluator inputs feeding an output") {
    CircuitBuilder b(0, 2);
    WireId g = b.land(0, 1);
    Circuit c = b.finish({b.lxor(g, 1)});
    auto r = predict(c);
    auto prod = producer_map(c);
    CHECK(r.potentially_revealing == std::vector<uint32_t>{static_cast<uint32_t>(prod[g])});
  }
  SUBCASE("balanced gates never reveal") {
    Circuit c = random_circuit(55, 200, 4, 4, 4, /*balanced_permille=*/1000);
    CHECK(predict(c).potentially_revealing.empty());
  }
  SUBCASE("three-level circuit: both AND gates reveal") {
    Circuit c = fig6_circuit();
    auto r = predict(c);
    CHECK(r.potentially_revealing == std::vector<uint32_t>{3, 4});
  }
  SUBCASE("disjoint from balanced and potentially passive") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      Circuit c = random_circuit(seed + 6000, 120, 5, 5, 4);
      auto r = predict(c);
      std::set<uint32_t> rev(r.potentially_revealing.begin(), r.potentially_revealing.end());
      for (uint32_t g : rev) {
        CHECK(!c.gates[g].table.is_balanced());
        CHECK(!r.potentially_fixed[c.gates[g].out]);
        CHECK(!r.potentially_intermediary[g]);
      }
    }
  }
}

TEST_CASE("leaked inputs: path rules") {
  SUBCASE("passthrough step costs nothing on the path") {
    // a0 -> NOT -> XOR -> revealing AND: one balanced gate plus a free
    // passthrough step keeps the input inside the threshold.
    CircuitBuilder b(1, 2);
    WireId p = b.lnot(0);
    WireId x = b.lxor(p, 1);
    WireId g = b.land(x, 2);
    Circuit c = b.finish({b.lxor(g, 1)});
    auto r = predict(c);
    REQUIRE(!r.potentially_revealing.empty());
    CHECK(r.leaked_inputs == std::vector<uint32_t>{0});
    CHECK(r.leaked_via_balanced == std::vector<uint8_t>{1});
  }
  SUBCASE("a revealing gate can never touch a generator input directly") {
    // Any imbalanced gate with a generator-input parent is potentially fixed
    // by the or-rule, so every flagged input crosses exactly one balanced
    // gate.
    for (uint64_t seed = 0; seed < 200; ++seed) {
      Circuit c = random_circuit(seed + 7100, 120, 6, 6, 4);
      auto r = predict(c);
      for (uint8_t via : r.leaked_via_balanced) CHECK(via == 1);
    }
  }
  SUBCASE("one balanced gate on the path still leaks") {
    CircuitBuilder b(1, 2);
    WireId x = b.lxor(0, 1);
    WireId g = b.land(x, 2);
    Circuit c = b.finish({b.lxor(g, 1)});
    auto r = predict(c);
    CHECK(r.leaked_inputs == std::vector<uint32_t>{0});
    CHECK(r.leaked_via_balanced == std::vector<uint8_t>{1});
  }
  SUBCASE("two chained balanced gates protect the input") {
    CircuitBuilder b(1, 3);
    WireId x1 = b.lxor(0, 1);
    WireId x2 = b.lxor(x1, 2);
    WireId g = b.land(x2, 3);
    Circuit c = b.finish({b.lxor(g, 1)});
    auto r = predict(c);
    REQUIRE(!r.potentially_revealing.empty());
    CHECK(r.leaked_inputs.empty());
  }
  SUBCASE("three-level circuit leaks every generator input") {
    auto r = predict(fig6_circuit());
    CHECK(r.leaked_inputs == std::vector<uint32_t>{0, 1, 2});
    CHECK(r.summary() == "3/3");
  }
}

TEST_CASE("predict: composition properties") {
  SUBCASE("all-XOR circuit leaks nothing") {
    Circuit c = random_circuit(99, 300, 8, 8, 5, /*balanced_permille=*/1000);
    auto r = predict(c);
    CHECK(r.leaked_inputs.empty());
    CHECK(r.summary() == "0/8");
  }
  SUBCASE("deterministic and independent of any generator input") {
    Circuit c = random_circuit(123, 150, 6, 6, 4);
    CHECK(predict(c) == predict(c));
  }
  SUBCASE("lower bound flag always set") { CHECK(predict(fig6_circuit()).lower_bound); }
  SUBCASE("builder adder leaks at most 2") {
    Circuit c = build_test_circuit(BuilderKind::adder, {.width = 8});
    CHECK(predict(c).leaked_inputs.size() <= 2);
  }
  SUBCASE("builder circuits stay within the reference leak counts + 1") {
    struct Row { BuilderKind kind; BuilderParams p; size_t bound; };
    std::vector<Row> rows = {
        {BuilderKind::adder, {.width = 64}, 2},
        {BuilderKind::subtract, {.width = 64}, 2},
        {BuilderKind::multiplier, {.width = 16}, 3},
    };
    for (const auto& row : rows) {
      auto r = predict(build_test_circuit(row.kind, row.p));
      CHECK(r.leaked_inputs.size() <= row.bound);
    }
  }
}

TEST_CASE("distinguisher confirms every flagged input on witness circuits") {
  // Circuits whose flags we can also confirm empirically: the CRGC artifacts
  // constructed under a_i = 0 and a_i = 1 must differ detectably in the
  // revealing gate's cone.
  std::vector<Circuit> circuits;
  circuits.push_back(fig6_circuit());
  {
    CircuitBuilder b(2, 2);
    WireId x = b.lxor(0, 2);
    WireId y = b.lxor(1, 3);
    WireId g = b.land(x, y);
    circuits.push_back(b.finish({b.lxor(g, 2)}));
  }
  {
    CircuitBuilder b(1, 2);
    WireId p = b.lnot(0);  // passthrough step on the witness path
    WireId x = b.lxor(p, 1);
    WireId g = b.lor(x, 2);
    circuits.push_back(b.finish({b.lxor(g, 1)}));
  }

  SplitRng arng(83);
  for (size_t ci = 0; ci < circuits.size(); ++ci) {
    const Circuit& c = circuits[ci];
    auto report = predict(c);
    auto wits = crgc::testing::leak_witnesses(c, report.potentially_revealing);
    REQUIRE(wits.size() == report.leaked_inputs.size());
    BitVector base = random_bits(arng, c.n_generator_inputs);
    for (const auto& wit : wits) {
      double tv = crgc::testing::distinguish_leak(c, base, wit, 300, ci * 1000 + 17);
      INFO("circuit ", ci, " input ", wit.input);
      CHECK(tv >= 0.5);
    }
  }
}

TEST_CASE("an input whose cone dies behind a fixed gate is genuinely masked") {
  // x1 = XOR(a0, b0) feeds only f = AND(a1, x1). With a1 = 0, f is fixed, x1
  // is intermediary, and both tables are re-randomized: the shipped artifact
  // carries no trace of a0. A separate revealing cone flags a2 and confirms;
  // the same distinguisher pointed at a0's cone stays at the noise floor.
  CircuitBuilder b(3, 3);
  WireId x1 = b.lxor(0, 3);   // XOR(a0, b0)
  WireId f = b.land(1, x1);   // AND(a1, x1)
  WireId y = b.lxor(2, 4);    // XOR(a2, b1)
  WireId g = b.land(y, 5);    // revealing
  Circuit c = b.finish({b.lxor(f, g)});
  auto report = predict(c);
  REQUIRE(report.leaked_inputs == std::vector<uint32_t>{2});

  BitVector base = BitVector::from_u64(0, 3);  // a1 = 0 keeps f fixed
  auto wits = crgc::testing::leak_witnesses(c, report.potentially_revealing);
  REQUIRE(wits.size() == 1);
  CHECK(wits[0].input == 2);
  double tv_flagged = crgc::testing::distinguish_leak(c, base, wits[0], 300, 70);
  CHECK(tv_flagged >= 0.5);

  crgc::testing::LeakWitness masked;
  masked.input = 0;
  masked.revealing_gate = report.potentially_revealing[0];
  masked.path = {x1, 0};
  double tv_masked = crgc::testing::distinguish_leak(c, base, masked, 1200, 71);
  CHECK(tv_masked < 0.35);
}
