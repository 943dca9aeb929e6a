#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crgc/bristol.hpp"
#include "crgc/builders.hpp"
#include "crgc/codec.hpp"
#include "crgc/leakage.hpp"
#include "crgc/obfuscate.hpp"
#include "crgc/prgc.hpp"

namespace py = pybind11;
using namespace crgc;

namespace {

BitVector to_bits(const std::vector<int>& xs) {
  BitVector v(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) v[i] = static_cast<uint8_t>(xs[i] & 1);
  return v;
}

std::vector<int> from_bits(const BitVector& v) {
  std::vector<int> xs(v.size());
  for (size_t i = 0; i < v.size(); ++i) xs[i] = v[i];
  return xs;
}

py::bytes to_pybytes(const std::vector<uint8_t>& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<uint8_t> from_pybytes(const py::bytes& b) {
  std::string s = b;
  return std::vector<uint8_t>(s.begin(), s.end());
}

}  // namespace

PYBIND11_MODULE(_crgc, m) {
  m.doc() = "reusable garbled circuits: construction, leakage prediction, hybrid protocol";

  py::class_<TruthTable>(m, "TruthTable")
      .def(py::init([](const std::string& s) { return TruthTable::from_string(s); }))
      .def("__str__", &TruthTable::to_string)
      .def("__eq__", [](const TruthTable& a, const TruthTable& b) { return a == b; })
      .def("entry", &TruthTable::entry)
      .def_property_readonly("balanced", &TruthTable::is_balanced)
      .def_property_readonly("constant", &TruthTable::is_constant);

  py::class_<Gate>(m, "Gate")
      .def_readonly("left", &Gate::left)
      .def_readonly("right", &Gate::right)
      .def_readonly("out", &Gate::out)
      .def_property_readonly("table", [](const Gate& g) { return g.table.to_string(); });

  py::class_<Circuit>(m, "Circuit")
      .def_readonly("n_generator_inputs", &Circuit::n_generator_inputs)
      .def_readonly("n_evaluator_inputs", &Circuit::n_evaluator_inputs)
      .def_property_readonly("n_gates", [](const Circuit& c) { return c.gates.size(); })
      .def_property_readonly("gates", [](const Circuit& c) { return c.gates; })
      .def_property_readonly("output_wires", [](const Circuit& c) { return c.output_wires; })
      .def("__repr__", [](const Circuit& c) {
        return "<Circuit gates=" + std::to_string(c.gates.size()) + " a=" +
               std::to_string(c.n_generator_inputs) + " b=" +
               std::to_string(c.n_evaluator_inputs) + ">";
      });

  py::class_<CrgcMeta>(m, "CrgcMeta")
      .def_property_readonly("threat_model",
                             [](const CrgcMeta& x) {
                               return x.threat_model == ThreatModel::circuit_known ? "known"
                                                                                   : "hidden";
                             })
      .def_readonly("seed_commitment", &CrgcMeta::seed_commitment);

  py::class_<Crgc>(m, "Crgc")
      .def_readonly("circuit", &Crgc::circuit)
      .def_property_readonly("a_prime", [](const Crgc& g) { return from_bits(g.a_prime); })
      .def_readonly("meta", &Crgc::meta);

  py::class_<LeakageReport>(m, "LeakageReport")
      .def_readonly("leaked_inputs", &LeakageReport::leaked_inputs)
      .def_readonly("potentially_revealing", &LeakageReport::potentially_revealing)
      .def_readonly("lower_bound", &LeakageReport::lower_bound)
      .def("summary", &LeakageReport::summary);

  py::class_<NonReusableSection>(m, "NonReusableSection")
      .def_readonly("gates", &NonReusableSection::gates)
      .def_readonly("input_uses", &NonReusableSection::input_uses)
      .def_readonly("output_wires", &NonReusableSection::output_wires);

  py::class_<SectionPlan>(m, "SectionPlan")
      .def_readonly("sections", &SectionPlan::sections)
      .def_property_readonly("reusable_gates", [](const SectionPlan& p) {
        size_t n = 0;
        for (uint8_t r : p.reusable) n += r;
        return n;
      });

  m.def("parse_bristol", [](const std::string& text) { return parse_bristol(text); },
        py::arg("text"), "Parse a Bristol-fashion circuit from text.");
  m.def("write_bristol", &write_bristol, py::arg("circuit"));

  m.def(
      "build_circuit",
      [](const std::string& kind, uint32_t width, uint32_t elements, uint32_t elements_b) {
        BuilderParams p;
        p.width = width;
        p.elements = elements;
        p.elements_b = elements_b;
        return build_test_circuit(builder_kind_from_name(kind), p);
      },
      py::arg("kind"), py::arg("width") = 8, py::arg("elements") = 4,
      py::arg("elements_b") = 4,
      "Builder combinators: adder, subtract, multiplier, comparator, mux, linear_query, "
      "range_max, set_intersection.");

  m.def("random_circuit", &random_circuit, py::arg("seed"), py::arg("n_gates"), py::arg("n_a"),
        py::arg("n_b"), py::arg("n_out"), py::arg("balanced_permille") = -1);

  m.def(
      "evaluate",
      [](const Circuit& c, const std::vector<int>& a, const std::vector<int>& b) {
        return from_bits(evaluate(c, to_bits(a), to_bits(b)));
      },
      py::arg("circuit"), py::arg("a"), py::arg("b"));

  m.def(
      "construct_crgc",
      [](const Circuit& c, const std::vector<int>& a, uint64_t seed, const std::string& model) {
        ThreatModel tm = model == "known" ? ThreatModel::circuit_known
                                          : ThreatModel::circuit_hidden;
        auto res = construct_crgc(c, to_bits(a), seed, tm);
        return res.crgc;
      },
      py::arg("circuit"), py::arg("a"), py::arg("seed"), py::arg("threat_model") = "hidden",
      "Construct the obfuscated circuit and encoded input for one generator input.");

  m.def(
      "chain_obfuscate",
      [](const Crgc& prev, const std::vector<int>& own, uint64_t seed) {
        return chain_obfuscate(prev, to_bits(own), seed).crgc;
      },
      py::arg("prev"), py::arg("own_input"), py::arg("seed"));

  m.def(
      "evaluate_crgc",
      [](const Crgc& g, const std::vector<int>& b) {
        return from_bits(evaluate(g.circuit, g.a_prime, to_bits(b)));
      },
      py::arg("crgc"), py::arg("b"));

  m.def("predict_leakage", &predict, py::arg("circuit"));

  m.def(
      "partition",
      [](const Circuit& c, const std::vector<int>& a, uint64_t seed, const std::string& model,
         bool one_section) {
        ThreatModel tm = model == "known" ? ThreatModel::circuit_known
                                          : ThreatModel::circuit_hidden;
        auto res = construct_crgc(c, to_bits(a), seed, tm);
        return partition(res.crgc.circuit, res.trace, tm, one_section);
      },
      py::arg("circuit"), py::arg("a"), py::arg("seed"), py::arg("threat_model") = "hidden",
      py::arg("one_section") = false,
      "Construct and split into reusable and non-reusable sections.");

  m.def(
      "prgc_roundtrip",
      [](const Circuit& c, const std::vector<int>& a, const std::vector<std::vector<int>>& bs,
         uint64_t seed) {
        auto res = construct_crgc(c, to_bits(a), seed);
        auto plan = partition(res.crgc.circuit, res.trace, ThreatModel::circuit_hidden);
        InProcessGenerator gen(res.crgc, plan, seed + 1);
        Circuit pub = redact_sections(res.crgc.circuit, plan);
        std::vector<std::vector<int>> outs;
        for (const auto& b : bs)
          outs.push_back(from_bits(evaluate_prgc(plan, pub, res.crgc.a_prime, gen, to_bits(b))));
        return outs;
      },
      py::arg("circuit"), py::arg("a"), py::arg("bs"), py::arg("seed"),
      "Run the in-process hybrid protocol for each evaluator input.");

  m.def("encode_circuit",
        [](const Circuit& c, bool compress) { return to_pybytes(encode(c, {compress})); },
        py::arg("circuit"), py::arg("compress") = true);
  m.def("encode_crgc",
        [](const Crgc& g, bool compress) { return to_pybytes(encode(g, {compress})); },
        py::arg("crgc"), py::arg("compress") = true);
  m.def("decode_circuit",
        [](const py::bytes& b) { return decode_circuit(from_pybytes(b)); });
  m.def("decode_crgc", [](const py::bytes& b) { return decode_crgc(from_pybytes(b)); });

  py::register_exception<CircuitError>(m, "CircuitError");
  py::register_exception<CodecError>(m, "CodecError");
  py::register_exception<ProtocolError>(m, "ProtocolError");
}
