"""Reusable garbled circuits: construction, leakage prediction, hybrid protocol."""

from ._crgc import (
    Circuit,
    CircuitError,
    CodecError,
    ProtocolError,
    Crgc,
    CrgcMeta,
    Gate,
    LeakageReport,
    NonReusableSection,
    SectionPlan,
    TruthTable,
    build_circuit,
    chain_obfuscate,
    construct_crgc,
    decode_circuit,
    decode_crgc,
    encode_circuit,
    encode_crgc,
    evaluate,
    evaluate_crgc,
    parse_bristol,
    partition,
    predict_leakage,
    prgc_roundtrip,
    random_circuit,
    write_bristol,
)

__all__ = [
    "Circuit",
    "CircuitError",
    "CodecError",
    "ProtocolError",
    "Crgc",
    "CrgcMeta",
    "Gate",
    "LeakageReport",
    "NonReusableSection",
    "SectionPlan",
    "TruthTable",
    "build_circuit",
    "chain_obfuscate",
    "construct_crgc",
    "decode_circuit",
    "decode_crgc",
    "encode_circuit",
    "encode_crgc",
    "evaluate",
    "evaluate_crgc",
    "parse_bristol",
    "partition",
    "predict_leakage",
    "prgc_roundtrip",
    "random_circuit",
    "write_bristol",
]
