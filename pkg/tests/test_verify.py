"""Verifier behaviors, the dense oracle, and report serialization."""

import json
import math
import random

import numpy as np
import pytest

from symtdd.circuit import Circuit, Gate, parse_circuit, simulate
from symtdd.core import Manager
from symtdd.verify import (CapacityError, bitflip_circuit, bitflip_relations,
                           bv_circuit, dense_simulate, exhaustive_check,
                           grover_iterations, grover_success_probability,
                           qft_circuit, random_circuit, verify_bitflip,
                           verify_bv, verify_qft)


def test_dense_simulate_bell_state():
    c = Circuit(2, gates=[Gate("h", (0,)), Gate("cx", (0, 1))])
    vec = dense_simulate(c)
    r = 1 / math.sqrt(2)
    assert np.allclose(vec, [r, 0, 0, r])


def test_dense_simulate_ghz_and_phases():
    c = Circuit(3, gates=[Gate("h", (0,)), Gate("cx", (0, 1)),
                          Gate("cx", (1, 2)), Gate("z", (0,))])
    vec = dense_simulate(c)
    r = 1 / math.sqrt(2)
    want = np.zeros(8, dtype=complex)
    want[0] = r
    want[7] = -r
    assert np.allclose(vec, want)


def test_dense_simulate_symbol_substitution():
    c = parse_circuit("qubits 2\nsymbols a\ninit q0 sym a\ncx q0 q1\n")
    for a in range(2):
        vec = dense_simulate(c, {0: a})
        want = np.zeros(4)
        want[3 if a else 0] = 1.0
        assert np.allclose(vec, want)


def test_dense_cap_raises():
    c = Circuit(13)
    with pytest.raises(CapacityError):
        dense_simulate(c)


def test_exhaustive_check_passes_random():
    rng = random.Random(73)
    for _ in range(10):
        c = random_circuit(rng, 3, 2, 8)
        report = exhaustive_check(c)
        assert report.passed
        assert report.payload == {"qubits": 3, "symbols": 2}
        assert report.total_nodes >= 1


def test_exhaustive_check_caps():
    with pytest.raises(CapacityError):
        exhaustive_check(Circuit(13))
    with pytest.raises(CapacityError):
        exhaustive_check(Circuit(2, symbols=[f"s{k}" for k in range(9)]))


def test_exhaustive_check_reports_mismatch(monkeypatch):
    # tamper with the symbolic run so the checker sees a wrong amplitude
    import symtdd.verify as verify_mod

    real_simulate = verify_mod.simulate

    def skewed(circuit, man, rr3=True):
        res = real_simulate(circuit, man, rr3=rr3)
        bad = man.edge(man.weights.scale(2.0, res.state.weight),
                       res.state.node)
        res.state = bad
        return res

    monkeypatch.setattr(verify_mod, "simulate", skewed)
    report = exhaustive_check(parse_circuit("qubits 1\nh q0\n"))
    assert not report.passed
    mm = report.payload["first_mismatch"]
    assert mm["index"] in (0, 1)
    assert abs(complex(*mm["symbolic"]) - 2 * complex(*mm["dense"])) <= 1e-9


def test_verify_qft_small():
    for n in (1, 2, 3, 4):
        report = verify_qft(n)
        assert report.passed
        assert report.payload["tower"]
        assert report.payload["matches_expected"]
        assert report.quantum_nodes == n


def test_verify_bv_small():
    for n in (1, 2, 5):
        report = verify_bv(n)
        assert report.passed
        assert report.payload["all_intermediate_towers"]
        assert report.payload["matches_expected"]


def test_grover_iterations_table():
    assert grover_iterations(2) == 1
    assert grover_iterations(7) == 8
    assert grover_iterations(8) == 12


def test_grover_two_qubits_exact():
    prob, report = grover_success_probability(2, 1)
    assert report.passed
    assert report.payload["constant_over_solutions"]
    assert abs(report.payload["probability"] - 1.0) <= 1e-9
    amp = report.payload["amplitude"]
    assert abs(amp[0] + 1.0) <= 1e-9 and abs(amp[1]) <= 1e-9


def test_bitflip_relations_structure():
    relations, man = bitflip_relations()
    wm = man.weights
    assert sorted(relations) == [0, 1, 2, 3, 4, 5]
    for q, (f_low, f_high) in relations.items():
        assert wm.add(f_low, f_high) is wm.one
        assert wm.mul(f_low, f_high) is wm.zero


def test_verify_bitflip():
    report = verify_bitflip()
    assert report.passed
    for q in range(6):
        detail = report.payload["relations"][f"q{q}"]
        assert detail["matches_expected"]
        assert detail["complement_pair"]


def test_bitflip_relations_reject_non_tower():
    c = Circuit(2, symbols=["s0", "s1"], init=[("sym", 0), ("sym", 1)],
                gates=[Gate("h", (0,))])
    with pytest.raises(ValueError):
        bitflip_relations(circuit=c)


def test_report_json_schema():
    report = verify_bv(3)
    blob = json.loads(report.to_json())
    assert blob["schema"] == 1
    assert blob["case"] == "bv"
    assert blob["passed"] is True
    assert set(blob) == {"schema", "case", "passed", "quantum_nodes",
                         "weight_nodes", "total_nodes", "wall_time_ms",
                         "payload"}
    # key order is stable for diffing
    assert list(blob) == sorted(blob)


def test_qft_circuit_shape():
    c = qft_circuit(4)
    assert c.n_qubits == 4
    assert len(c.gates) == 4 + 6  # n Hadamards, n(n-1)/2 controlled phases
    assert all(init == ("sym", k) for k, init in enumerate(c.init))


def test_bv_circuit_shape():
    c = bv_circuit(3)
    assert c.n_qubits == 4
    assert c.init[3] == 1
    assert sum(1 for g in c.gates if g.kind == "csymx") == 3


def test_bitflip_circuit_shape():
    c = bitflip_circuit()
    assert c.n_qubits == 6
    assert [g.kind for g in c.gates] == ["cx"] * 6 + ["ccx"] * 3
