"""Circuit parsing, gate tensors and the simulation driver."""

import math
import random

import numpy as np
import pytest

from symtdd.circuit import (Circuit, CircuitSyntaxError, Gate, gate_tensor,
                            initial_state, parse_circuit, simulate, unparse)
from symtdd.core import Manager
from symtdd.verify import dense_simulate, random_circuit


SAMPLE = """\
# three-qubit example
qubits 3
symbols a b
init q0 sym a
init q1 1
h q0
rk 3 q1
crk 2 q0 q1
cx q0 q2
ccx q0 q1 q2
x q2 ctrlsym b
cx q0 q1 ctrlsymneg a
"""


def test_parse_sample():
    c = parse_circuit(SAMPLE)
    assert c.n_qubits == 3
    assert c.symbols == ["a", "b"]
    assert c.init == [("sym", 0), 1, 0]
    kinds = [g.kind for g in c.gates]
    assert kinds == ["h", "rk", "crk", "cx", "ccx", "symx", "csymx"]
    assert c.gates[1].k == 3
    assert c.gates[5].symbol == 1 and not c.gates[5].complement
    assert c.gates[6].symbol == 0 and c.gates[6].complement


def test_unparse_round_trip():
    c = parse_circuit(SAMPLE)
    again = parse_circuit(unparse(c))
    assert again == c
    assert unparse(again) == unparse(c)


@pytest.mark.parametrize("text,line,col", [
    ("h q0", 1, 1),                       # gate before qubits
    ("qubits 0", 1, 8),                   # non-positive count
    ("qubits 2\nfoo q0", 2, 1),           # unknown statement
    ("qubits 2\nh q5", 2, 3),             # qubit out of range
    ("qubits 2\nh qx", 2, 3),             # malformed qubit
    ("qubits 2\ncx q0 q0", 2, 7),         # repeated qubit
    ("qubits 2\nrk 0 q1", 2, 4),          # rk order below 1
    ("qubits 2\nx q0 ctrlsym a", 2, 14),  # undeclared symbol
    ("qubits 2\nh q0 q1", 2, 6),          # trailing token
    ("qubits 2\nqubits 2", 2, 1),         # duplicate header
    ("", 1, 1),                           # empty program
])
def test_parse_errors_carry_location(text, line, col):
    with pytest.raises(CircuitSyntaxError) as exc:
        parse_circuit(text)
    assert exc.value.line == line
    assert exc.value.column == col
    assert f"line {line}, column {col}" in str(exc.value)


def test_comments_and_blank_lines_ignored():
    c = parse_circuit("\n# header\nqubits 1  # trailing\n\nh q0\n")
    assert c.n_qubits == 1
    assert [g.kind for g in c.gates] == ["h"]


def gate_entries(man, gate, n_sym_vals=1, symbol_assign=None):
    """Evaluate a gate diagram on all in/out index pairs."""
    tdd = gate_tensor(gate, man)
    nq = len(gate.qubits)
    ranks = sorted([2 * q for q in gate.qubits] + [2 * q + 1 for q in gate.qubits])
    out = {}
    for bits in range(1 << (2 * nq)):
        qa = {r: (bits >> (2 * nq - 1 - i)) & 1 for i, r in enumerate(ranks)}
        out[bits] = man.evaluate(tdd, qa, symbol_assign or {})
    return out


def test_single_qubit_gate_tensors_match_matrices():
    mats = {
        "h": [[1 / math.sqrt(2)] * 2, [1 / math.sqrt(2), -1 / math.sqrt(2)]],
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
        "s": [[1, 0], [0, 1j]],
        "t": [[1, 0], [0, (1 + 1j) / math.sqrt(2)]],
    }
    for kind, mat in mats.items():
        man = Manager()
        ent = gate_entries(man, Gate(kind, (0,)))
        # rank 0 is the input index, rank 1 the output index
        for i in range(2):
            for o in range(2):
                assert abs(ent[(i << 1) | o] - mat[o][i]) <= 1e-12


def test_cx_tensor():
    man = Manager()
    tdd = gate_tensor(Gate("cx", (0, 1)), man)
    for c in range(2):
        for t in range(2):
            for co in range(2):
                for to in range(2):
                    want = 1.0 if co == c and to == (t ^ c) else 0.0
                    qa = {0: c, 1: co, 2: t, 3: to}
                    assert abs(man.evaluate(tdd, qa, {}) - want) <= 1e-12


def test_symx_tensor_for_both_symbol_values():
    man = Manager()
    man.weights.declare_symbol("a")
    tdd = gate_tensor(Gate("symx", (0,), symbol=0), man)
    for s in range(2):
        for i in range(2):
            for o in range(2):
                # identity when the symbol is 0, bit flip when it is 1
                want = 1.0 if o == (i ^ s) else 0.0
                got = man.evaluate(tdd, {0: i, 1: o}, {0: s})
                assert abs(got - want) <= 1e-12


def test_rk_and_rkdag_cancel():
    man = Manager()
    c = Circuit(1, gates=[Gate("h", (0,)), Gate("rk", (0,), k=3),
                          Gate("rkdag", (0,), k=3)])
    res = simulate(c, man)
    r = 1 / math.sqrt(2)
    assert abs(man.evaluate(res.state, {0: 0}, {}) - r) <= 1e-12
    assert abs(man.evaluate(res.state, {0: 1}, {}) - r) <= 1e-12


def test_initial_state_patterns():
    man = Manager()
    man.weights.declare_symbol("a")
    c = Circuit(3, symbols=["a"], init=[1, ("sym", 0), 0])
    e = initial_state(c, man)
    for q0 in range(2):
        for q1 in range(2):
            for q2 in range(2):
                for s in range(2):
                    want = 1.0 if q0 == 1 and q1 == s and q2 == 0 else 0.0
                    got = man.evaluate(e, {0: q0, 2: q1, 4: q2}, {0: s})
                    assert abs(got - want) <= 1e-12


def test_simulate_matches_dense_oracle():
    rng = random.Random(71)
    for _ in range(25):
        n = rng.randrange(1, 5)
        c = random_circuit(rng, n, 0, rng.randrange(3, 15))
        man = Manager()
        res = simulate(c, man)
        dense = dense_simulate(c).reshape(-1)
        for idx in range(1 << n):
            qa = {2 * k: (idx >> (n - 1 - k)) & 1 for k in range(n)}
            assert abs(man.evaluate(res.state, qa, {}) - dense[idx]) <= 1e-9


def test_simulate_stats_and_on_step():
    steps = []
    c = parse_circuit("qubits 2\nsymbols a\ninit q0 sym a\nh q1\ncx q1 q0\n")
    res = simulate(c, on_step=lambda step, gate, state: steps.append(gate.kind))
    assert steps == ["h", "cx"]
    assert res.stats["schema"] == 1
    assert res.stats["gates_applied"] == 2
    assert res.stats["qubits"] == 2
    assert res.stats["wall_time_ms"] >= 0.0
    assert res.stats["total_nodes"] >= 1


def test_simulate_no_rr3_still_correct():
    c = parse_circuit("qubits 2\nsymbols a b\ninit q0 sym a\ninit q1 sym b\n"
                      "cx q0 q1\n")
    man = Manager()
    res = simulate(c, man, rr3=False)
    for a in range(2):
        for b in range(2):
            for q0 in range(2):
                for q1 in range(2):
                    want = 1.0 if q0 == a and q1 == (b ^ a) else 0.0
                    got = man.evaluate(res.state, {0: q0, 2: q1},
                                       {0: a, 1: b})
                    assert abs(got - want) <= 1e-12
