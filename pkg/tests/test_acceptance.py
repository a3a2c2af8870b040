"""Acceptance gate: the end-to-end guarantees the package ships with.

Each test pins one headline property with its stated tolerance; the
supporting unit suites live in the other test modules.
"""

import random
import time

import pytest

from symtdd.circuit import Gate, gate_tensor, simulate
from symtdd.core import Manager, SymTdd
from symtdd.verify import (dense_simulate, exhaustive_check,
                           grover_success_probability, random_circuit,
                           verify_bitflip, verify_bv, verify_qft)


def test_1_oracle_equivalence_200_random_circuits():
    rng = random.Random(2024)
    start = time.perf_counter()
    for i in range(200):
        n = rng.randrange(1, 6)
        m = rng.randrange(0, min(6, n + 1))
        depth = rng.randrange(1, 21)
        c = random_circuit(rng, n, m, depth)
        report = exhaustive_check(c, tol=1e-9)
        assert report.passed, f"circuit {i}: {report.to_json()}"
    assert time.perf_counter() - start < 60.0


def test_2_loc_norm_reference_example():
    man = Manager()
    wm = man.weights
    syms = wm.declare_symbols(2)
    f = wm.from_vector(syms, [2j, 0, 1 + 1j, 0])
    g = wm.from_vector(syms, [0, 1, 1 - 1j, 0])
    h, f_star, g_star = wm.loc_norm(f, g)
    want = {
        "h": [2j, 1, 1 + 1j, 0],
        "f*": [1, 0, 1, 0],
        "g*": [0, 1, (1 - 1j) / (1 + 1j), 0],
    }
    for name, (got, expect) in zip(want, [(h, want["h"]), (f_star, want["f*"]),
                                          (g_star, want["g*"])]):
        vec = wm.to_vector(got, syms)
        for x, y in zip(vec, expect):
            assert abs(x - y) <= 1e-12, name


def test_3_qft_functionality_and_scaling():
    for n in range(1, 25):
        report = verify_qft(n)
        assert report.passed, report.to_json()
        # tower form: one quantum node per qubit plus the terminal
        assert report.quantum_nodes + 1 == n + 1
    for n in range(10, 41, 6):
        report = verify_qft(n)
        assert report.passed
        assert report.total_nodes <= 10 * n ** 2.4
    report = verify_qft(30)
    assert report.total_nodes <= 20000


def test_4_bernstein_vazirani_towers_to_50():
    for n in range(1, 51):
        report = verify_bv(n)
        assert report.passed, report.to_json()
        assert report.payload["all_intermediate_towers"]


def test_5_grover_success_probabilities():
    prob, report = grover_success_probability(2, 1)
    assert report.payload["constant_over_solutions"]
    assert abs(report.payload["probability"] - 1.0) <= 1e-9
    amp = report.payload["amplitude"]
    assert abs(amp[0] + 1.0) <= 1e-9 and abs(amp[1]) <= 1e-9

    prob, report = grover_success_probability(7, 8)
    assert report.payload["constant_over_solutions"]
    assert abs(report.payload["probability"] - 0.9956) <= 1e-3

    prob, report = grover_success_probability(8, 12)
    assert report.payload["constant_over_solutions"]
    assert abs(report.payload["probability"] - 0.9999) <= 1e-3


def test_5_grover_output_state_two_qubits():
    """The (2 search, 1 iteration) run lands exactly on -|s0 s1 1>."""
    from symtdd.verify import grover_circuit
    from symtdd.circuit import Circuit, initial_state

    man = Manager()
    result = simulate(grover_circuit(2, 1), man)
    target = Circuit(3, symbols=["s0", "s1"],
                     init=[("sym", 0), ("sym", 1), 1])
    expected = initial_state(target, man)
    minus = man.edge(man.weights.scale(-1.0, expected.weight), expected.node)
    assert man.diagram_equal(result.state, minus)


def test_6_bitflip_code_weight_formulas():
    report = verify_bitflip()
    assert report.passed, report.to_json()

    # independent pointwise check of all six formulas over the 8 assignments
    from symtdd.verify import bitflip_relations
    relations, man = bitflip_relations()
    wm = man.weights

    def formula(q, s0, s1, s2):
        if q in (0, 1, 2):
            return ((1 - s0) * (1 - s1) * s2 + (1 - s0) * s1 * (1 - s2)
                    + (1 - s1) * (1 - s2))
        if q == 3:
            return s0 * s1 + (1 - s0) * (1 - s1)
        if q == 4:
            return s1 * s2 + (1 - s1) * (1 - s2)
        return s0 * s2 + (1 - s0) * (1 - s2)

    for q in range(6):
        f_low, f_high = relations[q]
        for bits in range(8):
            s0, s1, s2 = (bits >> 2) & 1, (bits >> 1) & 1, bits & 1
            assign = {0: s0, 1: s1, 2: s2}
            want = formula(q, s0, s1, s2)
            assert wm.evaluate(f_low, assign) == want
            assert wm.evaluate(f_high, assign) == 1 - want


def test_7_canonicity_suite():
    # 100 two-route constructions: permuted commuting gate orders and
    # direct amplitude construction vs. gate-by-gate simulation
    rng = random.Random(77)
    checks = 0
    for _ in range(50):
        n = rng.randrange(2, 5)
        man = Manager()
        c = random_circuit(rng, n, 0, rng.randrange(3, 12))
        res = simulate(c, man)
        dense = dense_simulate(c)

        def build(k, offset, span):
            if span == 1:
                return man.edge(man.weights.const(dense[offset]),
                                man.terminal)
            half = span // 2
            return man.make_node(2 * k, build(k + 1, offset, half),
                                 build(k + 1, offset + half, half))

        direct = build(0, 0, 1 << n)
        assert man.diagram_equal(res.state, direct)
        checks += 1
    for _ in range(50):
        man = Manager()
        state = man.symbolic_basis_state(3, ranks=[0, 2, 4])
        gates = [Gate(rng.choice(("h", "t", "z", "x", "s")), (q,))
                 for q in range(3)]  # one gate per qubit, so they commute
        outs = []
        for order in ((0, 1, 2), (2, 1, 0)):
            s = state
            for i in order:
                s = man.apply_gate(s, gate_tensor(gates[i], man),
                                   gates[i].qubits)
            outs.append(s)
        assert man.diagram_equal(outs[0], outs[1])
        checks += 1
    assert checks == 100

    # normalize_full is idempotent, handle for handle
    rng = random.Random(78)
    for _ in range(20):
        man = Manager()
        c = random_circuit(rng, 3, 2, 10)
        res = simulate(c, man)
        nf = man.normalize_full(res.state)
        assert nf.weight is res.state.weight and nf.node is res.state.node

    # reduction passes preserve every amplitude on exhaustive instances
    rng = random.Random(79)
    for _ in range(20):
        man = Manager()
        c = random_circuit(rng, 3, 2, 10)
        plain = simulate(c, man, rr3=False)
        reduced = man.rr3_pass(plain.state)
        for sbits in range(4):
            sa = {0: (sbits >> 1) & 1, 1: sbits & 1}
            for idx in range(8):
                qa = {2 * k: (idx >> (2 - k)) & 1 for k in range(3)}
                assert abs(man.evaluate(reduced, qa, sa)
                           - man.evaluate(plain.state, qa, sa)) <= 1e-9


def test_8_full_normalization_characterization():
    # true for the outputs of every public operation
    rng = random.Random(81)
    for _ in range(25):
        man = Manager()
        c = random_circuit(rng, 3, 2, 10)
        res = simulate(c, man)
        assert man.is_fully_normalized(res.state)
        assert man.is_fully_normalized(man.normalize_full(res.state))
    man = Manager()
    man.weights.declare_symbols(2)
    assert man.is_fully_normalized(man.symbolic_basis_state(2, ranks=[0, 2],
                                                            symbols=[0, 1]))

    # false for a hand-built violating diagram (common factor left behind)
    man = Manager()
    wm = man.weights
    bad = man._intern(0, SymTdd(wm.const(2), man.terminal),
                      SymTdd(wm.const(3), man.terminal))
    assert not man.is_fully_normalized(SymTdd(wm.one, bad))
