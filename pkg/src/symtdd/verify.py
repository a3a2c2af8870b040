"""Case-study verifiers and the dense state-vector oracle.

The oracle simulates a circuit exactly on a flat complex vector with all
symbols substituted by concrete bits; it shares no code with the diagram
engine and is the ground truth for every equivalence check.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import (Circuit, Gate, _MATRICES_1Q, _rk_phase, initial_state,
                      simulate)
from .core import Manager, Stopwatch

DENSE_QUBIT_CAP = 12
EXHAUSTIVE_SYMBOL_CAP = 8


class CapacityError(ValueError):
    """A brute-force cap was exceeded."""


@dataclass
class VerificationReport:
    case: str
    passed: bool
    quantum_nodes: int = 0
    weight_nodes: int = 0
    total_nodes: int = 0
    wall_time_ms: float = 0.0
    payload: dict = field(default_factory=dict)

    def to_json(self, indent=None):
        return json.dumps({
            "schema": 1,
            "case": self.case,
            "passed": self.passed,
            "quantum_nodes": self.quantum_nodes,
            "weight_nodes": self.weight_nodes,
            "total_nodes": self.total_nodes,
            "wall_time_ms": self.wall_time_ms,
            "payload": self.payload,
        }, indent=indent, sort_keys=True)

    def fill_counts(self, man, state, watch):
        qn, wn, total = man.node_count(state)
        self.quantum_nodes, self.weight_nodes, self.total_nodes = qn, wn, total
        self.wall_time_ms = watch.ms()


# ----------------------------------------------------------------------
# dense oracle

def _dense_matrix(gate, assign):
    """Concrete unitary for a gate after substituting symbol bits."""
    if gate.kind in _MATRICES_1Q:
        return np.array(_MATRICES_1Q[gate.kind], dtype=complex)
    if gate.kind in ("rk", "rkdag"):
        ph = _rk_phase(gate.k)
        if gate.kind == "rkdag":
            ph = ph.conjugate()
        return np.diag([1, ph]).astype(complex)
    if gate.kind == "crk":
        return np.diag([1, 1, 1, _rk_phase(gate.k)]).astype(complex)
    if gate.kind in ("cx", "ccx", "mcx"):
        dim = 1 << len(gate.qubits)
        u = np.zeros((dim, dim), dtype=complex)
        for j in range(dim):
            if j >> 1 == (dim >> 1) - 1:  # all controls set
                u[j ^ 1, j] = 1
            else:
                u[j, j] = 1
        return u
    if gate.kind in ("symx", "csymx"):
        bit = assign[gate.symbol] ^ (1 if gate.complement else 0)
        x = np.array(_MATRICES_1Q["x"], dtype=complex) if bit else np.eye(2)
        if gate.kind == "symx":
            return x
        u = np.eye(4, dtype=complex)
        u[2:, 2:] = x
        return u
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def dense_simulate(circuit, symbol_assign=None, basis_input=None,
                   cap=DENSE_QUBIT_CAP):
    """Exact state-vector simulation with symbols substituted by bits.

    Returns a flat complex vector of length 2^n; index bits follow qubit
    order with qubit 0 most significant.
    """
    n = circuit.n_qubits
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds dense cap {cap}")
    assign = symbol_assign or {}
    if basis_input is None:
        bits = []
        for init in circuit.init:
            if init in (0, 1):
                bits.append(init)
            else:
                bits.append(assign[init[1]])
    else:
        bits = list(basis_input)
    state = np.zeros((2,) * n, dtype=complex)
    state[tuple(bits)] = 1.0
    for gate in circuit.gates:
        u = _dense_matrix(gate, assign)
        axes = list(gate.qubits)
        m = len(axes)
        moved = np.moveaxis(state, axes, range(m))
        shape = moved.shape
        moved = u @ moved.reshape(1 << m, -1)
        state = np.moveaxis(moved.reshape(shape), range(m), axes)
    return state.reshape(-1)


def exhaustive_check(circuit, man=None, tol=1e-9, rr3=True):
    """Compare the symbolic run against the dense oracle for every symbol
    assignment and every amplitude."""
    n, m = circuit.n_qubits, len(circuit.symbols)
    if n > DENSE_QUBIT_CAP:
        raise CapacityError(f"{n} qubits exceeds cap {DENSE_QUBIT_CAP}")
    if m > EXHAUSTIVE_SYMBOL_CAP:
        raise CapacityError(f"{m} symbols exceeds cap {EXHAUSTIVE_SYMBOL_CAP}")
    watch = Stopwatch()
    if man is None:
        man = Manager()
    result = simulate(circuit, man, rr3=rr3)
    report = VerificationReport("exhaustive", True,
                                payload={"qubits": n, "symbols": m})
    for sbits in _all_bits(m):
        sassign = dict(enumerate(sbits))
        dense = dense_simulate(circuit, sassign)
        for idx in range(1 << n):
            qassign = {2 * k: (idx >> (n - 1 - k)) & 1 for k in range(n)}
            got = man.evaluate(result.state, qassign, sassign)
            if abs(got - dense[idx]) > tol:
                report.passed = False
                report.payload["first_mismatch"] = {
                    "symbols": list(sbits), "index": idx,
                    "symbolic": [got.real, got.imag],
                    "dense": [dense[idx].real, dense[idx].imag],
                }
                report.fill_counts(man, result.state, watch)
                return report
    report.fill_counts(man, result.state, watch)
    return report


def _all_bits(m):
    for idx in range(1 << m):
        yield tuple((idx >> (m - 1 - j)) & 1 for j in range(m))


# ----------------------------------------------------------------------
# circuit generators

def qft_circuit(n):
    """QFT on a symbolised basis input, no final swaps."""
    c = Circuit(n, symbols=[f"s{k}" for k in range(n)])
    c.init = [("sym", k) for k in range(n)]
    for k in range(n):
        c.gates.append(Gate("h", (k,)))
        for j in range(k + 1, n):
            c.gates.append(Gate("crk", (k, j), k=j - k + 1))
    return c


def bv_circuit(n):
    """Bernstein-Vazirani with a symbolically controlled oracle."""
    c = Circuit(n + 1, symbols=[f"s{k}" for k in range(n)])
    c.init[n] = 1
    for k in range(n + 1):
        c.gates.append(Gate("h", (k,)))
    for k in range(n):
        c.gates.append(Gate("csymx", (k, n), symbol=k))
    for k in range(n + 1):
        c.gates.append(Gate("h", (k,)))
    return c


def grover_circuit(n_search, iterations=None):
    """Grover search over a symbolic solution, one ancilla qubit.

    The oracle is a multi-controlled X conjugated by X^{s_k'} on each search
    qubit; the diffusion operator is the standard H/X/controlled-Z sandwich.
    A final H returns the ancilla to |1>.
    """
    if n_search < 2:
        raise ValueError("need at least two search qubits")
    if iterations is None:
        iterations = grover_iterations(n_search)
    n = n_search + 1
    c = Circuit(n, symbols=[f"s{k}" for k in range(n_search)])
    c.init[n_search] = 1
    search = tuple(range(n_search))
    for k in range(n):
        c.gates.append(Gate("h", (k,)))
    for _ in range(iterations):
        # oracle
        for k in search:
            c.gates.append(Gate("symx", (k,), symbol=k, complement=True))
        c.gates.append(Gate("mcx", search + (n_search,)))
        for k in search:
            c.gates.append(Gate("symx", (k,), symbol=k, complement=True))
        # diffusion
        for k in search:
            c.gates.append(Gate("h", (k,)))
        for k in search:
            c.gates.append(Gate("x", (k,)))
        last = n_search - 1
        c.gates.append(Gate("h", (last,)))
        if n_search == 2:
            c.gates.append(Gate("cx", (0, last)))
        else:
            c.gates.append(Gate("mcx", search[:-1] + (last,)))
        c.gates.append(Gate("h", (last,)))
        for k in search:
            c.gates.append(Gate("x", (k,)))
        for k in search:
            c.gates.append(Gate("h", (k,)))
    c.gates.append(Gate("h", (n_search,)))
    return c


def grover_iterations(n_search):
    return int(math.sqrt(1 << n_search) * math.pi / 4)


def bitflip_circuit():
    """Three-qubit bit-flip code: syndrome extraction plus correction, with
    measurement deferred."""
    c = Circuit(6, symbols=["s0", "s1", "s2"])
    c.init = [("sym", 0), ("sym", 1), ("sym", 2), 0, 0, 0]
    for ctrl, tgt in ((0, 3), (1, 3), (0, 5), (1, 4), (2, 4), (2, 5)):
        c.gates.append(Gate("cx", (ctrl, tgt)))
    for c1, c2, tgt in ((3, 5, 0), (3, 4, 1), (4, 5, 2)):
        c.gates.append(Gate("ccx", (c1, c2, tgt)))
    return c


# ----------------------------------------------------------------------
# verifiers

def expected_qft_state(man, n, symbols=None):
    """Directly built QFT output: qubit k carries |0> + phi_k |1> with
    phi_k the product of (s_j' + e^{2 pi i / 2^{j-k+1}} s_j) factors."""
    wm = man.weights
    if symbols is None:
        symbols = list(range(n))
    e = man.one
    for k in reversed(range(n)):
        phi = wm.one
        for j in range(k, n):
            factor = wm.add(wm.literal(symbols[j], complement=True),
                            wm.scale(_rk_phase(j - k + 1), wm.literal(symbols[j])))
            phi = wm.mul(phi, factor)
        high = man.edge(wm.mul(phi, e.weight), e.node)
        e = man.make_node(2 * k, e, high)
    return man.edge(wm.scale((0.5 ** 0.5) ** n, e.weight), e.node)


def verify_qft(n, man=None, rr3=True):
    """Simulate the QFT circuit symbolically and compare against the
    directly-built expected diagram."""
    watch = Stopwatch()
    if man is None:
        man = Manager()
    circuit = qft_circuit(n)
    result = simulate(circuit, man, rr3=rr3)
    expected = expected_qft_state(man, n)
    ok = man.diagram_equal(result.state, expected)
    tower = man.is_tower(result.state)
    report = VerificationReport("qft", ok and tower, payload={"n": n,
                                                              "tower": tower})
    report.fill_counts(man, result.state, watch)
    report.payload["matches_expected"] = ok
    return report


def verify_bv(n, man=None, rr3=True):
    """Simulate BV and check the output is |s_0...s_{n-1}>|1> and every
    intermediate diagram is a tower."""
    watch = Stopwatch()
    if man is None:
        man = Manager()
    circuit = bv_circuit(n)
    towers = []
    result = simulate(circuit, man, rr3=rr3,
                      on_step=lambda i, g, st: towers.append(man.is_tower(st)))
    target = Circuit(n + 1, symbols=list(circuit.symbols))
    target.init = [("sym", k) for k in range(n)] + [1]
    expected = initial_state(target, man)
    ok = man.diagram_equal(result.state, expected)
    all_towers = all(towers)
    report = VerificationReport("bv", ok and all_towers,
                                payload={"n": n, "matches_expected": ok,
                                         "all_intermediate_towers": all_towers})
    report.fill_counts(man, result.state, watch)
    return report


def grover_success_probability(n_search, iterations=None, man=None, rr3=True):
    """Run Grover symbolically and contract with the desired output state.

    Returns (probability tensor over the solution symbols, report); the
    tensor is constant when the success probability does not depend on the
    solution.
    """
    watch = Stopwatch()
    if man is None:
        man = Manager()
    if iterations is None:
        iterations = grover_iterations(n_search)
    circuit = grover_circuit(n_search, iterations)
    result = simulate(circuit, man, rr3=rr3)
    wm = man.weights
    target = Circuit(n_search + 1, symbols=list(circuit.symbols))
    target.init = [("sym", k) for k in range(n_search)] + [1]
    phi_suc = initial_state(target, man)
    ranks = [2 * k for k in range(n_search + 1)]
    overlap = man.contract(result.state, phi_suc, ranks)
    if overlap.node is not man.terminal:
        raise AssertionError("overlap did not contract to a scalar tensor")
    amp = overlap.weight
    prob = wm.mul(amp, wm.conj(amp))
    constant = prob.node is wm.terminal
    report = VerificationReport(
        "grover", constant,
        payload={
            "search_qubits": n_search,
            "iterations": iterations,
            "constant_over_solutions": constant,
            "probability": prob.w.real if constant else None,
            "probability_tensor": wm.to_text(prob),
            "amplitude": ([amp.w.real, amp.w.imag]
                          if amp.node is wm.terminal else None),
            "amplitude_tensor": wm.to_text(amp),
        })
    report.fill_counts(man, result.state, watch)
    return prob, report


def bitflip_relations(circuit=None, man=None, rr3=True):
    """Walk the tower-form output of a Toffoli circuit and return each
    qubit's outgoing weight pair (f_low, f_high)."""
    if man is None:
        man = Manager()
    if circuit is None:
        circuit = bitflip_circuit()
    result = simulate(circuit, man, rr3=rr3)
    state = result.state
    if state.weight is not man.weights.one:
        raise ValueError("non-tower diagram: root weight is not 1")
    relations = {}
    node = state.node
    while node is not man.terminal:
        if node.low.node is not node.high.node:
            raise ValueError("non-tower diagram: branches do not converge")
        relations[node.q // 2] = (node.low.weight, node.high.weight)
        node = node.low.node
    return relations, man


def verify_bitflip(man=None):
    """Check the bit-flip code relations against the expected formulas."""
    watch = Stopwatch()
    if man is None:
        man = Manager()
    relations, man = bitflip_relations(man=man)
    wm = man.weights
    s = [wm.literal(k) for k in range(3)]
    sn = [wm.literal(k, complement=True) for k in range(3)]

    def prod(*fs):
        out = wm.one
        for f in fs:
            out = wm.mul(out, f)
        return out

    f00 = wm.add(wm.add(prod(sn[0], sn[1], s[2]), prod(sn[0], s[1], sn[2])),
                 prod(sn[1], sn[2]))
    expected = {
        0: f00, 1: f00, 2: f00,
        3: wm.add(prod(s[0], s[1]), prod(sn[0], sn[1])),
        4: wm.add(prod(s[1], s[2]), prod(sn[1], sn[2])),
        5: wm.add(prod(s[0], s[2]), prod(sn[0], sn[2])),
    }
    ok = True
    details = {}
    for q, (f_low, f_high) in relations.items():
        complement_pair = (wm.add(f_low, f_high) is wm.one
                           and wm.mul(f_low, f_high) is wm.zero)
        match = f_low is expected[q]
        ok = ok and complement_pair and match
        details[f"q{q}"] = {"f_low": wm.to_text(f_low),
                            "f_high": wm.to_text(f_high),
                            "matches_expected": match,
                            "complement_pair": complement_pair}
    report = VerificationReport("bitflip", ok, payload={"relations": details})
    report.wall_time_ms = watch.ms()
    return report


# ----------------------------------------------------------------------
# random circuits (used by the test suite and the exhaustive verifier)

_RANDOM_1Q = ("h", "x", "y", "z", "s", "sdg", "t", "tdg")


def random_circuit(rng, n_qubits, n_symbols, depth):
    """A random circuit over the supported gate set, seeded by rng."""
    c = Circuit(n_qubits, symbols=[f"s{k}" for k in range(n_symbols)])
    for q in range(n_qubits):
        r = rng.random()
        if r < 0.4 and n_symbols:
            c.init[q] = ("sym", rng.randrange(n_symbols))
        elif r < 0.7:
            c.init[q] = rng.randrange(2)
    for _ in range(depth):
        r = rng.random()
        if r < 0.45:
            c.gates.append(Gate(rng.choice(_RANDOM_1Q),
                                (rng.randrange(n_qubits),)))
        elif r < 0.55:
            c.gates.append(Gate("rk", (rng.randrange(n_qubits),),
                                k=rng.randrange(1, 5)))
        elif r < 0.7 and n_qubits >= 2:
            a, b = rng.sample(range(n_qubits), 2)
            c.gates.append(Gate("cx", (a, b)))
        elif r < 0.8 and n_qubits >= 2:
            a, b = rng.sample(range(n_qubits), 2)
            c.gates.append(Gate("crk", (a, b), k=rng.randrange(1, 4)))
        elif r < 0.9 and n_symbols:
            c.gates.append(Gate("symx", (rng.randrange(n_qubits),),
                                symbol=rng.randrange(n_symbols),
                                complement=rng.random() < 0.5))
        elif n_qubits >= 3:
            a, b, t = rng.sample(range(n_qubits), 3)
            c.gates.append(Gate("ccx", (a, b, t)))
        else:
            c.gates.append(Gate("h", (rng.randrange(n_qubits),)))
    return c
