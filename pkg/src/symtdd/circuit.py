"""Circuit data model, text format parser, gate tensors and simulation.

The native format is one statement per line, '#' starts a comment:

    qubits N
    symbols s0 s1 ...
    init qK (0 | 1 | sym NAME)        # default 0
    h|x|y|z|s|sdg|t|tdg qK
    rk K qT          rkdag K qT
    crk K qC qT
    cx qC qT         ccx qC1 qC2 qT
    mcx qC1 ... qCk qT
    x qT ctrlsym NAME | x qT ctrlsymneg NAME

As an extension, `cx qC qT ctrlsym NAME` denotes a CX whose application is
additionally gated by the symbol (the Bernstein-Vazirani oracle gate).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .core import Manager, Stopwatch, SymTdd

_SQ2 = 1.0 / math.sqrt(2.0)

# (matrix rows) for the plain single-qubit gates
_MATRICES_1Q = {
    "h": ((_SQ2, _SQ2), (_SQ2, -_SQ2)),
    "x": ((0, 1), (1, 0)),
    "y": ((0, -1j), (1j, 0)),
    "z": ((1, 0), (0, -1)),
    "s": ((1, 0), (0, 1j)),
    "sdg": ((1, 0), (0, -1j)),
    "t": ((1, 0), (0, cmath.exp(1j * math.pi / 4))),
    "tdg": ((1, 0), (0, cmath.exp(-1j * math.pi / 4))),
}


class CircuitSyntaxError(ValueError):
    """Parse or validation failure, with 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Gate:
    """One circuit gate.

    kind is the lowercase statement mnemonic; qubits lists controls before
    the target; k parameterizes rk/crk; symbol/complement hold a symbolic
    control for symx/csymx.
    """
    kind: str
    qubits: tuple
    k: int | None = None
    symbol: int | None = None
    complement: bool = False

    @property
    def target(self):
        return self.qubits[-1]

    @property
    def controls(self):
        return self.qubits[:-1]


@dataclass
class Circuit:
    n_qubits: int
    symbols: list = field(default_factory=list)  # declared symbol names
    init: list = field(default_factory=list)     # 0 | 1 | ("sym", ordinal)
    gates: list = field(default_factory=list)

    def __post_init__(self):
        if not self.init:
            self.init = [0] * self.n_qubits


def _rk_phase(k):
    return cmath.exp(2j * math.pi / (1 << k))


def parse_circuit(text):
    """Parse the native format; raises CircuitSyntaxError with location."""
    circuit = None
    symtab = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        toks = _tokenize(line)
        op = toks[0].text.lower()
        if op == "qubits":
            if circuit is not None:
                raise CircuitSyntaxError("duplicate qubits statement",
                                         lineno, toks[0].col)
            n = _int_tok(_arg(toks, 1, lineno), lineno)
            if n < 1:
                raise CircuitSyntaxError("qubit count must be positive",
                                         lineno, toks[1].col)
            _no_extra(toks, 2, lineno)
            circuit = Circuit(n)
            continue
        if circuit is None:
            raise CircuitSyntaxError("qubits statement must come first",
                                     lineno, toks[0].col)
        if op == "symbols":
            for t in toks[1:]:
                if t.text in symtab:
                    raise CircuitSyntaxError(f"duplicate symbol {t.text}",
                                             lineno, t.col)
                symtab[t.text] = len(circuit.symbols)
                circuit.symbols.append(t.text)
        elif op == "init":
            q = _qubit_tok(_arg(toks, 1, lineno), circuit, lineno)
            what = _arg(toks, 2, lineno)
            if what.text == "0":
                circuit.init[q] = 0
                _no_extra(toks, 3, lineno)
            elif what.text == "1":
                circuit.init[q] = 1
                _no_extra(toks, 3, lineno)
            elif what.text == "sym":
                s = _symbol_tok(_arg(toks, 3, lineno), symtab, lineno)
                circuit.init[q] = ("sym", s)
                _no_extra(toks, 4, lineno)
            else:
                raise CircuitSyntaxError(f"bad init value {what.text!r}",
                                         lineno, what.col)
        elif op in _MATRICES_1Q:
            q = _qubit_tok(_arg(toks, 1, lineno), circuit, lineno)
            if len(toks) > 2:
                if op != "x":
                    raise CircuitSyntaxError(
                        "symbolic control is only valid on x/cx",
                        lineno, toks[2].col)
                comp, s = _ctrlsym(toks, 2, symtab, lineno)
                circuit.gates.append(Gate("symx", (q,), symbol=s,
                                          complement=comp))
            else:
                circuit.gates.append(Gate(op, (q,)))
        elif op in ("rk", "rkdag"):
            k = _int_tok(_arg(toks, 1, lineno), lineno)
            if k < 1:
                raise CircuitSyntaxError("rk order must be >= 1",
                                         lineno, toks[1].col)
            q = _qubit_tok(_arg(toks, 2, lineno), circuit, lineno)
            _no_extra(toks, 3, lineno)
            circuit.gates.append(Gate(op, (q,), k=k))
        elif op == "crk":
            k = _int_tok(_arg(toks, 1, lineno), lineno)
            if k < 1:
                raise CircuitSyntaxError("rk order must be >= 1",
                                         lineno, toks[1].col)
            c = _qubit_tok(_arg(toks, 2, lineno), circuit, lineno)
            t = _qubit_tok(_arg(toks, 3, lineno), circuit, lineno)
            _distinct((c, t), toks[3], lineno)
            _no_extra(toks, 4, lineno)
            circuit.gates.append(Gate("crk", (c, t), k=k))
        elif op == "cx":
            c = _qubit_tok(_arg(toks, 1, lineno), circuit, lineno)
            t = _qubit_tok(_arg(toks, 2, lineno), circuit, lineno)
            _distinct((c, t), toks[2], lineno)
            if len(toks) > 3:
                comp, s = _ctrlsym(toks, 3, symtab, lineno)
                circuit.gates.append(Gate("csymx", (c, t), symbol=s,
                                          complement=comp))
            else:
                _no_extra(toks, 3, lineno)
                circuit.gates.append(Gate("cx", (c, t)))
        elif op in ("ccx", "mcx"):
            want = 4 if op == "ccx" else None
            if want and len(toks) != want:
                raise CircuitSyntaxError("ccx takes exactly three qubits",
                                         lineno, toks[0].col)
            if len(toks) < 3:
                raise CircuitSyntaxError(f"{op} needs at least two qubits",
                                         lineno, toks[0].col)
            qs = tuple(_qubit_tok(t, circuit, lineno) for t in toks[1:])
            _distinct(qs, toks[-1], lineno)
            circuit.gates.append(Gate("mcx" if op == "mcx" else "ccx", qs))
        else:
            raise CircuitSyntaxError(f"unknown statement {op!r}",
                                     lineno, toks[0].col)
    if circuit is None:
        raise CircuitSyntaxError("empty program: missing qubits statement", 1, 1)
    return circuit


def unparse(circuit):
    """Render a Circuit back to the native format."""
    lines = [f"qubits {circuit.n_qubits}"]
    if circuit.symbols:
        lines.append("symbols " + " ".join(circuit.symbols))
    for q, init in enumerate(circuit.init):
        if init == 0:
            continue
        if init == 1:
            lines.append(f"init q{q} 1")
        else:
            lines.append(f"init q{q} sym {circuit.symbols[init[1]]}")
    for g in circuit.gates:
        qs = " ".join(f"q{q}" for q in g.qubits)
        if g.kind in ("rk", "rkdag"):
            lines.append(f"{g.kind} {g.k} {qs}")
        elif g.kind == "crk":
            lines.append(f"crk {g.k} {qs}")
        elif g.kind == "symx":
            mode = "ctrlsymneg" if g.complement else "ctrlsym"
            lines.append(f"x {qs} {mode} {circuit.symbols[g.symbol]}")
        elif g.kind == "csymx":
            mode = "ctrlsymneg" if g.complement else "ctrlsym"
            lines.append(f"cx {qs} {mode} {circuit.symbols[g.symbol]}")
        else:
            lines.append(f"{g.kind} {qs}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# tokens

class _Tok:
    __slots__ = ("text", "col")

    def __init__(self, text, col):
        self.text = text
        self.col = col


def _tokenize(line):
    toks = []
    col = 0
    for part in line.split():
        col = line.index(part, col)
        toks.append(_Tok(part, col + 1))
        col += len(part)
    return toks


def _arg(toks, i, lineno):
    if i >= len(toks):
        raise CircuitSyntaxError("missing argument", lineno,
                                 toks[-1].col + len(toks[-1].text))
    return toks[i]


def _no_extra(toks, n, lineno):
    if len(toks) > n:
        raise CircuitSyntaxError(f"unexpected token {toks[n].text!r}",
                                 lineno, toks[n].col)


def _int_tok(tok, lineno):
    try:
        return int(tok.text)
    except ValueError:
        raise CircuitSyntaxError(f"expected integer, got {tok.text!r}",
                                 lineno, tok.col) from None


def _qubit_tok(tok, circuit, lineno):
    if not tok.text.startswith("q") or not tok.text[1:].isdigit():
        raise CircuitSyntaxError(f"expected qubit (qK), got {tok.text!r}",
                                 lineno, tok.col)
    q = int(tok.text[1:])
    if q >= circuit.n_qubits:
        raise CircuitSyntaxError(f"qubit q{q} out of range "
                                 f"(have {circuit.n_qubits})", lineno, tok.col)
    return q


def _symbol_tok(tok, symtab, lineno):
    if tok.text not in symtab:
        raise CircuitSyntaxError(f"undeclared symbol {tok.text!r}",
                                 lineno, tok.col)
    return symtab[tok.text]


def _distinct(qs, tok, lineno):
    if len(set(qs)) != len(qs):
        raise CircuitSyntaxError("qubit arguments must be distinct",
                                 lineno, tok.col)


def _ctrlsym(toks, i, symtab, lineno):
    mode = _arg(toks, i, lineno)
    if mode.text not in ("ctrlsym", "ctrlsymneg"):
        raise CircuitSyntaxError(f"unexpected token {mode.text!r}",
                                 lineno, mode.col)
    s = _symbol_tok(_arg(toks, i + 1, lineno), symtab, lineno)
    _no_extra(toks, i + 2, lineno)
    return mode.text == "ctrlsymneg", s


# ----------------------------------------------------------------------
# gate tensors

def gate_tensor(gate, man):
    """Operator symTDD for a gate, over interleaved in/out index ranks
    (2k for qubit k's input, 2k+1 for its output).  Cached per manager."""
    key = ("gate", gate.kind, gate.k, gate.qubits, gate.symbol, gate.complement)
    hit = man._cache.get(key)
    if hit is not None:
        return hit
    tdd = _build_operator(man, gate.qubits, _entry_fn(gate, man))
    man._cache[key] = tdd
    return tdd


def _entry_fn(gate, man):
    """Matrix entry as a weight tensor, indexed by per-qubit bit tuples in
    the gate's own qubit order (controls first, target last)."""
    wm = man.weights
    kind = gate.kind

    if kind in _MATRICES_1Q:
        m = _MATRICES_1Q[kind]
        return lambda o, i: wm.const(m[o[0]][i[0]])
    if kind in ("rk", "rkdag"):
        ph = _rk_phase(gate.k)
        if kind == "rkdag":
            ph = ph.conjugate()
        return lambda o, i: wm.const((ph if i[0] else 1) if o == i else 0)
    if kind == "crk":
        ph = _rk_phase(gate.k)
        return lambda o, i: wm.const(
            (ph if i == (1, 1) else 1) if o == i else 0)
    if kind in ("cx", "ccx", "mcx"):
        nc = len(gate.qubits) - 1

        def entry(o, i):
            if o[:nc] != i[:nc]:
                return wm.zero
            flip = all(i[:nc])
            want = i[nc] ^ 1 if flip else i[nc]
            return wm.one if o[nc] == want else wm.zero
        return entry
    if kind == "symx":
        lit = wm.literal(gate.symbol, complement=gate.complement)
        nlit = wm.literal(gate.symbol, complement=not gate.complement)
        return lambda o, i: nlit if o == i else lit
    if kind == "csymx":
        lit = wm.literal(gate.symbol, complement=gate.complement)
        nlit = wm.literal(gate.symbol, complement=not gate.complement)

        def entry(o, i):
            if o[0] != i[0]:
                return wm.zero
            if i[0] == 0:
                return wm.one if o[1] == i[1] else wm.zero
            return nlit if o[1] == i[1] else lit
        return entry
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def _build_operator(man, gate_qubits, entry):
    """Build an operator diagram from a matrix-entry function.

    Recursion follows the interleaved global order in_k < out_k over the
    gate's qubits sorted by rank; bits are handed to `entry` in the gate's
    own qubit order.
    """
    order = sorted(gate_qubits)
    sorted_pos = {q: i for i, q in enumerate(order)}
    gate_pos = [sorted_pos[q] for q in gate_qubits]
    nq = len(order)

    def rec(level, ibits, obits):
        if level == 2 * nq:
            gi = tuple(ibits[p] for p in gate_pos)
            go = tuple(obits[p] for p in gate_pos)
            return man.edge(entry(go, gi), man.terminal)
        p = level // 2
        if level % 2 == 0:  # input index of qubit order[p]
            lo = rec(level + 1, ibits + (0,), obits)
            hi = rec(level + 1, ibits + (1,), obits)
            return man.make_node(2 * order[p], lo, hi)
        lo = rec(level + 1, ibits, obits + (0,))
        hi = rec(level + 1, ibits, obits + (1,))
        return man.make_node(2 * order[p] + 1, lo, hi)

    return rec(0, (), ())


# ----------------------------------------------------------------------
# simulation

@dataclass
class SimulationResult:
    state: SymTdd
    stats: dict


def initial_state(circuit, man, symbol_ids=None):
    """Build the circuit's initial product state at ranks 2k."""
    wm = man.weights
    if symbol_ids is None:
        symbol_ids = list(range(len(circuit.symbols)))
    e = man.one
    for k in reversed(range(circuit.n_qubits)):
        init = circuit.init[k]
        if init == 0:
            e = man.make_node(2 * k, e, man.zero)
        elif init == 1:
            e = man.make_node(2 * k, man.zero, e)
        else:
            s = symbol_ids[init[1]]
            low = man.edge(wm.mul(wm.literal(s, complement=True), e.weight), e.node)
            high = man.edge(wm.mul(wm.literal(s), e.weight), e.node)
            e = man.make_node(2 * k, low, high)
    return e


def simulate(circuit, man=None, rr3=True, on_step=None):
    """Symbolically execute a circuit; returns the final state and stats.

    Declares the circuit's symbols in the manager, builds the initial state,
    applies gates in order (with an RR3 reduction pass after each when rr3 is
    set), and records a statistics record.
    """
    if man is None:
        man = Manager()
    watch = Stopwatch()
    for name in circuit.symbols:
        man.declare_symbol(name)
    for k in range(circuit.n_qubits):
        man.set_label(2 * k, f"q{k}")
        man.set_label(2 * k + 1, f"q{k}'")
    state = initial_state(circuit, man)
    for step, gate in enumerate(circuit.gates):
        tdd = gate_tensor(gate, man)
        state = man.apply_gate(state, tdd, gate.qubits)
        if rr3:
            # cascaded merges may enable further ones; weights and nodes are
            # interned, so the fixpoint shows up as an unchanged handle pair
            for _ in range(64):
                prev = state
                state = man.rr3_pass(state)
                if state.weight is prev.weight and state.node is prev.node:
                    break
        if on_step is not None:
            on_step(step, gate, state)
    stats = man.stats(state, gates_applied=len(circuit.gates),
                      qubits=circuit.n_qubits, wall_time_ms=watch.ms())
    return SimulationResult(state, stats)
