"""Canonical complex-weighted decision diagrams over Boolean symbols.

A weight tensor is a map {0,1}^m -> C stored as an ordered, reduced,
weight-normalized DAG: every node branches on one symbol, symbols strictly
increase along any path, structurally identical nodes are shared, and at each
node the low-edge weight is normalized to 1 (or, if the low edge is zero, the
high-edge weight is).  A tensor handle is an interned edge (top weight, node),
so two tensors that agree pointwise within the engine tolerance compare equal
by identity.

All construction goes through a WeightManager, which owns the unique tables,
the operation caches and the tolerance policy.
"""

from __future__ import annotations

import math
from itertools import product


class SqcupConflictError(ValueError):
    """Operands of the patchwork combination disagree on common support."""


class EvaluationError(KeyError):
    """An evaluation assignment does not cover a required symbol."""


class WNode:
    """Internal node of a weight diagram.  Created only by WeightManager."""

    __slots__ = ("sym", "low", "high")

    def __init__(self, sym, low, high):
        self.sym = sym
        self.low = low
        self.high = high

    def __repr__(self):
        return f"<WNode s{self.sym} @{id(self):x}>"


class WEdge:
    """A weight-tensor handle: (top weight, node).  Interned per manager."""

    __slots__ = ("w", "node")

    def __init__(self, w, node):
        self.w = w
        self.node = node

    def __repr__(self):
        return f"<WEdge {self.w!r} -> {self.node!r}>"


# operation tags for the computed cache
_ADD, _MULN, _SUPP, _PATCH, _SQCUP, _DIV, _CONJ, _DIV0 = range(8)

_NEIGHBOR_CELLS = [d for d in product((-1, 0, 1), repeat=2) if d != (0, 0)]


class WeightManager:
    """Owns the weight-diagram node store, unique tables and caches."""

    def __init__(self, epsilon=1e-10):
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        self.epsilon = epsilon
        self._grid = epsilon * 10
        self.terminal = WNode(-1, None, None)
        # edge interning: (node id, grid cell of re, grid cell of im) -> [WEdge]
        self._edge_table = {}
        # node interning: (sym, id(low edge), id(high edge)) -> WNode
        self._node_table = {}
        self._cache = {}
        self.cache_hits = 0
        self._symbols = []  # declared symbol names, position = ordinal
        self.zero = self._new_edge(0j, self.terminal)
        self.one = self._new_edge(1 + 0j, self.terminal)

    # ------------------------------------------------------------------
    # symbols

    def declare_symbol(self, name=None):
        """Declare the next symbol; returns its ordinal in the global order."""
        ordinal = len(self._symbols)
        self._symbols.append(name if name is not None else f"s{ordinal}")
        return ordinal

    def declare_symbols(self, count):
        return [self.declare_symbol() for _ in range(count)]

    @property
    def symbol_count(self):
        return len(self._symbols)

    def symbol_name(self, sym):
        return self._symbols[sym]

    def _check_symbol(self, sym):
        if not 0 <= sym < len(self._symbols):
            raise ValueError(f"undeclared symbol ordinal {sym}")

    # ------------------------------------------------------------------
    # interning

    def _cell(self, x):
        return int(round(x / self._grid))

    def _new_edge(self, w, node):
        e = WEdge(w, node)
        key = (id(node), self._cell(w.real), self._cell(w.imag))
        self._edge_table.setdefault(key, []).append(e)
        return e

    def wedge(self, w, node):
        """Intern an edge; weights within epsilon share one handle."""
        w = complex(w)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise ValueError(f"non-finite weight {w!r}")
        if abs(w) <= self.epsilon:
            return self.zero
        eps = self.epsilon
        cr, ci = self._cell(w.real), self._cell(w.imag)
        nid = id(node)
        bucket = self._edge_table.get((nid, cr, ci))
        if bucket:
            for e in bucket:
                if abs(e.w - w) <= eps:
                    return e
        # a value within epsilon may have landed in a neighboring grid cell
        for dr, di in _NEIGHBOR_CELLS:
            bucket = self._edge_table.get((nid, cr + dr, ci + di))
            if bucket:
                for e in bucket:
                    if abs(e.w - w) <= eps:
                        return e
        return self._new_edge(w, node)

    def _intern_node(self, sym, low, high):
        key = (sym, id(low), id(high))
        node = self._node_table.get(key)
        if node is None:
            node = WNode(sym, low, high)
            self._node_table[key] = node
        return node

    def make(self, sym, low, high):
        """Reduced, normalized node constructor; low/high are interned edges."""
        if low is high:
            return low
        if low is self.zero:
            node = self._intern_node(sym, self.zero, self.wedge(1, high.node))
            return self.wedge(high.w, node)
        pivot = low.w
        nl = self.wedge(1, low.node)
        nh = self.wedge(high.w / pivot, high.node) if high is not self.zero else self.zero
        if nl is nh:
            return self.wedge(pivot * nl.w, nl.node)
        node = self._intern_node(sym, nl, nh)
        return self.wedge(pivot, node)

    # ------------------------------------------------------------------
    # constructors

    def const(self, c):
        """Rank-0 tensor with constant value c."""
        return self.wedge(c, self.terminal)

    def literal(self, sym, complement=False):
        """Tensor s (value a_s) or its complement s' (value 1 - a_s)."""
        self._check_symbol(sym)
        if complement:
            return self.make(sym, self.one, self.zero)
        return self.make(sym, self.zero, self.one)

    def from_vector(self, syms, values):
        """Build a tensor from its value vector, syms[0] most significant."""
        if len(values) != 1 << len(syms):
            raise ValueError("value vector length does not match symbol count")
        if not syms:
            return self.const(values[0])
        half = len(values) // 2
        low = self.from_vector(syms[1:], values[:half])
        high = self.from_vector(syms[1:], values[half:])
        return self.make(syms[0], low, high)

    def to_vector(self, e, syms):
        """Value vector of e over the given symbols, syms[0] most significant."""
        out = []
        for bits in product((0, 1), repeat=len(syms)):
            out.append(self.evaluate(e, dict(zip(syms, bits))))
        return out

    # ------------------------------------------------------------------
    # algebra

    def _cof(self, e, sym, bit):
        n = e.node
        if n is self.terminal or n.sym > sym:
            return e
        c = n.high if bit else n.low
        if c is self.zero:
            return self.zero
        return self.wedge(e.w * c.w, c.node)

    def add(self, a, b):
        """Pointwise sum."""
        if a is self.zero:
            return b
        if b is self.zero:
            return a
        if a.node is self.terminal and b.node is self.terminal:
            return self.const(a.w + b.w)
        key = (_ADD, id(a), id(b)) if id(a) <= id(b) else (_ADD, id(b), id(a))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        v = min(a.node.sym if a.node is not self.terminal else 1 << 60,
                b.node.sym if b.node is not self.terminal else 1 << 60)
        r = self.make(v,
                      self.add(self._cof(a, v, 0), self._cof(b, v, 0)),
                      self.add(self._cof(a, v, 1), self._cof(b, v, 1)))
        self._cache[key] = r
        return r

    def mul(self, a, b):
        """Hadamard (pointwise) product."""
        if a is self.zero or b is self.zero:
            return self.zero
        if a.node is self.terminal:
            return self.wedge(a.w * b.w, b.node)
        if b.node is self.terminal:
            return self.wedge(a.w * b.w, a.node)
        base = self._mul_nodes(a.node, b.node)
        if base is self.zero:
            return self.zero
        return self.wedge(a.w * b.w * base.w, base.node)

    def _mul_nodes(self, na, nb):
        key = (_MULN, id(na), id(nb)) if id(na) <= id(nb) else (_MULN, id(nb), id(na))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        ea, eb = WEdge(1 + 0j, na), WEdge(1 + 0j, nb)
        v = min(na.sym, nb.sym)
        r = self.make(v,
                      self.mul(self._cof(ea, v, 0), self._cof(eb, v, 0)),
                      self.mul(self._cof(ea, v, 1), self._cof(eb, v, 1)))
        self._cache[key] = r
        return r

    def scale(self, c, e):
        """Multiply a tensor by the scalar c."""
        return self.wedge(c * e.w, e.node)

    def support(self, e):
        """The 0/1 indicator tensor of supp(e)."""
        if e is self.zero:
            return self.zero
        if e.node is self.terminal:
            return self.one
        key = (_SUPP, id(e.node))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        n = e.node
        r = self.make(n.sym, self.support(n.low), self.support(n.high))
        self._cache[key] = r
        return r

    def conj(self, e):
        """Pointwise complex conjugate."""
        if e is self.zero:
            return self.zero
        if e.node is self.terminal:
            return self.const(e.w.conjugate())
        key = (_CONJ, id(e.node))
        inner = self._cache.get(key)
        if inner is None:
            n = e.node
            inner = self.make(n.sym, self.conj(n.low), self.conj(n.high))
            self._cache[key] = inner
        else:
            self.cache_hits += 1
        return self.wedge(e.w.conjugate() * inner.w, inner.node)

    def _pair(self, op, a, b):
        if op is _PATCH and self.support(a) is self.one:
            return a  # a covers every assignment; b never shows through
        key = (op, id(a), id(b))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        term = self.terminal
        if a.node is term and b.node is term:
            r = self._pair_scalar(op, a.w, b.w)
        else:
            v = min(a.node.sym if a.node is not term else 1 << 60,
                    b.node.sym if b.node is not term else 1 << 60)
            r = self.make(v,
                          self._pair(op, self._cof(a, v, 0), self._cof(b, v, 0)),
                          self._pair(op, self._cof(a, v, 1), self._cof(b, v, 1)))
        self._cache[key] = r
        return r

    def _pair_scalar(self, op, fa, fb):
        eps = self.epsilon
        # PATCH / SQCUP: f's value on supp(f), g's elsewhere
        f, g = fa, fb
        if op is _SQCUP and abs(f) > eps and abs(g) > eps and abs(f - g) > eps:
            raise SqcupConflictError(
                f"operands disagree on common support: {f!r} vs {g!r}")
        return self.const(f if abs(f) > eps else g)

    def patch(self, f, g):
        """f's value on supp(f), g's elsewhere; no agreement check."""
        if f is self.zero:
            return g
        if g is self.zero:
            return f
        return self._pair(_PATCH, f, g)

    def sqcup(self, f, g):
        """Patchwork combination; raises if f, g differ on common support."""
        if f is self.zero:
            return g
        if g is self.zero:
            return f
        return self._pair(_SQCUP, f, g)

    def divide_on_support(self, g, f):
        """g(a)/f(a) on supp(f); 1 on supp(g)\\supp(f); 0 elsewhere."""
        if g is self.zero:
            return self.zero
        if f is self.zero:
            return self.support(g)
        if f.node is self.terminal:
            return self.wedge(g.w / f.w, g.node)
        # quotient restricted to supp(f), patched with 1 on the rest of
        # supp(g); the raw quotient factors over top weights, so its memo
        # is keyed on node pairs
        q = self._div0(g.node, f.node)
        if q is not self.zero:
            q = self.wedge((g.w / f.w) * q.w, q.node)
        return self.patch(q, self.support(g))

    def _div0(self, na, nb):
        """g/f on supp(f) and supp(g), 0 elsewhere, for unit top weights."""
        if na is self.terminal and nb is self.terminal:
            return self.one
        key = (_DIV0, id(na), id(nb))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        ea, eb = WEdge(1 + 0j, na), WEdge(1 + 0j, nb)
        v = min(na.sym if na is not self.terminal else 1 << 60,
                nb.sym if nb is not self.terminal else 1 << 60)
        parts = []
        for bit in (0, 1):
            ca = self._cof(ea, v, bit)
            cb = self._cof(eb, v, bit)
            if ca is self.zero or cb is self.zero:
                parts.append(self.zero)
                continue
            sub = self._div0(ca.node, cb.node)
            if sub is self.zero:
                parts.append(self.zero)
                continue
            parts.append(self.wedge((ca.w / cb.w) * sub.w, sub.node))
        r = self.make(v, parts[0], parts[1])
        self._cache[key] = r
        return r

    def loc_norm(self, f, g):
        """Extract the greatest common part h of (f, g); returns (h, f*, g*).

        h(a) = f(a) if f(a) != 0 else g(a); f* is the indicator of supp(f);
        g* is divide_on_support(g, f).  Guarantees h (.) f* = f and
        h (.) g* = g.
        """
        return self.patch(f, g), self.support(f), self.divide_on_support(g, f)

    # ------------------------------------------------------------------
    # queries

    def evaluate(self, e, assignment):
        """Exact pointwise value of e under a symbol -> {0,1} assignment."""
        v = e.w
        n = e.node
        while n is not self.terminal:
            try:
                bit = assignment[n.sym]
            except KeyError:
                raise EvaluationError(
                    f"assignment missing symbol ordinal {n.sym}") from None
            c = n.high if bit else n.low
            v *= c.w
            n = c.node
        return v

    def node_count(self, edges):
        """Distinct internal nodes reachable from the given edge handles."""
        seen = set()
        stack = [e.node for e in edges]
        while stack:
            n = stack.pop()
            if n is self.terminal or id(n) in seen:
                continue
            seen.add(id(n))
            stack.append(n.low.node)
            stack.append(n.high.node)
        return len(seen)

    def to_text(self, e):
        """Render a tensor as a sum of products over literals."""
        if e is self.zero:
            return "0"
        terms = []
        self._collect_terms(e.w, e.node, [], terms)
        return " + ".join(terms)

    def _collect_terms(self, coeff, node, lits, out):
        if node is self.terminal:
            factors = list(lits)
            c = _fmt_complex(coeff)
            if c != "1" or not factors:
                factors.insert(0, c)
            out.append("*".join(factors))
            return
        name = self.symbol_name(node.sym)
        if node.low is not self.zero:
            self._collect_terms(coeff * node.low.w, node.low.node,
                                lits + [name + "'"], out)
        if node.high is not self.zero:
            self._collect_terms(coeff * node.high.w, node.high.node,
                                lits + [name], out)

    def clear_cache(self):
        self._cache.clear()


def _fmt_complex(c):
    re, im = c.real, c.imag

    def num(x):
        if x == int(x):
            return str(int(x))
        return f"{x:.4g}"

    if im == 0:
        return num(re)
    if re == 0:
        return "i" if im == 1 else f"{num(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"({num(re)}{sign}{num(abs(im))}i)"
