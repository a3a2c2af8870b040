"""symTDD: decision diagrams over quantum indices with tensor edge weights.

A diagram is a rooted edge (root weight, node) into a hash-consed DAG.  Node
construction extracts the greatest common part of the two outgoing weights
(local normalization) and pushes it onto the incoming edge, so every diagram
built through public operations is fully normalized; together with node
interning this yields a canonical handle per represented tensor, up to the
engine tolerance.
"""

from __future__ import annotations

import time

from .weights import WeightManager

_QADD, _CONT, _RELABEL, _NORM, _RR3, _REFS = "q+", "q*", "qr", "qn", "q3", "qc"

_INF = 1 << 60


class QNode:
    """Internal node of a symTDD.  Created only by Manager."""

    __slots__ = ("q", "low", "high")

    def __init__(self, q, low, high):
        self.q = q
        self.low = low
        self.high = high

    def __repr__(self):
        return f"<QNode q{self.q} @{id(self):x}>"


class SymTdd:
    """A symTDD handle: root weight tensor plus root node."""

    __slots__ = ("weight", "node")

    def __init__(self, weight, node):
        self.weight = weight
        self.node = node

    def __eq__(self, other):
        return (isinstance(other, SymTdd)
                and self.weight is other.weight and self.node is other.node)

    def __hash__(self):
        return hash((id(self.weight), id(self.node)))

    def __repr__(self):
        return f"<SymTdd w={self.weight!r} node={self.node!r}>"


class Manager:
    """Owns both diagram layers: node stores, unique tables, caches, tolerance.

    Single-threaded; handles are immutable and only meaningful within their
    manager.  Quantum indices are integer ranks in a global order fixed by the
    caller; optional labels are used for DOT export.
    """

    def __init__(self, epsilon=1e-10):
        self.weights = WeightManager(epsilon)
        self.terminal = QNode(-1, None, None)
        self._node_table = {}
        self._cache = {}
        self.cache_hits = 0
        self._labels = {}
        self.zero = SymTdd(self.weights.zero, self.terminal)
        self.one = SymTdd(self.weights.one, self.terminal)

    @property
    def epsilon(self):
        return self.weights.epsilon

    # convenience passthroughs to the weight layer
    def declare_symbol(self, name=None):
        return self.weights.declare_symbol(name)

    def declare_symbols(self, count):
        return self.weights.declare_symbols(count)

    def set_label(self, rank, label):
        self._labels[rank] = label

    def label(self, rank):
        return self._labels.get(rank, f"q{rank}")

    def clear_caches(self):
        self._cache.clear()
        self.weights.clear_cache()

    @property
    def total_cache_hits(self):
        return self.cache_hits + self.weights.cache_hits

    # ------------------------------------------------------------------
    # construction

    def _intern(self, q, low, high):
        key = (q, id(low.weight), id(low.node), id(high.weight), id(high.node))
        node = self._node_table.get(key)
        if node is None:
            node = QNode(q, low, high)
            self._node_table[key] = node
        return node

    def edge(self, weight, node):
        """Canonicalize a raw edge: zero weights point to the terminal."""
        if weight is self.weights.zero:
            return self.zero
        return SymTdd(weight, node)

    def make_node(self, q, low, high):
        """Normalized, reduced node constructor.

        Extracts loc_norm of the two edge weights onto the returned edge and
        applies the redundant-node rule when both normalized children agree.
        """
        wm = self.weights
        low = self.edge(low.weight, low.node)
        high = self.edge(high.weight, high.node)
        if low.node is not self.terminal and low.node.q <= q:
            raise ValueError("child index must come after the node index")
        if high.node is not self.terminal and high.node.q <= q:
            raise ValueError("child index must come after the node index")
        h, f_star, g_star = wm.loc_norm(low.weight, high.weight)
        if low.node is high.node and f_star is g_star:
            return self.edge(h, low.node)
        node = self._intern(q, SymTdd(f_star, low.node), SymTdd(g_star, high.node))
        return self.edge(h, node)

    def constant(self, c):
        """Rank-0 diagram with scalar value c."""
        return self.edge(self.weights.const(c), self.terminal)

    def symbolic_basis_state(self, n, ranks=None, symbols=None):
        """Product state |s_0>...|s_{n-1}> as an n-node tower.

        Declares symbols s_0..s_{n-1} unless a list is supplied; qubit k sits
        at rank ranks[k] (default k).
        """
        wm = self.weights
        if symbols is None:
            symbols = wm.declare_symbols(n)
        if ranks is None:
            ranks = list(range(n))
        e = self.one
        for k in reversed(range(n)):
            low = SymTdd(wm.mul(wm.literal(symbols[k], complement=True), e.weight), e.node)
            high = SymTdd(wm.mul(wm.literal(symbols[k]), e.weight), e.node)
            e = self.make_node(ranks[k], low, high)
        return e

    # ------------------------------------------------------------------
    # algebra

    def _qcof(self, e, q, bit):
        n = e.node
        if n is self.terminal or n.q > q:
            return e
        c = n.high if bit else n.low
        return self.edge(self.weights.mul(e.weight, c.weight), c.node)

    def add(self, f, g):
        """Pointwise sum over quantum and symbol assignments."""
        wm = self.weights
        if f.weight is wm.zero:
            return g
        if g.weight is wm.zero:
            return f
        if f.node is g.node:
            # same structure below; weights have no quantum indices
            return self.edge(wm.add(f.weight, g.weight), f.node)
        ka = (id(f.weight), id(f.node))
        kb = (id(g.weight), id(g.node))
        key = (_QADD, ka, kb) if ka <= kb else (_QADD, kb, ka)
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        v = min(f.node.q if f.node is not self.terminal else _INF,
                g.node.q if g.node is not self.terminal else _INF)
        r = self.make_node(v,
                           self._add_cof(f, g, v, 0),
                           self._add_cof(f, g, v, 1))
        self._cache[key] = r
        return r

    def _add_cof(self, f, g, v, bit):
        """Sum of the two v-cofactors.  A weight shared by both child edges
        is factored out before recursing, so the memo key does not accumulate
        the common factors picked up along parallel paths."""
        wm = self.weights
        ef = self._ncof(f.node, v, bit)
        eg = self._ncof(g.node, v, bit)
        if ef.weight is eg.weight:
            sub = self.add(self.edge(f.weight, ef.node),
                           self.edge(g.weight, eg.node))
            return self.edge(wm.mul(ef.weight, sub.weight), sub.node)
        return self.add(self.edge(wm.mul(f.weight, ef.weight), ef.node),
                        self.edge(wm.mul(g.weight, eg.weight), eg.node))

    def contract(self, f, g, shared):
        """Contract f and g over the shared quantum indices (sum of products).

        Indices open in both operands must be exactly the shared ones.  The
        recursion works on nodes alone: edge weights have no quantum indices,
        so they factor out of every partial contraction, which keeps the memo
        keyed on node pairs.
        """
        wm = self.weights
        if f.weight is wm.zero or g.weight is wm.zero:
            return self.zero
        e = self._contract(f.node, g.node, tuple(sorted(shared)), 0)
        w = wm.mul(wm.mul(f.weight, g.weight), e.weight)
        return self.edge(w, e.node)

    def _ncof(self, n, q, bit):
        if n is self.terminal or n.q > q:
            return SymTdd(self.weights.one, n)
        return n.high if bit else n.low

    def _cmul(self, ef, eg, shared, i):
        wm = self.weights
        if ef.weight is wm.zero or eg.weight is wm.zero:
            return self.zero
        sub = self._contract(ef.node, eg.node, shared, i)
        w = wm.mul(wm.mul(ef.weight, eg.weight), sub.weight)
        return self.edge(w, sub.node)

    def _contract(self, fn, gn, shared, i):
        wm = self.weights
        if fn is self.terminal and gn is self.terminal:
            k = len(shared) - i
            w = wm.scale(1 << k, wm.one) if k else wm.one
            return self.edge(w, self.terminal)
        key = (_CONT, id(fn), id(gn), shared, i)
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        v = min(fn.q if fn is not self.terminal else _INF,
                gn.q if gn is not self.terminal else _INF)
        if i < len(shared) and shared[i] <= v:
            v = shared[i]
            r = self.add(
                self._cmul(self._ncof(fn, v, 0), self._ncof(gn, v, 0),
                           shared, i + 1),
                self._cmul(self._ncof(fn, v, 1), self._ncof(gn, v, 1),
                           shared, i + 1))
        else:
            r = self.make_node(
                v,
                self._cmul(self._ncof(fn, v, 0), self._ncof(gn, v, 0),
                           shared, i),
                self._cmul(self._ncof(fn, v, 1), self._ncof(gn, v, 1),
                           shared, i))
        self._cache[key] = r
        return r

    def relabel(self, f, mapping):
        """Rebuild f with ranks renamed; the mapping must preserve the order
        of the indices actually present."""
        node = self._relabel_node(f.node, tuple(sorted(mapping.items())), mapping)
        return SymTdd(f.weight, node)

    def _relabel_node(self, n, mkey, mapping):
        if n is self.terminal:
            return n
        key = (_RELABEL, id(n), mkey)
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        low = SymTdd(n.low.weight, self._relabel_node(n.low.node, mkey, mapping))
        high = SymTdd(n.high.weight, self._relabel_node(n.high.node, mkey, mapping))
        r = self._intern(mapping.get(n.q, n.q), low, high)
        self._cache[key] = r
        return r

    def apply_gate(self, state, gate, qubits, rank_of=None):
        """Contract a gate diagram into a state.

        The gate diagram must use rank 2k for qubit k's input index and 2k+1
        for its output; the state uses rank 2k per qubit.  rank_of overrides
        the qubit -> state-rank map.
        """
        if rank_of is None:
            rank_of = {k: 2 * k for k in qubits}
        shared = [rank_of[k] for k in qubits]
        out = self.contract(gate, state, shared)
        return self.relabel(out, {rank_of[k] + 1: rank_of[k] for k in qubits})

    # ------------------------------------------------------------------
    # normalization and reduction

    def normalize_full(self, f):
        """Rebuild bottom-up through the normalizing constructor.

        Idempotent and evaluation-preserving; the fixpoint satisfies the
        full-normalization characterization checked by is_fully_normalized.
        """
        e = self._norm_node(f.node)
        return self.edge(self.weights.mul(f.weight, e.weight), e.node)

    def _norm_node(self, n):
        if n is self.terminal:
            return self.one
        key = (_NORM, id(n))
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        wm = self.weights
        le = self._norm_node(n.low.node)
        he = self._norm_node(n.high.node)
        r = self.make_node(n.q,
                           self.edge(wm.mul(n.low.weight, le.weight), le.node),
                           self.edge(wm.mul(n.high.weight, he.weight), he.node))
        self._cache[key] = r
        return r

    def is_fully_normalized(self, f):
        """Check that every incoming edge weight absorbs exactly the
        extractable common part of its node's outgoing weights.

        Per node v with outgoing weights (f_v, g_v): the pair must be its own
        loc_norm residue, loc_norm(f_v, g_v) = (patch(f_v, g_v), f_v, g_v),
        so no common part is left unextracted; and each incoming weight h
        (including the root weight) must satisfy h (.) patch(f_v, g_v) = h,
        so h carries no support on which v's tensor vanishes outright."""
        wm = self.weights
        seen = set()
        stack = [(f.weight, f.node)]
        while stack:
            h, n = stack.pop()
            if n is self.terminal:
                continue
            fv, gv = n.low.weight, n.high.weight
            sv = wm.patch(fv, gv)
            if wm.mul(h, sv) is not h:
                return False
            if id(n) not in seen:
                seen.add(id(n))
                if wm.loc_norm(fv, gv) != (sv, fv, gv):
                    return False
                stack.append((fv, n.low.node))
                stack.append((gv, n.high.node))
        return True

    def _parent_counts(self, f):
        """Distinct-parent counts of every reachable node."""
        refs = {id(f.node): 1}
        seen = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n is self.terminal or id(n) in seen:
                continue
            seen.add(id(n))
            for c in {id(n.low.node): n.low.node,
                      id(n.high.node): n.high.node}.values():
                refs[id(c)] = refs.get(id(c), 0) + 1
                stack.append(c)
        return refs

    def rr3_pass(self, f):
        """One pass of the support-disjoint merge over parallel branches.

        Wherever a node's two children head disjoint-support branches that
        agree on common support, the branches are merged level by level from
        their convergence point upward; indicator filters move onto the
        splitting node's edges.  Only applied when all paths into the two
        branches come from that single node.  Evaluation-preserving; the
        result is re-normalized by construction.
        """
        refs = self._parent_counts(f)
        memo = {}
        pair_memo = {}
        e = self._rr3_node(f.node, refs, memo, pair_memo)
        return self.edge(self.weights.mul(f.weight, e.weight), e.node)

    def _rr3_node(self, n, refs, memo, pair_memo):
        if n is self.terminal:
            return self.one
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        wm = self.weights
        le = self._rr3_node(n.low.node, refs, memo, pair_memo)
        he = self._rr3_node(n.high.node, refs, memo, pair_memo)
        low = self.edge(wm.mul(n.low.weight, le.weight), le.node)
        high = self.edge(wm.mul(n.high.weight, he.weight), he.node)
        u, w = low.node, high.node
        merged = None
        if (u is not self.terminal and w is not self.terminal and u is not w
                and refs.get(id(n.low.node), 0) == 1
                and refs.get(id(n.high.node), 0) == 1):
            pair = self._rr3_pair(u, w, wm.support(low.weight),
                                  wm.support(high.weight), pair_memo)
            if pair is not None:
                eu, ew = pair
                merged = self.make_node(
                    n.q,
                    self.edge(wm.mul(low.weight, eu.weight), eu.node),
                    self.edge(wm.mul(high.weight, ew.weight), ew.node))
        r = merged if merged is not None else self.make_node(n.q, low, high)
        memo[id(n)] = r
        return r

    def _rr3_pair(self, u, w, cf, cg, pair_memo):
        """Merge two parallel branches into one.

        cf and cg are the indicator contexts accumulated along the paths from
        the splitting node.  Returns edges (eu, ew) with a shared target node
        such that eu represents cf (.) u and ew represents cg (.) w, or None
        when the merge conditions fail."""
        key = (id(u), id(w), id(cf), id(cg))
        if key in pair_memo:
            return pair_memo[key]
        pair_memo[key] = None  # guards against diamond re-entry
        r = self._rr3_pair_inner(u, w, cf, cg, pair_memo)
        pair_memo[key] = r
        return r

    def _rr3_pair_inner(self, u, w, cf, cg, pair_memo):
        if u.q != w.q:
            return None
        wm = self.weights
        f0, f1 = wm.mul(cf, u.low.weight), wm.mul(cf, u.high.weight)
        g0, g1 = wm.mul(cg, w.low.weight), wm.mul(cg, w.high.weight)
        n0, n1 = u.low.node, u.high.node
        if (u.low.node is u.high.node and w.low.node is w.high.node
                and u.low.node is not w.low.node):
            # both edges of each branch converge on one child pair; merge it
            # once under the union of the edge contexts
            if u.low.node is self.terminal or w.low.node is self.terminal:
                return None
            sub = self._rr3_pair(
                u.low.node, w.low.node,
                wm.patch(wm.support(f0), wm.support(f1)),
                wm.patch(wm.support(g0), wm.support(g1)), pair_memo)
            if sub is None:
                return None
            f0 = wm.mul(f0, sub[0].weight)
            f1 = wm.mul(f1, sub[0].weight)
            g0 = wm.mul(g0, sub[1].weight)
            g1 = wm.mul(g1, sub[1].weight)
            n0 = n1 = sub[0].node
        else:
            r = self._rr3_side(n0, w.low.node, f0, g0, pair_memo)
            if r is None:
                return None
            f0, g0, n0 = r
            r = self._rr3_side(n1, w.high.node, f1, g1, pair_memo)
            if r is None:
                return None
            f1, g1, n1 = r
        sf0, sf1 = wm.support(f0), wm.support(f1)
        sg0, sg1 = wm.support(g0), wm.support(g1)
        # agreement on common support, per successor
        if wm.mul(f0, sg0) is not wm.mul(g0, sf0):
            return None
        if wm.mul(f1, sg1) is not wm.mul(g1, sf1):
            return None
        # cross-support condition
        if wm.mul(sf0, sg1) is not wm.mul(sf1, sg0):
            return None
        m = self.make_node(u.q,
                           self.edge(wm.patch(f0, g0), n0),
                           self.edge(wm.patch(f1, g1), n1))
        eu = self.edge(wm.mul(wm.patch(sf0, sf1), m.weight), m.node)
        ew = self.edge(wm.mul(wm.patch(sg0, sg1), m.weight), m.node)
        return eu, ew

    def _rr3_side(self, nu, nw, f, g, pair_memo):
        """Align one successor side of a branch pair.

        Returns the possibly updated (f, g, shared node), or None when the
        successors are distinct internal nodes that cannot be merged.  A zero
        weight leaves only the other branch's successor in play."""
        wm = self.weights
        if f is wm.zero and g is wm.zero:
            return f, g, self.terminal
        if f is wm.zero:
            return f, g, nw
        if g is wm.zero:
            return f, g, nu
        if nu is nw:
            return f, g, nu
        if nu is self.terminal or nw is self.terminal:
            return None
        sub = self._rr3_pair(nu, nw, wm.support(f), wm.support(g), pair_memo)
        if sub is None:
            return None
        return wm.mul(f, sub[0].weight), wm.mul(g, sub[1].weight), sub[0].node

    # ------------------------------------------------------------------
    # queries

    def evaluate(self, f, quantum_assign, symbol_assign):
        """Scalar value of f at a quantum-index and symbol assignment."""
        wm = self.weights
        v = wm.evaluate(f.weight, symbol_assign)
        n = f.node
        while n is not self.terminal:
            try:
                bit = quantum_assign[n.q]
            except KeyError:
                raise KeyError(f"assignment missing quantum index {n.q}") from None
            c = n.high if bit else n.low
            v *= wm.evaluate(c.weight, symbol_assign)
            n = c.node
        return v

    def index_set(self, f):
        out = set()
        seen = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n is self.terminal or id(n) in seen:
                continue
            seen.add(id(n))
            out.add(n.q)
            stack.append(n.low.node)
            stack.append(n.high.node)
        return out

    def node_count(self, f):
        """(quantum internal nodes, weight internal nodes, total incl. terminal)."""
        qnodes = set()
        wedges = [f.weight]
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n is self.terminal or id(n) in qnodes:
                continue
            qnodes.add(id(n))
            wedges.append(n.low.weight)
            wedges.append(n.high.weight)
            stack.append(n.low.node)
            stack.append(n.high.node)
        wn = self.weights.node_count(wedges)
        return len(qnodes), wn, len(qnodes) + wn + 1

    def diagram_equal(self, f, g):
        """Canonical handle equality; decides tensor equality up to epsilon."""
        return f == g

    def is_tower(self, f):
        """True if the diagram has at most one node per quantum index."""
        per_index = {}
        seen = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n is self.terminal or id(n) in seen:
                continue
            seen.add(id(n))
            per_index.setdefault(n.q, set()).add(id(n))
            stack.append(n.low.node)
            stack.append(n.high.node)
        return all(len(v) == 1 for v in per_index.values())

    def to_dot(self, f):
        """DOT text; red = low edge, blue = high edge, weights as labels."""
        wm = self.weights
        lines = ["digraph symtdd {", '  rankdir=TB;',
                 '  entry [shape=point];',
                 '  term [label="1", shape=box];']
        names = {id(self.terminal): "term"}
        order = []
        seen = set()

        def visit(n):
            if n is self.terminal or id(n) in seen:
                return
            seen.add(id(n))
            names[id(n)] = f"n{len(order)}"
            order.append(n)
            visit(n.low.node)
            visit(n.high.node)

        visit(f.node)
        for n in order:
            lines.append(f'  {names[id(n)]} [label="{self.label(n.q)}"];')
        lines.append(f'  entry -> {names[id(f.node)]} '
                     f'[label="{wm.to_text(f.weight)}"];')
        for n in order:
            me = names[id(n)]
            lines.append(f'  {me} -> {names[id(n.low.node)]} '
                         f'[color=red, label="{wm.to_text(n.low.weight)}"];')
            lines.append(f'  {me} -> {names[id(n.high.node)]} '
                         f'[color=blue, label="{wm.to_text(n.high.weight)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def stats(self, f, gates_applied=0, qubits=0, wall_time_ms=0.0):
        qn, wn, total = self.node_count(f)
        return {
            "schema": 1,
            "qubits": qubits,
            "gates_applied": gates_applied,
            "quantum_nodes": qn,
            "weight_nodes": wn,
            "total_nodes": total,
            "wall_time_ms": wall_time_ms,
            "cache_hits": self.total_cache_hits,
        }


class Stopwatch:
    """Wall-clock timer for statistics records."""

    def __init__(self):
        self.start = time.perf_counter()

    def ms(self):
        return (time.perf_counter() - self.start) * 1000.0
