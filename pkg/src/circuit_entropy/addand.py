"""Explicit ADD-with-conjunction diagrams.

Three node kinds: terminals carrying a nonnegative weight, decision nodes
on a variable with a low (false) and high (true) child, and conjunction
nodes whose children mention pairwise-disjoint variables. A diagram maps
every assignment of its variables to a weight; weight and entropy of the
induced distribution are computed bottom-up, including the power-of-two
factor for variables missing from one branch.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Iterator, Mapping, Sequence

TERMINAL = "terminal"
DECISION = "decision"
CONJ = "conj"


class AddAndNode:
    __slots__ = ("kind", "weight_label", "var", "lo", "hi", "children", "uid", "_vars", "_weight", "_entropy")

    def __init__(self, kind, weight_label=None, var=None, lo=None, hi=None, children=(), uid=None):
        self.kind = kind
        self.weight_label = weight_label
        self.var = var
        self.lo = lo
        self.hi = hi
        self.children = tuple(children)
        self.uid = uid
        self._vars = None
        self._weight = None
        self._entropy = None

    def __repr__(self):
        if self.kind == TERMINAL:
            return f"<terminal {self.weight_label}>"
        if self.kind == DECISION:
            return f"<decision {self.var}>"
        return f"<conj {len(self.children)}>"

    def successors(self) -> tuple[AddAndNode, ...]:
        if self.kind == DECISION:
            return (self.lo, self.hi)
        return self.children

    @property
    def vars(self) -> frozenset[int]:
        if self._vars is None:
            for u in _postorder(self):
                if u._vars is not None:
                    continue
                if u.kind == TERMINAL:
                    u._vars = frozenset()
                elif u.kind == DECISION:
                    u._vars = u.lo._vars | u.hi._vars | {u.var}
                else:
                    u._vars = frozenset().union(*(c._vars for c in u.children))
        return self._vars


def terminal(weight) -> AddAndNode:
    if weight < 0:
        raise ValueError("terminal weight must be nonnegative")
    return AddAndNode(TERMINAL, weight_label=weight)


def decision(var: int, lo: AddAndNode, hi: AddAndNode) -> AddAndNode:
    return AddAndNode(DECISION, var=var, lo=lo, hi=hi)


def conj(children: Sequence[AddAndNode]) -> AddAndNode:
    return AddAndNode(CONJ, children=children)


class NodeStore:
    """Hash-consing factory: structurally identical nodes are created once."""

    def __init__(self):
        self._unique: dict[tuple, AddAndNode] = {}

    def __len__(self):
        return len(self._unique)

    def _intern(self, key, make):
        node = self._unique.get(key)
        if node is None:
            node = make()
            node.uid = len(self._unique)
            self._unique[key] = node
        return node

    def terminal(self, weight) -> AddAndNode:
        if weight < 0:
            raise ValueError("terminal weight must be nonnegative")
        return self._intern((TERMINAL, weight), lambda: AddAndNode(TERMINAL, weight_label=weight))

    def decision(self, var: int, lo: AddAndNode, hi: AddAndNode) -> AddAndNode:
        return self._intern((DECISION, var, lo.uid, hi.uid), lambda: AddAndNode(DECISION, var=var, lo=lo, hi=hi))

    def conj(self, children: Sequence[AddAndNode]) -> AddAndNode:
        kids = tuple(sorted(children, key=lambda c: c.uid))
        return self._intern((CONJ,) + tuple(c.uid for c in kids), lambda: AddAndNode(CONJ, children=kids))


def _postorder(root: AddAndNode) -> Iterator[AddAndNode]:
    """Children before parents, each node once."""
    seen: set[int] = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(node.successors()):
            if id(child) not in seen:
                stack.append((child, False))


class AddAndDiagram:
    def __init__(self, root: AddAndNode, order: Sequence[int] | None = None):
        self.root = root
        self.order = tuple(order) if order is not None else None

    def nodes(self) -> list[AddAndNode]:
        return list(_postorder(self.root))

    def node_count(self) -> int:
        return len(self.nodes())

    @property
    def vars(self) -> frozenset[int]:
        return self.root.vars

    def check(self) -> None:
        """Raise ValueError unless the structural invariants hold."""
        rank = {v: i for i, v in enumerate(self.order)} if self.order is not None else None
        for u in self.nodes():
            if u.kind == TERMINAL:
                if u.weight_label < 0:
                    raise ValueError("negative terminal weight")
            elif u.kind == DECISION:
                below = u.lo.vars | u.hi.vars
                if u.var in below:
                    raise ValueError(f"variable {u.var} repeated below its decision node")
                if rank is not None:
                    if u.var not in rank:
                        raise ValueError(f"variable {u.var} missing from order")
                    if any(rank[v] <= rank[u.var] for v in below):
                        raise ValueError(f"order violated below variable {u.var}")
            else:
                seen: set[int] = set()
                for c in u.children:
                    if seen & c.vars:
                        raise ValueError("conjunction children share variables")
                    seen |= c.vars


def _gaps(u: AddAndNode) -> tuple[int, int]:
    n = len(u.vars)
    return n - len(u.lo.vars) - 1, n - len(u.hi.vars) - 1


def _node_weight(root: AddAndNode):
    for u in _postorder(root):
        if u._weight is not None:
            continue
        if u.kind == TERMINAL:
            u._weight = u.weight_label
        elif u.kind == CONJ:
            w = 1
            for c in u.children:
                w *= c._weight
            u._weight = w
        else:
            n0, n1 = _gaps(u)
            u._weight = u.lo._weight * 2**n0 + u.hi._weight * 2**n1
    return root._weight


def _node_entropy(root: AddAndNode) -> float:
    _node_weight(root)
    for u in _postorder(root):
        if u._entropy is not None:
            continue
        w = u._weight
        if u.kind == TERMINAL or w == 0:
            u._entropy = 0.0
        elif u.kind == CONJ:
            u._entropy = math.fsum(c._entropy for c in u.children)
        else:
            n0, n1 = _gaps(u)
            h = 0.0
            for child, gap in ((u.lo, n0), (u.hi, n1)):
                part = child._weight * 2**gap
                if part:
                    p = part / w
                    h += p * (child._entropy + gap - math.log2(p))
            u._entropy = h
    return root._entropy


def weight(d: AddAndDiagram):
    """Total weight over all assignments of the root's variables."""
    return _node_weight(d.root)


def entropy(d: AddAndDiagram) -> float:
    """Shannon entropy (bits) of the normalised weight distribution."""
    return _node_entropy(d.root)


def eval_assignment(d: AddAndDiagram, sigma: Mapping[int, bool]):
    """Weight of one total assignment."""
    missing = d.vars - sigma.keys()
    if missing:
        raise ValueError(f"assignment leaves variables unbound: {sorted(missing)}")

    def walk(u):
        while u.kind == DECISION:
            u = u.hi if sigma[u.var] else u.lo
        if u.kind == TERMINAL:
            return u.weight_label
        w = 1
        for c in u.children:
            w *= walk(c)
            if w == 0:
                break
        return w

    return walk(d.root)


def enumerate_distribution(d: AddAndDiagram) -> tuple[object, float]:
    """Brute-force (weight, entropy) by visiting every assignment."""
    vs = sorted(d.vars)
    ws = []
    for values in itertools.product((False, True), repeat=len(vs)):
        ws.append(eval_assignment(d, dict(zip(vs, values))))
    total = sum(ws)
    if total == 0:
        return total, 0.0
    h = -math.fsum((w / total) * math.log2(w / total) for w in ws if w)
    return total, h


def reduce(d: AddAndDiagram) -> AddAndDiagram:
    """Merge structurally identical nodes bottom-up."""
    st = NodeStore()
    new: dict[int, AddAndNode] = {}
    for u in _postorder(d.root):
        if u.kind == TERMINAL:
            new[id(u)] = st.terminal(u.weight_label)
        elif u.kind == DECISION:
            new[id(u)] = st.decision(u.var, new[id(u.lo)], new[id(u.hi)])
        else:
            new[id(u)] = st.conj([new[id(c)] for c in u.children])
    return AddAndDiagram(new[id(d.root)], d.order)


def structurally_equal(a: AddAndDiagram, b: AddAndDiagram) -> bool:
    ra, rb = reduce(a), reduce(b)
    return a.node_count() == b.node_count() and _signature(ra.root) == _signature(rb.root)


def _signature(root: AddAndNode) -> tuple:
    ids: dict[tuple, int] = {}
    local: dict[int, int] = {}
    for u in _postorder(root):
        if u.kind == TERMINAL:
            key = (TERMINAL, u.weight_label)
        elif u.kind == DECISION:
            key = (DECISION, u.var, local[id(u.lo)], local[id(u.hi)])
        else:
            key = (CONJ,) + tuple(sorted(local[id(c)] for c in u.children))
        local[id(u)] = ids.setdefault(key, len(ids))
    return tuple(sorted(ids, key=ids.get))


# -- construction from a search trace ------------------------------------

def build_from_trace(trace) -> AddAndDiagram:
    """Materialise the diagram implied by a search trace.

    ``trace.records`` holds tuples ``("zero", yvars)``,
    ``("decision", var, lo_id, hi_id)`` and
    ``("product", child_ids, factor, forced_lits)``; ``trace.root`` is the
    id of the root product. Output variables fixed by propagation become
    decision nodes with a zero branch, so no branch skips a variable.
    """
    order = trace.order
    rank = {v: i for i, v in enumerate(order)} if order is not None else None
    st = NodeStore()
    zero_memo: dict[frozenset[int], AddAndNode] = {}
    insert_memo: dict[tuple[int, int], AddAndNode] = {}
    scale_memo: dict[tuple[int, int], AddAndNode] = {}

    def sort_key(v):
        return rank[v] if rank is not None else v

    def zero(vs: frozenset[int]) -> AddAndNode:
        node = zero_memo.get(vs)
        if node is None:
            node = st.terminal(0)
            for v in sorted(vs, key=sort_key, reverse=True):
                node = st.decision(v, node, node)
            zero_memo[vs] = node
        return node

    def insert(node: AddAndNode, lit: int) -> AddAndNode:
        key = (node.uid, lit)
        hit = insert_memo.get(key)
        if hit is not None:
            return hit
        v = abs(lit)
        if node.kind == DECISION and rank is not None and rank[node.var] < rank[v]:
            res = st.decision(node.var, insert(node.lo, lit), insert(node.hi, lit))
        else:
            z = zero(node.vars)
            res = st.decision(v, z, node) if lit > 0 else st.decision(v, node, z)
        insert_memo[key] = res
        return res

    def scale(node: AddAndNode, c: int) -> AddAndNode:
        key = (node.uid, c)
        hit = scale_memo.get(key)
        if hit is not None:
            return hit
        if node.kind == TERMINAL:
            res = st.terminal(node.weight_label * c)
        elif node.kind == DECISION:
            res = st.decision(node.var, scale(node.lo, c), scale(node.hi, c))
        else:
            kids = list(node.children)
            kids[0] = scale(kids[0], c)
            res = st.conj(kids)
        scale_memo[key] = res
        return res

    built: dict[int, AddAndNode] = {}
    for i, rec in enumerate(trace.records):
        kind = rec[0]
        if kind == "zero":
            node = zero(frozenset(rec[1]))
        elif kind == "decision":
            _, var, lo, hi = rec
            node = st.decision(var, built[lo], built[hi])
        elif kind == "product":
            _, child_ids, factor, forced = rec
            kids = [built[c] for c in child_ids]
            forced = sorted(forced, key=lambda l: sort_key(abs(l)))
            if trace.decomposition and kids:
                parts = kids + [insert(st.terminal(1), lit) for lit in forced]
                if factor != 1:
                    parts.append(st.terminal(factor))
                node = parts[0] if len(parts) == 1 else st.conj(parts)
            else:
                if len(kids) > 1:
                    raise ValueError("product with several components in a trace without decomposition")
                node = kids[0] if kids else st.terminal(1)
                if factor != 1:
                    node = scale(node, factor)
                for lit in forced:
                    node = insert(node, lit)
        else:
            raise ValueError(f"unknown trace record {kind!r}")
        built[i] = node
    return AddAndDiagram(built[trace.root], order)


# -- serialisation -------------------------------------------------------

def export(d: AddAndDiagram, fmt: str = "text") -> str:
    """Deterministic ``dot`` or line-oriented ``text`` rendering.

    Text records, children before parents::

        order <v1> <v2> ...      (or "order -")
        t <id> <weight>
        d <id> <var> <lo-id> <hi-id>
        a <id> <child-id> ...
        root <id>
    """
    nodes = d.nodes()
    num = {id(u): i for i, u in enumerate(nodes)}
    if fmt == "text":
        lines = ["order " + (" ".join(map(str, d.order)) if d.order is not None else "-")]
        for u in nodes:
            i = num[id(u)]
            if u.kind == TERMINAL:
                lines.append(f"t {i} {u.weight_label}")
            elif u.kind == DECISION:
                lines.append(f"d {i} {u.var} {num[id(u.lo)]} {num[id(u.hi)]}")
            else:
                lines.append(f"a {i} " + " ".join(str(num[id(c)]) for c in u.children))
        lines.append(f"root {num[id(d.root)]}")
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["digraph addand {"]
        for u in nodes:
            i = num[id(u)]
            if u.kind == TERMINAL:
                lines.append(f'  n{i} [shape=box, label="{u.weight_label}"];')
            elif u.kind == DECISION:
                lines.append(f'  n{i} [shape=circle, label="{u.var}"];')
            else:
                lines.append(f'  n{i} [shape=circle, label="&#8743;"];')
        for u in nodes:
            i = num[id(u)]
            if u.kind == DECISION:
                lines.append(f"  n{i} -> n{num[id(u.lo)]} [style=dashed];")
                lines.append(f"  n{i} -> n{num[id(u.hi)]} [style=solid];")
            elif u.kind == CONJ:
                for c in u.children:
                    lines.append(f"  n{i} -> n{num[id(c)]} [style=solid];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def import_text(text: str) -> AddAndDiagram:
    nodes: dict[int, AddAndNode] = {}
    order = None
    root = None
    for lineno, line in enumerate(text.splitlines(), 1):
        tok = line.split()
        if not tok:
            continue
        try:
            if tok[0] == "order":
                order = None if tok[1:] == ["-"] else [int(t) for t in tok[1:]]
            elif tok[0] == "t":
                w = tok[2]
                nodes[int(tok[1])] = terminal(int(w) if w.lstrip("-").isdigit() else float(w))
            elif tok[0] == "d":
                i, var, lo, hi = map(int, tok[1:5])
                nodes[i] = decision(var, nodes[lo], nodes[hi])
            elif tok[0] == "a":
                nodes[int(tok[1])] = conj([nodes[int(t)] for t in tok[2:]])
            elif tok[0] == "root":
                root = nodes[int(tok[1])]
            else:
                raise ValueError(f"unknown record {tok[0]!r}")
        except (KeyError, IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if root is None:
        raise ValueError("missing root record")
    return AddAndDiagram(root, order)


# -- random diagrams for testing ------------------------------------------

def random_diagram(rng: random.Random, nvars: int, max_weight: int = 5, conj_prob: float = 0.3) -> AddAndDiagram:
    """Random ordered diagram over variables ``1..nvars``.

    Variables are dropped at random from branches, so decision nodes
    frequently have nonzero gaps.
    """

    def gen(vs: list[int]) -> AddAndNode:
        if not vs or rng.random() < 0.15:
            return terminal(rng.randint(0, max_weight))
        if len(vs) >= 2 and rng.random() < conj_prob:
            k = rng.randint(2, min(3, len(vs)))
            buckets: list[list[int]] = [[] for _ in range(k)]
            for v in vs:
                buckets[rng.randrange(k)].append(v)
            return conj([gen(b) for b in buckets if b] or [terminal(1)])
        i = rng.randrange(len(vs))
        rest = vs[i + 1:]
        lo = gen([v for v in rest if rng.random() < 0.8])
        hi = gen([v for v in rest if rng.random() < 0.8])
        return decision(vs[i], lo, hi)

    return AddAndDiagram(gen(list(range(1, nvars + 1))), list(range(1, nvars + 1)))
