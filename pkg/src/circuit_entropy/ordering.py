"""Variable orderings: minfill elimination, static decision priority, VSADS."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .formula import CircuitFormula, Clause

PrimalGraph = dict[int, set[int]]

VSADS_DECAY = 0.95
VSADS_DECAY_PERIOD = 64
VSADS_WEIGHT = 1.0


def primal_graph(clauses: Iterable[Clause]) -> PrimalGraph:
    """Adjacency sets; two variables are adjacent iff they share a clause."""
    g: PrimalGraph = {}
    for c in clauses:
        vs = [abs(l) for l in c]
        for v in vs:
            g.setdefault(v, set())
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                if a != b:
                    g[a].add(b)
                    g[b].add(a)
    return g


@dataclass
class EliminationOrder:
    order: list[int]
    width: int


def _fill(g: PrimalGraph, v: int) -> int:
    nbrs = list(g[v])
    missing = 0
    for i, a in enumerate(nbrs):
        ga = g[a]
        for b in nbrs[i + 1:]:
            if b not in ga:
                missing += 1
    return missing


def minfill_order(g: PrimalGraph) -> EliminationOrder:
    """Greedy min-fill elimination.

    Ties go to minimum degree, then smallest variable. The width is the
    largest neighbourhood seen at elimination time, an upper bound on the
    treewidth.
    """
    g = {v: set(nb) for v, nb in g.items()}
    fill = {v: _fill(g, v) for v in g}
    order: list[int] = []
    width = 0
    while g:
        v = min(g, key=lambda u: (fill[u], len(g[u]), u))
        nbrs = g.pop(v)
        del fill[v]
        width = max(width, len(nbrs))
        for a in nbrs:
            g[a].discard(v)
        for a in nbrs:
            g[a] |= nbrs - {a}
        order.append(v)
        touched = set(nbrs)
        for a in nbrs:
            touched |= g[a]
        for u in touched:
            fill[u] = _fill(g, u)
    return EliminationOrder(order, width)


@dataclass
class DecisionOrder:
    """Static Y priority; rank 0 is decided first."""

    priority: dict[int, int]

    def pick(self, candidates: Iterable[int]) -> int:
        return min(candidates, key=self.priority.__getitem__)

    @property
    def sequence(self) -> list[int]:
        return sorted(self.priority, key=self.priority.__getitem__)


def decision_priority(f: CircuitFormula, e: EliminationOrder) -> DecisionOrder:
    """Rank Y by reverse elimination position: last eliminated, first decided.

    Output variables that occur in no clause never reach a decision; they
    are ranked after all others.
    """
    pos = {v: i for i, v in enumerate(e.order)}
    used = {abs(l) for c in f.clauses for l in c}
    missing = sorted(y for y in f.outputs & used if y not in pos)
    if missing:
        raise ValueError(f"output variables missing from elimination order: {missing}")
    ranked = sorted((y for y in f.outputs if y in pos), key=lambda y: -pos[y])
    ranked += sorted(y for y in f.outputs if y not in pos)
    return DecisionOrder({y: i for i, y in enumerate(ranked)})


def explicit_priority(sequence: Sequence[int]) -> DecisionOrder:
    if len(set(sequence)) != len(sequence):
        raise ValueError("decision order repeats a variable")
    return DecisionOrder({y: i for i, y in enumerate(sequence)})


@dataclass
class VsadsState:
    """Activity scores for one search; decayed every few decisions."""

    activity: dict[int, float] = field(default_factory=dict)
    weight: float = VSADS_WEIGHT
    decay: float = VSADS_DECAY
    period: int = VSADS_DECAY_PERIOD
    decisions: int = 0

    def bump(self, var: int, amount: float = 1.0) -> None:
        self.activity[var] = self.activity.get(var, 0.0) + amount

    def on_decision(self) -> None:
        self.decisions += 1
        if self.decisions % self.period == 0:
            for v in self.activity:
                self.activity[v] *= self.decay


def vsads_pick(clauses: Sequence[Clause], outputs: Iterable[int], state: VsadsState) -> int:
    """Output variable maximising weight*activity + occurrences, ties by index."""
    outputs = outputs if isinstance(outputs, (set, frozenset)) else set(outputs)
    occ: dict[int, int] = {}
    for c in clauses:
        for lit in c:
            v = abs(lit)
            if v in outputs:
                occ[v] = occ.get(v, 0) + 1
    if not occ:
        raise ValueError("component has no output variable")
    act = state.activity
    return min(occ, key=lambda v: (-(state.weight * act.get(v, 0.0) + occ[v]), v))
