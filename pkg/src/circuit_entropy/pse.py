"""Exact Shannon entropy of circuit formulas by search over the outputs.

The search decides output variables, splits residual formulas into
variable-disjoint components, and hands output-free components to the
model counter. Counts stay exact integers; entropies are floats combined
with probabilities taken from those counts. The search trace is an
ADD-with-conjunction diagram and can be recorded for
:func:`circuit_entropy.addand.build_from_trace`.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import asdict, dataclass, field

from .counter import Component, ModelCounter, SharedCache, component_key, split_components
from .formula import CircuitFormula, Clause, clause_vars, propagate
from .ordering import (
    DecisionOrder,
    VsadsState,
    decision_priority,
    explicit_priority,
    minfill_order,
    primal_graph,
    vsads_pick,
)
from .preprocess import apply_pre

HEURISTICS = ("minfill", "vsads")


class CircuitViolation(Exception):
    """An output variable became free on a satisfiable branch."""


class SearchTimeout(Exception):
    pass


@dataclass
class PseConfig:
    heuristic: str = "minfill"
    use_pre: bool = True
    use_ycache: bool = True
    use_xcache: bool = True
    use_decomposition: bool = True
    emit_trace: bool = False
    # explicit output decision order; overrides the heuristic
    order: tuple[int, ...] | None = None
    cache_bytes: int | None = None
    timeout: float | None = None

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.order is not None:
            self.order = tuple(self.order)


@dataclass
class BranchSplit:
    count0: int
    count1: int
    h0: float = 0.0
    h1: float = 0.0
    gap0: int = 0
    gap1: int = 0


def combine_decision(s: BranchSplit, general: bool = False) -> tuple[float, int]:
    """Entropy and count of a decision node from its two branches.

    Circuit mode requires zero gaps. In general mode a branch missing
    ``gap`` variables stands for ``2**gap`` assignments each.
    """
    if not general and (s.gap0 or s.gap1):
        raise CircuitViolation(f"nonzero gap ({s.gap0}, {s.gap1}) at a decision")
    a0 = s.count0 << s.gap0
    a1 = s.count1 << s.gap1
    total = a0 + a1
    if total == 0:
        return 0.0, 0
    h = 0.0
    for part, hb, gap in ((a0, s.h0, s.gap0), (a1, s.h1, s.gap1)):
        if part:
            p = part / total
            h += p * (hb + gap - math.log2(p))
    return h, total


@dataclass
class SearchStats:
    decisions: int = 0
    components: int = 0
    splits: int = 0
    terminals: int = 0
    ycache_hits: int = 0
    ycache_misses: int = 0
    xcache_hits: int = 0
    xcache_misses: int = 0
    x_decisions: int = 0
    cache_entries: int = 0
    cache_resets: int = 0
    trace_nodes: int = 0
    treewidth: int = 0
    pre_merged: int = 0
    pre_forced: int = 0
    wall_ms: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trace:
    records: list[tuple] = field(default_factory=list)
    root: int | None = None
    order: tuple[int, ...] | None = None
    decomposition: bool = True

    def add(self, rec: tuple) -> int:
        self.records.append(rec)
        return len(self.records) - 1


@dataclass
class EntropyResult:
    entropy: float
    count: int
    stats: SearchStats = field(default_factory=SearchStats)
    trace: Trace | None = None


class PseEngine:
    """One entropy query; owns its caches and heuristic state."""

    def __init__(self, f: CircuitFormula, cfg: PseConfig | None = None):
        self.cfg = cfg or PseConfig()
        self.stats = SearchStats()
        if self.cfg.use_pre:
            pre = apply_pre(f)
            self.stats.pre_merged = pre.stats["merged"]
            self.stats.pre_forced = pre.stats["forced"]
            f = pre.formula
        self.formula = f
        self.outputs = f.outputs
        self.cache = SharedCache(self.cfg.cache_bytes)
        self.counter = ModelCounter(self.cache, use_cache=self.cfg.use_xcache)
        elim = minfill_order(primal_graph(f.clauses))
        self.stats.treewidth = elim.width
        self.priority: DecisionOrder | None = None
        self.vsads: VsadsState | None = None
        if self.cfg.order is not None:
            seq = [y for y in self.cfg.order if y in f.outputs]
            seq += sorted(f.outputs - set(seq))
            self.priority = explicit_priority(seq)
        elif self.cfg.heuristic == "minfill":
            self.priority = decision_priority(f, elim)
        else:
            self.vsads = VsadsState()
        self.trace: Trace | None = None
        if self.cfg.emit_trace:
            order = tuple(self.priority.sequence) if self.priority is not None else None
            self.trace = Trace(order=order, decomposition=self.cfg.use_decomposition)
        self._trace_ids: dict[bytes, int] = {}
        self._deadline = None

    def run(self) -> EntropyResult:
        start = time.perf_counter()
        if self.cfg.timeout is not None:
            self._deadline = start + self.cfg.timeout
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20000))
        try:
            h, count, rid = self._root()
        finally:
            sys.setrecursionlimit(limit)
        if self.trace is not None:
            self.trace.root = rid
        st = self.stats
        st.xcache_hits = self.counter.hits
        st.xcache_misses = self.counter.misses
        st.x_decisions = self.counter.decisions
        st.cache_entries = len(self.cache)
        st.cache_resets = self.cache.resets
        st.trace_nodes = st.decisions + st.splits + st.terminals
        st.wall_ms = (time.perf_counter() - start) * 1000.0
        return EntropyResult(h, count, st, self.trace)

    def _record(self, rec: tuple) -> int | None:
        return self.trace.add(rec) if self.trace is not None else None

    def _root(self) -> tuple[float, int, int | None]:
        f = self.formula
        residual, true_lits = propagate(list(f.clauses))
        if residual is None:
            return 0.0, 0, self._record(("zero", tuple(sorted(f.outputs))))
        assigned = {abs(l) for l in true_lits}
        forced = tuple(sorted((l for l in true_lits if abs(l) in self.outputs), key=abs))
        scope = set(f.variables) - assigned
        count, h, rid = self._residual(residual, scope, forced)
        return h, count, rid

    def _pick(self, comp: Component, ys: list[int]) -> int:
        if not ys:
            raise AssertionError("decision requested on a component without outputs")
        if self.priority is not None:
            return self.priority.pick(ys)
        return vsads_pick(comp.clauses, self.outputs, self.vsads)

    def _residual(self, clauses: list[Clause], scope: set[int], forced: tuple[int, ...]) -> tuple[int, float, int | None]:
        """Count and entropy of a unit-free residual over ``scope``."""
        Y = self.outputs
        if self.cfg.use_decomposition:
            comps, free_x, free_y = split_components(clauses, scope, Y)
            x_comps = [c for c in comps if not (c.variables & Y)]
            y_comps = [c for c in comps if c.variables & Y]
        else:
            vs = clause_vars(clauses)
            free = scope - vs
            free_y = len(free & Y)
            free_x = len(free) - free_y
            whole = Component(clauses, frozenset(vs))
            x_comps, y_comps = ([], [whole]) if vs & Y else ([whole] if clauses else [], [])
        factor = 1 << free_x
        for comp in x_comps:
            if self.cfg.use_decomposition:
                factor *= self.counter.count_component(comp)
            else:
                factor *= self.counter.count_residual(comp.clauses)
            if factor == 0:
                break
        count = factor
        h = 0.0
        ids = []
        if count:
            for comp in y_comps:
                c, hc, rid = self._component(comp)
                count *= c
                h += hc
                ids.append(rid)
                if count == 0:
                    break
        self.stats.components += len(y_comps)
        if count == 0:
            yvars = (scope & Y) | {abs(l) for l in forced}
            return 0, 0.0, self._record(("zero", tuple(sorted(yvars))))
        if free_y:
            free = sorted((scope - clause_vars(clauses)) & Y)
            raise CircuitViolation(f"output variables {free} are unconstrained on a satisfiable branch")
        if len(y_comps) > 1:
            self.stats.splits += 1
        if not y_comps:
            self.stats.terminals += 1
        return count, h, self._record(("product", tuple(ids), factor, forced))

    def _component(self, comp: Component) -> tuple[int, float, int | None]:
        Y = self.outputs
        key = None
        if self.cfg.use_ycache:
            key = component_key(comp.clauses)
            entry = self.cache.get(key)
            if entry is not None and entry.entropy is not None:
                self.stats.ycache_hits += 1
                return entry.count, entry.entropy, self._trace_ids.get(key)
            self.stats.ycache_misses += 1
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise SearchTimeout("time limit reached")
        ys = sorted(comp.variables & Y)
        y = self._pick(comp, ys)
        self.stats.decisions += 1
        if self.vsads is not None:
            self.vsads.on_decision()
        branches = []
        for lit in (-y, y):
            residual, true_lits = propagate(comp.clauses, (lit,))
            if residual is None:
                rest = tuple(v for v in ys if v != y)
                branches.append((0, 0.0, self._record(("zero", rest))))
                continue
            assigned = {abs(l) for l in true_lits}
            forced = tuple(sorted((l for l in true_lits if abs(l) in Y and l != lit), key=abs))
            branches.append(self._residual(residual, comp.variables - assigned, forced))
        (c0, h0, id0), (c1, h1, id1) = branches
        if self.vsads is not None and (c0 == 0 or c1 == 0):
            self.vsads.bump(y)
        h, count = combine_decision(BranchSplit(c0, c1, h0, h1))
        rid = self._record(("decision", y, id0, id1))
        if key is not None:
            self.cache.put(key, count, h, len(ys))
            if rid is not None:
                self._trace_ids[key] = rid
        return count, h, rid


def pse_entropy(f: CircuitFormula, cfg: PseConfig | None = None) -> EntropyResult:
    """Shannon entropy (bits) of the output distribution and the exact count."""
    return PseEngine(f, cfg).run()
