"""Literal-equivalence preprocessing that keeps the output distribution intact.

Equivalent literals come from strongly connected components of the
binary implication graph. Every merged or forced output variable gets its
definition re-added as clauses, so ``Y`` and the entropy are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .formula import UNSAT, CircuitFormula, Clause, normalize_clause, propagate


@dataclass
class EquivClasses:
    classes: list[frozenset[int]]
    rep: dict[int, int]
    forced: frozenset[int]
    unsat: bool = False


@dataclass
class PreResult:
    formula: CircuitFormula
    restored: frozenset[Clause]
    stats: dict[str, int] = field(default_factory=dict)


def _pick_rep(members: frozenset[int], inputs: frozenset[int]) -> int:
    xs = [l for l in members if abs(l) in inputs]
    return min(xs or members, key=lambda l: (abs(l), l < 0))


def detect_equivalences(f: CircuitFormula) -> EquivClasses:
    """Literal classes from binary-clause SCCs, plus units found by propagation."""
    residual, true_lits = propagate(list(f.clauses))
    if residual is None:
        return EquivClasses([], {}, frozenset(true_lits), unsat=True)
    graph = nx.DiGraph()
    for c in residual:
        if len(c) == 2:
            a, b = c
            graph.add_edge(-a, b)
            graph.add_edge(-b, a)
    classes: list[frozenset[int]] = []
    rep: dict[int, int] = {}
    done: set[int] = set()
    for scc in nx.strongly_connected_components(graph):
        if len(scc) < 2:
            continue
        members = frozenset(scc)
        if any(-l in members for l in members):
            return EquivClasses([], {}, frozenset(true_lits), unsat=True)
        if min(members) in done:
            continue
        negated = frozenset(-l for l in members)
        r = _pick_rep(members | negated, f.inputs)
        if r not in members:
            r = -r
        for l in members:
            rep[l] = r
            rep[-l] = -r
        done |= members | negated
        classes += [members, negated]
    classes.sort(key=lambda c: sorted(c))
    return EquivClasses(classes, rep, frozenset(true_lits))


def _canon(c) -> Clause:
    return tuple(sorted(c, key=lambda l: (abs(l), l)))


def _substitute(clauses, rep: dict[int, int], true_lits: set[int]) -> list[Clause] | None:
    out: set[Clause] = set()
    for c in clauses:
        if any(l in true_lits for l in c):
            continue
        nc = normalize_clause(rep.get(l, l) for l in c if -l not in true_lits)
        if nc is None:
            continue
        if not nc:
            return None
        out.add(_canon(nc))
    return sorted(out)


def apply_pre(f: CircuitFormula) -> PreResult:
    """Substitute class representatives to a fixpoint, then restore Y definitions.

    Eliminated input variables leave ``X`` (they are determined by the
    remaining ones, so counts are unchanged). Output variables always stay
    in ``Y``; a merged output gets ``y <-> rep`` back as two binary clauses
    and a forced output gets its unit clause back.
    """
    unsat = PreResult(CircuitFormula(f.nvars, UNSAT, f.inputs, f.outputs), frozenset(), {"merged": 0, "forced": 0})
    clauses: list[Clause] = list(f.clauses)
    sub: dict[int, int] = {}
    forced: set[int] = set()
    while True:
        eq = detect_equivalences(CircuitFormula(f.nvars, tuple(clauses), f.inputs, f.outputs))
        if eq.unsat:
            return unsat
        if not eq.rep and not (eq.forced - forced):
            break
        for lit, r in eq.rep.items():
            if lit > 0 and r != lit:
                sub[lit] = r
        forced |= eq.forced
        substituted = _substitute(clauses, eq.rep, set(eq.forced))
        if substituted is None:
            return unsat
        clauses = substituted

    def resolve(lit):
        while abs(lit) in sub:
            r = sub[abs(lit)]
            lit = r if lit > 0 else -r
        return lit

    forced_vars: set[int] = set()
    merged: set[int] = set()
    restored: set[Clause] = set()
    for v in sorted(f.variables):
        r = resolve(v)
        if r in forced or -r in forced:
            forced_vars.add(v)
            if v in f.outputs:
                restored.add((v,) if r in forced else (-v,))
        elif r != v:
            merged.add(v)
            if v in f.outputs:
                restored.add(_canon((-v, r)))
                restored.add(_canon((v, -r)))
    final = sorted({_canon(c) for c in clauses} | restored)
    inputs = f.inputs - merged - forced_vars
    out = CircuitFormula(f.nvars, tuple(final), inputs, f.outputs)
    return PreResult(out, frozenset(restored), {"merged": len(merged), "forced": len(forced_vars)})
