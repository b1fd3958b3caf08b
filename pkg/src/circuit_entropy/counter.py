"""Exact model counting with dynamic decomposition and a shared component cache."""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import CircuitFormula, Clause, clause_vars, propagate

# rough per-entry overhead of a dict slot plus the entry object
_ENTRY_OVERHEAD = 120


def component_key(clauses: Iterable[Clause]) -> bytes:
    """Canonical full encoding of a clause set.

    Clauses are sorted internally and against each other, then written as
    zero-terminated int32 runs. Equal clause sets give equal keys.
    """
    flat = array("i")
    for c in sorted(tuple(sorted(c)) for c in clauses):
        flat.extend(c)
        flat.append(0)
    return flat.tobytes()


@dataclass
class CacheEntry:
    count: int
    entropy: float | None = None
    y_count: int = 0


class SharedCache:
    """Component cache shared by every counting query of one run.

    Keys are full canonical encodings, never hashes. With ``max_bytes``
    set, the whole cache is dropped once the estimated footprint exceeds
    the budget.
    """

    def __init__(self, max_bytes: int | None = None):
        self.max_bytes = max_bytes
        self.entries: dict[bytes, CacheEntry] = {}
        self.hits = 0
        self.misses = 0
        self.resets = 0
        self.nbytes = 0

    def __len__(self):
        return len(self.entries)

    def get(self, key: bytes) -> CacheEntry | None:
        entry = self.entries.get(key)
        if entry is None:
            self.misses += 1
        else:
            self.hits += 1
        return entry

    def put(self, key: bytes, count: int, entropy: float | None = None, y_count: int = 0) -> None:
        if key not in self.entries:
            self.nbytes += len(key) + _ENTRY_OVERHEAD
        self.entries[key] = CacheEntry(count, entropy, y_count)
        if self.max_bytes is not None and self.nbytes > self.max_bytes:
            self.clear()
            self.resets += 1

    def clear(self) -> None:
        self.entries.clear()
        self.nbytes = 0


@dataclass
class Component:
    clauses: list[Clause]
    variables: frozenset[int]


def split_components(clauses: Sequence[Clause], scope: Iterable[int] = (), outputs: Iterable[int] = ()) -> tuple[list[Component], int, int]:
    """Connected components of the primal graph of ``clauses``.

    Returns ``(components, free_x, free_y)`` where the free counts are the
    variables of ``scope`` that occur in no clause, split by membership in
    ``outputs``. Components come out ordered by smallest variable.
    """
    parent: dict[int, int] = {}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    for c in clauses:
        first = None
        for lit in c:
            v = abs(lit)
            if v not in parent:
                parent[v] = v
            if first is None:
                first = find(v)
            else:
                r = find(v)
                if r != first:
                    parent[r] = first
    groups: dict[int, list[Clause]] = {}
    for c in clauses:
        groups.setdefault(find(abs(c[0])), []).append(c)
    members: dict[int, set[int]] = {}
    for v in parent:
        members.setdefault(find(v), set()).add(v)
    comps = [Component(groups[r], frozenset(members[r])) for r in groups]
    comps.sort(key=lambda comp: min(comp.variables))
    outputs = set(outputs)
    free = set(scope) - parent.keys()
    free_y = len(free & outputs)
    return comps, len(free) - free_y, free_y


def _pick_branch_var(clauses: Sequence[Clause]) -> int:
    occ: dict[int, int] = {}
    for c in clauses:
        for lit in c:
            v = abs(lit)
            occ[v] = occ.get(v, 0) + 1
    return min(occ, key=lambda v: (-occ[v], v))


class ModelCounter:
    """DPLL-style #SAT: propagation, decomposition, branching, caching.

    Branching picks the variable with most occurrences, ties by index.
    """

    def __init__(self, cache: SharedCache | None = None, use_cache: bool = True):
        self.cache = cache if cache is not None else SharedCache()
        self.use_cache = use_cache
        self.decisions = 0
        self.queries = 0
        self.hits = 0
        self.misses = 0

    def count(self, clauses: Sequence[Clause], scope: Iterable[int] | None = None) -> int:
        """Models of ``clauses`` over ``scope`` (default: their variables)."""
        self.queries += 1
        clauses = list(clauses)
        scope = set(scope) if scope is not None else clause_vars(clauses)
        residual, true_lits = propagate(clauses, ())
        if residual is None:
            return 0
        assigned = {abs(l) for l in true_lits}
        free = len(scope - assigned - clause_vars(residual))
        return self.count_residual(residual) << free

    def count_residual(self, clauses: Sequence[Clause]) -> int:
        """Models over the variables of unit-free ``clauses``."""
        total = 1
        comps, _, _ = split_components(clauses)
        for comp in comps:
            total *= self.count_component(comp)
            if total == 0:
                break
        return total

    def count_component(self, comp: Component) -> int:
        key = component_key(comp.clauses) if self.use_cache else None
        if key is not None:
            entry = self.cache.get(key)
            if entry is not None:
                self.hits += 1
                return entry.count
            self.misses += 1
        v = _pick_branch_var(comp.clauses)
        self.decisions += 1
        total = 0
        for lit in (-v, v):
            residual, true_lits = propagate(comp.clauses, (lit,))
            if residual is None:
                continue
            remaining = clause_vars(residual)
            free = len(comp.variables) - len(true_lits) - len(remaining)
            total += self.count_residual(residual) << free
        if key is not None:
            self.cache.put(key, total)
        return total


def count_models(f: CircuitFormula | Sequence[Clause], cache: SharedCache | None = None, scope: Iterable[int] | None = None) -> int:
    """Exact |Sol(f)|.

    For a :class:`CircuitFormula` the scope defaults to X and Y together,
    so declared variables absent from every clause count as free.
    """
    if isinstance(f, CircuitFormula):
        clauses = f.clauses
        if scope is None:
            scope = f.variables
    else:
        clauses = f
    return ModelCounter(cache).count(clauses, scope)
