"""Reference entropy by enumerating output assignments.

Each output assignment is weighted by the model count of the formula
conditioned on it. Meant as a ground-truth oracle on small instances.
"""

from __future__ import annotations

import math
import time

from .counter import ModelCounter, SharedCache
from .formula import CircuitFormula, propagate
from .pse import EntropyResult, SearchStats

MAX_OUTPUTS = 20


class GuardError(ValueError):
    pass


def output_weights(f: CircuitFormula, counter: ModelCounter | None = None) -> dict[tuple[bool, ...], int]:
    """Nonzero weights keyed by output values in increasing variable order.

    Assignments whose prefix already conflicts under propagation are
    skipped, since every extension has weight zero.
    """
    if len(f.outputs) > MAX_OUTPUTS:
        raise GuardError(f"{len(f.outputs)} outputs exceed the enumeration guard of {MAX_OUTPUTS}")
    counter = counter or ModelCounter(SharedCache())
    ys = sorted(f.outputs)
    weights: dict[tuple[bool, ...], int] = {}

    def walk(i, clauses, values, true_lits):
        if i == len(ys):
            w = counter.count(clauses, f.inputs - {abs(l) for l in true_lits})
            if w:
                weights[tuple(values)] = w
            return
        y = ys[i]
        for value in (False, True):
            lit = y if value else -y
            if -lit in true_lits:
                continue
            residual, implied = propagate(clauses, (lit,))
            if residual is None:
                continue
            values.append(value)
            walk(i + 1, residual, values, true_lits | implied)
            values.pop()

    residual, true_lits = propagate(list(f.clauses))
    if residual is not None:
        walk(0, residual, [], frozenset(true_lits))
    return weights


def baseline_entropy(f: CircuitFormula, cache: SharedCache | None = None) -> EntropyResult:
    start = time.perf_counter()
    counter = ModelCounter(cache if cache is not None else SharedCache())
    weights = output_weights(f, counter)
    total = sum(weights.values())
    stats = SearchStats(
        xcache_hits=counter.hits,
        xcache_misses=counter.misses,
        x_decisions=counter.decisions,
        cache_entries=len(counter.cache),
    )
    if total == 0:
        stats.wall_ms = (time.perf_counter() - start) * 1000.0
        return EntropyResult(0.0, 0, stats)
    h = -math.fsum((w / total) * math.log2(w / total) for w in weights.values())
    stats.wall_ms = (time.perf_counter() - start) * 1000.0
    return EntropyResult(max(h, 0.0), total, stats)
