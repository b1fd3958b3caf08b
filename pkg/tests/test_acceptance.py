"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
written straight to the terminal even when output capture is on.
"""

from __future__ import annotations

import itertools
import math
import os
import random
import time
from pathlib import Path

import pytest

import oracle
from circuit_entropy import addand
from circuit_entropy.baseline import baseline_entropy
from circuit_entropy.cli import gen_spec
from circuit_entropy.formula import CircuitFormula, parse_dimacs, random_circuit, validate_circuit
from circuit_entropy.instances import FIVE_OUTPUT_ORDER, block_pair_circuit, block_pair_order, five_output_circuit
from circuit_entropy.preprocess import apply_pre
from circuit_entropy.pse import PseConfig, pse_entropy
from helpers import chained_circuit, with_equivalences

H_BLOCK = -(3 / 4) * math.log2(3 / 4) - (1 / 4) * math.log2(1 / 4)


@pytest.fixture
def verdict(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def corpus(seed: int) -> CircuitFormula:
    return random_circuit(gen_spec(seed, None, None, 3))


def test_c01_block_pair_golden(verdict):
    start = time.perf_counter()
    bad = []
    for n in range(1, 9):
        res = pse_entropy(block_pair_circuit(n))
        if res.count != 4**n or abs(res.entropy - n * H_BLOCK) > 1e-9 * n:
            bad.append((n, res.entropy, res.count))
    elapsed = time.perf_counter() - start
    verdict(1, not bad and elapsed < 1.0, f"n=1..8 entropy n*{H_BLOCK:.10f}, count 4^n; {elapsed:.3f}s; mismatches={bad}")


def test_c02_five_output_golden(verdict):
    f = five_output_circuit()
    start = time.perf_counter()
    res = pse_entropy(f)
    elapsed = time.perf_counter() - start
    ok = res.count == 28 and abs(res.entropy - 2.8423710) <= 1e-6 and elapsed < 0.1
    verdict(2, ok, f"count={res.count} entropy={res.entropy:.10f}; {elapsed * 1000:.1f}ms")


def test_c03_trace_node_counts(verdict):
    f = five_output_circuit()
    sizes = []
    for decomposition in (True, False):
        cfg = PseConfig(use_pre=False, order=FIVE_OUTPUT_ORDER, emit_trace=True, use_decomposition=decomposition)
        sizes.append(addand.build_from_trace(pse_entropy(f, cfg).trace).node_count())
    verdict(3, sizes == [14, 24], f"nodes with/without decomposition = {sizes[0]}/{sizes[1]} (want 14/24)")


def test_c04_succinctness(verdict):
    start = time.perf_counter()
    rows = []
    ok = True
    for n in range(1, 9):
        counts = []
        for decomposition in (True, False):
            cfg = PseConfig(order=block_pair_order(n), emit_trace=True, use_decomposition=decomposition)
            d = addand.reduce(addand.build_from_trace(pse_entropy(block_pair_circuit(n), cfg).trace))
            counts.append(d.node_count())
        on, off = counts
        ok &= off >= 2**n and on <= 8 * n
        rows.append(f"{n}:{on}/{off}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 10.0
    verdict(4, ok, f"n:on/off {' '.join(rows)}; {elapsed:.2f}s")


def test_c05_oracle_equivalence(verdict):
    start = time.perf_counter()
    bad = []
    worst = 0.0
    for seed in range(1, 201):
        f = corpus(seed)
        a, b = pse_entropy(f), baseline_entropy(f)
        worst = max(worst, abs(a.entropy - b.entropy))
        if a.count != b.count or abs(a.entropy - b.entropy) > 1e-9:
            bad.append(seed)
    elapsed = time.perf_counter() - start
    verdict(5, not bad and elapsed < 60.0, f"200 seeds, max |dH|={worst:.2e}, mismatches={bad}; {elapsed:.2f}s")


def test_c06_ablation_invariance(verdict):
    start = time.perf_counter()
    flags = ("use_pre", "use_xcache", "use_ycache", "use_decomposition")
    bad = []
    runs = 0
    for seed in range(1, 51):
        f = corpus(seed)
        ref = pse_entropy(f)
        for heuristic in ("minfill", "vsads"):
            for bits in itertools.product((False, True), repeat=4):
                res = pse_entropy(f, PseConfig(heuristic=heuristic, **dict(zip(flags, bits))))
                runs += 1
                if res.count != ref.count or abs(res.entropy - ref.entropy) > 1e-9:
                    bad.append((seed, heuristic, bits))
    elapsed = time.perf_counter() - start
    verdict(6, not bad and elapsed < 120.0, f"{runs} runs over 50 formulas, mismatches={len(bad)}; {elapsed:.2f}s")


def test_c07_weight_entropy_recursions(verdict):
    rng = random.Random(2024)
    bad = 0
    gapped = 0
    for _ in range(100):
        d = addand.random_diagram(rng, rng.randint(1, 12))
        gapped += any(u.kind == addand.DECISION and any(addand._gaps(u)) for u in d.nodes())
        w, h = addand.enumerate_distribution(d)
        if addand.weight(d) != w or abs(addand.entropy(d) - h) > 1e-9:
            bad += 1
    verdict(7, bad == 0 and gapped > 0, f"100 diagrams ({gapped} with nonzero gaps), mismatches={bad}")


def test_c08_pre_preservation(verdict):
    bad = []
    merged = 0
    for seed in range(1, 101):
        f = with_equivalences(corpus(seed), seed, pairs=3)
        pre = apply_pre(f)
        g = pre.formula
        merged += pre.stats["merged"]
        a, b = baseline_entropy(f), baseline_entropy(g)
        if a.count != b.count or abs(a.entropy - b.entropy) > 1e-9 or apply_pre(g).formula != g:
            bad.append(seed)
    verdict(8, not bad and merged > 0, f"100 formulas, {merged} variables merged, failures={bad}")


def test_c09_circuit_validation(verdict):
    problems = []
    for n in range(1, 4):
        if not (validate_circuit(block_pair_circuit(n), "brute") and validate_circuit(block_pair_circuit(n), "selfcomp")):
            problems.append(f"sep{n}")
    for seed in range(1, 201):
        if not validate_circuit(corpus(seed), "selfcomp"):
            problems.append(f"gen{seed}")
    if validate_circuit(CircuitFormula(2, ((1, 2),), frozenset({1}), frozenset({2})), "brute"):
        problems.append("x|y accepted")
    rng = random.Random(9)
    negatives = 0
    for i in range(100):
        if i % 2:
            f = chained_circuit(i, rng.randint(2, 5), rng.randint(1, 4))
        else:
            n_in, n_out = rng.randint(1, 4), rng.randint(1, 3)
            nv = n_in + n_out
            clauses = tuple(
                tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, nv + 1), rng.randint(1, min(3, nv))))
                for _ in range(rng.randint(1, 6))
            )
            f = CircuitFormula(nv, clauses, frozenset(range(1, n_in + 1)), frozenset(range(n_in + 1, nv + 1)))
        want = oracle.is_circuit(f.clauses, f.inputs, f.outputs)
        negatives += not want
        if validate_circuit(f, "brute") != want or validate_circuit(f, "selfcomp") != want:
            problems.append(f"small{i}")
    verdict(9, not problems and negatives > 0, f"sep/generator accepted, (x|y) rejected, 100 small ({negatives} non-circuit) agree; problems={problems}")


TABLE1 = {
    "blasted_case102": (8.0, 1e-6),
    "CVE-2007-2875": (32.0, 1e-6),
    "small-bug1-fixpoint-5": (12.81, 0.01),
}


def _find(root: Path, stem: str) -> Path | None:
    hits = sorted(p for p in root.rglob(f"{stem}*") if p.is_file())
    return hits[0] if hits else None


def test_c10_table1_spot_checks(verdict, capsys):
    root = os.environ.get("PSE_BENCHMARKS")
    found = {k: _find(Path(root), k) for k in TABLE1} if root and Path(root).is_dir() else {}
    if not any(found.values()):
        with capsys.disabled():
            print("\n[criterion 10] SKIP  benchmark files not available; set PSE_BENCHMARKS to a directory holding them")
        pytest.skip("benchmark files not available")
    results = []
    ok = True
    for name, path in found.items():
        if path is None:
            results.append(f"{name}: missing")
            continue
        want, tol = TABLE1[name]
        h = pse_entropy(parse_dimacs(path.read_bytes())).entropy
        ok &= abs(h - want) <= tol
        results.append(f"{name}: {h:.4f} (want {want})")
    verdict(10, ok, "; ".join(results))
