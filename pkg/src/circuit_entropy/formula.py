"""CNF circuit formulas: parsing, conditioning, validation and generation.

Literals are signed DIMACS integers and clauses are tuples of literals.
A :class:`CircuitFormula` carries the clause set together with the
disjoint input set ``X`` and output set ``Y``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

Clause = tuple[int, ...]
Assignment = dict[int, bool]

UNSAT: tuple[Clause, ...] = ((),)

GATES = ("AND", "OR", "XOR", "NOT", "MAJ3")


class FormulaError(ValueError):
    """Malformed input or a formula that breaks the circuit-formula contract."""


def normalize_clause(lits: Iterable[int]) -> Clause | None:
    """Drop duplicate literals; return None for a tautology."""
    seen: dict[int, None] = {}
    for lit in lits:
        if -lit in seen:
            return None
        seen[lit] = None
    return tuple(seen)


def clause_vars(clauses: Iterable[Clause]) -> set[int]:
    return {abs(lit) for c in clauses for lit in c}


def propagate(clauses: Iterable[Clause], lits: Iterable[int] = ()) -> tuple[list[Clause] | None, set[int]]:
    """Assert ``lits`` and run unit propagation to a fixpoint.

    Returns ``(residual, true_lits)``. ``true_lits`` holds the decision
    literals plus every unit-implied literal. On conflict the residual is
    None and ``true_lits`` is the partial assignment found so far.
    """
    true_lits: set[int] = set()
    pending: set[int] = set()
    for lit in lits:
        if -lit in pending:
            return None, pending
        pending.add(lit)
    current = clauses if isinstance(clauses, list) else list(clauses)
    first = True
    while pending or first:
        first = False
        true_lits |= pending
        pending = set()
        nxt: list[Clause] = []
        for c in current:
            if true_lits:
                sat = False
                for lit in c:
                    if lit in true_lits:
                        sat = True
                        break
                if sat:
                    continue
                c = tuple(lit for lit in c if -lit not in true_lits)
            if len(c) == 1:
                u = c[0]
                if -u in pending:
                    return None, true_lits | pending
                pending.add(u)
                continue
            if not c:
                return None, true_lits
            nxt.append(c)
        current = nxt
    return current, true_lits


@dataclass(frozen=True)
class CircuitFormula:
    nvars: int
    clauses: tuple[Clause, ...]
    inputs: frozenset[int]
    outputs: frozenset[int]

    def __post_init__(self):
        norm = []
        for c in self.clauses:
            nc = normalize_clause(c)
            if nc is not None:
                norm.append(nc)
        object.__setattr__(self, "clauses", tuple(norm))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if self.inputs & self.outputs:
            raise FormulaError(f"variables declared both input and output: {sorted(self.inputs & self.outputs)}")
        declared = self.inputs | self.outputs
        if declared and (min(declared) < 1 or max(declared) > self.nvars):
            raise FormulaError("declared variable outside 1..nvars")
        used = clause_vars(self.clauses)
        if used and max(used) > self.nvars:
            raise FormulaError(f"variable {max(used)} exceeds declared count {self.nvars}")
        stray = used - declared
        if stray:
            raise FormulaError(f"variables in neither input nor output set: {sorted(stray)}")

    @property
    def variables(self) -> frozenset[int]:
        return self.inputs | self.outputs

    @property
    def is_unsat(self) -> bool:
        return any(len(c) == 0 for c in self.clauses)


def parse_dimacs(text: str | bytes) -> CircuitFormula:
    """Parse extended DIMACS with ``c p input``/``c p output`` declarations.

    A legacy ``c ind ... 0`` line is read as the output set, with every
    other variable treated as input, when no ``c p`` lines are present.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    nvars = nclauses = None
    inputs: list[int] = []
    outputs: list[int] = []
    ind: list[int] = []
    saw_input = saw_output = False
    clauses: list[list[int]] = []
    cur: list[int] = []

    def ints(tokens, lineno):
        try:
            vals = [int(t) for t in tokens]
        except ValueError:
            raise FormulaError(f"line {lineno}: expected integers") from None
        if not vals or vals[-1] != 0:
            raise FormulaError(f"line {lineno}: declaration must end with 0")
        return vals[:-1]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        tokens = line.split()
        if tokens[0] == "c":
            if len(tokens) >= 3 and tokens[1] == "p" and tokens[2] in ("input", "output"):
                vals = ints(tokens[3:], lineno)
                if tokens[2] == "input":
                    inputs += vals
                    saw_input = True
                else:
                    outputs += vals
                    saw_output = True
            elif len(tokens) >= 2 and tokens[1] == "ind":
                ind += ints(tokens[2:], lineno)
            continue
        if tokens[0] == "p":
            if nvars is not None or len(tokens) != 4 or tokens[1] != "cnf":
                raise FormulaError(f"line {lineno}: malformed header")
            try:
                nvars, nclauses = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise FormulaError(f"line {lineno}: malformed header") from None
            if nvars < 0 or nclauses < 0:
                raise FormulaError(f"line {lineno}: malformed header")
            continue
        if nvars is None:
            raise FormulaError(f"line {lineno}: clause before header")
        for tok in tokens:
            try:
                lit = int(tok)
            except ValueError:
                raise FormulaError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(cur)
                cur = []
            elif abs(lit) > nvars:
                raise FormulaError(f"line {lineno}: variable {abs(lit)} out of range")
            else:
                cur.append(lit)
    if nvars is None:
        raise FormulaError("missing 'p cnf' header")
    if cur:
        clauses.append(cur)
    if len(clauses) != nclauses:
        raise FormulaError(f"header declares {nclauses} clauses, found {len(clauses)}")
    if saw_input or saw_output:
        if not (saw_input and saw_output):
            raise FormulaError("both 'c p input' and 'c p output' declarations are required")
    elif ind:
        outputs = ind
        inputs = [v for v in range(1, nvars + 1) if v not in set(ind)]
    else:
        raise FormulaError("missing input/output declarations")
    for v in itertools.chain(inputs, outputs):
        if not 1 <= v <= nvars:
            raise FormulaError(f"declared variable {v} out of range")
    return CircuitFormula(nvars, tuple(tuple(c) for c in clauses), frozenset(inputs), frozenset(outputs))


def serialize(f: CircuitFormula) -> str:
    lines = [f"p cnf {f.nvars} {len(f.clauses)}"]
    lines.append("c p input " + "".join(f"{v} " for v in sorted(f.inputs)) + "0")
    lines.append("c p output " + "".join(f"{v} " for v in sorted(f.outputs)) + "0")
    lines += [" ".join(map(str, c + (0,))) for c in f.clauses]
    return "\n".join(lines) + "\n"


def condition(f: CircuitFormula, lits: Sequence[int]) -> tuple[CircuitFormula, Assignment]:
    """Assert ``lits`` on ``f`` and propagate.

    The residual drops every assigned variable from X and Y. A conflict
    gives the canonical unsatisfiable formula (one empty clause).
    """
    for lit in lits:
        if lit == 0 or abs(lit) > f.nvars or abs(lit) not in f.variables:
            raise FormulaError(f"literal {lit} references unknown variable")
    if any(-lit in lits for lit in lits):
        raise FormulaError("contradictory literals")
    residual, true_lits = propagate(list(f.clauses), lits)
    assignment = {abs(l): l > 0 for l in true_lits}
    inputs = f.inputs - assignment.keys()
    outputs = f.outputs - assignment.keys()
    if residual is None:
        return CircuitFormula(f.nvars, UNSAT, inputs, outputs), assignment
    return CircuitFormula(f.nvars, tuple(residual), inputs, outputs), assignment


def iter_models(clauses: Sequence[Clause], variables: Sequence[int], chunk_bits: int = 16) -> Iterator[np.ndarray]:
    """Brute-force enumeration of satisfying assignments.

    Yields boolean arrays of shape (k, len(variables)), column j holding
    the value of ``variables[j]``. Assignments are visited in binary order.
    """
    variables = list(variables)
    n = len(variables)
    col = {v: j for j, v in enumerate(variables)}
    for c in clauses:
        for lit in c:
            if abs(lit) not in col:
                raise ValueError(f"clause variable {abs(lit)} not in enumeration scope")
    if any(len(c) == 0 for c in clauses):
        return
    step = 1 << min(n, chunk_bits)
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, 1 << n, step):
        idx = np.arange(start, start + step, dtype=np.int64)
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(bool)
        ok = np.ones(step, dtype=bool)
        for c in clauses:
            sat = np.zeros(step, dtype=bool)
            for lit in c:
                v = bits[:, col[abs(lit)]]
                sat |= v if lit > 0 else ~v
            ok &= sat
        if ok.any():
            yield bits[ok]


def brute_count(clauses: Sequence[Clause], variables: Sequence[int]) -> int:
    return sum(len(m) for m in iter_models(clauses, variables))


def validate_circuit(f: CircuitFormula, mode: str = "brute") -> bool:
    """True iff no two solutions agree on X and differ on Y."""
    if mode == "brute":
        if len(f.variables) > 26:
            raise FormulaError("brute-force validation limited to 26 variables")
        xs = sorted(f.inputs)
        ys = sorted(f.outputs)
        seen: set[bytes] = set()
        for block in iter_models(f.clauses, xs + ys):
            keys = np.packbits(block[:, : len(xs)], axis=1)
            for row in keys:
                k = row.tobytes()
                if k in seen:
                    return False
                seen.add(k)
        return True
    if mode == "selfcomp":
        from .counter import count_models

        return count_models(self_composition(f)) == 0
    raise ValueError(f"unknown validation mode {mode!r}")


def self_composition(f: CircuitFormula) -> CircuitFormula:
    """phi(X, Y) & phi(X, Y') & (Y != Y') over fresh copies Y'.

    Difference selectors d_j only imply y_j != y'_j, which keeps the model
    count zero exactly when the circuit property holds.
    """
    ys = sorted(f.outputs)
    prime = {y: f.nvars + i + 1 for i, y in enumerate(ys)}
    diff = {y: f.nvars + len(ys) + i + 1 for i, y in enumerate(ys)}
    nvars = f.nvars + 2 * len(ys)
    rename = lambda lit: (prime[abs(lit)] if lit > 0 else -prime[abs(lit)]) if abs(lit) in prime else lit
    clauses = list(f.clauses)
    clauses += [tuple(rename(l) for l in c) for c in f.clauses]
    for y in ys:
        d = diff[y]
        clauses.append((-d, y, prime[y]))
        clauses.append((-d, -y, -prime[y]))
    clauses.append(tuple(diff[y] for y in ys))
    outputs = frozenset(prime.values()) | frozenset(diff.values()) | f.outputs
    return CircuitFormula(nvars, tuple(clauses), f.inputs, outputs)


@dataclass(frozen=True)
class RandomCircuitSpec:
    seed: int
    n_inputs: int
    n_outputs: int
    arity: int = 3

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_outputs < 1:
            raise ValueError("need at least one input and one output")
        if self.arity < 1:
            raise ValueError("gate arity bound must be positive")


def gate_clauses(out: int, gate: str, lits: Sequence[int]) -> list[Clause]:
    """Tseitin clauses for ``out <-> gate(lits)``."""
    if gate == "NOT":
        (a,) = lits
        return [(out, a), (-out, -a)]
    if gate == "AND":
        return [(-out, a) for a in lits] + [(out,) + tuple(-a for a in lits)]
    if gate == "OR":
        return [(out, -a) for a in lits] + [(-out,) + tuple(lits)]
    if gate == "XOR":
        res = []
        for values in itertools.product((False, True), repeat=len(lits)):
            parity = sum(values) % 2 == 1
            # forbid (lits == values, out != parity)
            body = tuple(-a if v else a for a, v in zip(lits, values))
            res.append(body + ((out,) if parity else (-out,)))
        return res
    if gate == "MAJ3":
        a, b, c = lits
        return [(-a, -b, out), (-a, -c, out), (-b, -c, out), (a, b, -out), (a, c, -out), (b, c, -out)]
    raise ValueError(f"unknown gate {gate!r}")


def random_circuit(spec: RandomCircuitSpec) -> CircuitFormula:
    """Outputs defined by random gates over input literals.

    Inputs are variables ``1..n_inputs``, outputs follow. Every output is
    a function of X by construction, so the result is a circuit formula.
    """
    rng = random.Random(spec.seed)
    n_in = spec.n_inputs
    clauses: list[Clause] = []
    for j in range(spec.n_outputs):
        y = n_in + j + 1
        choices = [g for g in GATES if g != "MAJ3" or n_in >= 3]
        gate = rng.choice(choices)
        if gate == "NOT":
            k = 1
        elif gate == "MAJ3":
            k = 3
        else:
            k = rng.randint(1, max(1, min(spec.arity, n_in)))
        xs = rng.sample(range(1, n_in + 1), k)
        lits = [x if rng.random() < 0.5 else -x for x in xs]
        clauses += gate_clauses(y, gate, lits)
    return CircuitFormula(
        n_in + spec.n_outputs,
        tuple(clauses),
        frozenset(range(1, n_in + 1)),
        frozenset(range(n_in + 1, n_in + spec.n_outputs + 1)),
    )
