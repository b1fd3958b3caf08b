"""Formula builders shared by several test modules."""

from __future__ import annotations

import random

from circuit_entropy.formula import CircuitFormula, RandomCircuitSpec, gate_clauses, random_circuit


def generator_formula(seed: int, max_inputs: int = 14, max_outputs: int = 10) -> CircuitFormula:
    rng = random.Random(10_000 + seed)
    spec = RandomCircuitSpec(seed, rng.randint(2, max_inputs), rng.randint(1, max_outputs))
    return random_circuit(spec)


def chained_circuit(seed: int, n_inputs: int, n_outputs: int) -> CircuitFormula:
    """Outputs may read earlier outputs as well as inputs."""
    rng = random.Random(seed)
    clauses = []
    for j in range(n_outputs):
        y = n_inputs + j + 1
        pool = list(range(1, y))
        gate = rng.choice(("AND", "OR", "XOR", "NOT"))
        k = 1 if gate == "NOT" else rng.randint(1, min(3, len(pool)))
        lits = [v if rng.random() < 0.5 else -v for v in rng.sample(pool, k)]
        clauses += gate_clauses(y, gate, lits)
    return CircuitFormula(
        n_inputs + n_outputs,
        tuple(clauses),
        frozenset(range(1, n_inputs + 1)),
        frozenset(range(n_inputs + 1, n_inputs + n_outputs + 1)),
    )


def with_equivalences(f: CircuitFormula, seed: int, pairs: int = 3) -> CircuitFormula:
    """Add fresh outputs tied to existing literals by binary clauses.

    Some copies are also chained onto each other, so Pre sees classes of
    more than two literals.
    """
    rng = random.Random(seed)
    clauses = list(f.clauses)
    outputs = set(f.outputs)
    nvars = f.nvars
    for _ in range(pairs):
        nvars += 1
        base = rng.choice(sorted(f.variables | (outputs - f.outputs)))
        lit = base if rng.random() < 0.5 else -base
        clauses += [(-nvars, lit), (nvars, -lit)]
        outputs.add(nvars)
    return CircuitFormula(nvars, tuple(clauses), f.inputs, frozenset(outputs))
