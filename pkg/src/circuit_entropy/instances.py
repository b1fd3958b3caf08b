"""Small hand-built circuit formulas with known output distributions."""

from __future__ import annotations

from .formula import CircuitFormula


def block_pair_circuit(n: int) -> CircuitFormula:
    """n independent blocks; block i sets both outputs to (x_i and x_{n+i}).

    Inputs are variables ``1..2n``; output ``y_i`` is variable ``2n + i``.
    Each block puts weight 3 on (false, false) and 1 on (true, true), so
    the entropy is n times H(3/4, 1/4) and the model count is 4**n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = lambda i: i
    y = lambda i: 2 * n + i
    clauses = []
    for i in range(1, n + 1):
        a, b = x(i), x(n + i)
        for out in (y(i), y(n + i)):
            clauses.append((-a, -b, out))
            clauses.append((a, -out))
            clauses.append((b, -out))
    return CircuitFormula(4 * n, tuple(clauses), frozenset(range(1, 2 * n + 1)), frozenset(range(2 * n + 1, 4 * n + 1)))


def block_pair_order(n: int) -> tuple[int, ...]:
    """Outputs in index order, block firsts before block seconds."""
    return tuple(range(2 * n + 1, 4 * n + 1))


# inputs x1..x5 are variables 1..5, outputs y1..y5 are 6..10
_FIVE = [
    (2, 3, 8), (-8, -9), (2, 8), (-2, 9), (-1, -6), (1, 6),
    (-4, 5, 7), (4, -5, 7), (-4, -5, -7), (4, 5, 7),
    (-6, -10), (6, 10), (6, 4, 5), (6, 8, 9),
]


def five_output_circuit() -> CircuitFormula:
    """Five inputs, five outputs, 14 clauses; 28 models.

    Output ``y_k`` is variable ``5 + k``.
    """
    return CircuitFormula(10, tuple(_FIVE), frozenset(range(1, 6)), frozenset(range(6, 11)))


FIVE_OUTPUT_ORDER = (6, 7, 8, 9, 10)
