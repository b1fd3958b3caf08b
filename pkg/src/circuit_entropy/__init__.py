"""Exact Shannon entropy for circuit CNF formulas."""

from .addand import AddAndDiagram, build_from_trace
from .baseline import baseline_entropy
from .counter import SharedCache, count_models
from .formula import CircuitFormula, FormulaError, RandomCircuitSpec, condition, parse_dimacs, random_circuit, serialize, validate_circuit
from .preprocess import apply_pre
from .pse import CircuitViolation, EntropyResult, PseConfig, pse_entropy

__all__ = [
    "AddAndDiagram",
    "CircuitFormula",
    "CircuitViolation",
    "EntropyResult",
    "FormulaError",
    "PseConfig",
    "RandomCircuitSpec",
    "SharedCache",
    "apply_pre",
    "baseline_entropy",
    "build_from_trace",
    "condition",
    "count_models",
    "parse_dimacs",
    "pse_entropy",
    "random_circuit",
    "serialize",
    "validate_circuit",
]
