"""Argument checks shared by the estimator wrappers and the harness."""

from __future__ import annotations

import numbers

from .problems import MpDmpProblem, suite


def check_problem(problem) -> MpDmpProblem:
    """Accept a suite id (1..8) or an :class:`MpDmpProblem`."""
    if isinstance(problem, MpDmpProblem):
        return problem
    if isinstance(problem, numbers.Integral) and not isinstance(problem, bool):
        return suite(int(problem))
    raise TypeError(f"expected an MpDmpProblem or a suite id, got {type(problem).__name__}")


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_subset(values, allowed, name: str) -> tuple:
    """Validate a non-empty selection, keeping order and dropping repeats."""
    out = []
    for v in values:
        if v not in allowed:
            raise ValueError(f"unknown {name} {v!r}; choose from {', '.join(map(str, allowed))}")
        if v not in out:
            out.append(v)
    if not out:
        raise ValueError(f"at least one {name} is required")
    return tuple(out)
