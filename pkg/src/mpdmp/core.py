"""Shared types: dominance relation, party layouts, individuals and the RNG contract."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Bump whenever the mapping seed -> random stream changes.
RNG_STREAM_VERSION = 1


class Dominance(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated_by"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


def compare(a: Sequence[float], b: Sequence[float], subset: Sequence[int] | slice | None = None) -> Dominance:
    """Pareto-compare two objective vectors on an index subset (minimisation).

    Args:
        a, b: Objective vectors of equal length.
        subset: Indices (0-based) to compare on, or a slice. ``None`` means all.

    Returns:
        The :class:`Dominance` of ``a`` relative to ``b``.

    Raises:
        IndexError: If a subset index is out of range for either vector.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    if subset is not None:
        if not isinstance(subset, slice):
            idx = np.asarray(subset, dtype=int)
            if idx.size and (idx.min() < 0 or idx.max() >= a.size):
                raise IndexError(f"subset {list(idx)} out of range for length {a.size}")
            subset = idx
        a = a[subset]
        b = b[subset]
    le = bool(np.all(a <= b))
    ge = bool(np.all(a >= b))
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.DOMINATES
    if ge:
        return Dominance.DOMINATED_BY
    return Dominance.INCOMPARABLE


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true iff row ``i`` dominates row ``j``."""
    F = np.asarray(F)
    n = len(F)
    le = np.ones((n, n), dtype=bool)
    lt = np.zeros((n, n), dtype=bool)
    for col in F.T:
        a = col[:, None]
        b = col[None, :]
        le &= a <= b
        lt |= a < b
    return le & lt


def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic random stream for a 64-bit seed.

    Negative seeds are folded into the unsigned 64-bit range so that any
    signed or unsigned 64-bit integer is accepted. The generator is PCG64;
    normal draws use ``Generator.normal`` and Cauchy draws
    ``loc + scale * Generator.standard_cauchy`` (see :func:`cauchy`).
    """
    return np.random.Generator(np.random.PCG64(int(seed) % (1 << 64)))


def cauchy(rng: np.random.Generator, loc: float, scale: float, size=None):
    return loc + scale * rng.standard_cauchy(size)


@dataclass(frozen=True)
class PartyLayout:
    """Partition of objective indices ``0..m-1`` into consecutive party blocks."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if any(s < 1 for s in sizes):
            raise ValueError(f"party sizes must be positive, got {sizes}")
        if len(sizes) < 2:
            raise ValueError("a multiparty layout needs at least two parties")
        if max(sizes) < 2:
            raise ValueError("at least one party must hold two or more objectives")

    @property
    def n_parties(self) -> int:
        return len(self.sizes)

    @property
    def n_objectives(self) -> int:
        return sum(self.sizes)

    @property
    def parties(self) -> tuple[range, ...]:
        out, start = [], 0
        for s in self.sizes:
            out.append(range(start, start + s))
            start += s
        return tuple(out)

    @property
    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(r.start, r.stop) for r in self.parties)

    def party_of(self, objective: int) -> int:
        for i, r in enumerate(self.parties):
            if objective in r:
                return i
        raise IndexError(objective)


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    f: np.ndarray
    party_levels: tuple[int, ...] = ()
    diversity: float = float("nan")
    cr_used: float | None = None
    f_used: float | None = None


@dataclass
class RunResult:
    """Outcome of one optimisation run.

    ``mps`` holds the multiparty Pareto optimal members of the final
    population. ``degenerate`` is set when no member was first-ranked in
    every party and the multiparty rank-1 set was returned instead.
    """

    mps: list[Individual]
    fe_used: int
    population_x: np.ndarray
    population_f: np.ndarray
    degenerate: bool = False
    history: list[float] | None = field(default=None)

    @property
    def X(self) -> np.ndarray:
        if not self.mps:
            return np.empty((0, 2))
        return np.vstack([ind.x for ind in self.mps])

    @property
    def F(self) -> np.ndarray:
        if not self.mps:
            return np.empty((0, self.population_f.shape[1]))
        return np.vstack([ind.f for ind in self.mps])
