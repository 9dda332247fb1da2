"""Variation operators: SBX, polynomial mutation and adaptive DE (JADE2 style).

All array operators accept a single vector of shape ``(d,)`` or a batch of
shape ``(n, d)`` and never return values outside the given bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import cauchy

CR_SIGMA = 0.1
F_SCALE = 0.1
DONOR_DRAW_CAP = 100


def sbx(p1, p2, eta: float, pc: float, rng: np.random.Generator, bounds=(-np.inf, np.inf)):
    """Simulated binary crossover.

    With probability ``pc`` the pair is recombined; each variable is then
    spread with probability 0.5 using the polynomial spread factor of
    index ``eta``, and the two child values are swapped with probability
    0.5 so neither child is biased toward one parent.

    Returns:
        Two children with the shape of the parents, clipped to ``bounds``.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    shape = np.broadcast(p1, p2).shape
    batch = shape[:-1]
    u = rng.random(shape)
    beta = np.where(u <= 0.5, (2.0 * u) ** (1.0 / (eta + 1.0)), (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)))
    do_pair = rng.random(batch + (1,)) < pc
    do_var = (rng.random(shape) < 0.5) & do_pair & (np.abs(p1 - p2) > 1e-14)
    swap = rng.random(shape) < 0.5
    mid = 0.5 * (p1 + p2)
    half = 0.5 * (p2 - p1)
    c1 = np.where(do_var, mid - beta * half, p1)
    c2 = np.where(do_var, mid + beta * half, p2)
    c1, c2 = np.where(swap & do_var, c2, c1), np.where(swap & do_var, c1, c2)
    lo, hi = bounds
    return np.clip(c1, lo, hi), np.clip(c2, lo, hi)


def poly_mutate(x, pm: float, eta: float, bounds, rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation, each variable mutated with probability ``pm``."""
    x = np.asarray(x, dtype=float)
    lo, hi = bounds
    span = hi - lo
    mutate = rng.random(x.shape) < pm
    u = rng.random(x.shape)
    dl = (x - lo) / span
    du = (hi - x) / span
    mpow = 1.0 / (eta + 1.0)
    with np.errstate(invalid="ignore"):
        low = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - dl) ** (eta + 1.0)) ** mpow - 1.0
        high = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - du) ** (eta + 1.0)) ** mpow
    delta = np.where(u < 0.5, low, high)
    return np.clip(np.where(mutate, x + delta * span, x), lo, hi)


def repair(v, bounds) -> np.ndarray:
    """Reflect once off a violated bound, then clamp."""
    lo, hi = bounds
    v = np.asarray(v, dtype=float)
    v = np.where(v < lo, 2 * lo - v, v)
    v = np.where(v > hi, 2 * hi - v, v)
    return np.clip(v, lo, hi)


@dataclass
class JadeState:
    """Adaptive DE control state owned by a single run.

    ``archive`` holds decision vectors of defeated solutions, at most
    ``archive_capacity`` rows.
    """

    archive_capacity: int
    c: float = 0.05
    p: float = 0.05
    mu_cr: float = 0.5
    mu_f: float = 0.5
    s_cr: list[float] = field(default_factory=list)
    s_f: list[float] = field(default_factory=list)
    archive: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        if self.archive_capacity < 1:
            raise ValueError("archive capacity must be positive")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"learning rate c must lie in [0, 1], got {self.c}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"pbest fraction p must lie in (0, 1], got {self.p}")

    def begin_generation(self):
        self.s_cr.clear()
        self.s_f.clear()


def sample_params(state: JadeState, rng: np.random.Generator, size: int | None = None):
    """Draw (CR, F): CR ~ N(mu_cr, 0.1) clamped to [0, 1]; F ~ Cauchy(mu_f, 0.1)
    redrawn while non-positive and truncated to 1."""
    n = 1 if size is None else size
    cr = np.clip(rng.normal(state.mu_cr, CR_SIGMA, n), 0.0, 1.0)
    f = cauchy(rng, state.mu_f, F_SCALE, n)
    bad = f <= 0
    while bad.any():
        f[bad] = cauchy(rng, state.mu_f, F_SCALE, int(bad.sum()))
        bad = f <= 0
    f = np.minimum(f, 1.0)
    if size is None:
        return float(cr[0]), float(f[0])
    return cr, f


def pbest_count(p: float, n: int) -> int:
    return max(1, math.ceil(p * n))


def pick_donors(i: int, n_pop: int, n_archive: int, p: float, rng: np.random.Generator) -> tuple[int, int, int]:
    """Indices (pbest, r1, r2) for current-to-pbest mutation of member ``i``.

    The population is assumed sorted best-first. ``r1`` indexes the
    population followed by the archive, ``r2`` the population only. All
    three differ from ``i`` and from each other; when the top fraction
    holds only ``i`` itself the pool widens to two members. After
    ``DONOR_DRAW_CAP`` rejected draws the ``r1 != r2`` requirement is
    dropped.
    """
    if n_pop < 3:
        raise ValueError(f"current-to-pbest needs at least 3 members, got {n_pop}")
    top = pbest_count(p, n_pop)
    if top == 1 and i == 0:
        # the best member cannot be its own attractor
        top = 2
    pbest = int(rng.integers(top))
    while pbest == i:
        pbest = int(rng.integers(top))
    union = n_pop + n_archive
    r1 = int(rng.integers(union))
    while r1 == i or r1 == pbest:
        r1 = int(rng.integers(union))
    for _ in range(DONOR_DRAW_CAP):
        r2 = int(rng.integers(n_pop))
        if r2 != i and r2 != pbest and r2 != r1:
            return pbest, r1, r2
    r2 = int(rng.integers(n_pop))
    while r2 == i or r2 == pbest:
        r2 = int(rng.integers(n_pop))
    return pbest, r1, r2


def current_to_pbest(i: int, sorted_pop: np.ndarray, archive: np.ndarray, f: float, p: float,
                     rng: np.random.Generator, bounds=(-np.inf, np.inf)) -> np.ndarray:
    """DE/current-to-pbest/1 mutant of member ``i`` of a best-first population."""
    sorted_pop = np.asarray(sorted_pop, dtype=float)
    archive = np.asarray(archive, dtype=float).reshape(-1, sorted_pop.shape[1])
    pbest, r1, r2 = pick_donors(i, len(sorted_pop), len(archive), p, rng)
    x1 = sorted_pop[r1] if r1 < len(sorted_pop) else archive[r1 - len(sorted_pop)]
    return de_mutant(sorted_pop[i], sorted_pop[pbest], x1, sorted_pop[r2], f, bounds)


def de_mutant(xi, xpbest, x1, x2, f: float, bounds=(-np.inf, np.inf)) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    u = xi + f * (np.asarray(xpbest) - xi) + f * (np.asarray(x1) - np.asarray(x2))
    return repair(u, bounds)


def binomial_crossover(xi, u, cr, rng: np.random.Generator) -> np.ndarray:
    """Take each variable from ``u`` with probability ``cr``; one random
    variable per vector always comes from ``u``."""
    xi = np.asarray(xi, dtype=float)
    u = np.asarray(u, dtype=float)
    cr = np.asarray(cr, dtype=float)
    if xi.ndim == 2:
        cr = cr.reshape(-1, 1)
    take = rng.random(xi.shape) < cr
    j_rand = rng.integers(xi.shape[-1], size=xi.shape[:-1])
    np.put_along_axis(take, np.expand_dims(j_rand, -1), True, axis=-1)
    return np.where(take, u, xi)


def archive_add(state: JadeState, loser) -> None:
    """Store a defeated decision vector; when full, it replaces the nearest member."""
    loser = np.asarray(loser, dtype=float).reshape(1, -1)
    if len(state.archive) < state.archive_capacity:
        state.archive = np.vstack([state.archive.reshape(-1, loser.shape[1]), loser])
        return
    d = np.linalg.norm(state.archive - loser, axis=1)
    state.archive[int(np.argmin(d))] = loser[0]


def lehmer_mean(values) -> float:
    v = np.asarray(values, dtype=float)
    return float((v * v).sum() / v.sum())


def update_means(state: JadeState) -> None:
    """Move mu_cr toward the arithmetic mean of successful CRs and mu_f toward
    the Lehmer mean of successful Fs, then clear both memories."""
    if state.s_cr:
        state.mu_cr = (1 - state.c) * state.mu_cr + state.c * float(np.mean(state.s_cr))
    if state.s_f:
        state.mu_f = (1 - state.c) * state.mu_f + state.c * lehmer_mean(state.s_f)
    state.begin_generation()
