"""OptAll, OptMPNDS, OptMPNDS2 and OptMPNDS3 drivers.

Every driver consumes exactly ``fe_budget`` evaluations: the last
generation is shortened when fewer evaluations remain than a full batch.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from . import operators as ops
from .core import Individual, RunResult, seeded_rng
from .metrics import igd
from .problems import Evaluator, MpDmpProblem, ps_oracle, sample_reference_front
from .sorting import (
    crowding_distance,
    crowding_entropy,
    diversity_by_front,
    entropy_from_sorted,
    mpnds2,
    mpnds_order,
    nds,
    party_levels,
    sort_by_rank_and_diversity,
)

ALGORITHMS = ("optall", "optmpnds", "optmpnds2", "optmpnds3")


@dataclass(frozen=True)
class AlgorithmConfig:
    pop_size: int = 200
    fe_budget: int = 80000
    fei_budget: int = 10000
    sbx_eta: float = 15.0
    sbx_pc: float = 1.0
    pm: float = 0.5
    pm_eta: float = 20.0
    jade_p: float = 0.05
    jade_c: float = 0.05
    seed: int = 0
    track_history: bool = False
    reference_size: int = 1000

    def __post_init__(self):
        for name in ("pop_size", "fe_budget", "fei_budget", "reference_size"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.fe_budget < self.pop_size:
            raise ValueError("fe_budget must cover at least one population")
        for name in ("sbx_pc", "pm"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")

    def with_(self, **changes) -> "AlgorithmConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


RankFn = Callable[[np.ndarray], np.ndarray]


def _as_evaluator(problem) -> Evaluator:
    return problem if isinstance(problem, Evaluator) else Evaluator(problem)


def random_population(problem: MpDmpProblem, n: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = problem.bounds
    return rng.uniform(lo, hi, size=(n, problem.n_var))


def _rank_and_diversity(F, rank_fn: RankFn, measure, subset):
    rank = rank_fn(F)
    return rank, diversity_by_front(F, rank, measure, subset)


def _tournament(rank, div, n, rng) -> np.ndarray:
    a = rng.integers(len(rank), size=n)
    b = rng.integers(len(rank), size=n)
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (div[a] >= div[b]))
    return np.where(a_wins, a, b)


def _make_offspring(X, rank, div, n_off, problem, cfg: AlgorithmConfig, rng) -> np.ndarray:
    n_pairs = math.ceil(n_off / 2)
    parents = _tournament(rank, div, 2 * n_pairs, rng)
    c1, c2 = ops.sbx(X[parents[0::2]], X[parents[1::2]], cfg.sbx_eta, cfg.sbx_pc, rng, problem.bounds)
    Q = np.empty((2 * n_pairs, X.shape[1]))
    Q[0::2] = c1
    Q[1::2] = c2
    return ops.poly_mutate(Q[:n_off], cfg.pm, cfg.pm_eta, problem.bounds, rng)


def _generational(evaluator: Evaluator, pop_size: int, fe_budget: int, rng, cfg: AlgorithmConfig,
                  rank_fn: RankFn, subset=None, history=None):
    """Elitist (mu + lambda) loop with binary tournaments, SBX and polynomial
    mutation; ``rank_fn`` decides fronts and crowding distance over
    ``subset`` orders members inside a front."""
    if fe_budget < pop_size:
        raise ValueError("fe_budget must cover the initial population")
    problem = evaluator.problem
    start = evaluator.count
    X = random_population(problem, pop_size, rng)
    F = evaluator(X)
    rank, div = _rank_and_diversity(F, rank_fn, crowding_distance, subset)
    while evaluator.count - start < fe_budget:
        n_off = min(pop_size, fe_budget - (evaluator.count - start))
        Q = _make_offspring(X, rank, div, n_off, problem, cfg, rng)
        FQ = evaluator(Q)
        RX = np.vstack([X, Q])
        RF = np.vstack([F, FQ])
        r, d = _rank_and_diversity(RF, rank_fn, crowding_distance, subset)
        keep = sort_by_rank_and_diversity(r, d)[:pop_size]
        X, F, rank, div = RX[keep], RF[keep], r[keep], d[keep]
        if history is not None:
            history(X, F)
    return X, F


def nsga2_loop(subset, pop_size: int, fe_budget: int, problem, rng: np.random.Generator,
               cfg: AlgorithmConfig | None = None):
    """NSGA-II on the objective columns in ``subset``.

    Args:
        subset: Objective indices or slice the run optimises.
        problem: An :class:`MpDmpProblem` or an :class:`Evaluator` whose
            counter should be charged.

    Returns:
        ``(X, F)`` of the final population; ``F`` holds all objectives.
    """
    cfg = cfg or AlgorithmConfig(pop_size=pop_size, fe_budget=max(fe_budget, pop_size))
    return _generational(_as_evaluator(problem), pop_size, fe_budget, rng, cfg, lambda F: nds(F, subset), subset)


def final_mps_filter(F, layout) -> tuple[np.ndarray, bool]:
    """Indices of members first-ranked in every party.

    Returns:
        ``(indices, degenerate)``; when no member is first in all parties
        the multiparty (MPNDS2) rank-1 set is returned with
        ``degenerate=True``.
    """
    levels = party_levels(F, layout)
    idx = np.flatnonzero(np.all(levels == 1, axis=1))
    if idx.size:
        return idx, False
    return np.flatnonzero(nds(levels) == 1), True


def _result(X, F, problem, evaluator, params=None, history=None) -> RunResult:
    idx, degenerate = final_mps_filter(F, problem.layout)
    levels = party_levels(F, problem.layout)
    mps = []
    for i in idx:
        cr = f = None
        if params is not None and not np.isnan(params[i, 0]):
            cr, f = float(params[i, 0]), float(params[i, 1])
        mps.append(Individual(X[i].copy(), F[i].copy(), tuple(int(v) for v in levels[i]), cr_used=cr, f_used=f))
    return RunResult(mps, evaluator.count, X, F, degenerate, history)


def _history_tracker(problem, cfg: AlgorithmConfig):
    if not cfg.track_history:
        return None, None
    reference = sample_reference_front(problem, ps_oracle(problem), cfg.reference_size)
    trace: list[float] = []

    def record(X, F):
        idx, _ = final_mps_filter(F, problem.layout)
        trace.append(igd(reference, F[idx], problem.layout).value)

    return trace, record


def _nsga_family(problem: MpDmpProblem, cfg: AlgorithmConfig, rank_fn: RankFn) -> RunResult:
    rng = seeded_rng(cfg.seed)
    ev = Evaluator(problem)
    trace, record = _history_tracker(problem, cfg)
    X, F = _generational(ev, cfg.pop_size, cfg.fe_budget, rng, cfg, rank_fn, None, record)
    return _result(X, F, problem, ev, history=trace)


def opt_all(problem: MpDmpProblem, config: AlgorithmConfig) -> RunResult:
    """NSGA-II on all objectives at once, multiparty filter at the end."""
    return _nsga_family(problem, config, nds)


def opt_mpnds(problem: MpDmpProblem, config: AlgorithmConfig) -> RunResult:
    """NSGA-II ranked by the worst party level, common-level members first."""
    layout = problem.layout
    return _nsga_family(problem, config, lambda F: mpnds_order(party_levels(F, layout)))


def opt_mpnds2(problem: MpDmpProblem, config: AlgorithmConfig) -> RunResult:
    """NSGA-II ranked by non-dominated sorting of the party level rows."""
    layout = problem.layout
    return _nsga_family(problem, config, lambda F: mpnds2(F, layout))


def initialization(problem, N: int, FEI: int, rng: np.random.Generator,
                   cfg: AlgorithmConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Union of per-party NSGA-II populations of size N // M, each run for
    ``FEI`` evaluations, topped up with random members to reach ``N``."""
    ev = _as_evaluator(problem)
    prob = ev.problem
    M = prob.layout.n_parties
    size = N // M
    if size < 1:
        raise ValueError(f"population {N} too small for {M} parties")
    cfg = cfg or AlgorithmConfig(pop_size=N, fe_budget=max(M * FEI, N), fei_budget=FEI)
    parts_x, parts_f = [], []
    for sl in prob.layout.slices:
        X, F = _generational(ev, size, FEI, rng, cfg, lambda G, sl=sl: nds(G, sl), sl)
        parts_x.append(X)
        parts_f.append(F)
    X = np.vstack(parts_x)
    F = np.vstack(parts_f)
    if len(X) < N:
        extra = random_population(prob, N - len(X), rng)
        X = np.vstack([X, extra])
        F = np.vstack([F, ev(extra)])
    return X, F


def _reduce_front(RF: np.ndarray, members: np.ndarray, keep: int) -> np.ndarray:
    """Drop the most crowded member (lowest entropy) one at a time,
    recomputing entropy, until ``keep`` remain; survivors best-first.

    Ties go to the later member in input order. The per-objective sort is
    kept across deletions: a stable order with one element removed equals
    the stable order of the remaining members.
    """
    members = np.asarray(members)
    G = np.asarray(RF, dtype=float)[members]
    order = np.argsort(G, axis=0, kind="stable")
    V = np.take_along_axis(G, order, axis=0)
    alive = np.arange(len(members))
    while len(alive) > keep:
        ent = entropy_from_sorted(order, V)
        worst = sort_by_rank_and_diversity(np.zeros(len(alive), dtype=int), ent)[-1]
        mask = order != worst
        m = order.shape[1]
        order = order.T[mask.T].reshape(m, -1).T
        V = V.T[mask.T].reshape(m, -1).T
        order = order - (order > worst)
        alive = np.delete(alive, worst)
    ent = entropy_from_sorted(order, V)
    return members[alive[sort_by_rank_and_diversity(np.zeros(len(alive), dtype=int), ent)]]


def environmental_selection(RF: np.ndarray, layout, N: int) -> np.ndarray:
    """Indices of the ``N`` survivors of ``RF``, best-first.

    MPNDS2 fronts are taken whole while they fit; the split front is
    thinned by :func:`_reduce_front`.
    """
    rank = mpnds2(RF, layout)
    chosen: list[np.ndarray] = []
    total = 0
    for r in np.unique(rank):
        members = np.flatnonzero(rank == r)
        if total + len(members) <= N:
            ent = crowding_entropy(RF[members])
            chosen.append(members[sort_by_rank_and_diversity(np.zeros(len(members), dtype=int), ent)])
            total += len(members)
            if total == N:
                break
        else:
            chosen.append(_reduce_front(RF, members, N - total))
            break
    return np.concatenate(chosen)


def _sort_population(F, layout):
    rank = mpnds2(F, layout)
    div = diversity_by_front(F, rank, crowding_entropy, None)
    return sort_by_rank_and_diversity(rank, div)


def _pairwise_winners(FA, FB):
    """Row-wise ``(a dominates b, b dominates a)`` masks."""
    a_le = np.all(FA <= FB, axis=1)
    a_ge = np.all(FA >= FB, axis=1)
    return a_le & ~a_ge, a_ge & ~a_le


def opt_mpnds3(problem: MpDmpProblem, config: AlgorithmConfig) -> RunResult:
    """Per-party initialisation followed by adaptive DE with MPNDS2 ranking,
    crowding-entropy thinning and a nearest-replacement archive."""
    cfg = config
    layout = problem.layout
    M = layout.n_parties
    N = cfg.pop_size
    if M * cfg.fei_budget > cfg.fe_budget:
        raise ValueError(f"initialisation needs {M * cfg.fei_budget} evaluations, budget is {cfg.fe_budget}")
    rng = seeded_rng(cfg.seed)
    ev = Evaluator(problem)
    trace, record = _history_tracker(problem, cfg)

    X, F = initialization(ev, N, cfg.fei_budget, rng, cfg)
    if ev.count > cfg.fe_budget:
        raise ValueError("initialisation top-up exceeded the evaluation budget")
    order = _sort_population(F, layout)
    X, F = X[order], F[order]
    params = np.full((N, 2), np.nan)
    state = ops.JadeState(archive_capacity=N, c=cfg.jade_c, p=cfg.jade_p)

    while ev.count < cfg.fe_budget:
        state.begin_generation()
        n_trial = min(N, cfg.fe_budget - ev.count)
        parents = np.arange(N) if n_trial == N else np.sort(rng.choice(N, n_trial, replace=False))
        cr, f = ops.sample_params(state, rng, n_trial)
        U = np.empty((n_trial, X.shape[1]))
        for k, i in enumerate(parents):
            U[k] = ops.current_to_pbest(int(i), X, state.archive, f[k], state.p, rng, problem.bounds)
        T = ops.binomial_crossover(X[parents], U, cr, rng)
        FT = ev(T)

        # stage 1: trial against its own parent
        FP = F[parents]
        trial_wins, parent_wins = _pairwise_winners(FT, FP)
        parent_alive = np.ones(N, dtype=bool)
        parent_alive[parents[trial_wins]] = False
        for k in np.flatnonzero(trial_wins):
            ops.archive_add(state, X[parents[k]])
        for k in np.flatnonzero(parent_wins):
            ops.archive_add(state, T[k])
        trial_alive = ~parent_wins

        RX = np.vstack([X[parent_alive], T[trial_alive]])
        RF = np.vstack([F[parent_alive], FT[trial_alive]])
        Rp = np.vstack([params[parent_alive], np.column_stack([cr, f])[trial_alive]])
        n_old = int(parent_alive.sum())

        # stage 2: multiparty ranking and entropy thinning
        keep = environmental_selection(RF, layout, N)
        rejected = np.setdiff1d(np.arange(len(RF)), keep)
        for j in rejected:
            ops.archive_add(state, RX[j])
        for j in keep[keep >= n_old]:
            state.s_cr.append(float(Rp[j, 0]))
            state.s_f.append(float(Rp[j, 1]))
        ops.update_means(state)
        X, F, params = RX[keep], RF[keep], Rp[keep]
        if record is not None:
            record(X, F)

    return _result(X, F, problem, ev, params, trace)


DRIVERS = {
    "optall": opt_all,
    "optmpnds": opt_mpnds,
    "optmpnds2": opt_mpnds2,
    "optmpnds3": opt_mpnds3,
}


def run_algorithm(name: str, problem: MpDmpProblem, config: AlgorithmConfig) -> RunResult:
    try:
        driver = DRIVERS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}") from None
    return driver(problem, config)
