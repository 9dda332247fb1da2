"""Non-dominated sorting, crowding measures and the multiparty rankings."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .core import PartyLayout, dominance_matrix


def _columns(F, subset) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError(f"expected a 2-D objective matrix, got shape {F.shape}")
    if subset is None:
        return F
    if isinstance(subset, slice):
        return F[:, subset]
    idx = np.asarray(list(subset), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= F.shape[1]):
        raise IndexError(f"subset out of range for {F.shape[1]} objectives")
    return F[:, idx]


def nds(F, subset=None) -> np.ndarray:
    """Pareto levels (1 = best) of each row, restricted to ``subset`` columns."""
    G = _columns(F, subset)
    n = len(G)
    if n == 0:
        raise ValueError("cannot sort an empty population")
    D = dominance_matrix(G)
    dominated_by = D.sum(axis=0)
    levels = np.zeros(n, dtype=int)
    level = 0
    remaining = np.ones(n, dtype=bool)
    while remaining.any():
        level += 1
        front = remaining & (dominated_by == 0)
        levels[front] = level
        remaining &= ~front
        dominated_by = dominated_by - D[front].sum(axis=0)
    return levels


def _sorted_columns(G: np.ndarray):
    order = np.argsort(G, axis=0, kind="stable")
    V = np.take_along_axis(G, order, axis=0)
    span = V[-1] - V[0]
    return order, V, span


def _scatter(order: np.ndarray, span: np.ndarray, interior: np.ndarray) -> np.ndarray:
    """Per-member totals from per-column interior contributions in sorted order;
    column ends score ``inf``, zero-range columns are skipped."""
    n, m = order.shape
    C = np.zeros((n, m))
    np.put_along_axis(C, order[1:-1], interior, axis=0)
    live = span > 0
    cols = np.flatnonzero(live)
    C[order[0, cols], cols] = np.inf
    C[order[-1, cols], cols] = np.inf
    return C[:, live].sum(axis=1)


def crowding_distance(F, subset=None) -> np.ndarray:
    """NSGA-II crowding distance of the members of one front.

    Boundary members of every objective with a non-zero range score
    ``inf``; objectives with zero range contribute nothing.
    """
    G = _columns(F, subset)
    n = len(G)
    if n <= 2:
        return np.full(n, np.inf)
    order, V, span = _sorted_columns(G)
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = (V[2:] - V[:-2]) / span
    return _scatter(order, span, interior)


def _entropy_term(dl: np.ndarray, du: np.ndarray) -> np.ndarray:
    s = dl + du
    with np.errstate(divide="ignore", invalid="ignore"):
        pl = np.where(s > 0, dl / s, 0.0)
        pu = 1.0 - pl
        hl = np.where(pl > 0, pl * np.log2(np.where(pl > 0, pl, 1.0)), 0.0)
        hu = np.where((pu > 0) & (s > 0), pu * np.log2(np.where(pu > 0, pu, 1.0)), 0.0)
    return -(hl + hu)


def crowding_entropy(F, subset=None) -> np.ndarray:
    """Crowding entropy of the members of one front.

    For each objective with non-zero range, an interior member with gaps
    ``dl`` and ``du`` to its sorted neighbours contributes
    ``(dl + du) * H(dl/(dl+du)) / range`` where ``H`` is the binary entropy
    in bits; boundary members score ``inf``.
    """
    G = _columns(F, subset)
    if len(G) <= 2:
        return np.full(len(G), np.inf)
    order, V, _ = _sorted_columns(G)
    return entropy_from_sorted(order, V)


def entropy_from_sorted(order: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Crowding entropy given each column's stable sort order and sorted values.

    Lets callers that delete members one by one keep the sort instead of
    redoing it.
    """
    n = len(order)
    if n <= 2:
        return np.full(n, np.inf)
    span = V[-1] - V[0]
    dl = V[1:-1] - V[:-2]
    du = V[2:] - V[1:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = (dl + du) * _entropy_term(dl, du) / span
    return _scatter(order, span, interior)


def party_levels(F, layout: PartyLayout) -> np.ndarray:
    """``(n, M)`` matrix of per-party Pareto levels."""
    return np.column_stack([nds(F, s) for s in layout.slices])


class MpndsKey(NamedTuple):
    number: int
    common: bool

    def sort_key(self) -> tuple[int, int]:
        return (self.number, 0 if self.common else 1)


def mpnds_keys(levels) -> list[MpndsKey]:
    """Key of each level row: the common level, or the worst party level."""
    levels = np.asarray(levels, dtype=int)
    keys = []
    for row in levels:
        common = bool(np.all(row == row[0]))
        keys.append(MpndsKey(int(row[0]) if common else int(row.max()), common))
    return keys


def mpnds_order(levels) -> np.ndarray:
    """Dense rank (1 = best) of each row under the max-level ranking.

    Rows sort by key number; at equal number, common rows come first. Each
    distinct ``(number, common)`` pair is one rank.
    """
    keys = [k.sort_key() for k in mpnds_keys(levels)]
    distinct = {k: r + 1 for r, k in enumerate(sorted(set(keys)))}
    return np.array([distinct[k] for k in keys], dtype=int)


def mpnds2(F, layout: PartyLayout) -> np.ndarray:
    """Ranks from non-dominated sorting of the per-party level rows."""
    return nds(party_levels(F, layout))


def sort_by_rank_and_diversity(rank: np.ndarray, diversity: np.ndarray) -> np.ndarray:
    """Indices best-first: ascending rank, then descending diversity, then input order."""
    return np.lexsort((np.arange(len(rank)), -np.asarray(diversity), np.asarray(rank)))


def diversity_by_front(F, rank: np.ndarray, measure, subset=None) -> np.ndarray:
    """Apply a per-front diversity measure to every front of a ranked population."""
    div = np.empty(len(rank))
    for r in np.unique(rank):
        members = np.flatnonzero(rank == r)
        div[members] = measure(np.asarray(F)[members], subset)
    return div


def first_front(levels: Sequence[int]) -> np.ndarray:
    return np.flatnonzero(np.asarray(levels) == 1)
