"""Multiparty IGD and run summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PartyLayout

STD_DDOF = 0  # population standard deviation


@dataclass(frozen=True)
class IgdReport:
    value: float
    reference_size: int
    front_size: int

    def __float__(self) -> float:
        return self.value


def party_distances(reference, front, layout: PartyLayout | None) -> np.ndarray:
    """``(|reference|, |front|)`` matrix of summed per-party Euclidean distances.

    With ``layout=None`` the whole vector is one party (plain Euclidean).
    """
    R = np.atleast_2d(np.asarray(reference, dtype=float))
    S = np.atleast_2d(np.asarray(front, dtype=float))
    if R.shape[1] != S.shape[1]:
        raise ValueError(f"objective counts differ: {R.shape[1]} vs {S.shape[1]}")
    slices = layout.slices if layout is not None else (slice(None),)
    if layout is not None and layout.n_objectives != R.shape[1]:
        raise ValueError("layout does not match the objective count")
    D = np.zeros((len(R), len(S)))
    for sl in slices:
        diff = R[:, None, sl] - S[None, :, sl]
        D += np.sqrt((diff * diff).sum(-1))
    return D


def igd(reference, front, layout: PartyLayout | None = None) -> IgdReport:
    """Mean over the reference set of the distance to the nearest front member,
    distances summed per party."""
    R = np.asarray(reference, dtype=float)
    S = np.asarray(front, dtype=float)
    if R.size == 0:
        raise ValueError("reference set is empty")
    if S.size == 0:
        raise ValueError("front is empty; IGD is undefined")
    D = party_distances(R, S, layout)
    return IgdReport(float(D.min(axis=1).mean()), len(D), D.shape[1])


def summarize(values) -> tuple[float, float]:
    """Mean and population standard deviation."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("nothing to summarise")
    return float(v.mean()), float(v.std(ddof=STD_DDOF))
