"""Slow, obviously-correct reference implementations used only by tests."""

import math

import numpy as np


def dominates(a, b):
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def brute_levels(rows):
    """Peel non-dominated layers by direct pairwise enumeration."""
    rows = [tuple(r) for r in rows]
    levels = [0] * len(rows)
    remaining = set(range(len(rows)))
    level = 0
    while remaining:
        level += 1
        front = [i for i in remaining if not any(dominates(rows[j], rows[i]) for j in remaining if j != i)]
        for i in front:
            levels[i] = level
        remaining -= set(front)
    return levels


def brute_mpnds2(F, sizes):
    cols, start = [], 0
    for s in sizes:
        cols.append(brute_levels([row[start:start + s] for row in F]))
        start += s
    level_rows = list(zip(*cols))
    return brute_levels(level_rows)


def brute_mps(F, sizes):
    """Indices whose party-restricted vector is dominated by nobody, in every party."""
    keep = []
    for i, fi in enumerate(F):
        ok = True
        start = 0
        for s in sizes:
            if any(dominates(fj[start:start + s], fi[start:start + s]) for j, fj in enumerate(F) if j != i):
                ok = False
            start += s
        if ok:
            keep.append(i)
    return keep


def textbook_igd(reference, front):
    return sum(min(math.dist(v, s) for s in front) for v in reference) / len(reference)


def binary_entropy(p):
    return -sum(q * math.log2(q) for q in (p, 1 - p) if q > 0)


def entropy_by_hand(values):
    """Single-objective crowding entropy via explicit neighbour loops."""
    n = len(values)
    order = sorted(range(n), key=lambda i: (values[i], i))
    lo, hi = values[order[0]], values[order[-1]]
    out = [0.0] * n
    if hi == lo:
        return out
    out[order[0]] = out[order[-1]] = math.inf
    for k in range(1, n - 1):
        dl = values[order[k]] - values[order[k - 1]]
        du = values[order[k + 1]] - values[order[k]]
        e = binary_entropy(dl / (dl + du)) if dl + du > 0 else 0.0
        out[order[k]] = (dl + du) * e / (hi - lo)
    return out


def point_segment_distance(p, a, b):
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    t = np.clip((p - a) @ ab / (ab @ ab), 0, 1)
    return float(np.linalg.norm(p - (a + t * ab)))
