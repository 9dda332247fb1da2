"""Planar convex geometry: hulls, half-plane clipping and region classification."""

from __future__ import annotations

import numpy as np

TOL = 1e-9


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dedupe(points, tol: float = TOL) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for p in points:
        p = (float(p[0]), float(p[1]))
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > tol for q in out):
            out.append(p)
    return out


def convex_hull(points, tol: float = TOL) -> list[tuple[float, float]]:
    """Monotone-chain hull, counter-clockwise, collinear points dropped.

    Degenerate inputs come back as one point or the two segment endpoints.
    """
    pts = sorted(dedupe(points, tol))
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all collinear: keep the extreme pair
        return [pts[0], pts[-1]]
    return hull


def halfplanes(hull) -> list[tuple[np.ndarray, float]]:
    """Half-planes ``n . p <= c`` whose intersection is the hull.

    Works for a point (4 planes), a segment (line both ways plus end caps)
    and a counter-clockwise polygon (one plane per edge).
    """
    hull = [np.asarray(p, dtype=float) for p in hull]
    planes: list[tuple[np.ndarray, float]] = []
    if len(hull) == 1:
        p = hull[0]
        for n in (np.array([1.0, 0.0]), np.array([-1.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, -1.0])):
            planes.append((n, float(n @ p)))
    elif len(hull) == 2:
        a, b = hull
        d = (b - a) / np.linalg.norm(b - a)
        n = np.array([-d[1], d[0]])
        planes += [(n, float(n @ a)), (-n, float(-n @ a)), (d, float(d @ b)), (-d, float(-d @ a))]
    else:
        for a, b in zip(hull, hull[1:] + hull[:1]):
            e = b - a
            n = np.array([e[1], -e[0]]) / np.linalg.norm(e)  # outward for CCW order
            planes.append((n, float(n @ a)))
    return planes


def clip(subject, planes, tol: float = TOL) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clipping of a convex vertex loop by half-planes."""
    out = [np.asarray(p, dtype=float) for p in subject]
    for n, c in planes:
        if not out:
            break
        inp, out = out, []
        s = inp[-1]
        for e in inp:
            e_in = n @ e <= c + tol
            s_in = n @ s <= c + tol
            if e_in:
                if not s_in:
                    out.append(_edge_cut(s, e, n, c))
                out.append(e)
            elif s_in:
                out.append(_edge_cut(s, e, n, c))
            s = e
    return [(float(p[0]), float(p[1])) for p in out]


def _edge_cut(s, e, n, c):
    ds, de = n @ s - c, n @ e - c
    t = ds / (ds - de)
    return s + t * (e - s)


def intersect_convex(a, b, tol: float = TOL) -> list[tuple[float, float]]:
    """Intersection of two convex hulls as a (possibly degenerate) hull."""
    pts = clip(a, halfplanes(b), tol)
    return convex_hull(pts, tol) if pts else []


def polygon_area(poly) -> float:
    if len(poly) < 3:
        return 0.0
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def points_in_polygon(points: np.ndarray, poly, tol: float = TOL) -> np.ndarray:
    """Mask of points inside or on a CCW convex polygon."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    mask = np.ones(len(points), dtype=bool)
    for n, c in halfplanes(poly):
        mask &= points @ n <= c + tol
    return mask


def distance_to_segment(points: np.ndarray, a, b) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(points - a, axis=1)
    t = np.clip((points - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(points - (a + t[:, None] * ab), axis=1)


def distance_to_hull(points: np.ndarray, hull) -> np.ndarray:
    """Euclidean distance from each point to a point, segment or convex polygon."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(hull) == 1:
        return np.linalg.norm(points - np.asarray(hull[0]), axis=1)
    if len(hull) == 2:
        return distance_to_segment(points, hull[0], hull[1])
    edges = [distance_to_segment(points, a, b) for a, b in zip(hull, list(hull[1:]) + [hull[0]])]
    d = np.min(edges, axis=0)
    d[points_in_polygon(points, hull, tol=0.0)] = 0.0
    return d
