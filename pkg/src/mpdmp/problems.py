"""The multiparty distance-minimisation suite (MPDMP1-8).

Every objective is the Euclidean distance from a 2-D decision point to the
nearest point of a target set. Objectives are grouped into parties; each
suite problem has two parties whose targets are the vertices of a simple
shape, and the common Pareto set is the intersection of the shapes'
convex hulls.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geometry
from .core import PartyLayout

SQRT3 = math.sqrt(3.0)
DEFAULT_BOUNDS = (-10.0, 10.0)
DEFAULT_REFERENCE_SIZE = 1000

POINT, SEGMENT, POLYGON = "point", "segment", "polygon"

# Shape kind of the common Pareto set per problem id.
PS_KINDS = {1: POINT, 2: POINT, 3: SEGMENT, 4: POINT, 5: POLYGON, 6: SEGMENT, 7: POLYGON, 8: POLYGON}
PS_VERTEX_COUNTS = {1: 1, 2: 1, 3: 2, 4: 1, 5: 3, 6: 2, 7: 4, 8: 5}


class NoCommonParetoSet(ValueError):
    """The parties' Pareto sets do not intersect."""


@dataclass(frozen=True)
class MpDmpProblem:
    """A multiparty distance-minimisation problem.

    ``targets[n]`` is a ``(k, 2)`` array holding the target set of objective
    ``n``; objectives are assigned to parties in order by ``layout``.
    """

    id: int | str
    layout: PartyLayout
    targets: tuple[np.ndarray, ...]
    bounds: tuple[float, float] = DEFAULT_BOUNDS

    def __post_init__(self):
        targets = tuple(np.atleast_2d(np.asarray(t, dtype=float)) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        for t in targets:
            t.setflags(write=False)
        if len(targets) != self.layout.n_objectives:
            raise ValueError(f"{len(targets)} target sets for {self.layout.n_objectives} objectives")
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError(f"invalid bounds {self.bounds}")
        for t in targets:
            if t.size == 0 or t.shape[1] != 2:
                raise ValueError("every target set needs at least one 2-D point")
            if not np.all(np.isfinite(t)) or t.min() < lo or t.max() > hi:
                raise ValueError("target points must be finite and within bounds")

    @property
    def n_obj(self) -> int:
        return self.layout.n_objectives

    @property
    def n_var(self) -> int:
        return 2

    def party_targets(self, party: int) -> np.ndarray:
        r = self.layout.parties[party]
        return np.vstack([self.targets[n] for n in r])

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Objective matrix for a batch of decision vectors, no bookkeeping."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != 2:
            raise ValueError(f"decision vectors must be 2-D, got shape {X.shape}")
        lo, hi = self.bounds
        if not np.all(np.isfinite(X)) or X.min() < lo or X.max() > hi:
            raise ValueError("decision vector outside problem bounds; repair before evaluating")
        F = np.empty((len(X), self.n_obj))
        for n, t in enumerate(self.targets):
            diff = X[:, None, :] - t[None, :, :]
            d = np.hypot(diff[..., 0], diff[..., 1])
            F[:, n] = d.min(axis=1)
        return F


class Evaluator:
    """Counts fitness evaluations for one run."""

    def __init__(self, problem: MpDmpProblem):
        self.problem = problem
        self.count = 0

    def __call__(self, X: np.ndarray) -> np.ndarray:
        F = self.problem.evaluate(X)
        self.count += len(F)
        return F


def evaluate(problem: MpDmpProblem, x, counter: Evaluator | None = None) -> np.ndarray:
    """Objective vector of a single decision vector."""
    if counter is not None:
        return counter(np.asarray(x, dtype=float)[None, :])[0]
    return problem.evaluate(np.asarray(x, dtype=float)[None, :])[0]


def regular_polygon(n: int, radius: float, center=(0.0, 0.0), start_deg: float = 90.0) -> list[tuple[float, float]]:
    return [
        (
            center[0] + radius * math.cos(math.radians(start_deg + 360.0 * j / n)),
            center[1] + radius * math.sin(math.radians(start_deg + 360.0 * j / n)),
        )
        for j in range(n)
    ]


def _rect(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


# Party target sets; each vertex becomes one single-point objective.
_GEOMETRY: dict[int, tuple[list, list]] = {
    1: ([(-2.0, -2.0), (2.0, 2.0)], [(-2.0, 2.0), (2.0, -2.0)]),
    2: ([(-2.0, 0.0), (2.0, 0.0)], [(0.0, -2.0), (0.0, 2.0)]),
    3: ([(-2.0, 1.0), (2.0, 1.0)], [(-2.0, 0.0), (2.0, 0.0), (0.0, 4.0)]),
    4: ([(0.0, 0.0), (4.0, 0.0), (2.0, 2 * SQRT3)], [(2.0, 2 * SQRT3), (0.0, 4 * SQRT3), (4.0, 4 * SQRT3)]),
    5: ([(0.0, 0.0), (4.0, 0.0), (2.0, 2 * SQRT3)], [(0.0, SQRT3), (4.0, SQRT3), (2.0, 3 * SQRT3)]),
    6: (_rect(0.0, 0.0, 4.0, 2.0), _rect(0.0, 2.0, 4.0, 4.0)),
    7: (_rect(0.0, 0.0, 4.0, 4.0), _rect(2.0, 2.0, 6.0, 6.0)),
    8: (regular_polygon(5, 4.0), regular_polygon(5, 2.0)),
}


def make_problem(party_targets: Sequence[Sequence], problem_id="custom", bounds=DEFAULT_BOUNDS) -> MpDmpProblem:
    """Build a k=1 problem: one objective per target point, grouped by party."""
    sizes = tuple(len(p) for p in party_targets)
    targets = tuple(np.array([pt], dtype=float) for party in party_targets for pt in party)
    return MpDmpProblem(problem_id, PartyLayout(sizes), targets, tuple(bounds))


def suite(problem_id: int) -> MpDmpProblem:
    """Canonical MPDMP problem ``problem_id`` (1..8)."""
    if problem_id not in _GEOMETRY:
        raise ValueError(f"unknown MPDMP id {problem_id!r}; expected 1..8")
    return make_problem(_GEOMETRY[problem_id], problem_id)


SUITE_IDS = tuple(sorted(_GEOMETRY))


@dataclass(frozen=True)
class PsRegion:
    kind: str
    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        expected = {POINT: 1, SEGMENT: 2}
        if self.kind in expected:
            if len(verts) != expected[self.kind]:
                raise ValueError(f"{self.kind} region needs {expected[self.kind]} vertices")
            if self.kind == SEGMENT and math.dist(*verts) <= geometry.TOL:
                raise ValueError("segment endpoints coincide")
        elif self.kind == POLYGON:
            if len(verts) < 3 or geometry.polygon_area(verts) <= geometry.TOL:
                raise ValueError("polygon must be counter-clockwise with positive area")
            if len(geometry.convex_hull(verts)) != len(verts):
                raise ValueError("polygon must be strictly convex")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    def distance(self, points) -> np.ndarray:
        return geometry.distance_to_hull(points, list(self.vertices))

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        return self.distance(points) <= tol

    def length(self) -> float:
        return math.dist(*self.vertices) if self.kind == SEGMENT else 0.0


def region_from_hull(hull) -> PsRegion:
    hull = geometry.convex_hull(hull)
    if not hull:
        raise NoCommonParetoSet("empty region")
    kind = {1: POINT, 2: SEGMENT}.get(len(hull), POLYGON)
    return PsRegion(kind, tuple(hull))


def same_region(a: PsRegion, b: PsRegion, tol: float = 1e-9) -> bool:
    """True when both regions have the same kind and matching vertex sets."""
    if a.kind != b.kind or len(a.vertices) != len(b.vertices):
        return False
    va = np.asarray(a.vertices)
    vb = np.asarray(b.vertices)
    d = np.linalg.norm(va[:, None, :] - vb[None, :, :], axis=-1)
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def true_ps(problem_id: int) -> PsRegion:
    """Analytic common Pareto set of a suite problem."""
    if problem_id == 1 or problem_id == 2:
        return PsRegion(POINT, ((0.0, 0.0),))
    if problem_id == 3:
        return PsRegion(SEGMENT, ((-1.5, 1.0), (1.5, 1.0)))
    if problem_id == 4:
        return PsRegion(POINT, ((2.0, 2 * SQRT3),))
    if problem_id == 5:
        return PsRegion(POLYGON, ((1.0, SQRT3), (3.0, SQRT3), (2.0, 2 * SQRT3)))
    if problem_id == 6:
        return PsRegion(SEGMENT, ((0.0, 2.0), (4.0, 2.0)))
    if problem_id == 7:
        return PsRegion(POLYGON, tuple(_rect(2.0, 2.0, 4.0, 4.0)))
    if problem_id == 8:
        return PsRegion(POLYGON, tuple(regular_polygon(5, 2.0)))
    raise ValueError(f"unknown MPDMP id {problem_id!r}; expected 1..8")


def ps_oracle(problem: MpDmpProblem, tol: float = geometry.TOL) -> PsRegion:
    """Common Pareto set computed from geometry alone.

    Each party's Pareto set is the convex hull of its targets; the hulls
    are intersected by half-plane clipping and degenerate results collapse
    to a segment or a point.

    Raises:
        NoCommonParetoSet: If the party hulls do not intersect.
    """
    region = geometry.convex_hull(problem.party_targets(0), tol)
    for party in range(1, problem.layout.n_parties):
        region = geometry.intersect_convex(region, geometry.convex_hull(problem.party_targets(party), tol), tol)
        if not region:
            raise NoCommonParetoSet(f"problem {problem.id}: no common Pareto solution")
    return region_from_hull(region)


def sample_region(region: PsRegion, n: int) -> np.ndarray:
    """Deterministic decision-space sample of a Pareto-set region.

    A point gives itself, a segment ``n`` evenly spaced points including the
    endpoints, and a polygon the points of the coarsest square grid (anchored
    at the bounding-box corner) that puts at least ``n`` points in it.
    """
    if n < 1:
        raise ValueError("sample size must be positive")
    verts = np.asarray(region.vertices)
    if region.kind == POINT:
        return verts.copy()
    if region.kind == SEGMENT:
        t = np.linspace(0.0, 1.0, n)[:, None]
        return verts[0] + t * (verts[1] - verts[0])
    lo = verts.min(axis=0)
    extent = verts.max(axis=0) - lo
    k = 1
    while True:
        pitch = extent.max() / k
        counts = np.floor(extent / pitch + 1e-9).astype(int) + 1
        gx = lo[0] + pitch * np.arange(counts[0])
        gy = lo[1] + pitch * np.arange(counts[1])
        grid = np.column_stack([g.ravel() for g in np.meshgrid(gx, gy)])
        inside = grid[geometry.points_in_polygon(grid, list(region.vertices))]
        if len(inside) >= n:
            return inside
        k += 1


def sample_reference_front(problem: MpDmpProblem, region: PsRegion, n: int = DEFAULT_REFERENCE_SIZE) -> np.ndarray:
    """Reference objective vectors, evaluated outside any run's budget."""
    return problem.evaluate(sample_region(region, n))


def problem_to_dict(problem: MpDmpProblem) -> dict:
    parties = [problem.layout.party_of(n) + 1 for n in range(problem.n_obj)]
    return {
        "id": problem.id,
        "bounds": list(problem.bounds),
        "party_sizes": list(problem.layout.sizes),
        "objectives": [
            {"objective": n + 1, "party": parties[n], "targets": problem.targets[n].tolist()}
            for n in range(problem.n_obj)
        ],
    }


def problem_from_dict(data: dict) -> MpDmpProblem:
    objectives = sorted(data["objectives"], key=lambda o: o["objective"])
    return MpDmpProblem(
        data.get("id", "custom"),
        PartyLayout(tuple(data["party_sizes"])),
        tuple(np.asarray(o["targets"], dtype=float) for o in objectives),
        tuple(data.get("bounds", DEFAULT_BOUNDS)),
    )


def write_problem(problem: MpDmpProblem, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n", encoding="utf-8")
    return path


def read_problem(path) -> MpDmpProblem:
    return problem_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_reference_front(problem: MpDmpProblem, region: PsRegion, path, n: int = DEFAULT_REFERENCE_SIZE) -> Path:
    """CSV with columns x1,x2,f1..fm."""
    X = sample_region(region, n)
    F = problem.evaluate(X)
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2"] + [f"f{j + 1}" for j in range(problem.n_obj)])
        for x, f in zip(X, F):
            w.writerow([repr(float(v)) for v in (*x, *f)])
    return path
