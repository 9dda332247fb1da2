"""Plot data export: MPS points, Pareto-set geometry and a standalone SVG."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .core import RunResult
from .problems import POINT, SEGMENT, suite, true_ps

SVG_SIZE = 480
MARGIN = 30
PARTY_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _mps_points(result) -> np.ndarray:
    if isinstance(result, RunResult):
        return result.X
    X = np.asarray(result, dtype=float)
    return X.reshape(-1, 2) if X.size else np.empty((0, 2))


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return path


def _header(problem_id: int, seed) -> list[str]:
    line = f"# mpdmp {__version__} MPDMP{problem_id}"
    if seed is not None:
        line += f" seed {seed}"
    return [line]


def svg_document(problem_id: int, X: np.ndarray, seed=None) -> str:
    """SVG of the decision space: PS outline, party targets and MPS scatter."""
    problem = suite(problem_id)
    region = true_ps(problem_id)
    targets = [problem.party_targets(i) for i in range(problem.layout.n_parties)]
    pts = np.vstack(targets + [np.asarray(region.vertices)] + ([X] if len(X) else []))
    lo = pts.min(axis=0) - 0.5
    hi = pts.max(axis=0) + 0.5
    scale = (SVG_SIZE - 2 * MARGIN) / float((hi - lo).max())

    def sx(p):
        return MARGIN + (p[0] - lo[0]) * scale

    def sy(p):
        return SVG_SIZE - MARGIN - (p[1] - lo[1]) * scale

    title = f"MPDMP{problem_id}: {len(X)} MPS points"
    if seed is not None:
        title += f", seed {seed}"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f"<!-- mpdmp {__version__} MPDMP{problem_id}" + (f" seed {seed}" if seed is not None else "") + " -->",
        f"<title>{escape(title)}</title>",
        f'<rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="white"/>',
    ]
    verts = list(region.vertices)
    if region.kind == POINT:
        out.append(f'<circle class="ps" cx="{sx(verts[0]):.2f}" cy="{sy(verts[0]):.2f}" r="6" '
                   'fill="none" stroke="black" stroke-width="2"/>')
    elif region.kind == SEGMENT:
        a, b = verts
        out.append(f'<line class="ps" x1="{sx(a):.2f}" y1="{sy(a):.2f}" x2="{sx(b):.2f}" y2="{sy(b):.2f}" '
                   'stroke="black" stroke-width="2"/>')
    else:
        poly = " ".join(f"{sx(v):.2f},{sy(v):.2f}" for v in verts)
        out.append(f'<polygon class="ps" points="{poly}" fill="#eeeeee" stroke="black" stroke-width="2"/>')
    for i, T in enumerate(targets):
        colour = PARTY_COLOURS[i % len(PARTY_COLOURS)]
        for t in T:
            out.append(f'<rect class="target party{i + 1}" x="{sx(t) - 5:.2f}" y="{sy(t) - 5:.2f}" '
                       f'width="10" height="10" fill="{colour}"/>')
    for x in X:
        out.append(f'<circle class="mps" cx="{sx(x):.2f}" cy="{sy(x):.2f}" r="2.5" fill="#ff7f0e"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_plot_data(problem_id: int, result, out_stem, seed=None) -> dict[str, Path]:
    """Write ``<stem>_mps.csv``, ``<stem>_ps.csv`` and ``<stem>.svg``.

    Args:
        problem_id: Suite id 1..8.
        result: A :class:`RunResult` or an ``(n, 2)`` array of MPS decision
            vectors. An empty set still produces all three files.
        out_stem: Path prefix for the files.

    Returns:
        Mapping ``{"mps": ..., "ps": ..., "svg": ...}`` of written paths.
    """
    stem = Path(out_stem)
    X = _mps_points(result)
    region = true_ps(problem_id)
    mps_lines = _header(problem_id, seed) + ["x1,x2"] + [f"{x[0]!r},{x[1]!r}" for x in X.tolist()]
    ps_lines = _header(problem_id, seed) + ["kind,vertex,x,y"] + [
        f"{region.kind},{k},{v[0]!r},{v[1]!r}" for k, v in enumerate(region.vertices)
    ]
    return {
        "mps": _write(stem.with_name(stem.name + "_mps.csv"), "\n".join(mps_lines) + "\n"),
        "ps": _write(stem.with_name(stem.name + "_ps.csv"), "\n".join(ps_lines) + "\n"),
        "svg": _write(stem.with_name(stem.name + ".svg"), svg_document(problem_id, X, seed)),
    }
