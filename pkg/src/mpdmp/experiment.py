"""Seeded experiment orchestration and result persistence.

Every (problem, algorithm, run) cell uses ``seed = base_seed + run``, so all
algorithms see the same seed set and results can be compared pairwise.
Outputs written to ``output_dir``:

* ``runs.csv``: problem,algorithm,run,seed,igd,mps_size,fe_used,status
* ``timings.csv``: wall-clock time per cell (kept apart so ``runs.csv`` is
  byte-reproducible)
* ``aggregate.csv``: problem,algorithm,igd_mean,igd_std,runs
* ``table.md``: mean(std) grid, problems by algorithms
* ``solutions/MPDMP<p>_<alg>.csv``: run,x1,x2,f1..fm for every MPS member

Each file starts with ``#`` comment lines naming the package version, the
experiment digest and the base seed.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import check_positive_int, check_subset
from .algorithms import ALGORITHMS, AlgorithmConfig, run_algorithm
from .core import RNG_STREAM_VERSION
from .metrics import STD_DDOF, igd, summarize
from .problems import SUITE_IDS, sample_reference_front, suite, true_ps


class ConfigError(ValueError):
    """Invalid experiment specification or unusable output location."""


@dataclass(frozen=True)
class ExperimentSpec:
    problems: tuple[int, ...] = SUITE_IDS
    algorithms: tuple[str, ...] = ALGORITHMS
    runs: int = 30
    base_seed: int = 0
    config: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    output_dir: Path = Path("results")
    reference_size: int = 1000
    jobs: int = 1
    plots: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "problems", check_subset(self.problems, SUITE_IDS, "problem"))
            algs = tuple(str(a).lower() for a in self.algorithms)
            object.__setattr__(self, "algorithms", check_subset(algs, ALGORITHMS, "algorithm"))
            check_positive_int(self.runs, "runs")
            check_positive_int(self.reference_size, "reference_size")
            check_positive_int(self.jobs, "jobs")
            if not -(1 << 63) <= int(self.base_seed) < (1 << 64):
                raise ValueError("base_seed must fit in 64 bits")
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if "optmpnds3" in self.algorithms:
            # every suite problem has two parties
            if 2 * self.config.fei_budget > self.config.fe_budget:
                raise ConfigError(
                    f"optmpnds3 initialisation needs 2*fei={2 * self.config.fei_budget} evaluations "
                    f"but fe={self.config.fe_budget}"
                )

    def seeds(self) -> list[int]:
        return [int(self.base_seed) + r for r in range(self.runs)]

    def describe(self) -> dict:
        """Settings that determine the results (output location and worker count excluded)."""
        cfg = self.config.to_dict()
        cfg.pop("seed")
        cfg.pop("track_history")
        return {
            "problems": list(self.problems),
            "algorithms": list(self.algorithms),
            "runs": self.runs,
            "base_seed": int(self.base_seed),
            "reference_size": self.reference_size,
            "config": cfg,
            "rng_stream": RNG_STREAM_VERSION,
        }

    def digest(self) -> str:
        blob = json.dumps(self.describe(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class CellResult:
    problem: int
    algorithm: str
    run: int
    seed: int
    igd: float = float("nan")
    mps_size: int = 0
    fe_used: int = 0
    elapsed_ms: float = 0.0
    status: str = "ok"
    error: str = ""
    X: np.ndarray | None = None
    F: np.ndarray | None = None
    degenerate: bool = False

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    cells: list[CellResult]
    aggregate: list[dict]
    files: dict[str, Path]

    @property
    def failed(self) -> list[CellResult]:
        return [c for c in self.cells if not c.ok]


@functools.lru_cache(maxsize=None)
def _reference(problem_id: int, size: int) -> np.ndarray:
    return sample_reference_front(suite(problem_id), true_ps(problem_id), size)


def run_cell(problem_id: int, algorithm: str, run: int, seed: int, config: AlgorithmConfig,
             reference_size: int) -> CellResult:
    """Execute one run; any exception is caught and recorded on the result."""
    cell = CellResult(problem_id, algorithm, run, seed)
    start = time.perf_counter()
    try:
        problem = suite(problem_id)
        res = run_algorithm(algorithm, problem, config.with_(seed=seed, reference_size=reference_size))
        cell.igd = igd(_reference(problem_id, reference_size), res.F, problem.layout).value
        cell.mps_size = len(res.mps)
        cell.fe_used = res.fe_used
        cell.X, cell.F = res.X, res.F
        cell.degenerate = res.degenerate
    except Exception as exc:  # a failing run only spoils its own cell
        cell.status = "failed"
        cell.error = f"{type(exc).__name__}: {exc}"
        cell.X = cell.F = None
        traceback.clear_frames(exc.__traceback__)
    cell.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return cell


def _run_task(args) -> CellResult:
    return run_cell(*args)


def _tasks(spec: ExperimentSpec):
    seeds = spec.seeds()
    for p in spec.problems:
        for a in spec.algorithms:
            for r, s in enumerate(seeds):
                yield (p, a, r, s, spec.config, spec.reference_size)


def _header(spec: ExperimentSpec, what: str) -> list[str]:
    return [
        f"# mpdmp {__version__} {what}",
        f"# experiment {spec.digest()} base_seed {int(spec.base_seed)} rng_stream {RNG_STREAM_VERSION}",
    ]


def _fmt(v) -> str:
    if isinstance(v, float) or isinstance(v, np.floating):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header_lines: list[str], columns: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    """Rows of a harness CSV as dicts of strings, comment lines skipped."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


RUN_COLUMNS = ["problem", "algorithm", "run", "seed", "igd", "mps_size", "fe_used", "status"]
AGG_COLUMNS = ["problem", "algorithm", "igd_mean", "igd_std", "runs"]


def aggregate(cells: list[CellResult], spec: ExperimentSpec) -> list[dict]:
    rows = []
    for p in spec.problems:
        for a in spec.algorithms:
            vals = [c.igd for c in cells if c.problem == p and c.algorithm == a and c.ok]
            mean, std = summarize(vals) if vals else (float("nan"), float("nan"))
            rows.append({"problem": p, "algorithm": a, "igd_mean": mean, "igd_std": std, "runs": len(vals)})
    return rows


def format_table(agg: list[dict], spec: ExperimentSpec) -> str:
    """Markdown grid of mean(std) IGD; the best mean in each row is bold."""
    lines = [
        f"Mean (population std, ddof={STD_DDOF}) of IGD over {spec.runs} runs",
        "",
        "| Problem | " + " | ".join(spec.algorithms) + " |",
        "|---" * (len(spec.algorithms) + 1) + "|",
    ]
    for p in spec.problems:
        cells = [r for r in agg if r["problem"] == p]
        finite = [r["igd_mean"] for r in cells if np.isfinite(r["igd_mean"])]
        best = min(finite) if finite else None
        out = []
        for r in cells:
            if not np.isfinite(r["igd_mean"]):
                out.append("failed")
                continue
            text = f"{r['igd_mean']:.4e}({r['igd_std']:.2e})"
            out.append(f"**{text}**" if r["igd_mean"] == best else text)
        lines.append(f"| MPDMP{p} | " + " | ".join(out) + " |")
    return "\n".join(lines) + "\n"


def _check_writable(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from None


def execute(spec: ExperimentSpec) -> list[CellResult]:
    """Run every cell, in a process pool when ``spec.jobs > 1``; order is fixed."""
    tasks = list(_tasks(spec))
    if spec.jobs == 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
        return list(pool.map(_run_task, tasks))


def write_outputs(spec: ExperimentSpec, cells: list[CellResult]) -> tuple[list[dict], dict[str, Path]]:
    out = spec.output_dir
    files: dict[str, Path] = {}
    files["runs"] = write_csv(
        out / "runs.csv", _header(spec, "per-run results"), RUN_COLUMNS,
        ([c.problem, c.algorithm, c.run, c.seed, c.igd, c.mps_size, c.fe_used, c.status] for c in cells),
    )
    files["timings"] = write_csv(
        out / "timings.csv", _header(spec, "wall-clock timings (not reproducible)"),
        ["problem", "algorithm", "run", "seed", "elapsed_ms"],
        ([c.problem, c.algorithm, c.run, c.seed, round(c.elapsed_ms, 3)] for c in cells),
    )
    agg = aggregate(cells, spec)
    files["aggregate"] = write_csv(
        out / "aggregate.csv", _header(spec, f"aggregate IGD, std ddof={STD_DDOF}"), AGG_COLUMNS,
        ([r[k] for k in AGG_COLUMNS] for r in agg),
    )
    table = out / "table.md"
    table.write_text(
        "\n".join(l.replace("# ", "<!-- ", 1) + " -->" for l in _header(spec, "summary table")) + "\n\n"
        + format_table(agg, spec),
        encoding="utf-8",
    )
    files["table"] = table
    for p in spec.problems:
        m = suite(p).n_obj
        for a in spec.algorithms:
            rows = []
            for c in cells:
                if c.problem == p and c.algorithm == a and c.ok:
                    rows.extend([c.run, *x, *f] for x, f in zip(c.X, c.F))
            files[f"solutions:{p}:{a}"] = write_csv(
                out / "solutions" / f"MPDMP{p}_{a}.csv", _header(spec, f"MPS members MPDMP{p} {a}"),
                ["run", "x1", "x2"] + [f"f{j + 1}" for j in range(m)], rows,
            )
    failures = [c for c in cells if not c.ok]
    if failures:
        files["failures"] = write_csv(
            out / "failures.csv", _header(spec, "failed runs"), ["problem", "algorithm", "run", "seed", "error"],
            ([c.problem, c.algorithm, c.run, c.seed, c.error] for c in failures),
        )
    (out / "spec.json").write_text(json.dumps(spec.describe(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    files["spec"] = out / "spec.json"
    return agg, files


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute all cells and persist per-run, aggregate and solution files.

    Raises:
        ConfigError: If the output directory cannot be written.
    """
    _check_writable(spec.output_dir)
    cells = execute(spec)
    agg, files = write_outputs(spec, cells)
    if spec.plots:
        from .plotting import export_plot_data

        for c in cells:
            if c.ok and c.run == 0:
                stem = spec.output_dir / "plots" / f"MPDMP{c.problem}_{c.algorithm}_run{c.run}"
                for key, path in export_plot_data(c.problem, c.X, stem).items():
                    files[f"plot:{c.problem}:{c.algorithm}:{key}"] = path
    return ExperimentResult(spec, cells, agg, files)


def spec_from_mapping(data: dict, base: ExperimentSpec | None = None) -> ExperimentSpec:
    """Build a spec from flag-style keys (``problems``, ``fe``, ``ref_size``...).

    Unknown keys raise :class:`ConfigError`; any :class:`AlgorithmConfig`
    field name is also accepted.
    """
    base = base or ExperimentSpec()
    aliases = {"seed": "base_seed", "out": "output_dir", "ref_size": "reference_size"}
    cfg_aliases = {"pop": "pop_size", "fe": "fe_budget", "fei": "fei_budget"}
    cfg_fields = set(AlgorithmConfig.__dataclass_fields__) - {"seed", "track_history", "reference_size"}
    spec_fields = set(ExperimentSpec.__dataclass_fields__) - {"config"}
    spec_kw, cfg_kw = {}, {}
    for key, value in data.items():
        key = key.replace("-", "_")
        if key in cfg_aliases or key in cfg_fields:
            cfg_kw[cfg_aliases.get(key, key)] = value
        elif aliases.get(key, key) in spec_fields:
            spec_kw[aliases.get(key, key)] = value
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    try:
        config = replace(base.config, **cfg_kw)
        return replace(base, config=config, **spec_kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data
