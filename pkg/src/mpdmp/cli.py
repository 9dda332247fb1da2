"""Command-line entry point: ``mpdmp run | plot | problems | verify``.

Exit status is 0 on success, 1 for configuration errors and 2 when a run
(or a verification check) fails.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algorithms import ALGORITHMS
from .experiment import ConfigError, load_config, read_csv, run_experiment, spec_from_mapping
from .problems import SUITE_IDS, ps_oracle, same_region, suite, true_ps, write_problem, write_reference_front

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUN_FAILED = 2

log = logging.getLogger("mpdmp")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in re.split(r"[,\s]+", text.strip()) if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _name_list(text: str) -> list[str]:
    return [t.lower() for t in re.split(r"[,\s]+", text.strip()) if t]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpdmp", description="Multiparty distance-minimisation experiments.")
    parser.add_argument("--version", action="version", version=f"mpdmp {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="run an experiment grid and write CSV results")
    run.add_argument("--config", type=Path, help="JSON file with the same keys as the flags")
    run.add_argument("--problems", type=_int_list, help=f"suite ids, default {','.join(map(str, SUITE_IDS))}")
    run.add_argument("--algorithms", type=_name_list, help=f"subset of {','.join(ALGORITHMS)}")
    run.add_argument("--runs", type=int, help="independent runs per cell (default 30)")
    run.add_argument("--seed", type=int, help="base seed; run r uses seed+r (default 0)")
    run.add_argument("--pop", type=int, help="population size N (default 200)")
    run.add_argument("--fe", type=int, help="total evaluation budget FE (default 80000)")
    run.add_argument("--fei", type=int, help="per-party initialisation budget FEI (default 10000)")
    run.add_argument("--ref-size", type=int, help="reference front size (default 1000)")
    run.add_argument("--out", type=Path, help="output directory (default ./results)")
    run.add_argument("--jobs", type=int, help="concurrent runs (default 1)")
    run.add_argument("--plots", action="store_true", default=None, help="also export SVG plots of run 0")

    plot = sub.add_parser("plot", parents=[common], help="re-export plot data from stored solutions")
    plot.add_argument("source", type=Path, help="a results directory or one solutions CSV")
    plot.add_argument("--run", type=int, default=0, help="which run to draw (default 0)")
    plot.add_argument("--out", type=Path, help="output directory (default <results>/plots)")

    probs = sub.add_parser("problems", parents=[common], help="print suite geometry")
    probs.add_argument("--problems", type=_int_list, default=list(SUITE_IDS))
    probs.add_argument("--export", type=Path, help="write problem JSON and reference-front CSV files here")
    probs.add_argument("--ref-size", type=int, default=1000)

    sub.add_parser("verify", parents=[common], help="check Pareto-set geometry and core invariants")
    return parser


def _cmd_run(args) -> int:
    data = load_config(args.config) if args.config else {}
    flags = {
        "problems": args.problems, "algorithms": args.algorithms, "runs": args.runs, "seed": args.seed,
        "pop": args.pop, "fe": args.fe, "fei": args.fei, "ref_size": args.ref_size, "out": args.out,
        "jobs": args.jobs, "plots": args.plots,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    spec = spec_from_mapping(data)
    n_cells = len(spec.problems) * len(spec.algorithms) * spec.runs
    log.info("running %d cells into %s (experiment %s)", n_cells, spec.output_dir, spec.digest())
    start = time.perf_counter()
    result = run_experiment(spec)
    log.info("finished in %.1f s", time.perf_counter() - start)
    for row in result.aggregate:
        print(f"MPDMP{row['problem']} {row['algorithm']:<10} igd_mean={row['igd_mean']:.4e} "
              f"igd_std={row['igd_std']:.2e} runs={row['runs']}")
    print(f"results written to {spec.output_dir}")
    if result.failed:
        for c in result.failed:
            print(f"FAILED MPDMP{c.problem} {c.algorithm} run {c.run} seed {c.seed}: {c.error}", file=sys.stderr)
        return EXIT_RUN_FAILED
    return EXIT_OK


def _plot_file(path: Path, run: int, out_dir: Path) -> list[Path]:
    from .plotting import export_plot_data

    m = re.match(r"MPDMP(\d+)_(\w+)\.csv$", path.name)
    if not m:
        raise ConfigError(f"cannot tell the problem from file name {path.name}; expected MPDMP<p>_<alg>.csv")
    pid, alg = int(m.group(1)), m.group(2)
    try:
        rows = read_csv(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    X = np.array([[float(r["x1"]), float(r["x2"])] for r in rows if int(r["run"]) == run]).reshape(-1, 2)
    written = export_plot_data(pid, X, out_dir / f"MPDMP{pid}_{alg}_run{run}")
    return list(written.values())


def _cmd_plot(args) -> int:
    src = args.source
    if src.is_dir():
        files = sorted((src / "solutions").glob("MPDMP*_*.csv"))
        out = args.out or src / "plots"
        if not files:
            raise ConfigError(f"no solution files under {src / 'solutions'}")
    elif src.is_file():
        files = [src]
        out = args.out or src.parent
    else:
        raise ConfigError(f"{src} does not exist")
    for f in files:
        for p in _plot_file(f, args.run, out):
            print(p)
    return EXIT_OK


def _cmd_problems(args) -> int:
    for pid in args.problems:
        if pid not in SUITE_IDS:
            raise ConfigError(f"unknown problem {pid}; choose from 1..8")
    for pid in args.problems:
        p = suite(pid)
        region = true_ps(pid)
        print(f"MPDMP{pid}: parties {list(p.layout.sizes)}, bounds {list(p.bounds)}")
        for i in range(p.layout.n_parties):
            pts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in p.party_targets(i))
            print(f"  party {i + 1}: {pts}")
        verts = ", ".join(f"({x:.6g}, {y:.6g})" for x, y in region.vertices)
        print(f"  Pareto set: {region.kind} {verts}")
        if args.export:
            args.export.mkdir(parents=True, exist_ok=True)
            write_problem(p, args.export / f"MPDMP{pid}.json")
            write_reference_front(p, region, args.export / f"MPDMP{pid}_reference.csv", args.ref_size)
    if args.export:
        print(f"exported to {args.export}")
    return EXIT_OK


def verification_checks():
    """Yield ``(name, passed, detail)`` for the geometry and invariant checks."""
    from .metrics import igd
    from .problems import PS_KINDS, sample_reference_front, sample_region
    from .sorting import mpnds2, nds

    for pid in SUITE_IDS:
        t0 = time.perf_counter()
        region = ps_oracle(suite(pid))
        ok = region.kind == PS_KINDS[pid] and same_region(region, true_ps(pid))
        yield f"ps_oracle MPDMP{pid}", ok, f"{region.kind} in {1000 * (time.perf_counter() - t0):.1f} ms"

    rng = np.random.default_rng(0)
    mismatches = 0
    for _ in range(200):
        F = rng.integers(0, 4, size=(int(rng.integers(1, 30)), int(rng.integers(1, 5))))
        D = (F[:, None, :] <= F[None, :, :]).all(-1) & (F[:, None, :] < F[None, :, :]).any(-1)
        levels, remaining, lvl = np.zeros(len(F), int), np.ones(len(F), bool), 0
        while remaining.any():
            lvl += 1
            idx = np.flatnonzero(remaining)[~D[np.ix_(remaining, remaining)].any(0)]
            levels[idx] = lvl
            remaining[idx] = False
        mismatches += int(not np.array_equal(levels, nds(F)))
    yield "nds matches pairwise peeling", mismatches == 0, f"{mismatches} mismatches in 200 populations"

    for pid in SUITE_IDS:
        p = suite(pid)
        ref = sample_reference_front(p, true_ps(pid), 200)
        zero = igd(ref, ref, p.layout).value == 0.0
        ranks_ok = bool(np.all(mpnds2(ref, p.layout) == 1))
        q = p.evaluate(sample_region(true_ps(pid), 10))
        C = p.evaluate(rng.uniform(-10, 10, (2000, 2)))
        dominated = any(((C <= f).all(1) & (C < f).any(1)).any() for f in q)
        yield f"invariants MPDMP{pid}", zero and ranks_ok and not dominated, (
            f"igd(P*,P*)=0: {zero}, PS rank 1: {ranks_ok}, PS undominated: {not dominated}"
        )


def _cmd_verify(args) -> int:
    failed = 0
    for name, ok, detail in verification_checks():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return EXIT_OK if failed == 0 else EXIT_RUN_FAILED


COMMANDS = {"run": _cmd_run, "plot": _cmd_plot, "problems": _cmd_problems, "verify": _cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"mpdmp: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
