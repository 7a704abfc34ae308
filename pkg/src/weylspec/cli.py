"""
Command-line entry point: ``weylspec --config run.json``.

Exit status: 0 on success, 1 on a numerical failure (diagnostic.json is
written), 2 on an invalid config or potential (nothing is written).
"""

import argparse
import sys
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError, PotentialError
from .green import resolvent_norm_check
from .grids import SampledFunction, sample_data
from .results import TaskResult, write_diagnostic, write_manifest
from .settings import TASKS, RunConfig, load_config, resolve_threads
from .sturmliouville import SturmLiouville
from .verify import run_suites, summarize

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylspec",
        description="Spectral density, projections and bound states of half-line Sturm-Liouville operators.",
        epilog="Output formats: docs/formats.md",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", required=True, metavar="JSON", help="Run-config document.")
    parser.add_argument("--task", choices=TASKS, default=None, help="Overrides the config task.")
    parser.add_argument("--out", default=None, metavar="DIR", help="Output directory.")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the randomized suites.")
    parser.add_argument("--threads", type=int, default=None,
                        help="Worker threads (0 = auto; default: $WEYLSPEC_THREADS or auto).")
    parser.add_argument("--quiet", action="store_true", help="No status lines or progress bars.")
    return parser


# ---------------------------------------------------------------------- #
#  Tasks
# ---------------------------------------------------------------------- #


def _rows_to_columns(rows: List[dict]) -> Dict[str, np.ndarray]:
    if not rows:
        return {}
    return {key: np.array([row[key] for row in rows]) for key in rows[0]}


def task_density(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    points = op.density_sweep()
    table = _rows_to_columns([pt.to_row() for pt in points])
    summary = {
        "points": len(points),
        "max_err_bound": max(pt.truncation_error_bound for pt in points),
        "min_density": min(pt.density for pt in points),
    }
    properties = {"density_positive": all(pt.density > 0 for pt in points)}
    if op.potential.name == "free":
        dev = max(abs(pt.density * np.pi / np.sqrt(pt.lam) - 1.0) for pt in points)
        summary["free_closed_form_deviation"] = dev
        properties["free_closed_form"] = dev <= 1e-8
    return TaskResult("density", {"density": table}, summary, properties)


def task_cfunction(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    rows = []
    for lam in sorted(config.numeric.lambda_grid):
        point = op.c_function(lam)
        rows.append({
            "lambda": lam,
            "a": point.a,
            "b": point.b,
            "re_c": point.c.real,
            "im_c": point.c.imag,
            "abs_c": abs(point.c),
            "err_bound": point.truncation_error_bound,
            "x_max": point.x_max,
        })
    summary = {
        "points": len(rows),
        "max_err_bound": max(r["err_bound"] for r in rows),
        "min_abs_c": min(r["abs_c"] for r in rows),
    }
    return TaskResult("cfunction", {"cfunction": _rows_to_columns(rows)}, summary,
                      {"c_nonvanishing": summary["min_abs_c"] > 0})


def task_project(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    alpha, beta = config.numeric.interval
    weyl = op.weyl_pairing(alpha, beta, data, data)
    reports = [weyl] + [op.kodaira_pairing(alpha, beta, eps, data, data)
                        for eps in sorted(config.numeric.epsilons, reverse=True)]
    rows = [{
        "method": r.method,
        "epsilon": np.nan if r.epsilon is None else r.epsilon,
        "value": r.value,
        "imag_part": r.imag_part,
        "error": r.error,
        "deviation": abs(r.value - weyl.value),
    } for r in reports]
    x = np.asarray(config.numeric.x_grid, dtype=float)
    ph = op.project(alpha, beta, data, x)
    tables = {
        "pairings": _rows_to_columns(rows),
        "weyl_nodes": weyl.node_table(),
        "kodaira_nodes": reports[-1].node_table(),
        "projection": {"x": x, "projected": np.real(ph.y)},
    }
    final = rows[-1]["deviation"] / max(abs(weyl.value), 1e-300)
    summary = {
        "interval": [alpha, beta],
        "weyl": weyl.to_dict(),
        "kodaira": [r.to_dict() for r in reports[1:]],
        "relative_deviation_at_smallest_epsilon": final,
    }
    return TaskResult("project", tables, summary, {"weyl_kodaira_agree": final <= 1e-2})


def task_bound_states(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    states = op.bound_states()
    tables = {}
    if states:
        tables["bound_states"] = _rows_to_columns([st.to_dict() for st in states])
    for n, st in enumerate(states):
        tables[f"eigenfunction_{n}"] = {"x": st.x, "value": st.values,
                                        "quasi_derivative": st.quasi_derivative}
    window = op.numeric.z_range
    try:
        scan = op.m_scan(np.linspace(window[0], window[1], op.numeric.n_scan))
        tables["m_scan"] = {"z": scan.z, "m": scan.m}
    except PotentialError as e:
        if not op.quiet:
            print(f"  Warning: m(z) scan skipped: {e}")
    zero = op.zero_energy()
    summary = {
        "count": len(states),
        "eigenvalues": [st.eigenvalue for st in states],
        "states": [st.to_dict() for st in states],
        "zero_energy": zero.to_dict(),
    }
    properties = {
        "eigenvalues_negative": all(st.eigenvalue < 0 for st in states),
        "zero_not_eigenvalue": zero.not_square_integrable,
    }
    return TaskResult("bound_states", tables, summary, properties)


def task_reconstruct(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    transform = op.transform(data)
    rec = op.reconstruct(data)
    parseval = op.parseval(data)
    target = data.resample(rec.x).y
    tables = {
        "transform": transform.table(),
        "reconstruction": {
            "x": rec.x,
            "h": target,
            "reconstructed": rec.values,
            "continuous": rec.continuous_part,
            "discrete": rec.discrete_part,
        },
    }
    if len(transform.bound_eigenvalues):
        tables["bound_coefficients"] = {
            "eigenvalue": transform.bound_eigenvalues,
            "coefficient": np.real(transform.bound_coefficients),
            "norm": transform.bound_norms,
        }
    summary = {"reconstruction": rec.to_dict(), "parseval": parseval.to_dict()}
    properties = {
        "reconstruction_deviation": rec.deviation <= 1e-3,
        "parseval_defect": parseval.defect <= 1e-3,
    }
    return TaskResult("reconstruct", tables, summary, properties)


def task_green(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    nu = complex(*config.numeric.nu)
    xs = np.asarray(config.numeric.x_grid, dtype=float)
    rows = []
    w = None
    for x in xs:
        for y in xs:
            sample = op.green_kernel(nu, x, y)
            w = sample.wronskian_w
            rows.append({"x": x, "y": y, "re_kernel": sample.value.real, "im_kernel": sample.value.imag})
    summary = {"nu": [nu.real, nu.imag], "wronskian": [w.real, w.imag]}
    properties = {}
    if nu.imag != 0:
        check = resolvent_norm_check(op.potential, nu, data, op.tol)
        summary["resolvent_norm"] = check
        properties["resolvent_norm_bound"] = check["passed"]
    return TaskResult("green", {"green": _rows_to_columns(rows)}, summary, properties)


def task_verify(op: SturmLiouville, config: RunConfig, data: SampledFunction) -> TaskResult:
    records = run_suites(op, data, seed=config.seed)
    table = _rows_to_columns([r.to_row() for r in records])
    failed = [f"{r.suite}.{r.name}" for r in records if not r.passed]
    summary = {"checks": len(records), "failed": failed, "seed": config.seed}
    return TaskResult("verify", {"properties": table}, summary, summarize(records))


TASK_RUNNERS: Dict[str, Callable[[SturmLiouville, RunConfig, SampledFunction], TaskResult]] = {
    "density": task_density,
    "cfunction": task_cfunction,
    "project": task_project,
    "bound_states": task_bound_states,
    "reconstruct": task_reconstruct,
    "green": task_green,
    "verify": task_verify,
}


# ---------------------------------------------------------------------- #
#  Orchestration
# ---------------------------------------------------------------------- #


def prepare(args: argparse.Namespace):
    """Config, operator and test data; raises ConfigError / PotentialError."""
    config = load_config(args.config, task_override=args.task)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"--seed must be >= 0, got {args.seed}")
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, output=replace(config.output, directory=args.out))
    threads = resolve_threads(args.threads)
    op = SturmLiouville.from_spec(config.potential, numeric=config.numeric,
                                  threads=threads, quiet=args.quiet)
    try:
        data = sample_data(config.data.kind, config.data.center, config.data.width, config.numeric.dx)
    except ValueError as e:
        raise ConfigError(f"data: {e}")
    return config, op, data


def run(config: RunConfig, op: SturmLiouville, data: SampledFunction) -> int:
    """Execute the configured task and write its files; returns the exit status."""
    out_dir = config.output.directory
    start = time.perf_counter()
    try:
        result = TASK_RUNNERS[config.task](op, config, data)
    except PotentialError as e:
        print(f"Invalid potential for task '{config.task}': {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        path = write_diagnostic(out_dir, config.task, config.to_dict(), e)
        print(f"Numerical failure in task '{config.task}': {e}", file=sys.stderr)
        print(f"  Diagnostic: {path}", file=sys.stderr)
        return EXIT_NUMERICAL

    files = result.write(out_dir, precision=config.output.precision, formats=config.output.formats)
    wall = time.perf_counter() - start
    manifest = write_manifest(out_dir, config.to_dict(), result, wall, files)

    if not op.quiet:
        failed = [name for name, ok in result.properties.items() if not ok]
        print(f"\n  Task: {config.task} ({wall:.1f}s)")
        for path in files:
            print(f"  Wrote {path}")
        print(f"  Manifest: {manifest}")
        if failed:
            print(f"  Warning: {len(failed)} propert{'y' if len(failed) == 1 else 'ies'} failed: "
                  f"{', '.join(failed)}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not args.quiet:
        print("=" * 60)
        print(f"weylspec {__version__}")
        print("=" * 60)
    try:
        config, op, data = prepare(args)
    except (ConfigError, PotentialError) as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    status = run(config, op, data)
    if not args.quiet:
        print("=" * 60)
        print("Done" if status == EXIT_OK else "Failed")
        print("=" * 60)
    return status


if __name__ == "__main__":
    sys.exit(main())
