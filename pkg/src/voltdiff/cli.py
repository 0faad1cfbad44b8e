"""Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import itertools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import experiments
from .descent import DescentConfig, Discrepancy, Heuristic, run_descent
from .errors import ConfigurationError
from .grid import SampledFunction, make_uniform_grid
from .sobolev import BoundaryKind, CgVariant
from .transform import transform_data

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2
SPACING_TOL = 1e-8

GRADIENTS = {
    "l2": ("l2", CgVariant.NONE),
    "sobolev": ("sobolev", CgVariant.NONE),
    "cg-l2h1": ("sobolev", CgVariant.L2H1),
    "cg-h1h1": ("sobolev", CgVariant.H1H1),
}
BOUNDARIES = {kind.value: kind for kind in BoundaryKind}
STOPS = ("discrepancy", "heuristic")


class UsageError(Exception):
    pass


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def read_samples(path):
    """Read a two-column ``x, y`` CSV; a non-numeric first row is a header."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if len(rows) < 3:
        raise UsageError(f"{path}: need at least 3 data rows, found {len(rows)}")
    try:
        data = np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise UsageError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[1] != 2:
        raise UsageError(f"{path}: expected exactly two columns (x, y)")
    if not np.all(np.isfinite(data)):
        raise UsageError(f"{path}: non-finite values in input")
    return data[:, 0], data[:, 1]


def check_uniform(x, tol=SPACING_TOL):
    """Return the spacing of ``x`` or raise if it is not a uniform increasing grid."""
    dx = np.diff(x)
    h = (x[-1] - x[0]) / (len(x) - 1)
    if not np.all(dx > 0):
        raise UsageError("x must be strictly increasing")
    jitter = float(np.max(np.abs(dx - h))) / h
    if jitter > tol:
        raise UsageError(
            f"x is not uniformly spaced (relative spacing jitter {jitter:.3g} > {tol:g}); "
            "resample the data onto an evenly spaced grid first, e.g. with numpy.interp"
        )
    return h


def _stop_rule(args):
    if args.stop == "discrepancy":
        if args.delta is None:
            raise UsageError("--stop discrepancy needs --delta (the noise norm)")
        return Discrepancy(args.delta, args.tau)
    return Heuristic()


def build_config(args, grid) -> DescentConfig:
    direction, cg = GRADIENTS[args.gradient]
    stop = _stop_rule(args)
    kwargs = dict(direction=direction, cg=cg, stop=stop, max_iter=args.max_iter, blend=args.blend)
    have_phi = args.phi_a is not None or args.phi_b is not None
    if have_phi and (args.phi_a is None or args.phi_b is None):
        raise UsageError("--phi-a and --phi-b must be given together")
    bc = BOUNDARIES[args.bc] if args.bc else None
    if bc is BoundaryKind.DIRICHLET and not have_phi:
        raise UsageError("--bc dirichlet needs --phi-a and --phi-b")
    if have_phi:
        if bc is not None:
            kwargs["bc"] = bc
        return DescentConfig.with_boundary_values(grid, args.phi_a, args.phi_b, **kwargs)
    return DescentConfig(bc=bc or BoundaryKind.NEUMANN, **kwargs)


def cmd_differentiate(args) -> int:
    try:
        x, y = read_samples(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        check_uniform(x)
        grid = make_uniform_grid(float(x[0]), float(x[-1]), len(x))
        config = build_config(args, grid)
        data = transform_data(SampledFunction(grid, y), g_a=args.g_a, g_b=args.g_b)
        report = run_descent(data, config)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    output = args.output
    history = args.history or _sibling(output, "_history")
    rows = zip(x, report.phi_hat.values, report.data_fit.values)
    try:
        experiments.write_rows(output, ("x", "derivative", "smoothed_fit"), [tuple(map(float, r)) for r in rows])
        experiments.write_rows(
            history,
            experiments.HISTORY_COLUMNS[1:],
            [
                (r.m, r.G_value, r.residual_g, r.residual_u, r.residual_uprime, r.step_alpha)
                for r in report.history
            ],
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{report.stop_reason.value} at iteration {report.stop_index}; wrote {output} and {history}")
    return EXIT_OK


def _sibling(path, suffix):
    root, ext = os.path.splitext(path)
    return f"{root}{suffix}{ext or '.csv'}"


def _resolve_names(name):
    if name == "all":
        return list(experiments.EXPERIMENT_NAMES)
    if name not in experiments.SPECS:
        raise UsageError(f"unknown experiment {name!r}; valid names: all, {', '.join(experiments.EXPERIMENT_NAMES)}")
    return [name]


def _with_level(noise, level):
    first = dataclasses.fields(noise)[0].name
    return dataclasses.replace(noise, **{first: level})


def _noise_level(noise):
    return getattr(noise, dataclasses.fields(noise)[0].name)


def apply_overrides(spec, gradient=None, stop=None, max_iter=None, level=None, seeds=None):
    """Copy of ``spec`` with command-line settings applied."""
    config = spec.config
    if gradient is not None:
        direction, cg = GRADIENTS[gradient]
        config = dataclasses.replace(config, direction=direction, cg=cg)
    if max_iter is not None:
        config = dataclasses.replace(config, max_iter=max_iter)
    changes = {"config": config}
    if stop is not None:
        changes["stopping"] = stop
    if level is not None:
        changes["noise"] = _with_level(spec.noise, level)
    if seeds is not None:
        changes["seeds"] = tuple(range(seeds))
    return spec.replace(**changes)


def cmd_experiment(args) -> int:
    try:
        names = _resolve_names(args.name)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for name in names:
        spec = apply_overrides(
            experiments.SPECS[name], args.gradient, args.stop, args.max_iter, seeds=args.seeds
        )
        report = experiments.run_example(spec, jobs=args.jobs)
        try:
            paths = experiments.write_outputs(report, args.outdir)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print("\n".join(experiments.summary_lines(report)))
        print(f"  wrote {paths['summary']}")
    return EXIT_OK


def _cell_stem(name, gradient, stop, level):
    stem = f"{name}__{gradient}__{stop}"
    return stem if level is None else f"{stem}__{level!r}"


def _run_cell(cell):
    spec, stem, outdir = cell
    report = experiments.run_example(spec)
    paths = experiments.write_outputs(report, outdir, stem)
    return report, paths


INDEX_COLUMNS = (
    "cell",
    "experiment",
    "gradient",
    "stop",
    "noise_level",
    "median_rel_error",
    "mean_rel_error",
    "median_iterations",
    "summary_csv",
    "history_csv",
)


def cmd_sweep(args) -> int:
    lists = (args.experiments, args.gradients, args.stops)
    if any(len(v) == 0 for v in lists) or (args.levels is not None and len(args.levels) == 0):
        print("error: the requested sweep is empty (every axis needs at least one value)", file=sys.stderr)
        return EXIT_USAGE
    try:
        names = [n for item in args.experiments for n in _resolve_names(item)]
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    levels = args.levels if args.levels is not None else [None]
    cells, meta = [], []
    for name, gradient, stop, level in itertools.product(names, args.gradients, args.stops, levels):
        spec = apply_overrides(experiments.SPECS[name], gradient, stop, args.max_iter, level, args.seeds)
        stem = _cell_stem(name, gradient, stop, level)
        cells.append((spec, stem, args.outdir))
        meta.append((stem, name, gradient, stop, _noise_level(spec.noise)))
    try:
        os.makedirs(args.outdir, exist_ok=True)
        if args.jobs > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                outputs = list(pool.map(_run_cell, cells))
        else:
            outputs = [_run_cell(c) for c in cells]
        rows = []
        for (stem, name, gradient, stop, level), (report, paths) in zip(meta, outputs):
            its = [r.iterations for r in report.results if r.ok]
            median_its = float(np.median(its)) if its else math.nan
            rows.append(
                (stem, name, gradient, stop, float(level), report.median, report.mean, median_its,
                 os.path.basename(paths["summary"]), os.path.basename(paths["history"]))
            )
        index = os.path.join(args.outdir, "index.csv")
        experiments.write_rows(index, INDEX_COLUMNS, rows)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for row in rows:
        print(f"{row[0]}: median rel. error {row[5]:.4g}, median iterations {row[7]:g}")
    print(f"wrote {index}")
    return EXIT_OK


def _add_descent_flags(p, defaults=True):
    p.add_argument(
        "--gradient",
        choices=list(GRADIENTS),
        default="sobolev" if defaults else None,
        help="descent direction (default: %(default)s)",
    )
    p.add_argument(
        "--stop",
        choices=STOPS,
        default="heuristic" if defaults else None,
        help="stopping rule; discrepancy needs --delta (default: %(default)s)",
    )
    p.add_argument(
        "--max-iter",
        type=_positive_int,
        default=500 if defaults else None,
        help="maximum number of iterates (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    names = ", ".join(experiments.EXPERIMENT_NAMES)
    parser = argparse.ArgumentParser(
        prog="voltdiff",
        description="Derivatives of noisy uniformly sampled data by Sobolev-gradient descent.",
        epilog=f"experiment names: {names}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "differentiate",
        help="differentiate a two-column x,y CSV",
        description="Differentiate samples given as a two-column CSV (x, y) on a uniform grid. "
        "A non-numeric first row is treated as a header.",
    )
    p.add_argument("input", help="input CSV with columns x, y")
    p.add_argument("-o", "--output", required=True, help="output CSV: x, derivative, smoothed_fit")
    p.add_argument("--history", help="per-iteration CSV (default: <output>_history.csv)")
    _add_descent_flags(p)
    p.add_argument(
        "--bc",
        choices=list(BOUNDARIES),
        default=None,
        help="Sobolev gradient boundary condition (default: neumann, or dirichlet with --phi-a/--phi-b)",
    )
    p.add_argument("--delta", type=_float, default=None, help="noise norm for discrepancy stopping (default: none)")
    p.add_argument("--tau", type=_float, default=1.0, help="discrepancy safety factor, >= 1 (default: %(default)s)")
    p.add_argument("--blend", type=_float, default=1.0, help="weight of the Sobolev gradient in [0,1] (default: %(default)s)")
    p.add_argument("--phi-a", type=_float, default=None, help="known derivative at the left end (default: none)")
    p.add_argument("--phi-b", type=_float, default=None, help="known derivative at the right end (default: none)")
    p.add_argument("--g-a", type=_float, default=None, help="trusted data value at the left end (default: first sample)")
    p.add_argument("--g-b", type=_float, default=None, help="trusted data value at the right end (default: last sample)")
    p.set_defaults(func=cmd_differentiate)

    p = sub.add_parser(
        "experiment",
        help="run a named synthetic experiment",
        description=f"Run a named experiment and write CSV reports. Names: all, {names}.",
    )
    p.add_argument("name", help=f"one of: all, {names}")
    p.add_argument("--seeds", type=_positive_int, default=None, help="use seeds 0..N-1 (default: 11 seeds)")
    p.add_argument("--outdir", default="results", help="output directory (default: %(default)s)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes per experiment (default: %(default)s)")
    _add_descent_flags(p, defaults=False)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser(
        "sweep",
        help="cartesian product of experiment settings",
        description=f"Run every combination of the given settings and write an index.csv. Names: {names}.",
    )
    p.add_argument("--experiments", nargs="*", default=["example1_dense_s01"], help="experiment names (default: %(default)s)")
    p.add_argument(
        "--gradients",
        nargs="*",
        choices=list(GRADIENTS),
        default=["sobolev", "cg-l2h1", "cg-h1h1"],
        help="gradient variants (default: %(default)s)",
    )
    p.add_argument("--stops", nargs="*", choices=STOPS, default=list(STOPS), help="stopping rules (default: %(default)s)")
    p.add_argument(
        "--levels",
        nargs="*",
        type=_float,
        default=None,
        help="noise levels replacing each experiment's own sigma/delta (default: keep)",
    )
    p.add_argument("--seeds", type=_positive_int, default=None, help="use seeds 0..N-1 (default: 11 seeds)")
    p.add_argument("--max-iter", type=_positive_int, default=None, help="iteration cap (default: experiment's)")
    p.add_argument("--outdir", default="sweep", help="output directory (default: %(default)s)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="cells run in parallel (default: %(default)s)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
