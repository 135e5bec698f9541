"""Command-line front end.

Subcommands: fit, density, sample, simulate, compare, validate.  Outputs are
CSV (comma separator, '.' decimals, '#' comment headers) and self-contained
SVG.  Exit codes: 0 success, 2 usage error, 3 data/validation error,
4 numeric failure.
"""

import argparse
import os
import sys

import numpy as np

from . import charts
from .errors import DataError, DomainError, NumericError
from .fit import ContingencyTensor, contingency_table, fit, pseudo_observations
from .io_utils import read_matrix_csv, write_matrix_csv
from .model import (
    density_bound,
    density_grid,
    read_joint_csv,
    write_joint_csv,
)
from .partition import BERNSTEIN, INDICATOR, validate_partition
from .rng import RandomSource
from .risk import compare_scenarios, load_config
from .sampling import (
    sample_bernstein,
    sample_gaussian_copula,
    sample_grid,
    sample_independence,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _grid_sizes(text):
    try:
        sizes = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise DataError(f"bad --grid value {text!r}: {exc}") from exc
    if any(m < 1 for m in sizes):
        raise DataError("grid sizes must be >= 1")
    return sizes


def _outdir(path):
    os.makedirs(path, exist_ok=True)
    return path


def cmd_fit(args) -> int:
    out = _outdir(args.out)
    if args.counts:
        table = ContingencyTensor.from_counts(read_matrix_csv(args.counts))
    else:
        data = read_matrix_csv(args.input)
        sizes = args.grid if args.grid else (10,)
        if len(sizes) == 1:
            sizes = sizes * data.shape[1]
        table = contingency_table(pseudo_observations(data), sizes)
    method = {"closed": "closed_form", "qp": "qp"}.get(args.method, args.method)
    result = fit(table, method=method)
    write_matrix_csv(
        table.counts, os.path.join(out, "contingency.csv"), header=f"n={table.n} counts"
    )
    write_joint_csv(result.joint, os.path.join(out, "joint.csv"))
    with open(os.path.join(out, "fit_report.json"), "w", encoding="utf-8") as fh:
        fh.write(result.report.to_json() + "\n")
    print(f"quadratic error (shifted closed form): {result.report.quadratic_error_shifted:.6g}")
    if result.report.quadratic_error_qp is not None:
        print(f"quadratic error (qp optimum):          {result.report.quadratic_error_qp:.6g}")
    return EXIT_OK


def cmd_density(args) -> int:
    out = _outdir(args.out)
    joint = read_joint_csv(args.joint)
    grid = density_grid(joint, args.resolution, kind=args.kind)
    write_matrix_csv(
        grid,
        os.path.join(out, "density_grid.csv"),
        header=f"kind={args.kind} resolution={args.resolution} density at cell midpoints",
    )
    points = read_matrix_csv(args.points) if args.points else None
    charts.density_svg(
        grid,
        os.path.join(out, "density.svg"),
        title=f"{args.kind} copula density",
        points=points,
    )
    print(f"density grid max {grid.max():.6g}, min {grid.min():.6g}")
    return EXIT_OK


def cmd_sample(args) -> int:
    out = _outdir(args.out)
    rng = RandomSource(args.seed)
    if args.kind in ("bernstein", "grid"):
        if not args.joint:
            raise DataError(f"--kind {args.kind} requires --joint")
        joint = read_joint_csv(args.joint)
        if args.kind == "bernstein":
            batch = sample_bernstein(joint, density_bound(joint), args.n, rng)
        else:
            batch = sample_grid(joint, args.n, rng)
    elif args.kind == "independence":
        batch = sample_independence(args.d, args.n, rng)
    elif args.kind == "gaussian":
        if not args.corr:
            raise DataError("--kind gaussian requires --corr")
        batch = sample_gaussian_copula(read_matrix_csv(args.corr), args.n, rng)
    else:
        raise DataError(f"unknown sampler kind {args.kind!r}")
    batch.to_csv(os.path.join(out, "samples.csv"))
    print(f"{batch.n} samples, acceptance rate {batch.acceptance_rate:.4g}")
    return EXIT_OK


def cmd_compare(args, only_scenario=None) -> int:
    out = _outdir(args.out)
    config = load_config(args.config, base_dir=os.path.dirname(os.path.abspath(args.config)))
    if only_scenario is not None:
        matches = [s for s in config.scenarios if s.label == only_scenario]
        if not matches:
            raise DataError(f"config has no scenario labelled {only_scenario!r}")
        config.scenarios = matches
    report = compare_scenarios(config)
    report.to_csv(os.path.join(out, "pml.csv"))
    charts.pml_svg(
        report.return_periods,
        [(res.label, res.pml) for res in report.results],
        os.path.join(out, "pml.svg"),
    )
    for res in report.results:
        tail = ", ".join(
            f"T={t:g}: {v:.5g}" for t, v in zip(report.return_periods, res.pml)
        )
        print(f"{res.label}: {tail}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    return cmd_compare(args, only_scenario=args.scenario)


def cmd_validate(args) -> int:
    failures = 0
    sizes = args.grid if args.grid else (4, 10)
    for family in (BERNSTEIN, INDICATOR):
        for m in sizes:
            report = validate_partition(family, m, tol=args.tol)
            print(report)
            failures += 0 if report.passed else 1
    if args.joint:
        joint = read_joint_csv(args.joint)
        worst = 0.0
        for axis in range(joint.d):
            m = joint.sizes[axis]
            margin = joint.p.sum(axis=tuple(i for i in range(joint.d) if i != axis))
            worst = max(worst, float(np.max(np.abs(margin - 1.0 / m))))
        bound = density_bound(joint)
        ok = worst < 1e-6
        print(
            f"joint {joint!r}: worst margin deviation {worst:.3e}, "
            f"density bound M={bound.M:.6g} ({bound.method}) -> "
            f"{'pass' if ok else 'FAIL'}"
        )
        failures += 0 if ok else 1
    return EXIT_OK if failures == 0 else EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berncop",
        description="Fit grid-type/Bernstein copulas, sample them, and "
        "aggregate dependent losses into PML tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a uniform-margin joint from data or counts")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV of raw observations, one column per risk")
    src.add_argument("--counts", help="CSV of pre-binned integer cell counts")
    p.add_argument("--grid", type=_grid_sizes, help="grid size m or m1,m2,...")
    p.add_argument("--method", choices=("closed", "closed_form", "qp"), default="closed")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("density", help="evaluate a fitted density on a lattice")
    p.add_argument("--joint", required=True, help="joint CSV from `fit`")
    p.add_argument("--kind", choices=("bernstein", "grid"), default="bernstein")
    p.add_argument("--resolution", type=int, default=101)
    p.add_argument("--points", help="optional CSV of unit-cube points to overlay")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("sample", help="draw samples from a copula")
    p.add_argument(
        "--kind",
        choices=("bernstein", "grid", "independence", "gaussian"),
        default="bernstein",
    )
    p.add_argument("--joint", help="joint CSV (bernstein/grid kinds)")
    p.add_argument("--corr", help="correlation CSV (gaussian kind)")
    p.add_argument("--d", type=int, default=2, help="dimension (independence kind)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("compare", help="run the configured scenarios into a PML table")
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("simulate", help="run a single scenario from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--scenario", help="label of the scenario to run (default: all-in-one)")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("validate", help="run partition and joint invariant checks")
    p.add_argument("--joint", help="joint CSV to check")
    p.add_argument("--grid", type=_grid_sizes, help="family sizes to validate")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (DataError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
