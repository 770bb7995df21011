"""Command-line interface.

Subcommands:

* ``test``    -- run the identification test on a CSV time series
* ``mc``      -- run a Monte Carlo grid file and write report files
* ``scaling`` -- print the harmonic-mean scaling factor a_N and z*

Every run writes a manifest next to its outputs with the resolved
options, seed and package version, sufficient to re-run the command
bit-identically.  Exit codes: 0 on success (regardless of the test
outcome), 2 on malformed input, 3 on numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .monte_carlo import parse_grid, run_grid
from .split_test import _TestContext, combine_p_values
from .validation import as_rng
from .var import TimeSeriesSample, estimate_var

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    """Malformed user input (exit code 2)."""


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Read a CSV with one header row and one row per time period."""
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: file is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no data rows after the header")
    names = [name.strip() for name in header]
    data = np.empty((len(rows), len(names)))
    for i, row in enumerate(rows):
        if len(row) != len(names):
            raise InputError(
                f"{path}: row {i + 2} has {len(row)} fields, expected {len(names)}"
            )
        try:
            data[i] = [float(v) for v in row]
        except ValueError as exc:
            raise InputError(f"{path}: row {i + 2}: {exc}") from exc
    if not np.isfinite(data).all():
        raise InputError(f"{path}: contains non-finite values")
    return names, data


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out_dir: Path, command: str, options: dict,
                    inputs: list[str], outputs: list[str], seed: int) -> None:
    _write_json(out_dir / "run_manifest.json", {
        "command": command,
        "options": options,
        "inputs": inputs,
        "outputs": outputs,
        "master_seed": seed,
        "version": __version__,
    })


def _b_labels(k: int) -> list[str]:
    return [f"B{i + 1}{j + 1}" for i in range(k) for j in range(k)]


def cmd_test(args) -> int:
    names, data = _read_csv(Path(args.csv))
    t, k = data.shape
    if not 1 <= args.break_index < t:
        raise InputError(
            f"--break-index must lie strictly inside the sample (1..{t - 1}), "
            f"got {args.break_index}"
        )
    if args.lags < 0:
        raise InputError("--lags must be >= 0")
    if args.splits < 1:
        raise InputError("--splits must be >= 1")
    lo, hi = args.truncation
    if not 0.0 <= lo < hi <= 1.0:
        raise InputError(f"--truncation must satisfy 0 <= lo < hi <= 1, got {lo} {hi}")
    if args.break_index - args.lags < 1:
        raise InputError(
            "--break-index minus --lags leaves no pre-break residuals"
        )

    kurtosis_mode = "fixed3" if args.kurtosis == "gaussian" else "estimated"
    fit = estimate_var(TimeSeriesSample(data, args.break_index), args.lags)
    ctx = _TestContext(fit.residuals, fit.effective_break_index, kurtosis_mode)
    streams = as_rng(args.seed).spawn(args.splits)
    results = [ctx.split_result(stream) for stream in streams]
    first = results[0]
    p_values = [r.p_value for r in results]

    lines = []
    lines.append(f"series: {', '.join(names)}  (T={t}, K={k})")
    lines.append(
        f"VAR({args.lags}) fitted; break index {args.break_index} "
        f"(residual sample: T={fit.residuals.shape[0]}, "
        f"break {fit.effective_break_index})"
    )
    lines.append("")
    lines.append("full-sample structural estimates (column-major B, then lambdas):")
    theta = ctx.estimate.theta
    for label, value in zip(_b_labels(k), theta[: k * k]):
        lines.append(f"  {label:>8s}  {value: .4f}")
    for j, value in enumerate(ctx.estimate.rel_variances):
        lines.append(f"  lambda_{j + 1:<2d} {value: .4f}")
    lines.append("")
    lines.append(
        f"single split: W = {first.statistic:.4f}  df = {first.df}  "
        f"p = {first.p_value:.4f}  (kappa = {first.kurtosis_used:.3f})"
    )

    record = {
        "W": first.statistic,
        "df": first.df,
        "p": first.p_value,
        "kappa": first.kurtosis_used,
        "N": args.splits,
        "seed": args.seed,
        "clamped_count": sum(r.clamped for r in results),
        "estimate": {
            "b_column_major": theta[: k * k].tolist(),
            "lambdas": ctx.estimate.rel_variances.tolist(),
        },
        "variables": names,
        "p_values": p_values,
    }
    if args.splits >= 2:
        combined = combine_p_values(p_values, lo, hi)
        lines.append(
            f"combined over N={args.splits} splits: v_bar = {combined.combined:.4f}  "
            f"(a_N = {combined.scaling:.4f}, kept {combined.kept_count})"
        )
        record["a_N"] = combined.scaling
        record["v_bar"] = combined.combined
        record["kept_count"] = combined.kept_count

    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "test_result.json", record)
    (out_dir / "test_report.txt").write_text(report)
    _write_manifest(
        out_dir, "test",
        options={
            "lags": args.lags, "break_index": args.break_index,
            "splits": args.splits, "truncation": [lo, hi],
            "kurtosis": args.kurtosis,
        },
        inputs=[str(args.csv)],
        outputs=["test_result.json", "test_report.txt"],
        seed=args.seed,
    )
    return EXIT_OK


def cmd_mc(args) -> int:
    path = Path(args.grid)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        spec = parse_grid(text)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc

    report = run_grid(spec, master_seed=args.seed,
                      progress=lambda line: print(line, file=sys.stderr, flush=True))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "mc_report.csv").write_text(report.to_csv())
    (out_dir / "mc_report.json").write_text(report.to_json() + "\n")
    _write_manifest(
        out_dir, "mc",
        options={"grid": text},
        inputs=[str(path)],
        outputs=["mc_report.csv", "mc_report.json"],
        seed=report.master_seed,
    )
    print(f"wrote {out_dir / 'mc_report.csv'} ({len(report.rows)} cells)")
    return EXIT_OK


def cmd_scaling(args) -> int:
    if args.n < 2:
        raise InputError("--n must be >= 2")
    from .split_test import scaling_factor

    a_n, z_star = scaling_factor(args.n)
    print(f"N = {args.n}")
    print(f"z* = {z_star:.12g}")
    print(f"a_N = {a_n:.12g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svarident",
        description="Split-sample identification test for structural VARs "
                    "identified through a variance shift.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the identification test on a CSV")
    p_test.add_argument("csv", help="CSV file: header row, one row per period")
    p_test.add_argument("--lags", type=int, required=True,
                        help="reduced-form VAR order P")
    p_test.add_argument("--break-index", type=int, required=True,
                        help="last time index of the first variance regime")
    p_test.add_argument("--splits", type=int, default=100,
                        help="number of random splits N (default 100)")
    p_test.add_argument("--truncation", type=float, nargs=2, default=(0.2, 0.8),
                        metavar=("LO", "HI"),
                        help="kept p-value quantiles (default 0.2 0.8)")
    p_test.add_argument("--kurtosis", choices=("gaussian", "estimated"),
                        default="estimated",
                        help="kappa handling (default estimated)")
    p_test.add_argument("--seed", type=int, default=0)
    p_test.add_argument("--out", default=".", help="output directory")
    p_test.set_defaults(func=cmd_test)

    p_mc = sub.add_parser("mc", help="run a Monte Carlo grid file")
    p_mc.add_argument("grid", help="grid config file")
    p_mc.add_argument("--out", default=".", help="output directory")
    p_mc.add_argument("--seed", type=int, default=None,
                      help="master seed (overrides the grid file)")
    p_mc.set_defaults(func=cmd_mc)

    p_scaling = sub.add_parser("scaling", help="print a_N and z* for a given N")
    p_scaling.add_argument("--n", type=int, required=True)
    p_scaling.set_defaults(func=cmd_scaling)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
