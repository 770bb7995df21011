"""Monte Carlo harness: rejection-frequency cells and grid runs.

A cell is one (DGP, T, fitted order, method, kurtosis mode, splits,
truncation) combination evaluated over independent replications.  Each
replication simulates a sample, fits the reduced-form VAR, runs the
identification test on the residuals, and records a rejection at the
5% level.  Replications are independent work units keyed by
(master seed, replication index), so results do not depend on
execution order.  Raw p-values are kept so that other levels can be
recomputed.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .dgp import BUILTIN_DGPS, DgpConfig, break_index_for, get_dgp, simulate_sample
from .split_test import multi_split_test, single_split_test
from .var import estimate_var

NOMINAL_LEVEL = 0.05

# A cell is marked invalid when more than this share of replications fails.
MAX_FAILURE_SHARE = 0.005

METHODS = ("W", "AveW")


@dataclass(frozen=True)
class McRow:
    """One report row: a cell's design and its rejection frequency."""

    dgp: str
    lambdas: tuple
    dist: str
    n_obs: int
    fitted_order: int
    method: str
    kurtosis_mode: str
    n_splits: int
    truncation: tuple
    replications: int
    seed: int
    rejection_rate: float
    failures: int
    clamped_total: int
    valid: bool
    wall_time: float
    p_values: tuple = field(repr=False, default=())

    def as_record(self, include_p_values: bool = False) -> dict:
        rec = asdict(self)
        if not include_p_values:
            rec.pop("p_values")
        return rec


@dataclass(frozen=True)
class McReport:
    """A collection of cells plus the master seed that produced them."""

    rows: tuple
    master_seed: int

    CSV_FIELDS = (
        "dgp", "lambdas", "dist", "n_obs", "fitted_order", "method",
        "kurtosis_mode", "n_splits", "truncation", "replications", "seed",
        "rejection_rate", "failures", "clamped_total", "valid", "wall_time",
    )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            rec = row.as_record()
            rec["lambdas"] = " ".join(f"{v:g}" for v in row.lambdas)
            rec["truncation"] = " ".join(f"{v:g}" for v in row.truncation)
            writer.writerow(rec)
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "master_seed": self.master_seed,
            "nominal_level": NOMINAL_LEVEL,
            "cells": [row.as_record(include_p_values=True) for row in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def run_cell(config: DgpConfig, n_obs: int, fitted_order: int = 0,
             method: str = "W", kurtosis_mode: str = "estimated",
             n_splits: int = 100, truncation: tuple[float, float] = (0.2, 0.8),
             replications: int = 1000, master_seed: int = 0) -> McRow:
    """Rejection frequency of one test design over independent replications.

    Per-replication failures (non-positive-definite covariances and the
    like) count as non-rejections and are tallied; the cell is marked
    invalid when they exceed 0.5% of replications.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    df = config.student_df
    if kurtosis_mode == "estimated" and df is not None and df <= 4:
        raise ValueError(
            f"t({df:g}) shocks have infinite kurtosis; the estimated-kurtosis "
            "mode requires more than 4 degrees of freedom"
        )
    n_obs = int(n_obs)
    replications = int(replications)
    if replications < 1:
        raise ValueError("replications must be >= 1")

    start = time.perf_counter()
    p_values = np.empty(replications)
    rejections = 0
    failures = 0
    clamped_total = 0
    for rep in range(replications):
        rng = np.random.default_rng([master_seed, rep])
        try:
            sample = simulate_sample(config, n_obs, rng)
            fit = estimate_var(sample, fitted_order)
            if method == "W":
                result = single_split_test(
                    fit.residuals, fit.effective_break_index,
                    kurtosis_mode=kurtosis_mode, random_state=rng,
                )
                p = result.p_value
                clamped_total += result.clamped
            else:
                result = multi_split_test(
                    fit.residuals, fit.effective_break_index,
                    n_splits=n_splits, kurtosis_mode=kurtosis_mode,
                    truncation=truncation, random_state=rng,
                )
                p = result.combined
                clamped_total += result.clamped_count
        except ValueError:
            failures += 1
            p_values[rep] = np.nan
            continue
        p_values[rep] = p
        rejections += p <= NOMINAL_LEVEL

    return McRow(
        dgp=config.name,
        lambdas=tuple(config.rel_variances.tolist()),
        dist=config.shock_distribution,
        n_obs=n_obs,
        fitted_order=int(fitted_order),
        method=method,
        kurtosis_mode=kurtosis_mode,
        n_splits=int(n_splits) if method == "AveW" else 1,
        truncation=tuple(truncation),
        replications=replications,
        seed=int(master_seed),
        rejection_rate=rejections / replications,
        failures=failures,
        clamped_total=clamped_total,
        valid=failures <= MAX_FAILURE_SHARE * replications,
        wall_time=time.perf_counter() - start,
        p_values=tuple(p_values.tolist()),
    )


# --- grid files ------------------------------------------------------------
#
# A grid file is a flat key = value text file; '#' starts a comment.
# Values listed with '|' are variants expanded in a Cartesian product;
# numbers within a variant are separated by commas or spaces.
#
#   dgp = dgp1                     required, single name
#   T = 200, 500, 1000, 2000      required, list of sample sizes
#   lambdas = 2,1 | 2,2           required, variance-shift variants
#   method = W | AveW             required
#   replications = 1000           required
#   dist = gaussian | t(5)        default gaussian
#   kurtosis = estimated | fixed3 default estimated
#   order = 0                     fitted VAR order(s), default 0
#   splits = 100                  default 100
#   truncation = 0.2, 0.8         default 0.2, 0.8; '|' variants allowed
#   seed = 0                      default 0, overridden by run_grid's seed
#
# Cells are enumerated in document order of the keys above; the cell at
# index i runs with seed master_seed + i, so a one-cell grid reproduces
# run_cell with the master seed.

_REQUIRED_KEYS = ("dgp", "t", "lambdas", "method", "replications")
_KNOWN_KEYS = _REQUIRED_KEYS + (
    "dist", "kurtosis", "order", "splits", "truncation", "seed",
)


@dataclass(frozen=True)
class GridSpec:
    """Parsed grid file: lists of variants per dimension."""

    dgp: str
    sample_sizes: tuple
    lambda_variants: tuple
    methods: tuple
    replications: int
    dists: tuple = ("gaussian",)
    kurtosis_modes: tuple = ("estimated",)
    orders: tuple = (0,)
    n_splits: int = 100
    truncations: tuple = ((0.2, 0.8),)
    seed: int = 0

    def cells(self):
        """Cell parameter dicts in deterministic enumeration order."""
        out = []
        for dist in self.dists:
            for lambdas in self.lambda_variants:
                for n_obs in self.sample_sizes:
                    for order in self.orders:
                        for method in self.methods:
                            for kmode in self.kurtosis_modes:
                                for trunc in self.truncations:
                                    out.append(dict(
                                        dgp=self.dgp, dist=dist,
                                        lambdas=lambdas, n_obs=n_obs,
                                        fitted_order=order, method=method,
                                        kurtosis_mode=kmode, truncation=trunc,
                                    ))
        return out


def _split_variants(value: str) -> list[str]:
    return [part.strip() for part in value.split("|") if part.strip()]


def _numbers(text: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def parse_grid(text: str) -> GridSpec:
    """Parse grid-file text into a :class:`GridSpec`."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"grid line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key not in _KNOWN_KEYS:
            raise ValueError(f"grid line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ValueError(f"grid line {lineno}: duplicate key {key!r}")
        if not value:
            raise ValueError(f"grid line {lineno}: empty value for {key!r}")
        entries[key] = value

    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        raise ValueError(f"grid is missing required keys: {missing}")

    dgp = entries["dgp"].strip().lower()
    if dgp not in BUILTIN_DGPS:
        raise ValueError(f"unknown DGP {dgp!r}; choose from {sorted(BUILTIN_DGPS)}")

    sizes = tuple(int(v) for v in _numbers(entries["t"]))
    lambdas = tuple(_numbers(v) for v in _split_variants(entries["lambdas"]))
    methods = tuple(_split_variants(entries["method"]))
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    if not sizes or not lambdas or not methods:
        raise ValueError("grid expands to no cells")

    kwargs: dict = {}
    if "dist" in entries:
        kwargs["dists"] = tuple(_split_variants(entries["dist"]))
    if "kurtosis" in entries:
        modes = tuple(_split_variants(entries["kurtosis"]))
        for m in modes:
            if m not in ("estimated", "fixed3", "gaussian"):
                raise ValueError(f"unknown kurtosis mode {m!r}")
        kwargs["kurtosis_modes"] = modes
    if "order" in entries:
        kwargs["orders"] = tuple(int(v) for v in _numbers(entries["order"]))
    if "splits" in entries:
        kwargs["n_splits"] = int(float(entries["splits"]))
    if "truncation" in entries:
        truncs = []
        for variant in _split_variants(entries["truncation"]):
            pair = _numbers(variant)
            if len(pair) != 2:
                raise ValueError(f"truncation variant {variant!r} is not a pair")
            truncs.append(tuple(pair))
        kwargs["truncations"] = tuple(truncs)
    if "seed" in entries:
        kwargs["seed"] = int(float(entries["seed"]))

    return GridSpec(
        dgp=dgp,
        sample_sizes=sizes,
        lambda_variants=lambdas,
        methods=methods,
        replications=int(float(entries["replications"])),
        **kwargs,
    )


def run_grid(grid: GridSpec | str, master_seed: int | None = None,
             progress=None) -> McReport:
    """Run every cell of a grid; deterministic given the master seed.

    ``grid`` is a :class:`GridSpec` or raw grid-file text.  The cell at
    enumeration index i uses seed ``master_seed + i``.  ``progress``,
    when given, is called with a status line per finished cell.
    """
    spec = parse_grid(grid) if isinstance(grid, str) else grid
    seed = spec.seed if master_seed is None else int(master_seed)
    cells = spec.cells()
    rows = []
    for index, cell in enumerate(cells):
        config = get_dgp(cell["dgp"], lambdas=cell["lambdas"],
                         distribution=cell["dist"])
        row = run_cell(
            config,
            n_obs=cell["n_obs"],
            fitted_order=cell["fitted_order"],
            method=cell["method"],
            kurtosis_mode=cell["kurtosis_mode"],
            n_splits=spec.n_splits,
            truncation=cell["truncation"],
            replications=spec.replications,
            master_seed=seed + index,
        )
        rows.append(row)
        if progress is not None:
            progress(
                f"cell {index + 1}/{len(cells)}: {row.dgp} lambdas={row.lambdas} "
                f"T={row.n_obs} {row.method} -> {row.rejection_rate:.3f} "
                f"({row.wall_time:.1f}s)"
            )
    return McReport(rows=tuple(rows), master_seed=seed)
