"""Seeded, optionally parallel Monte Carlo harness: threshold sweeps around
t = C * n^(3/2), giant-component experiments, and CSV/JSON emission.

Per-trial seeds are derived by hashing (master seed, cell, trial index), so
results are independent of execution order and parallelism level.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .collapse import (VERDICT_TRIVIAL, VERDICT_NONTRIVIAL, verdict,
                       witness_pipeline)
from .intersection import components, giant_fraction, sample_rig
from .presentation import (sample_binomial, sample_two_stage, sample_uniform,
                           universe_size)

MODEL_UNIFORM = "uniform"
MODEL_BINOMIAL = "binomial"
MODEL_TWO_STAGE = "two-stage"
MODELS = (MODEL_UNIFORM, MODEL_BINOMIAL, MODEL_TWO_STAGE)

DEFAULT_MAX_OPS = 10**8

SWEEP_COLUMNS = (
    "model", "n", "C", "t_or_p", "trials", "trivial_detected",
    "nontrivial_detected", "unknown", "witness_success",
    "mean_largest_fraction", "master_seed",
)

RIG_COLUMNS = (
    "n", "alpha", "beta", "m", "rho", "trial", "seed",
    "largest_fraction", "predicted_fraction",
)


class ExperimentError(ValueError):
    pass


def trial_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit stream seed for one trial of one cell."""
    text = "|".join([str(master_seed)] + [repr(p) for p in parts])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class TrialConfig:
    model: str
    n: int
    c: float
    max_ops: int = DEFAULT_MAX_OPS

    def __post_init__(self):
        if self.model not in MODELS:
            raise ExperimentError(f"unknown model {self.model!r}")


@dataclass(frozen=True)
class TrialRecord:
    model: str
    n: int
    c: float
    t_or_p: float
    seed: int
    verdict: str
    witness_success: bool | None
    witness_failure: str | None
    largest_fraction: float | None
    resource_capped: bool
    wall_time: float

    def replicable_fields(self) -> tuple:
        """Everything except wall time; identical across reruns of a seed."""
        return (self.model, self.n, self.c, self.t_or_p, self.seed,
                self.verdict, self.witness_success, self.witness_failure,
                self.largest_fraction, self.resource_capped)


def run_trial(config: TrialConfig, seed: int) -> TrialRecord:
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    witness_success: bool | None = None
    witness_failure: str | None = None
    largest_fraction: float | None = None

    if config.model == MODEL_UNIFORM:
        t = min(round(config.c * config.n ** 1.5), universe_size(config.n))
        pres = sample_uniform(config.n, t, rng)
        t_or_p: float = t
        v = verdict(pres, max_ops=config.max_ops, record=False)
    elif config.model == MODEL_BINOMIAL:
        p = min(config.c * config.n ** -1.5, 1.0)
        pres = sample_binomial(config.n, p, rng)
        t_or_p = p
        v = verdict(pres, max_ops=config.max_ops, record=False)
    else:
        p = min(config.c * config.n ** -1.5, 1.0)
        split = sample_two_stage(config.n, p, rng)
        t_or_p = p
        wr = witness_pipeline(split)
        witness_success = wr.success
        witness_failure = wr.failure_reason
        largest_fraction = wr.component_fraction
        v = verdict(split.presentation(), max_ops=config.max_ops, record=False)

    return TrialRecord(
        model=config.model, n=config.n, c=config.c, t_or_p=t_or_p, seed=seed,
        verdict=v.kind, witness_success=witness_success,
        witness_failure=witness_failure, largest_fraction=largest_fraction,
        resource_capped=v.resource_capped,
        wall_time=time.perf_counter() - start)


@dataclass(frozen=True)
class SweepGrid:
    n_values: tuple[int, ...]
    c_values: tuple[float, ...]
    trials: int
    model: str
    master_seed: int
    jobs: int = 1
    max_ops: int = DEFAULT_MAX_OPS


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[dict, ...]

    def __post_init__(self):
        for row in self.rows:
            if tuple(row.keys()) != self.columns:
                raise ExperimentError("row keys do not match table columns")


def _run_task(task):
    config, seed = task
    return run_trial(config, seed)


def sweep(grid: SweepGrid) -> Table:
    """Aggregated rates per (n, C) cell; deterministic given the master seed,
    independent of execution interleaving."""
    tasks = []
    for n in grid.n_values:
        for c in grid.c_values:
            config = TrialConfig(grid.model, n, c, grid.max_ops)
            for i in range(grid.trials):
                tasks.append((config, trial_seed(grid.master_seed, n, c, i)))
    if grid.jobs > 1:
        with ProcessPoolExecutor(max_workers=grid.jobs) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        records = [_run_task(t) for t in tasks]

    rows = []
    idx = 0
    for n in grid.n_values:
        for c in grid.c_values:
            cell = records[idx:idx + grid.trials]
            idx += grid.trials
            fractions = [r.largest_fraction for r in cell
                         if r.largest_fraction is not None]
            rows.append({
                "model": grid.model,
                "n": n,
                "C": c,
                "t_or_p": cell[0].t_or_p if cell else "",
                "trials": grid.trials,
                "trivial_detected": sum(r.verdict == VERDICT_TRIVIAL for r in cell),
                "nontrivial_detected": sum(r.verdict == VERDICT_NONTRIVIAL for r in cell),
                "unknown": sum(
                    r.verdict not in (VERDICT_TRIVIAL, VERDICT_NONTRIVIAL)
                    for r in cell),
                "witness_success": sum(bool(r.witness_success) for r in cell),
                "mean_largest_fraction":
                    sum(fractions) / len(fractions) if fractions else "",
                "master_seed": grid.master_seed,
            })
    return Table(SWEEP_COLUMNS, tuple(rows))


def giant_experiment(n: int, alpha: float, beta: float, trials: int,
                     master_seed: int) -> Table:
    """Empirical largest-component fractions of G(n, m, rho) with m = ceil(n^alpha)
    and rho = sqrt(beta / (n m)), next to the fixed-point prediction."""
    if alpha <= 1.0:
        raise ExperimentError(f"need alpha > 1, got {alpha}")
    if beta <= 0.0:
        raise ExperimentError(f"need beta > 0, got {beta}")
    m = math.ceil(n ** alpha)
    rho = math.sqrt(beta / (n * m))
    predicted = giant_fraction(beta)
    rows = []
    for i in range(trials):
        seed = trial_seed(master_seed, "rig", n, alpha, beta, i)
        rng = np.random.default_rng(seed)
        graph = sample_rig(n, m, rho, rng)
        summary = components(graph)
        rows.append({
            "n": n, "alpha": alpha, "beta": beta, "m": m, "rho": rho,
            "trial": i, "seed": seed,
            "largest_fraction": summary.largest_fraction,
            "predicted_fraction": predicted,
        })
    return Table(RIG_COLUMNS, tuple(rows))


def emit(table: Table, fmt: str, path: str) -> None:
    """Write a table as CSV (header always present) or JSON."""
    import csv

    if fmt not in ("csv", "json"):
        raise ExperimentError(f"unknown format {fmt!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if fmt == "csv":
                writer = csv.DictWriter(fh, fieldnames=list(table.columns))
                writer.writeheader()
                for row in table.rows:
                    writer.writerow(row)
            else:
                json.dump({"columns": list(table.columns),
                           "rows": list(table.rows)}, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write table to {path}: {exc}") from exc


def read_table(path: str) -> Table:
    """Round-trip reader for JSON tables."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read table from {path}: {exc}") from exc
    return Table(tuple(data["columns"]), tuple(data["rows"]))
