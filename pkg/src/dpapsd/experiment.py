"""Seeded experiment sweeps comparing the private mechanism to baselines.

Each (n, trial) cell generates one instance; every requested mechanism runs
on it against the exact distances. All randomness derives from the config
seed through per-cell substreams, so reports are reproducible regardless of
scheduling. The CSV holds the deterministic per-trial metrics; wall-clock
timings live only in the JSON summary.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .generators import ATTACH_CHAIN, ATTACH_RANDOM, generate_partial_ktree
from .graphs import exact_apsd
from .mechanism import (
    NOISE_EXACT,
    NOISE_MODES,
    PrivacyParams,
    PreparedMechanism,
    derive_seed,
    input_perturbation_apsd,
    output_perturbation_apsd,
    theoretical_error_bound,
)

MECH_MAIN = "main"
MECH_INPUT = "input-perturbation"
MECH_OUTPUT = "output-perturbation"
MECHANISMS = (MECH_MAIN, MECH_INPUT, MECH_OUTPUT)
_MECH_ID = {name: i for i, name in enumerate(MECHANISMS)}


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple
    width: int = 2
    trials: int = 5
    epsilon: float = 1.0
    gamma: float = 0.1
    mechanisms: tuple = (MECH_MAIN, MECH_INPUT)
    seed: int = 0
    noise_mode: str = NOISE_EXACT
    c: float = 5.0
    hop_budget: int | None = None
    edge_keep_prob: float = 1.0
    weight_range: tuple = (0.0, 10.0)
    integer_weights: bool = False
    attachment: str = ATTACH_RANDOM
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "mechanisms", tuple(self.mechanisms))
        if not self.sizes:
            raise ValueError("need at least one size")
        if any(n <= self.width for n in self.sizes):
            raise ValueError("every size must exceed the width")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        unknown = [m for m in self.mechanisms if m not in MECHANISMS]
        if unknown:
            raise ValueError(f"unknown mechanisms {unknown}")
        if self.noise_mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.noise_mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.attachment not in (ATTACH_RANDOM, ATTACH_CHAIN):
            raise ValueError(f"unknown attachment {self.attachment!r}")


@dataclass(frozen=True)
class TrialRecord:
    mechanism: str
    n: int
    trial: int
    instance_seed: int
    noise_seed: int
    max_abs_error: float
    mean_abs_error: float
    runtime_ms: float
    noise_scale: float
    delta: float | None
    depth: int | None
    error: str = ""


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    records: tuple
    medians: dict
    slopes: dict
    exceedance: dict
    settings: dict
    incomplete: tuple


def _error_metrics(released, exact):
    diff = released.values - exact.values
    inf_a, inf_b = np.isinf(released.values), np.isinf(exact.values)
    if (inf_a != inf_b).any():
        return float("inf"), float("inf")
    finite = ~inf_a
    np.fill_diagonal(finite, False)
    if not finite.any():
        return 0.0, 0.0
    abs_diff = np.abs(diff[finite])
    return float(abs_diff.max()), float(abs_diff.mean())


def _run_cell(config, n, trial):
    instance_seed = derive_seed(config.seed, 1, n, trial)
    records = []
    try:
        bundle = generate_partial_ktree(
            n=n,
            k=config.width,
            edge_keep_prob=config.edge_keep_prob,
            weight_range=config.weight_range,
            seed=instance_seed,
            attachment=config.attachment,
            integer_weights=config.integer_weights,
        )
        exact = exact_apsd(bundle.graph)
    except Exception as exc:  # pragma: no cover - generation is well-tested
        for mech in config.mechanisms:
            records.append(
                TrialRecord(
                    mechanism=mech, n=n, trial=trial,
                    instance_seed=instance_seed, noise_seed=0,
                    max_abs_error=float("nan"), mean_abs_error=float("nan"),
                    runtime_ms=float("nan"), noise_scale=float("nan"),
                    delta=None, depth=None, error=f"instance generation: {exc}",
                )
            )
        return records

    for mech in config.mechanisms:
        noise_seed = derive_seed(config.seed, 2, n, trial, _MECH_ID[mech])
        start = time.perf_counter()
        try:
            delta = None
            depth = None
            if mech == MECH_MAIN:
                params = PrivacyParams(
                    epsilon=config.epsilon,
                    noise_mode=config.noise_mode,
                    c=config.c,
                    hop_budget=config.hop_budget,
                )
                out = PreparedMechanism(
                    bundle.graph, bundle.decomposition, params
                ).release(noise_seed)
                released = out.distances
                noise_scale = out.noise_scale
                delta = out.delta_used
                depth = out.depth
            elif mech == MECH_INPUT:
                released = input_perturbation_apsd(
                    bundle.graph, config.epsilon, noise_seed
                )
                noise_scale = 1.0 / config.epsilon
            else:
                released = output_perturbation_apsd(
                    bundle.graph, config.epsilon, noise_seed
                )
                noise_scale = n * (n - 1) / (2.0 * config.epsilon)
            runtime_ms = (time.perf_counter() - start) * 1000.0
            max_err, mean_err = _error_metrics(released, exact)
            records.append(
                TrialRecord(
                    mechanism=mech, n=n, trial=trial,
                    instance_seed=instance_seed, noise_seed=noise_seed,
                    max_abs_error=max_err, mean_abs_error=mean_err,
                    runtime_ms=runtime_ms, noise_scale=noise_scale,
                    delta=delta, depth=depth,
                )
            )
        except Exception as exc:
            runtime_ms = (time.perf_counter() - start) * 1000.0
            records.append(
                TrialRecord(
                    mechanism=mech, n=n, trial=trial,
                    instance_seed=instance_seed, noise_seed=noise_seed,
                    max_abs_error=float("nan"), mean_abs_error=float("nan"),
                    runtime_ms=runtime_ms, noise_scale=float("nan"),
                    delta=None, depth=None, error=str(exc),
                )
            )
    return records


def _fit_slope(points):
    """Least-squares slope of log2(median error) against log2(n)."""
    xs, ys = [], []
    for n, median in points:
        if median is None or not math.isfinite(median) or median <= 0:
            return float("nan")
        xs.append(math.log2(n))
        ys.append(math.log2(median))
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(xs, ys, 1)[0])


def run_experiment(config, csv_path=None, json_path=None):
    """Run the sweep; optionally write the CSV rows and JSON summary."""
    cells = [(n, t) for n in config.sizes for t in range(config.trials)]
    if config.workers > 1:
        import multiprocessing

        with multiprocessing.Pool(config.workers) as pool:
            chunks = pool.starmap(
                _run_cell, [(config, n, t) for n, t in cells], chunksize=1
            )
    else:
        chunks = [_run_cell(config, n, t) for n, t in cells]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (_MECH_ID[r.mechanism], r.n, r.trial))

    medians = {}
    for mech in config.mechanisms:
        for n in config.sizes:
            vals = [
                r.max_abs_error
                for r in records
                if r.mechanism == mech and r.n == n and not r.error
            ]
            medians[(mech, n)] = float(np.median(vals)) if vals else None

    slopes = {
        mech: _fit_slope([(n, medians[(mech, n)]) for n in config.sizes])
        for mech in config.mechanisms
    }

    exceedance = {}
    if MECH_MAIN in config.mechanisms:
        p = max(1, config.width)
        for n in config.sizes:
            bound = theoretical_error_bound(
                n, p, config.c, config.epsilon, config.gamma
            )
            cell = [
                r.max_abs_error
                for r in records
                if r.mechanism == MECH_MAIN and r.n == n and not r.error
            ]
            exceedance[n] = (
                float(np.mean([v > bound for v in cell])) if cell else None
            )

    settings = {
        "noise_mode": config.noise_mode,
        "c": config.c,
        "hop_budget": "auto" if config.hop_budget is None else config.hop_budget,
        "log_base_error_bound": 2,
        "log_base_hop_budget": 1.5,
        "clamp_negative_weights": False,
        "laplace_tail": "exp(-t)",
        "sensitivity": "instance-exact accountant",
        "diagonal": "released as exact zeros",
        "attachment": config.attachment,
        "edge_keep_prob": config.edge_keep_prob,
        "weight_range": list(config.weight_range),
        "integer_weights": config.integer_weights,
    }
    incomplete = tuple(
        (r.mechanism, r.n, r.trial) for r in records if r.error
    )
    report = ExperimentReport(
        config=config,
        records=tuple(records),
        medians=medians,
        slopes=slopes,
        exceedance=exceedance,
        settings=settings,
        incomplete=incomplete,
    )
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            fh.write(report_csv(report))
    if json_path is not None:
        with open(json_path, "w") as fh:
            fh.write(report_json(report))
    return report


CSV_COLUMNS = (
    "mechanism", "n", "trial", "instance_seed", "noise_seed",
    "max_abs_error", "mean_abs_error", "noise_scale", "delta", "depth", "error",
)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(report):
    """Deterministic per-trial rows (timings are deliberately excluded)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.records:
        writer.writerow(
            [
                r.mechanism, r.n, r.trial, r.instance_seed, r.noise_seed,
                _fmt(r.max_abs_error), _fmt(r.mean_abs_error),
                _fmt(r.noise_scale), _fmt(r.delta), _fmt(r.depth), r.error,
            ]
        )
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def report_json(report):
    cfg = report.config
    runtime_medians = {}
    for mech in cfg.mechanisms:
        for n in cfg.sizes:
            vals = [
                r.runtime_ms
                for r in report.records
                if r.mechanism == mech and r.n == n and not r.error
            ]
            if vals:
                runtime_medians[f"{mech}|{n}"] = float(np.median(vals))
    payload = {
        "config": {
            "sizes": list(cfg.sizes),
            "width": cfg.width,
            "trials": cfg.trials,
            "epsilon": cfg.epsilon,
            "gamma": cfg.gamma,
            "mechanisms": list(cfg.mechanisms),
            "seed": cfg.seed,
            "workers": cfg.workers,
        },
        "settings": report.settings,
        "median_max_abs_error": {
            f"{mech}|{n}": _jsonable(report.medians[(mech, n)])
            for mech, n in report.medians
        },
        "slopes": {m: _jsonable(s) for m, s in report.slopes.items()},
        "exceedance_vs_bound": {
            str(n): _jsonable(v) for n, v in report.exceedance.items()
        },
        "incomplete_cells": [list(c) for c in report.incomplete],
        "median_runtime_ms": runtime_medians,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
