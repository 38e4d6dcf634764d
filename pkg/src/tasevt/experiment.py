"""Parameter sweeps over analytic and simulated capacities, emitted as CSV."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import evt
from .channel import SystemParams
from .config import ExperimentConfig
from .errors import ConvergenceError, GridError, OutOfRegimeError
from .exact import exact_mean_capacity, exact_outage_capacity
from .montecarlo import SimulationPlan, estimate_mean_capacity, estimate_outage_capacity

CSV_HEADER = (
    "sweep_var", "sweep_value", "n_antennas", "method", "value_nats",
    "ci_low", "ci_high", "status", "reason",
)
_REGIME_OF = {
    "evt": evt.Regime.EXACT,
    "iplr": evt.Regime.IPLR,
    "tplr": evt.Regime.TPLR,
    "tplr-low": evt.Regime.TPLR_LOW,
}


@dataclass
class Row:
    sweep_var: str
    sweep_value: float
    n_antennas: int
    method: str
    value: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    status: str = "ok"
    reason: str = ""


def fmt(value) -> str:
    """12 significant digits; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def derive_seed(seed: int, point_index: int, n_antennas: int) -> int:
    """Independent 64-bit seed per (sweep point, N), stable across runs."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(point_index, n_antennas))
    return int(ss.generate_state(1, np.uint64)[0])


def evaluate(
    method: str,
    params: SystemParams,
    n_antennas: int,
    metric: str = "mean",
    epsilon: float = 0.1,
    *,
    trials: int = 1_000_000,
    seed: int = 0,
    workers: int = 1,
    confidence: float = 0.99,
    shared_interference: bool = False,
):
    """One capacity value ``(value, ci_low, ci_high)`` in nats/s/Hz.

    ``ci_low``/``ci_high`` are None except for ``mc``.  Regime and numerical
    errors propagate to the caller.
    """
    outage = metric == "outage"
    if method == "exact":
        if outage:
            return exact_outage_capacity(params, n_antennas, epsilon), None, None
        return exact_mean_capacity(params, n_antennas), None, None
    if method == "mc":
        plan = SimulationPlan(params, n_antennas, trials, seed, workers, shared_interference)
        est = (
            estimate_outage_capacity(plan, epsilon, confidence)
            if outage
            else estimate_mean_capacity(plan, confidence)
        )
        return est.point, est.ci_low, est.ci_high
    if method == "iplr-scaling":
        if outage:
            return evt.iplr_outage_capacity(params, n_antennas, epsilon, large_n=True), None, None
        return evt.iplr_mean_capacity(params, n_antennas), None, None
    if method in _REGIME_OF:
        regime = _REGIME_OF[method]
        if outage:
            return evt.outage_capacity(params, n_antennas, epsilon, regime), None, None
        return evt.mean_capacity(params, n_antennas, regime), None, None
    raise ValueError(f"unknown method {method!r}")


def run_experiment(config: ExperimentConfig) -> list[Row]:
    """Evaluate every (sweep point, N, method) combination.

    Regime or numerical failures become rows with an empty value, a status
    and a reason; the sweep always runs to completion.
    """
    rows = []
    for idx, (value, params, ns) in enumerate(config.points()):
        for n in ns:
            for method in config.methods:
                row = Row(config.sweep.variable, value, n, method)
                try:
                    v, lo, hi = evaluate(
                        method, params, n, config.metric, config.epsilon,
                        trials=config.trials,
                        seed=derive_seed(config.seed, idx, n),
                        workers=config.workers,
                        confidence=config.confidence,
                        shared_interference=config.shared_interference,
                    )
                    row.value, row.ci_low, row.ci_high = v, lo, hi
                except OutOfRegimeError as exc:
                    row.status, row.reason = "out_of_regime", str(exc)
                except (ConvergenceError, GridError, ArithmeticError) as exc:
                    row.status, row.reason = "numerical_failure", str(exc)
                except ValueError as exc:
                    row.status, row.reason = "invalid", str(exc)
                rows.append(row)
    return rows


def rows_to_csv(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        sweep_value = int(r.sweep_value) if r.sweep_var == "N" else r.sweep_value
        writer.writerow(
            [r.sweep_var, fmt(sweep_value), r.n_antennas, r.method, fmt(r.value),
             fmt(r.ci_low), fmt(r.ci_high), r.status, r.reason]
        )
    return buf.getvalue()


def verify_config(config: ExperimentConfig) -> tuple[bool, str]:
    """MDA tail diagnostics for each distinct parameter set of a config.

    ``[verify] sanity = "exponential"`` checks the pure exponential law
    instead (limit 1).  Other keys: ``grid_factor`` (grid end in units of
    the expected limit, default 60) and ``points`` (default 400).
    """
    opts = config.verify
    factor = float(opts.get("grid_factor", 60.0))
    points = int(opts.get("points", 400))
    lines, ok = [], True
    if opts.get("sanity") == "exponential":
        grid = np.geomspace(1e-2, factor, points)
        diag = evt.verify_mda_condition(None, grid, survival=lambda x: math.exp(-x), expected_limit=1.0)
        diag.label = "exponential sanity"
        return diag.passed, diag.report()
    seen = set()
    for value, params, _ in config.points():
        if params in seen:
            continue
        seen.add(params)
        diag = evt.verify_mda_condition(params, evt.default_mda_grid(params, factor, points))
        diag.label = f"{config.sweep.variable}={fmt(value)}" if config.sweep.variable != "N" else "sinr"
        lines.append(diag.report())
        ok &= diag.passed
    return ok, "\n".join(lines)
