"""Experiment configuration: TOML files, dB conversion and ratio expansion.

A config has three tables::

    [params]            # unit = "db" | "linear" (required)
    p_max = 0.0         # primitives: p_max, q_limit (alias q), p_p, noise,
    p_p = 0.0           #   mean_g, mean_h, mean_q (means default to 1 linear)
    noise = -10.0       # ratios: inr, sir_q, sir_p, snr_q, snr_p, pqr

    [sweep]
    variable = "Q"      # Q | P_max | N
    start = -20.0
    stop = 20.0
    steps = 9           # or: values = [...]
    scale = "linear"    # or "log" (geometric spacing)

    [run]
    metric = "mean"     # or "outage"
    n_antennas = [4, 10, 20]
    methods = ["exact", "evt", "mc"]
    trials = 1000000
    seed = 1
    epsilon = 0.1
    out = "fig2.csv"
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channel import SystemParams
from .errors import ConfigError, DomainError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

PRIMITIVES = ("p_max", "q_limit", "p_p", "noise", "mean_g", "mean_h", "mean_q")
_ALIASES = {"q": "q_limit", "pmax": "p_max", "pp": "p_p", "sigma2": "noise"}
# ratio name -> (numerator, denominator)
RATIOS = {
    "inr": ("p_p", "noise"),
    "sir_q": ("q_limit", "p_p"),
    "sir_p": ("p_max", "p_p"),
    "snr_q": ("q_limit", "noise"),
    "snr_p": ("p_max", "noise"),
    "pqr": ("p_max", "q_limit"),
}
METHODS = ("exact", "evt", "iplr", "iplr-scaling", "tplr", "tplr-low", "mc")
SWEEP_VARIABLES = {"q": "Q", "q_limit": "Q", "p_max": "P_max", "pmax": "P_max", "n": "N"}
_SWEEP_FIELD = {"Q": "q_limit", "P_max": "p_max"}
_RATIO_RTOL = 1e-9


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def resolve_params(primitives: dict, ratios: Optional[dict] = None) -> SystemParams:
    """Expand ratio inputs into primitive parameters (all linear).

    Each ratio fills in whichever of its two primitives is missing.  A ratio
    whose primitives are both known must agree with them, otherwise a
    :class:`ConfigError` is raised; primitives are never silently overridden.
    """
    known = {k: float(v) for k, v in primitives.items() if v is not None}
    ratios = {k: float(v) for k, v in (ratios or {}).items()}
    for name in ratios:
        if name not in RATIOS:
            raise ConfigError(f"unknown ratio {name!r}")
    changed = True
    while changed:
        changed = False
        for name, value in ratios.items():
            num, den = RATIOS[name]
            if num in known and den not in known:
                known[den] = known[num] / value
                changed = True
            elif den in known and num not in known:
                known[num] = known[den] * value
                changed = True
    for name, value in ratios.items():
        num, den = RATIOS[name]
        if num in known and den in known:
            actual = known[num] / known[den]
            if abs(actual - value) > _RATIO_RTOL * abs(value):
                raise ConfigError(
                    f"ratio {name} = {value:.6g} conflicts with {num}/{den} = {actual:.6g}"
                )
    for mean in ("mean_g", "mean_h", "mean_q"):
        known.setdefault(mean, 1.0)
    missing = [p for p in PRIMITIVES if p not in known]
    if missing:
        raise ConfigError(f"parameters not determined: {', '.join(missing)}")
    try:
        return SystemParams(**{p: known[p] for p in PRIMITIVES})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class Sweep:
    variable: str
    values: list

    def __post_init__(self):
        if len(self.values) < 2:
            raise ConfigError("[sweep] needs at least 2 steps")


@dataclass
class ExperimentConfig:
    """Parsed experiment; ``primitives``/``ratios`` stay in config units until expanded."""

    unit: str
    primitives: dict
    ratios: dict
    sweep: Sweep
    n_antennas: list = field(default_factory=lambda: [10])
    methods: list = field(default_factory=lambda: ["evt"])
    metric: str = "mean"
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    epsilon: float = 0.1
    confidence: float = 0.99
    shared_interference: bool = False
    out: Optional[str] = None
    verify: dict = field(default_factory=dict)

    def _to_linear(self, value: float) -> float:
        return db_to_linear(value) if self.unit == "db" else float(value)

    def points(self):
        """Yield ``(sweep_value, SystemParams, n_antennas_list)`` per sweep point."""
        for value in self.sweep.values:
            prims = {k: self._to_linear(v) for k, v in self.primitives.items()}
            if self.sweep.variable == "N":
                ns = [int(value)]
            else:
                prims[_SWEEP_FIELD[self.sweep.variable]] = self._to_linear(value)
                ns = list(self.n_antennas)
            ratios = {k: self._to_linear(v) for k, v in self.ratios.items()}
            yield value, resolve_params(prims, ratios), ns


def _require(table: dict, key: str, where: str, kind=None):
    if key not in table:
        raise ConfigError(f"{where}: missing required key {key!r}")
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {kind}, got {value!r}")
    return value


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _parse_sweep(table: dict) -> Sweep:
    where = "[sweep]"
    raw = str(_require(table, "variable", where))
    var = SWEEP_VARIABLES.get(raw.lower())
    if var is None:
        raise ConfigError(f"{where}.variable: must be one of Q, P_max, N (got {raw!r})")
    if "values" in table:
        values = [_number(v, f"{where}.values") for v in table["values"]]
    else:
        start = _number(_require(table, "start", where), f"{where}.start")
        stop = _number(_require(table, "stop", where), f"{where}.stop")
        steps = _require(table, "steps", where, int)
        if steps < 2:
            raise ConfigError(f"{where}.steps: must be >= 2 (got {steps})")
        scale = table.get("scale", "linear")
        if scale == "linear":
            values = list(np.linspace(start, stop, steps))
        elif scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"{where}: log scale needs positive start/stop")
            values = list(np.geomspace(start, stop, steps))
        else:
            raise ConfigError(f"{where}.scale: must be 'linear' or 'log' (got {scale!r})")
    if var == "N":
        ints = []
        for v in values:
            n = int(round(v))
            if n < 1:
                raise ConfigError(f"{where}: antenna counts must be >= 1 (got {v})")
            if n not in ints:
                ints.append(n)
        values = ints
    return Sweep(var, [float(v) if var != "N" else v for v in values])


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a decoded TOML document."""
    unknown = set(data) - {"params", "sweep", "run", "verify"}
    if unknown:
        raise ConfigError(f"unknown table(s): {', '.join(sorted(unknown))}")
    params = _require(data, "params", "config", dict)
    sweep = _parse_sweep(_require(data, "sweep", "config", dict))
    run = data.get("run", {})

    unit = str(_require(params, "unit", "[params]")).lower()
    if unit not in ("db", "linear"):
        raise ConfigError(f"[params].unit: must be 'db' or 'linear' (got {unit!r})")
    primitives, ratios = {}, {}
    for key, value in params.items():
        if key == "unit":
            continue
        name = _ALIASES.get(key.lower(), key.lower())
        if name in PRIMITIVES:
            primitives[name] = _number(value, f"[params].{key}")
        elif name in RATIOS:
            ratios[name] = _number(value, f"[params].{key}")
        else:
            raise ConfigError(f"[params].{key}: unknown parameter")
    swept = _SWEEP_FIELD.get(sweep.variable)
    if swept in primitives:
        raise ConfigError(f"[params].{swept} conflicts with the sweep over {sweep.variable}")

    known_run = {
        "metric", "n_antennas", "methods", "trials", "seed", "workers", "epsilon",
        "confidence", "shared_interference", "out",
    }
    extra = set(run) - known_run
    if extra:
        raise ConfigError(f"[run]: unknown key(s) {', '.join(sorted(extra))}")
    cfg = ExperimentConfig(unit=unit, primitives=primitives, ratios=ratios, sweep=sweep)
    if "n_antennas" in run:
        if sweep.variable == "N":
            raise ConfigError("[run].n_antennas must be omitted when sweeping N")
        ns = run["n_antennas"]
        ns = ns if isinstance(ns, list) else [ns]
        if not ns or any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in ns):
            raise ConfigError(f"[run].n_antennas: positive integers required (got {ns!r})")
        cfg.n_antennas = ns
    methods = run.get("methods", cfg.methods)
    if not isinstance(methods, list) or not methods:
        raise ConfigError("[run].methods: non-empty list required")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"[run].methods: unknown method {m!r} (choose from {', '.join(METHODS)})")
    cfg.methods = list(methods)
    cfg.metric = run.get("metric", "mean")
    if cfg.metric not in ("mean", "outage"):
        raise ConfigError(f"[run].metric: must be 'mean' or 'outage' (got {cfg.metric!r})")
    for key in ("trials", "seed", "workers"):
        if key in run:
            if not isinstance(run[key], int) or isinstance(run[key], bool):
                raise ConfigError(f"[run].{key}: integer required (got {run[key]!r})")
            setattr(cfg, key, run[key])
    if cfg.trials < 1 or cfg.workers < 1:
        raise ConfigError("[run]: trials and workers must be >= 1")
    for key in ("epsilon", "confidence"):
        if key in run:
            v = _number(run[key], f"[run].{key}")
            if not 0.0 < v < 1.0:
                raise ConfigError(f"[run].{key}: must lie in (0, 1) (got {v})")
            setattr(cfg, key, v)
    cfg.shared_interference = bool(run.get("shared_interference", False))
    cfg.out = run.get("out")
    cfg.verify = dict(data.get("verify", {}))
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a TOML experiment file.

    Syntax errors are reported with the parser's line/column position.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
