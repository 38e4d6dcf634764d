"""Gumbel asymptotics for the selected-antenna SINR and rate.

Normalizing constants come either from exact quantiles of the per-antenna
SINR law (``Regime.EXACT``) or from the closed forms of the two limiting
regimes:

* interference-power-limited (IPLR, ``P_max -> inf``): Pareto-like tail,
  capacity grows like ``ln N``;
* transmit-power-limited (TPLR, ``Q >> P_max``): exponential tail, capacity
  grows like ``ln ln N``; the low-PU-interference variant drops ``P_p q``.

The regime is always chosen by the caller.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channel import SystemParams
from .errors import GridError, OutOfRegimeError
from .exact import DEFAULT_SOLVER, QuantileSolverConfig, sinr_cdf_max, sinr_isf, sinr_sf
from .special_functions import (
    EULER_GAMMA,
    lambert_w0_from_log,
    scaled_upper_incomplete_gamma_zero,
)


class Regime(str, enum.Enum):
    EXACT = "exact"
    IPLR = "iplr"
    TPLR = "tplr"
    TPLR_LOW = "tplr_low"


@dataclass(frozen=True)
class GumbelConstants:
    """Location ``a_n`` and scale ``b_n`` of the Gumbel law for the maximum of N draws.

    ``family`` is ``"rate"`` (constants in nats) or ``"sinr"`` (linear SINR).
    """

    a_n: float
    b_n: float
    n_antennas: int
    family: str = "rate"
    regime: Regime = Regime.EXACT

    def __post_init__(self):
        if not self.b_n > 0:
            raise OutOfRegimeError(f"Gumbel scale must be positive, got b_n={self.b_n}")
        if self.family not in ("rate", "sinr"):
            raise ValueError(f"unknown family {self.family!r}")


def gumbel_cdf(x, constants: GumbelConstants):
    """G(x) = exp(-exp(-(x - a_n) / b_n))."""
    z = (np.asarray(x, dtype=float) - constants.a_n) / constants.b_n
    out = np.exp(-np.exp(-z))
    return float(out) if out.ndim == 0 else out


def loglog_inv(epsilon: float) -> float:
    """ln ln(1/epsilon); negative for epsilon > 1/e."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.log(-math.log(epsilon))


def _check_n(n_antennas: int, minimum: int = 1) -> int:
    if int(n_antennas) != n_antennas or n_antennas < minimum:
        raise ValueError(f"n_antennas must be an integer >= {minimum}, got {n_antennas}")
    return int(n_antennas)


# -- exact-quantile constants ---------------------------------------------------


def gumbel_constants_sinr(
    params: SystemParams, n_antennas: int, cfg: QuantileSolverConfig = DEFAULT_SOLVER
) -> GumbelConstants:
    """SINR-family constants: a = F^{-1}(1 - 1/N), b = F^{-1}(1 - 1/(Ne)) - a."""
    n = _check_n(n_antennas, 2)
    a = sinr_isf(1.0 / n, params, cfg)
    return GumbelConstants(a, sinr_isf(1.0 / (n * math.e), params, cfg) - a, n, "sinr")


def gumbel_constants_rate(
    params: SystemParams, n_antennas: int, cfg: QuantileSolverConfig = DEFAULT_SOLVER
) -> GumbelConstants:
    """Rate-family constants from exact SINR quantiles.

    a_n = ln(1 + F^{-1}(1 - 1/N)),
    b_n = ln[(1 + F^{-1}(1 - 1/(Ne))) / (1 + F^{-1}(1 - 1/N))].
    """
    n = _check_n(n_antennas, 2)
    a = math.log1p(sinr_isf(1.0 / n, params, cfg))
    b = math.log1p(sinr_isf(1.0 / (n * math.e), params, cfg)) - a
    return GumbelConstants(a, b, n, "rate")


def asymptotic_mean_capacity(constants: GumbelConstants) -> float:
    """Mean of the Gumbel law: a_n + b_n * E0 (nats/s/Hz)."""
    return constants.a_n + constants.b_n * EULER_GAMMA


def asymptotic_outage_capacity(constants: GumbelConstants, epsilon: float) -> float:
    """epsilon-quantile of the Gumbel law: a_n - b_n ln ln(1/epsilon).

    For epsilon > 1/e the log-log term is negative and the result exceeds a_n.
    """
    return constants.a_n - constants.b_n * loglog_inv(epsilon)


# -- interference-power-limited regime ------------------------------------------


def iplr_c_p(params: SystemParams) -> float:
    """c_p = exp(s) Gamma(0, s) / (P_p q) with s = noise / (P_p q)."""
    return scaled_upper_incomplete_gamma_zero(params.noise_to_pu) / (params.p_p * params.mean_q)


def _iplr_scale(params: SystemParams) -> float:
    return iplr_c_p(params) * params.q_limit * params.mean_g / params.mean_h


def iplr_constants(params: SystemParams, n_antennas: int) -> GumbelConstants:
    """Closed-form IPLR constants; b_n -> 1 as N grows."""
    n = _check_n(n_antennas)
    k = _iplr_scale(params) * n
    a = math.log1p(k)
    b = math.log1p(k * math.e) - a
    return GumbelConstants(a, b, n, "rate", Regime.IPLR)


def iplr_mean_capacity(params: SystemParams, n_antennas: int) -> float:
    """IPLR scaling law ln(1 + c_p Q g N / h) + E0 (b_n replaced by its limit 1)."""
    n = _check_n(n_antennas)
    return math.log1p(_iplr_scale(params) * n) + EULER_GAMMA


def iplr_outage_capacity(
    params: SystemParams, n_antennas: int, epsilon: float, large_n: bool = False
) -> float:
    """IPLR outage capacity.

    The default keeps the finite-N scale b_n; ``large_n=True`` uses b_n = 1,
    which leaves a constant gap E0 + ln ln(1/epsilon) below
    :func:`iplr_mean_capacity`.
    """
    if large_n:
        return iplr_mean_capacity(params, n_antennas) - EULER_GAMMA - loglog_inv(epsilon)
    return asymptotic_outage_capacity(iplr_constants(params, n_antennas), epsilon)


# -- transmit-power-limited regime -----------------------------------------------


def _tplr_rate(params: SystemParams, log_arg: float, n: int) -> float:
    # ln(1 + K W(X) - P_max g / (P_p q)) with K = P_max g / noise; the last term
    # equals K * s, s = noise / (P_p q).
    s = params.noise_to_pu
    w = lambert_w0_from_log(log_arg)
    inner = 1.0 + params.snr_max * (w - s)
    if not inner > 0:
        raise OutOfRegimeError(
            f"TPLR closed form undefined at N={n}: 1 + K (W - s) = {inner:.3g} <= 0"
        )
    return math.log(inner)


def tplr_constants(params: SystemParams, n_antennas: int) -> GumbelConstants:
    """TPLR constants through the Lambert-W inverse of the exponential-type tail.

    The W argument is ``N c_q s e^s`` (with an extra factor e for b_n); it is
    handled in log form so that small P_p q does not overflow.
    """
    n = _check_n(n_antennas)
    c_q = params.c_q
    if c_q <= 0:
        raise OutOfRegimeError("c_q underflowed to zero; TPLR constants undefined")
    s = params.noise_to_pu
    log_x = math.log(n) + math.log(c_q) + s + math.log(s)
    a = _tplr_rate(params, log_x, n)
    b = _tplr_rate(params, log_x + 1.0, n) - a
    if not b > 0:
        raise OutOfRegimeError(f"TPLR scale b_n={b:.3g} not positive at N={n}")
    return GumbelConstants(a, b, n, "rate", Regime.TPLR)


def tplr_mean_capacity(params: SystemParams, n_antennas: int) -> float:
    return asymptotic_mean_capacity(tplr_constants(params, n_antennas))


def tplr_outage_capacity(params: SystemParams, n_antennas: int, epsilon: float) -> float:
    return asymptotic_outage_capacity(tplr_constants(params, n_antennas), epsilon)


def tplr_low_constants(params: SystemParams, n_antennas: int) -> GumbelConstants:
    """TPLR constants with PU interference neglected.

    a = ln(1 + K ln(c_q N)),  b = ln(1 + K / (1 + K ln(c_q N))),  K = P_max g / noise.
    """
    n = _check_n(n_antennas)
    c_q = params.c_q
    if not c_q * n > 1.0:
        raise OutOfRegimeError(f"low-interference TPLR needs c_q N > 1, got {c_q * n:.3g}")
    k = params.snr_max
    log_cn = math.log(c_q * n)
    a = math.log1p(k * log_cn)
    b = math.log1p(k / (1.0 + k * log_cn))
    return GumbelConstants(a, b, n, "rate", Regime.TPLR_LOW)


def tplr_low_interference(
    params: SystemParams, n_antennas: int, epsilon: Optional[float] = None
) -> float:
    """Low-interference TPLR capacity: mean if ``epsilon`` is None, else outage."""
    c = tplr_low_constants(params, n_antennas)
    if epsilon is None:
        return asymptotic_mean_capacity(c)
    return asymptotic_outage_capacity(c, epsilon)


# -- regime dispatch -------------------------------------------------------------


def gumbel_constants(
    params: SystemParams,
    n_antennas: int,
    regime: Regime = Regime.EXACT,
    cfg: QuantileSolverConfig = DEFAULT_SOLVER,
) -> GumbelConstants:
    """Rate-family constants for an explicitly selected regime."""
    regime = Regime(regime)
    if regime is Regime.EXACT:
        return gumbel_constants_rate(params, n_antennas, cfg)
    if regime is Regime.IPLR:
        return iplr_constants(params, n_antennas)
    if regime is Regime.TPLR:
        return tplr_constants(params, n_antennas)
    return tplr_low_constants(params, n_antennas)


def mean_capacity(params: SystemParams, n_antennas: int, regime: Regime = Regime.EXACT) -> float:
    """a_n + b_n E0 with the selected regime's constants."""
    return asymptotic_mean_capacity(gumbel_constants(params, n_antennas, regime))


def outage_capacity(
    params: SystemParams, n_antennas: int, epsilon: float, regime: Regime = Regime.EXACT
) -> float:
    """a_n - b_n ln ln(1/epsilon) with the selected regime's constants."""
    return asymptotic_outage_capacity(gumbel_constants(params, n_antennas, regime), epsilon)


def gumbel_fit_error(params: SystemParams, n_antennas: int, points: int = 400) -> float:
    """sup-distance between the Gumbel SINR law and the exact F(x)**N on a grid.

    The grid spans the exact 1e-6 .. 1 - 1e-9 quantiles of the maximum.
    """
    c = gumbel_constants_sinr(params, n_antennas)
    lo = sinr_isf(-math.expm1(math.log(1e-6) / n_antennas), params)
    hi = sinr_isf(1e-9 / n_antennas, params)
    x = np.linspace(lo, hi, points)
    return float(np.max(np.abs(gumbel_cdf(x, c) - sinr_cdf_max(x, params, n_antennas))))


# -- maximum-domain-of-attraction check -------------------------------------------

MDA_DERIVATIVE_TOL = 0.05
MDA_LIMIT_RTOL = 0.05
_MIN_RESOLVABLE_SF = 1e-280


@dataclass
class MdaDiagnostics:
    """Numerical evidence that a tail lies in the Gumbel domain of attraction.

    ``hazard_reciprocal`` is (1 - F) / f on ``x_grid`` and ``derivative_of_ratio``
    its derivative along the grid.  The sufficient condition asks the
    derivative to vanish in the tail; for the SINR law the ratio itself tends
    to ``expected_limit`` = P_max g / noise.
    """

    x_grid: np.ndarray
    hazard_reciprocal: np.ndarray
    derivative_of_ratio: np.ndarray
    limit_estimate: float
    expected_limit: float
    derivative_tol: float = MDA_DERIVATIVE_TOL
    limit_rtol: float = MDA_LIMIT_RTOL
    label: str = "sinr"

    @property
    def tail_derivative(self) -> float:
        return float(self.derivative_of_ratio[-1])

    @property
    def derivative_ok(self) -> bool:
        return abs(self.tail_derivative) <= self.derivative_tol

    @property
    def limit_ok(self) -> bool:
        return abs(self.limit_estimate - self.expected_limit) <= self.limit_rtol * self.expected_limit

    @property
    def passed(self) -> bool:
        return self.derivative_ok and self.limit_ok

    def report(self) -> str:
        mark = lambda ok: "PASS" if ok else "FAIL"
        rel = abs(self.limit_estimate / self.expected_limit - 1.0)
        return "\n".join(
            [
                f"MDA check ({self.label}), tail point x = {self.x_grid[-1]:.6g}",
                f"  [{mark(self.derivative_ok)}] |d/dx (1-F)/f| = {abs(self.tail_derivative):.3e}"
                f" <= {self.derivative_tol}",
                f"  [{mark(self.limit_ok)}] (1-F)/f = {self.limit_estimate:.6g}"
                f" vs limit {self.expected_limit:.6g} (rel. err {rel:.3e} <= {self.limit_rtol})",
                f"  overall: {mark(self.passed)}",
            ]
        )


def verify_mda_condition(
    params: Optional[SystemParams],
    x_grid,
    survival: Optional[Callable[[float], float]] = None,
    expected_limit: Optional[float] = None,
    rel_step: float = 1e-5,
) -> MdaDiagnostics:
    """Evaluate the Gumbel-MDA tail diagnostics on ``x_grid``.

    The density is a central difference of the survival function with step
    ``x * rel_step``.  Passing ``survival`` (and ``expected_limit``) replaces
    the SINR law, e.g. ``lambda x: math.exp(-x)`` with limit 1.

    Raises
    ------
    GridError
        If the grid is not positive and increasing, stops short of
        50 x ``expected_limit``, or reaches where the survival function
        underflows and the ratio is no longer resolvable.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise GridError("x_grid must be a vector of at least 3 points")
    if not (x[0] > 0 and np.all(np.diff(x) > 0)):
        raise GridError("x_grid must be positive and strictly increasing")

    if survival is None:
        if params is None:
            raise ValueError("either params or survival is required")
        survival = lambda v: sinr_sf(v, params)  # noqa: E731
        label = "sinr"
        if expected_limit is None:
            expected_limit = params.snr_max
    else:
        label = "custom"
        if expected_limit is None:
            raise ValueError("expected_limit is required with a custom survival function")

    if x[-1] < 50.0 * expected_limit:
        raise GridError(
            f"grid ends at {x[-1]:.4g}; the tail check needs x >= {50.0 * expected_limit:.4g}"
        )

    sf = np.array([survival(v) for v in x])
    step = x * rel_step
    sf_hi = np.array([survival(v) for v in x + step])
    sf_lo = np.array([survival(v) for v in x - step])
    density = (sf_lo - sf_hi) / (2.0 * step)
    if not (sf[-1] > _MIN_RESOLVABLE_SF and density[-1] > 0 and np.isfinite(density[-1])):
        raise GridError(
            f"survival at x={x[-1]:.4g} is {sf[-1]:.3g}; tail not numerically resolvable"
        )
    ratio = sf / density
    deriv = np.gradient(ratio, x)
    return MdaDiagnostics(
        x_grid=x,
        hazard_reciprocal=ratio,
        derivative_of_ratio=deriv,
        limit_estimate=float(ratio[-1]),
        expected_limit=float(expected_limit),
        label=label,
    )


def default_mda_grid(params: SystemParams, factor: float = 60.0, points: int = 400) -> np.ndarray:
    """Log-spaced grid from the median scale out to ``factor`` x P_max g / noise."""
    lo = min(params.q_limit * params.mean_g / params.mean_h, params.snr_max) * 1e-2
    return np.geomspace(lo, factor * params.snr_max, points)
