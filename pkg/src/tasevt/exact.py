"""Exact per-antenna SINR law, its N-fold maximum, quantiles and exact capacities.

The survival function is evaluated directly (two positive terms), so tail
probabilities far below double-precision epsilon stay accurate.  The CDF is
``1 - survival``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import wraps

import numpy as np
from scipy import integrate

from .channel import SystemParams
from .errors import BracketError, QuadratureError
from .special_functions import scaled_upper_incomplete_gamma_zero


@dataclass(frozen=True)
class QuantileSolverConfig:
    """Bracketing/bisection controls for :func:`sinr_quantile`."""

    rel_tol: float = 1e-14
    abs_tol: float = 1e-12
    max_bracket_doublings: int = 400
    max_bisections: int = 400

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_SOLVER = QuantileSolverConfig()


def _elementwise(func):
    # scalar in -> float out; array in -> ndarray out
    @wraps(func)
    def wrapper(x, *args, **kwargs):
        if np.ndim(x) == 0:
            return func(float(x), *args, **kwargs)
        arr = np.asarray(x, dtype=float)
        out = np.fromiter((func(float(v), *args, **kwargs) for v in arr.ravel()), float, arr.size)
        return out.reshape(arr.shape)

    return wrapper


@_elementwise
def sinr_sf(x: float, params: SystemParams) -> float:
    """Per-antenna survival function P(gamma_i > x)."""
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    p = params
    pu = p.p_p * p.mean_q
    a = p.q_limit * p.mean_g / (x * pu * p.mean_h)
    rho_h = p.rho / p.mean_h
    lin = x / p.snr_max
    # e^{s+a} Gamma(0, b) with b = rho/h + x/snr_max + a + s; the exponents cancel
    # exactly to -(rho/h + x/snr_max), so nothing overflows at small x.
    b = rho_h + lin + a + p.noise_to_pu
    interference_term = a * math.exp(-(rho_h + lin)) * scaled_upper_incomplete_gamma_zero(b)
    cap_term = p.c_q * p.p_max * p.mean_g / (x * pu + p.p_max * p.mean_g) * math.exp(-lin)
    return interference_term + cap_term


def sinr_cdf(x, params: SystemParams):
    """Per-antenna SINR CDF; 0 for ``x <= 0``."""
    sf = sinr_sf(x, params)
    return np.clip(1.0 - sf, 0.0, 1.0) if np.ndim(sf) else min(1.0, max(0.0, 1.0 - sf))


def sinr_sf_max(x, params: SystemParams, n_antennas: int):
    """Survival of the selected-antenna SINR, ``1 - F(x)**N``, without cancellation."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be >= 1")
    sf = np.asarray(sinr_sf(x, params), dtype=float)
    with np.errstate(divide="ignore"):
        out = -np.expm1(n_antennas * np.log1p(-sf))
    return float(out) if out.ndim == 0 else out


def sinr_cdf_max(x, params: SystemParams, n_antennas: int):
    """CDF of the selected-antenna SINR: ``F(x)**N``."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be >= 1")
    cdf = np.asarray(sinr_cdf(x, params), dtype=float)
    out = cdf ** n_antennas
    return float(out) if out.ndim == 0 else out


def sinr_isf(tail: float, params: SystemParams, cfg: QuantileSolverConfig = DEFAULT_SOLVER) -> float:
    """Inverse survival: the ``x`` with ``P(gamma_i > x) = tail``.

    Working on the upper tail keeps ``tail = 1/N`` exact for large N, where
    ``1 - 1/N`` would already be rounded.
    """
    if not 0.0 < tail < 1.0:
        raise ValueError(f"tail probability must lie in (0, 1), got {tail}")
    x0 = params.q_limit * params.mean_g / params.mean_h
    lo = hi = x0
    for _ in range(cfg.max_bracket_doublings):
        if sinr_sf(hi, params) <= tail:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketError(f"survival never fell to {tail} below x={hi:g}")
    for _ in range(cfg.max_bracket_doublings):
        if sinr_sf(lo, params) >= tail:
            break
        lo, hi = 0.5 * lo, lo
    else:
        raise BracketError(f"survival never rose to {tail} above x={lo:g}")

    for _ in range(cfg.max_bisections):
        # geometric midpoint while the bracket spans more than a factor 2
        mid = math.sqrt(lo * hi) if hi > 2.0 * lo else 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sinr_sf(mid, params) > tail:
            lo = mid
        else:
            hi = mid
        if hi - lo <= cfg.rel_tol * hi:
            break
    x = 0.5 * (lo + hi)
    err = abs(sinr_sf(x, params) - tail)
    if err > cfg.abs_tol and err > 1e-6 * tail:
        raise BracketError(f"bisection stalled with |F(x) - p| = {err:g}")
    return x


def sinr_quantile(p: float, params: SystemParams, cfg: QuantileSolverConfig = DEFAULT_SOLVER) -> float:
    """Per-antenna SINR quantile ``F^{-1}(p)`` for ``0 < p < 1``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return sinr_isf(1.0 - p, params, cfg)


def max_tail_to_single(tail_max: float, n_antennas: int) -> float:
    """Per-antenna tail ``t`` with ``1 - (1 - t)**N = tail_max``."""
    return -math.expm1(math.log1p(-tail_max) / n_antennas)


def exact_outage_capacity(
    params: SystemParams,
    n_antennas: int,
    epsilon: float,
    cfg: QuantileSolverConfig = DEFAULT_SOLVER,
) -> float:
    """Exact epsilon-outage rate ``ln(1 + F^{-1}(epsilon**(1/N)))`` in nats/s/Hz."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    tail = -math.expm1(math.log(epsilon) / n_antennas)
    return math.log1p(sinr_isf(tail, params, cfg))


def exact_mean_capacity(
    params: SystemParams,
    n_antennas: int,
    abs_tol: float = 1e-8,
    cut_tail: float = 1e-12,
    cfg: QuantileSolverConfig = DEFAULT_SOLVER,
) -> float:
    """E[ln(1 + gamma_max)] in nats/s/Hz by adaptive Gauss-Kronrod quadrature.

    Integrates ``P(R_max > r)`` over the rate ``r = ln(1 + x)``, which is the
    same integral as ``(1 - F_max(x)) / (1 + x)`` over ``x`` but bounded and
    smooth.  The range is split at the ``1 - cut_tail`` quantile of
    ``gamma_max``; the remaining tail is integrated separately and its error
    estimate counted against ``abs_tol``.

    Raises
    ------
    QuadratureError
        If QUADPACK reports failure or the combined error estimate exceeds
        ``abs_tol``.
    """
    if n_antennas < 1:
        raise ValueError("n_antennas must be >= 1")

    def integrand(r: float) -> float:
        return sinr_sf_max(math.expm1(r), params, n_antennas)

    r_cut = math.log1p(sinr_isf(max_tail_to_single(cut_tail, n_antennas), params, cfg))
    r_loc = math.log1p(sinr_isf(1.0 / (n_antennas + 1.0), params, cfg))
    points = [r_loc] if 0.0 < r_loc < r_cut else None

    body, body_err = _quad(integrand, 0.0, r_cut, abs_tol, points=points, limit=500)
    tail, tail_err = _quad(integrand, r_cut, np.inf, abs_tol, limit=200)
    if body_err + tail_err > abs_tol:
        raise QuadratureError(f"quadrature error estimate {body_err + tail_err:g} > {abs_tol:g}")
    return body + tail


def _quad(func, lo, hi, abs_tol, **kwargs):
    val, err, *info = integrate.quad(
        func, lo, hi, epsabs=abs_tol / 10, epsrel=1e-11, full_output=1, **kwargs
    )
    # info carries a message only when QUADPACK flagged a problem (ier > 0)
    if len(info) > 1 and err > abs_tol:
        raise QuadratureError(f"quadrature over [{lo:g}, {hi:g}] failed: {info[1]}")
    return val, err
