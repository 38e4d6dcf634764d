"""Scalar special functions: Gamma(0, x) (= E1(x)) and principal-branch Lambert W.

Both are plain double-precision routines with explicit iteration budgets, so a
failure to converge surfaces as :class:`ConvergenceError` instead of a silently
wrong value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286061
INV_E = 0.36787944117144232160

_FPMIN = 1e-300
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class Accuracy:
    """Stopping rule for the iterative evaluations in this module."""

    abs_tol: float = 1e-16
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_ACCURACY = Accuracy()
LAMBERT_ACCURACY = Accuracy(abs_tol=1e-15, max_iter=50)


def _e1_series(x: float, acc: Accuracy) -> float:
    # E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, acc.max_iter + 1):
        term *= -x / k
        contrib = -term / k
        total += contrib
        if abs(contrib) < acc.abs_tol * max(1.0, abs(total)):
            return -EULER_GAMMA - math.log(x) + total
    raise ConvergenceError(f"E1 series did not converge at x={x}")


def _e1_scaled_cf(x: float, acc: Accuracy) -> float:
    # e^x E1(x) as a continued fraction, modified Lentz.
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, acc.max_iter + 1):
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) <= max(acc.abs_tol, _EPS):
            return h
    raise ConvergenceError(f"E1 continued fraction did not converge at x={x}")


def _check_positive(x: float) -> float:
    x = float(x)
    if not x > 0 or math.isnan(x):
        raise DomainError(f"Gamma(0, x) requires x > 0, got {x}")
    return x


def upper_incomplete_gamma_zero(x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """Upper incomplete gamma at order zero, Gamma(0, x) = E1(x).

    Uses the alternating power series for ``x < 1`` and a continued fraction
    for ``x >= 1``.

    Raises
    ------
    DomainError
        If ``x <= 0``.
    ConvergenceError
        If the chosen expansion needs more than ``acc.max_iter`` terms.
    """
    x = _check_positive(x)
    if x < 1.0:
        return _e1_series(x, acc)
    if x > 745.0:
        return 0.0
    return math.exp(-x) * _e1_scaled_cf(x, acc)


def scaled_upper_incomplete_gamma_zero(x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """``exp(x) * Gamma(0, x)``, finite for all x > 0 (behaves like 1/x for large x)."""
    x = _check_positive(x)
    if x < 1.0:
        return math.exp(x) * _e1_series(x, acc)
    return _e1_scaled_cf(x, acc)


def log_upper_incomplete_gamma_zero(x: float, acc: Accuracy = DEFAULT_ACCURACY) -> float:
    """``ln Gamma(0, x)`` without underflow for large x."""
    x = _check_positive(x)
    if x < 1.0:
        return math.log(_e1_series(x, acc))
    return -x + math.log(_e1_scaled_cf(x, acc))


_LOG_DOMAIN_MIN = 1e100
_INV_E_LO = -1.2428753672788363e-17  # 1/e - float(1/e)
# W0 = sum c_k p^k about the branch point
_BRANCH_COEFFS = (
    -1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0,
    -221.0 / 8505.0, 680863.0 / 43545600.0, -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
)


def _branch_series(p: float) -> float:
    w = 0.0
    for c in reversed(_BRANCH_COEFFS):
        w = w * p + c
    return w


def _halley(w: float, x: float, acc: Accuracy) -> float:
    for _ in range(acc.max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            return w
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= acc.abs_tol * (1.0 + abs(w)):
            return w
    # last step may stall on rounding; accept if the defining identity holds
    if abs(w * math.exp(w) - x) <= 1e-13 * max(1.0, abs(x)):
        return w
    raise ConvergenceError(f"Lambert W Halley iteration did not converge at x={x}")


def lambert_w0(x: float, acc: Accuracy = LAMBERT_ACCURACY) -> float:
    """Principal branch W0 of the Lambert W function, ``W(x) exp(W(x)) = x``.

    Parameters
    ----------
    x : float
        Argument, ``x >= -1/e``.

    Returns
    -------
    float
        ``w >= -1``.
    """
    x = float(x)
    if math.isnan(x) or x < -INV_E:
        # -1/e is not exactly representable; allow one ulp of slack
        if x >= -INV_E * (1.0 + 4 * _EPS):
            return -1.0
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x > _LOG_DOMAIN_MIN:
        # w exp(w) overflows during iteration; solve w + ln w = ln x instead
        return _log_newton(math.log(x), acc)
    if x < -0.25:
        # branch-point series in p = sqrt(2(e x + 1)); x + 1/e is formed
        # with a two-word 1/e so the cancellation is exact
        d = (x + INV_E) + _INV_E_LO
        if d <= 0.0:
            return -1.0
        p = math.sqrt(2.0 * math.e * d)
        if p < 1e-2:
            return _branch_series(p)
        w = _branch_series(p)
    else:
        w = math.log1p(x)
    return _halley(w, x, acc)


def lambert_w0_from_log(log_x: float, acc: Accuracy = LAMBERT_ACCURACY) -> float:
    """W0(exp(log_x)) for arguments too large to represent as a float.

    Solves ``w + ln w = log_x`` by Newton iteration; falls back to
    :func:`lambert_w0` when ``exp(log_x)`` is representable.
    """
    log_x = float(log_x)
    if log_x <= math.log(_LOG_DOMAIN_MIN):
        return lambert_w0(math.exp(log_x), acc)
    return _log_newton(log_x, acc)


def _log_newton(log_x: float, acc: Accuracy) -> float:
    w = log_x - math.log(log_x)
    for _ in range(acc.max_iter):
        f = w + math.log(w) - log_x
        dw = f / (1.0 + 1.0 / w)
        w -= dw
        if abs(dw) <= acc.abs_tol * w:
            return w
    raise ConvergenceError(f"lambert_w0_from_log did not converge at log_x={log_x}")
