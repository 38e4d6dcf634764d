"""Spectrum-sharing link with transmit antenna selection (linear units throughout).

The secondary transmitter (ST) has ``N`` antennas; antenna ``i`` sees gain
``g_i`` to the secondary receiver (SR) and ``h_i`` to the primary receiver
(PR).  The primary transmitter reaches the SR with gain ``q``.  All gains are
exponential (Rayleigh power).  Transmit power obeys the peak interference
limit ``Q`` and the hardware cap ``P_max``.

The selection analysis treats the per-antenna SINRs as i.i.d., which holds
when each antenna's SINR sees its own draw of ``q``.  That is the default
sampling model here; ``shared_interference=True`` instead draws one ``q`` per
realization (a single physical PT->SR link), which couples the antennas and
lowers the selected SINR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SystemParams:
    """Physical link parameters, all linear and strictly positive.

    Attributes
    ----------
    p_max : ST peak transmit power.
    q_limit : peak interference power allowed at the PR (``Q``).
    p_p : PU transmit power.
    noise : noise power at the SR.
    mean_g, mean_h, mean_q : mean channel power gains ST->SR, ST->PR, PT->SR.
    """

    p_max: float = 1.0
    q_limit: float = 1.0
    p_p: float = 1.0
    noise: float = 0.1
    mean_g: float = 1.0
    mean_h: float = 1.0
    mean_q: float = 1.0

    def __post_init__(self):
        for name in ("p_max", "q_limit", "p_p", "noise", "mean_g", "mean_h", "mean_q"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def rho(self) -> float:
        """Q / P_max."""
        return self.q_limit / self.p_max

    @property
    def c_q(self) -> float:
        """Probability that the interference limit binds less than P_max: 1 - exp(-rho/h)."""
        return -math.expm1(-self.rho / self.mean_h)

    @property
    def snr_max(self) -> float:
        """P_max * mean_g / noise, the tail scale of the SINR."""
        return self.p_max * self.mean_g / self.noise

    @property
    def noise_to_pu(self) -> float:
        """noise / (P_p * mean_q)."""
        return self.noise / (self.p_p * self.mean_q)

    def replace(self, **changes) -> "SystemParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelDraw:
    """One block-fading realization.

    ``g`` and ``h`` are per-antenna; ``q`` is a scalar (shared interference)
    or a per-antenna vector (independent interference).
    """

    g: np.ndarray
    h: np.ndarray
    q: float | np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if g.ndim != 1 or g.shape != h.shape or g.size < 1:
            raise ValueError("g and h must be equal-length non-empty vectors")
        q = np.asarray(self.q, dtype=float)
        if q.ndim not in (0, 1) or (q.ndim == 1 and q.shape != g.shape):
            raise ValueError("q must be a scalar or match the antenna count")
        if (g < 0).any() or (h < 0).any() or (q < 0).any():
            raise ValueError("channel gains must be non-negative")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "q", float(q) if q.ndim == 0 else q)

    @property
    def n_antennas(self) -> int:
        return self.g.size


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``.

    Distinct ``stream_id`` values under one seed give statistically
    independent PCG64 streams (via ``SeedSequence.spawn_key``).
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def exponential_gains(rng: np.random.Generator, mean: float, size) -> np.ndarray:
    """Inverse-transform exponential draws ``-mean * ln(U)`` with U on (0, 1]."""
    u = 1.0 - rng.random(size)
    return -mean * np.log(u)


def sample_channel(
    params: SystemParams, n_antennas: int, rng, shared_interference: bool = False
) -> ChannelDraw:
    """Draw one channel realization for ``n_antennas`` ST antennas.

    ``rng`` is an :class:`RngStream` (a fresh generator is created from it) or
    an existing ``numpy.random.Generator`` to continue drawing from.  Draw
    order is g, h, then q.
    """
    if n_antennas < 1:
        raise ValueError("n_antennas must be >= 1")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    g = exponential_gains(gen, params.mean_g, n_antennas)
    h = exponential_gains(gen, params.mean_h, n_antennas)
    if shared_interference:
        q = float(exponential_gains(gen, params.mean_q, 1)[0])
    else:
        q = exponential_gains(gen, params.mean_q, n_antennas)
    return ChannelDraw(g=g, h=h, q=q)


def transmit_power(h_i: float, params: SystemParams) -> float:
    """ST power on an antenna with PR gain ``h_i``: min(Q / h_i, P_max)."""
    if not h_i > 0:
        raise DomainError(f"transmit_power requires h_i > 0, got {h_i}")
    return min(params.q_limit / h_i, params.p_max)


def sinr(g_i: float, h_i: float, q: float, params: SystemParams) -> float:
    """Received SINR at the SR when antenna ``i`` transmits."""
    if not g_i > 0:
        raise DomainError(f"sinr requires g_i > 0, got {g_i}")
    if q < 0:
        raise DomainError(f"sinr requires q >= 0, got {q}")
    return transmit_power(h_i, params) * g_i / (params.p_p * q + params.noise)


def sinr_array(g, h, q, params: SystemParams) -> np.ndarray:
    """Vectorized :func:`sinr`.

    ``q`` either matches ``g`` or has one axis fewer (one value per
    realization, broadcast over antennas).  A zero ``h`` (probability-zero
    draw) maps to the ``P_max`` branch.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore"):
        power = np.minimum(params.q_limit / h, params.p_max)
    if q.ndim and q.ndim == g.ndim - 1:
        q = q[..., None]
    return power * g / (params.p_p * q + params.noise)


def best_antenna(draw: ChannelDraw, params: SystemParams) -> tuple[int, float]:
    """Index and SINR of the antenna maximizing SINR (lowest index wins ties)."""
    gammas = sinr_array(draw.g, draw.h, draw.q, params)
    idx = int(np.argmax(gammas))
    return idx, float(gammas[idx])
