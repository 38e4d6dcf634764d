"""Monte Carlo ground truth for the selected-antenna SINR and rate.

Trials are split into fixed blocks of ``BLOCK_TRIALS``; block ``k`` always
draws from ``RngStream(seed, k)``.  Blocks may run on any number of threads,
results are gathered in block order, so every statistic is bit-identical for
a given plan whatever ``workers`` is.

By default each antenna draws its own PU interference gain, so the antenna
SINRs are i.i.d. as the order-statistic analysis assumes;
``shared_interference=True`` simulates one common PT->SR gain per draw.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy import stats

from .channel import RngStream, SystemParams, exponential_gains, sinr_array
from .errors import InsufficientTrialsError

log = logging.getLogger(__name__)

BLOCK_TRIALS = 1 << 16
# cap on gains held in memory per chunk inside a block (per array)
_CHUNK_ELEMENTS = 1 << 20
_MIN_MEAN_TRIALS = 100
_MIN_TAIL_COUNT = 50
NORMAL_CI_MIN_TRIALS = 10_000


@dataclass(frozen=True)
class SimulationPlan:
    params: SystemParams
    n_antennas: int
    trials: int
    seed: int = 0
    workers: int = 1
    shared_interference: bool = False

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def n_blocks(self) -> int:
        return -(-self.trials // BLOCK_TRIALS)


@dataclass(frozen=True)
class CapacityEstimate:
    """Point estimate (nats/s/Hz) with a two-sided confidence interval."""

    point: float
    ci_low: float
    ci_high: float
    confidence: float
    trials: int

    def __post_init__(self):
        if not self.ci_low <= self.point <= self.ci_high:
            raise ValueError("confidence interval must contain the point estimate")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def _block_sinr_max(plan: SimulationPlan, block: int) -> np.ndarray:
    n = plan.n_antennas
    size = min(BLOCK_TRIALS, plan.trials - block * BLOCK_TRIALS)
    rng = RngStream(plan.seed, block).generator()
    chunk = max(1, _CHUNK_ELEMENTS // n)
    out = np.empty(size)
    p = plan.params
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        g = exponential_gains(rng, p.mean_g, (m, n))
        h = exponential_gains(rng, p.mean_h, (m, n))
        q = exponential_gains(rng, p.mean_q, m if plan.shared_interference else (m, n))
        out[start:start + m] = sinr_array(g, h, q, p).max(axis=1)
    return out


def simulate_sinr_max(plan: SimulationPlan) -> np.ndarray:
    """gamma_max for every trial of ``plan``, in trial order."""
    blocks = range(plan.n_blocks)
    if plan.workers == 1 or plan.n_blocks == 1:
        parts = [_block_sinr_max(plan, b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            parts = list(pool.map(lambda b: _block_sinr_max(plan, b), blocks))
    return np.concatenate(parts)


def simulate_rates(plan: SimulationPlan) -> np.ndarray:
    """R_max = ln(1 + gamma_max) per trial (nats/s/Hz)."""
    return np.log1p(simulate_sinr_max(plan))


def mean_estimate(samples: np.ndarray, confidence: float = 0.99) -> CapacityEstimate:
    """Sample mean with a normal-approximation confidence interval."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    point = float(np.mean(samples))
    sd = float(np.std(samples, ddof=1)) if n > 1 else 0.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    half = z * sd / math.sqrt(n)
    return CapacityEstimate(point, point - half, point + half, confidence, n)


def estimate_mean_capacity(plan: SimulationPlan, confidence: float = 0.99) -> CapacityEstimate:
    """Mean rate E[ln(1 + gamma_max)] over ``plan.trials`` channel draws."""
    if plan.trials < _MIN_MEAN_TRIALS:
        raise InsufficientTrialsError(f"need >= {_MIN_MEAN_TRIALS} trials, got {plan.trials}")
    if plan.trials < NORMAL_CI_MIN_TRIALS:
        log.warning("normal-approximation CI with only %d trials", plan.trials)
    return mean_estimate(simulate_rates(plan), confidence)


def lower_order_statistic(samples, epsilon: float) -> float:
    """The ceil(epsilon * n)-th smallest sample (1-based), never interpolated upward."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("no samples")
    k = max(1, math.ceil(epsilon * x.size))
    return float(x[k - 1])


def quantile_estimate(samples, epsilon: float, confidence: float = 0.99) -> CapacityEstimate:
    """Lower order-statistic epsilon-quantile with a distribution-free binomial CI."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    point = lower_order_statistic(x, epsilon)
    alpha = 1.0 - confidence
    # ranks j with P(Binom(n, eps) < j) bracket the true quantile
    lo_rank = int(stats.binom.ppf(alpha / 2.0, n, epsilon))
    hi_rank = int(stats.binom.ppf(1.0 - alpha / 2.0, n, epsilon)) + 1
    lo_rank = min(max(lo_rank, 1), n)
    hi_rank = min(max(hi_rank, 1), n)
    ci_low = min(float(x[lo_rank - 1]), point)
    ci_high = max(float(x[hi_rank - 1]), point)
    return CapacityEstimate(point, ci_low, ci_high, confidence, n)


def estimate_outage_capacity(
    plan: SimulationPlan, epsilon: float, confidence: float = 0.99
) -> CapacityEstimate:
    """Empirical epsilon-outage rate of R_max.

    Raises
    ------
    InsufficientTrialsError
        Unless ``trials * min(epsilon, 1 - epsilon) >= 50``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if plan.trials * min(epsilon, 1.0 - epsilon) < _MIN_TAIL_COUNT:
        raise InsufficientTrialsError(
            f"{plan.trials} trials leave fewer than {_MIN_TAIL_COUNT} samples beyond epsilon={epsilon}"
        )
    return quantile_estimate(simulate_rates(plan), epsilon, confidence)


def empirical_cdf(samples, x_grid) -> np.ndarray:
    """Right-continuous empirical CDF of ``samples`` evaluated on ``x_grid``."""
    x = np.sort(np.asarray(samples, dtype=float))
    grid = np.asarray(x_grid, dtype=float)
    if grid.size == 0:
        return np.empty(0)
    if x.size == 0:
        raise ValueError("no samples")
    return np.searchsorted(x, grid, side="right") / x.size


def dkw_halfwidth(n: int, confidence: float = 0.99) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band: sup|F_n - F| <= this with given confidence."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))


def simulate_sinr_single(
    params: SystemParams, trials: int, seed: int = 0, workers: int = 1
) -> np.ndarray:
    """Per-antenna SINR samples (a one-antenna plan)."""
    return simulate_sinr_max(SimulationPlan(params, 1, trials, seed, workers))
