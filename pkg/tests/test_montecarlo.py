import math

import mpmath as mp
import numpy as np
import pytest

from tasevt.channel import SystemParams
from tasevt.errors import InsufficientTrialsError
from tasevt.exact import exact_mean_capacity, sinr_cdf_max
from tasevt.montecarlo import (
    BLOCK_TRIALS,
    CapacityEstimate,
    SimulationPlan,
    dkw_halfwidth,
    empirical_cdf,
    estimate_mean_capacity,
    estimate_outage_capacity,
    lower_order_statistic,
    quantile_estimate,
    simulate_rates,
    simulate_sinr_max,
)


def test_low_snr_single_antenna_sanity():
    # no interference to speak of and power always at P_max: gamma = g * snr
    p = SystemParams(p_max=1.0, q_limit=1e6, p_p=1e-9, noise=100.0)
    est = estimate_mean_capacity(SimulationPlan(p, 1, 200_000, seed=1))
    # E ln(1 + 0.01 g) = e^100 E1(100)
    assert est.contains(float(mp.exp(100) * mp.e1(100)))


def test_worker_count_does_not_change_results(ref_params):
    trials = 3 * BLOCK_TRIALS + 123
    one = simulate_sinr_max(SimulationPlan(ref_params, 10, trials, seed=9, workers=1))
    eight = simulate_sinr_max(SimulationPlan(ref_params, 10, trials, seed=9, workers=8))
    assert one.shape == (trials,)
    np.testing.assert_array_equal(one, eight)


def test_seed_changes_results(ref_params):
    a = simulate_sinr_max(SimulationPlan(ref_params, 4, 1000, seed=1))
    b = simulate_sinr_max(SimulationPlan(ref_params, 4, 1000, seed=2))
    assert not np.array_equal(a, b)


def test_whole_blocks_are_stable_across_trial_counts(ref_params):
    short = simulate_sinr_max(SimulationPlan(ref_params, 4, BLOCK_TRIALS, seed=7))
    long = simulate_sinr_max(SimulationPlan(ref_params, 4, 2 * BLOCK_TRIALS + 5, seed=7))
    np.testing.assert_array_equal(short, long[:BLOCK_TRIALS])


def test_shared_interference_lowers_selected_rate(ref_params):
    iid = estimate_mean_capacity(SimulationPlan(ref_params, 20, 100_000, seed=3))
    shared = estimate_mean_capacity(SimulationPlan(ref_params, 20, 100_000, seed=3, shared_interference=True))
    assert shared.ci_high < iid.ci_low


def test_plan_validation(ref_params):
    for kwargs in ({"n_antennas": 0}, {"trials": 0}, {"workers": 0}):
        args = {"params": ref_params, "n_antennas": 2, "trials": 10, **kwargs}
        with pytest.raises(ValueError):
            SimulationPlan(**args)
    assert SimulationPlan(ref_params, 2, BLOCK_TRIALS + 1).n_blocks == 2


def test_lower_order_statistic():
    assert lower_order_statistic([4.0, 1.0, 3.0, 2.0], 0.5) == 2.0
    assert lower_order_statistic([4.0, 1.0, 3.0, 2.0], 0.01) == 1.0
    assert lower_order_statistic([4.0, 1.0, 3.0, 2.0], 0.99) == 4.0
    with pytest.raises(ValueError):
        lower_order_statistic([1.0], 0.0)
    with pytest.raises(ValueError):
        lower_order_statistic([], 0.5)


def test_quantile_estimate_ci_brackets_point():
    x = np.random.default_rng(0).exponential(size=10_000)
    est = quantile_estimate(x, 0.1)
    assert est.ci_low <= est.point <= est.ci_high
    assert est.contains(-math.log(0.9))


def test_empirical_cdf_trivial_cases():
    np.testing.assert_array_equal(empirical_cdf([1.0, 2.0, 3.0], [0.0, 1.0, 2.5, 3.0]), [0.0, 1 / 3, 2 / 3, 1.0])
    assert empirical_cdf([1.0], []).size == 0
    with pytest.raises(ValueError):
        empirical_cdf([], [1.0])


def test_dkw_halfwidth_value():
    assert dkw_halfwidth(10**6, 0.99) == pytest.approx(math.sqrt(math.log(200) / 2e6))


def test_insufficient_trials(ref_params):
    with pytest.raises(InsufficientTrialsError):
        estimate_mean_capacity(SimulationPlan(ref_params, 2, 50))
    with pytest.raises(InsufficientTrialsError):
        estimate_outage_capacity(SimulationPlan(ref_params, 2, 400), 0.1)
    with pytest.raises(ValueError):
        estimate_outage_capacity(SimulationPlan(ref_params, 2, 400), 1.5)


def test_capacity_estimate_validation():
    with pytest.raises(ValueError):
        CapacityEstimate(1.0, 1.5, 2.0, 0.99, 10)
    assert CapacityEstimate(1.0, 0.5, 1.5, 0.99, 10).half_width == 0.5


def test_ci_shrinks_like_root_n(ref_params):
    small = estimate_mean_capacity(SimulationPlan(ref_params, 10, 100_000, seed=2))
    large = estimate_mean_capacity(SimulationPlan(ref_params, 10, 200_000, seed=2))
    assert large.half_width / small.half_width == pytest.approx(1 / math.sqrt(2), rel=0.05)


def test_mean_estimate_covers_exact(ref_params):
    est = estimate_mean_capacity(SimulationPlan(ref_params, 4, 200_000, seed=12))
    assert est.contains(exact_mean_capacity(ref_params, 4))
    rates = simulate_rates(SimulationPlan(ref_params, 4, 1000, seed=12))
    assert (rates >= 0).all()


@pytest.mark.parametrize("n", [4, 10, 20])
def test_selected_sinr_within_dkw_band(ref_params, n):
    trials = 200_000
    samples = simulate_sinr_max(SimulationPlan(ref_params, n, trials, seed=100 + n))
    grid = np.geomspace(1e-2, 300.0, 300)
    gap = np.max(np.abs(empirical_cdf(samples, grid) - sinr_cdf_max(grid, ref_params, n)))
    assert gap <= dkw_halfwidth(trials, 0.99)
