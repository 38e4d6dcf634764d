"""Acceptance criteria, each run at its stated tolerance.

Every test records a one-line PASS/FAIL verdict, listed together in the
"acceptance criteria" section of the pytest terminal summary.
"""

import math
from dataclasses import replace

import mpmath as mp
import numpy as np
import pytest

from tasevt import evt
from tasevt.channel import SystemParams
from tasevt.config import db_to_linear as db, resolve_params
from tasevt.exact import exact_mean_capacity, exact_outage_capacity, sinr_cdf
from tasevt.montecarlo import (
    SimulationPlan,
    dkw_halfwidth,
    lower_order_statistic,
    simulate_rates,
    simulate_sinr_max,
)
from tasevt.special_functions import EULER_GAMMA, lambert_w0, upper_incomplete_gamma_zero

from conftest import record_acceptance

REF_PARAMS = SystemParams(p_max=1.0, q_limit=1.0, p_p=1.0, noise=0.1)
MC_TRIALS = 1_000_000
FIG2_Q_DB = np.linspace(-20.0, 20.0, 17)
GAP_PARAMS = resolve_params({"q_limit": db(5), "noise": db(-10)}, {"pqr": db(25), "inr": db(-10)})
GAP_N = 200

# Monte Carlo inputs shared with the determinism check: name -> plan
MC_PLANS = {
    "cdf": SimulationPlan(REF_PARAMS, 1, MC_TRIALS, seed=2024, workers=8),
    **{
        f"fig2 N={n} Q={q:g}dB": SimulationPlan(
            REF_PARAMS.replace(q_limit=db(q)), n, MC_TRIALS, seed=1000 * n + i, workers=8
        )
        for n in (4, 20)
        for i, q in enumerate(FIG2_Q_DB)
    },
    "gap": SimulationPlan(GAP_PARAMS, GAP_N, MC_TRIALS, seed=77, workers=8),
}
_samples = {}


def mc(name):
    if name not in _samples:
        _samples[name] = simulate_sinr_max(MC_PLANS[name])
    return _samples[name]


def test_criterion_1_special_function_accuracy():
    xs = np.geomspace(1e-6, 700.0, 1000)
    e1_err = max(abs(upper_incomplete_gamma_zero(x) - float(mp.e1(mp.mpf(x)))) for x in xs)
    ws = np.geomspace(1e-6, 1e6, 1000)
    with mp.workdps(40):
        w_err = max(abs(lambert_w0(x) - float(mp.lambertw(mp.mpf(x)).real)) for x in ws)
    ok = e1_err <= 1e-12 and w_err <= 1e-12
    record_acceptance(1, ok, f"max |Gamma(0,x) - oracle| = {e1_err:.2e}, max |W - oracle| = {w_err:.2e} (tol 1e-12)")
    assert ok


def test_criterion_2_per_antenna_cdf_in_dkw_band():
    x = np.sort(mc("cdf"))
    n = x.size
    f = sinr_cdf(x, REF_PARAMS)
    ranks = np.arange(1, n + 1)
    ks = max(np.max(ranks / n - f), np.max(f - (ranks - 1) / n))
    band = dkw_halfwidth(n, 0.99)
    ok = ks <= band
    record_acceptance(2, ok, f"sup|F_emp - F| = {ks:.2e} over {n} samples, 99% DKW band {band:.2e}")
    assert ok


def test_criterion_3_mean_capacity_matches_simulation():
    worst = {}
    for n in (4, 20):
        errs = []
        for q in FIG2_Q_DB:
            sim = float(np.mean(np.log1p(mc(f"fig2 N={n} Q={q:g}dB"))))
            errs.append(abs(evt.mean_capacity(REF_PARAMS.replace(q_limit=db(q)), n) - sim))
        worst[n] = max(errs)
    ok = worst[20] <= 0.15 and worst[20] < worst[4]
    record_acceptance(
        3, ok,
        f"max |EVT - MC| over Q in [-20, 20] dB: N=20 {worst[20]:.3f} (tol 0.15), N=4 {worst[4]:.3f}",
    )
    assert ok


def test_criterion_4_iplr_scaling():
    p = resolve_params({"noise": db(-10)}, {"pqr": db(35), "snr_q": db(5), "inr": db(-10)})
    ns = [16, 32, 64, 128, 256, 512, 1024]
    slope = np.polyfit(np.log(ns), [evt.iplr_mean_capacity(p, n) for n in ns], 1)[0]
    exact_slope = np.polyfit(np.log(ns), [exact_mean_capacity(p, n) for n in ns], 1)[0]
    b_dev = abs(evt.iplr_constants(p, 10**6).b_n - 1.0)
    ok = abs(slope - 1.0) <= 0.05 and b_dev <= 1e-5
    record_acceptance(
        4, ok,
        f"IPLR slope vs ln N = {slope:.4f} (exact law {exact_slope:.4f}), |b_N - 1| at N=1e6 = {b_dev:.1e}",
    )
    assert ok


def test_criterion_5_tplr_scaling():
    p = resolve_params({"p_max": 1.0, "noise": db(-10)}, {"pqr": db(-20), "inr": db(-10)})
    growth = math.expm1(evt.tplr_constants(p, 10**4).a_n) / math.expm1(evt.tplr_constants(p, 10**2).a_n)
    target = math.log(p.c_q * 1e4) / math.log(p.c_q * 1e2)
    rel = abs(growth / target - 1.0)
    ok = rel <= 0.05
    record_acceptance(5, ok, f"(e^a - 1) ratio N=1e4/1e2 = {growth:.4f} vs ln(c_q N) ratio {target:.4f}, rel {rel:.2%}")
    assert ok


def _gap_identity_error():
    p = GAP_PARAMS
    worst = 0.0
    for eps in (0.01, 0.1, 0.3):
        for n in (10, GAP_N, 10**4):
            gap = evt.iplr_mean_capacity(p, n) - evt.iplr_outage_capacity(p, n, eps, large_n=True)
            worst = max(worst, abs(gap - (EULER_GAMMA + math.log(math.log(1 / eps)))))
    return worst


def test_criterion_6a_outage_gap_identity():
    err = _gap_identity_error()
    ok = err <= 1e-12
    record_acceptance(6, ok, f"(identity) |IPLR mean - outage - (E0 + ln ln 1/eps)| = {err:.1e}")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="P_max = 30 dB truncates the IPLR tail at N=200; the true gap is about 1.05, not 1.41",
)
def test_criterion_6b_simulated_outage_gap():
    rates = np.log1p(mc("gap"))
    sim_gap = float(rates.mean()) - lower_order_statistic(rates, 0.1)
    target = EULER_GAMMA + math.log(math.log(10.0))
    exact_gap = exact_mean_capacity(GAP_PARAMS, GAP_N) - exact_outage_capacity(GAP_PARAMS, GAP_N, 0.1)
    ok = abs(sim_gap - target) <= 0.1
    record_acceptance(
        6, ok,
        f"(simulation) MC mean - MC 10% quantile = {sim_gap:.3f} (exact law {exact_gap:.3f}) "
        f"vs E0 + ln ln 10 = {target:.3f}, tol 0.1",
    )
    assert ok


def test_criterion_7_mda_condition():
    diag = evt.verify_mda_condition(REF_PARAMS, evt.default_mda_grid(REF_PARAMS))
    rel = abs(diag.limit_estimate / 10.0 - 1.0)
    ok = rel <= 0.05 and abs(diag.tail_derivative) <= 0.05
    record_acceptance(
        7, ok,
        f"(1-F)/f at x={diag.x_grid[-1]:.0f} is {diag.limit_estimate:.3f} (rel {rel:.2%} from 10), "
        f"|derivative| = {abs(diag.tail_derivative):.1e}",
    )
    assert ok


def test_criterion_8_determinism_across_workers():
    mismatched = [
        name
        for name, plan in MC_PLANS.items()
        if not np.array_equal(mc(name), simulate_sinr_max(replace(plan, workers=1)))
    ]
    ok = not mismatched
    record_acceptance(
        8, ok,
        f"{len(MC_PLANS) - len(mismatched)}/{len(MC_PLANS)} Monte Carlo inputs bit-identical under 1 and 8 workers",
    )
    assert ok


def test_information_shared_interference_gap():
    """Not a criterion: the single-PT-link model breaks the i.i.d. assumption."""
    shared = SimulationPlan(REF_PARAMS, 20, 200_000, seed=5, shared_interference=True)
    sim = float(np.mean(simulate_rates(shared)))
    exact = exact_mean_capacity(REF_PARAMS, 20)
    print(f"shared PT->SR gain: MC mean {sim:.3f} vs i.i.d. exact {exact:.3f} at N=20")
    assert sim < exact
