import math
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tasevt.config import (
    ExperimentConfig,
    db_to_linear,
    linear_to_db,
    load_config,
    parse_config,
    resolve_params,
)
from tasevt.errors import ConfigError
from tasevt.experiment import CSV_HEADER, derive_seed, fmt, rows_to_csv, run_experiment

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def base_doc(**run):
    return {
        "params": {"unit": "db", "p_max": 0.0, "p_p": 0.0, "noise": -10.0},
        "sweep": {"variable": "Q", "start": -10.0, "stop": 10.0, "steps": 2},
        "run": {"n_antennas": [4], "methods": ["exact", "evt"], **run},
    }


@given(st.floats(-200.0, 200.0))
def test_db_roundtrip(x):
    assert abs(linear_to_db(db_to_linear(x)) - x) <= 1e-12 * max(1.0, abs(x))


def test_db_reference_points():
    assert db_to_linear(0.0) == 1.0
    assert db_to_linear(-10.0) == pytest.approx(0.1)
    assert db_to_linear(30.0) == pytest.approx(1000.0)


def test_ratio_expansion():
    p = resolve_params({"noise": 0.1}, {"pqr": db_to_linear(35), "snr_q": db_to_linear(5), "inr": 0.1})
    assert p.q_limit == pytest.approx(db_to_linear(-5))
    assert p.p_max == pytest.approx(db_to_linear(30))
    assert p.p_p == pytest.approx(0.01)
    assert p.mean_g == p.mean_h == p.mean_q == 1.0


def test_ratio_conflict_is_an_error():
    with pytest.raises(ConfigError, match="conflicts"):
        resolve_params({"p_max": 1.0, "q_limit": 1.0, "p_p": 1.0, "noise": 0.1}, {"pqr": 2.0})


def test_underdetermined_and_unknown_ratio():
    with pytest.raises(ConfigError, match="not determined"):
        resolve_params({"noise": 0.1}, {"inr": 1.0})
    with pytest.raises(ConfigError, match="unknown ratio"):
        resolve_params({"noise": 0.1}, {"bogus": 1.0})


def test_parse_and_points():
    cfg = parse_config(base_doc())
    assert isinstance(cfg, ExperimentConfig)
    pts = list(cfg.points())
    assert [v for v, _, _ in pts] == [-10.0, 10.0]
    assert pts[0][1].q_limit == pytest.approx(0.1)
    assert pts[1][1].q_limit == pytest.approx(10.0)
    assert pts[0][2] == [4]


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d["params"].pop("unit"), "unit"),
        (lambda d: d["params"].update(unit="watts"), "unit"),
        (lambda d: d["params"].update(q_limit=0.0), "conflicts with the sweep"),
        (lambda d: d["params"].update(colour=1.0), "unknown parameter"),
        (lambda d: d["sweep"].update(steps=1), "steps"),
        (lambda d: d["sweep"].update(variable="noise"), "variable"),
        (lambda d: d["run"].update(methods=["magic"]), "unknown method"),
        (lambda d: d["run"].update(metric="median"), "metric"),
        (lambda d: d["run"].update(epsilon=1.5), "epsilon"),
        (lambda d: d["run"].update(trials="many"), "trials"),
        (lambda d: d["run"].update(colour=1), "unknown key"),
        (lambda d: d.update(extra={}), "unknown table"),
    ],
)
def test_invalid_configs(mutate, message):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ConfigError, match=message):
        parse_config(doc)


def test_n_sweep_rules():
    doc = base_doc()
    doc["sweep"] = {"variable": "N", "values": [2, 2.2, 4]}
    with pytest.raises(ConfigError, match="omitted"):
        parse_config(doc)
    del doc["run"]["n_antennas"]
    doc["params"]["q_limit"] = 0.0
    cfg = parse_config(doc)
    assert cfg.sweep.values == [2, 4]
    assert [ns for _, _, ns in cfg.points()] == [[2], [4]]


def test_log_sweep():
    doc = base_doc()
    doc["sweep"] = {"variable": "P_max", "start": 0.1, "stop": 10.0, "steps": 3, "scale": "log"}
    doc["params"] = {"unit": "linear", "q_limit": 1.0, "p_p": 1.0, "noise": 0.1}
    cfg = parse_config(doc)
    assert cfg.sweep.values == pytest.approx([0.1, 1.0, 10.0])


def test_two_step_sweep_row_count():
    rows = run_experiment(parse_config(base_doc()))
    assert len(rows) == 2 * 2
    assert all(r.status == "ok" and r.value > 0 for r in rows)


def test_csv_is_byte_stable():
    cfg = parse_config(base_doc(methods=["exact", "evt", "mc"], trials=2000, seed=5))
    a, b = rows_to_csv(run_experiment(cfg)), rows_to_csv(run_experiment(cfg))
    assert a == b
    assert a.splitlines()[0] == ",".join(CSV_HEADER)


def test_out_of_regime_becomes_a_row_status():
    # P_max 30 dB over Q <= 0 dB is deep in the interference-limited regime
    doc = base_doc(methods=["tplr", "tplr-low", "exact"])
    doc["params"] = {"unit": "db", "p_max": 30.0, "p_p": -20.0, "noise": -10.0}
    doc["sweep"] = {"variable": "Q", "values": [-5.0, 0.0]}
    rows = run_experiment(parse_config(doc))
    assert len(rows) == 6
    for r in rows:
        if r.method == "exact":
            assert r.status == "ok"
        else:
            assert r.status == "out_of_regime" and r.value is None and r.reason
    assert "out_of_regime" in rows_to_csv(rows)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(1, 0, 4) == derive_seed(1, 0, 4)
    assert len({derive_seed(1, i, n) for i in range(5) for n in (4, 10)}) == 10


def test_fmt():
    assert fmt(None) == ""
    assert fmt(3) == "3"
    assert fmt(math.pi) == "3.14159265359"


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_configs_parse(path):
    cfg = load_config(path)
    assert list(cfg.points())


def test_load_config_syntax_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[params]\nunit = \n")
    with pytest.raises(ConfigError, match="line"):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
