"""Scenario parsing, deterministic rendering, report orchestration."""

import numpy as np
import pytest

from normholo.errors import InvalidInput
from normholo.linalg import DEFAULT_TOLS
from normholo.report import (Report, ScenarioConfig, _render, parse_point_spec,
                             parse_rep_spec, run_scenario)


def test_config_roundtrip():
    raw = {"rep": "sl-so:4", "point": "veronese", "analyses": ["orbit"],
           "seed": 7, "tolerances": {"eig": 1e-8},
           "curve": [[0, 0.3]], "step": 0.002}
    cfg = ScenarioConfig.from_dict(raw)
    assert cfg.rep == "sl-so:4"
    assert cfg.curve == ((0, 0.3),)
    back = cfg.to_dict()
    assert back["curve"] == [[0, 0.3]]
    assert back["step"] == 0.002
    assert "direction" not in back          # defaults are omitted
    assert "n" not in back
    assert ScenarioConfig.from_dict(back).to_dict() == back


def test_config_rejects_unknown_keys():
    with pytest.raises(InvalidInput):
        ScenarioConfig.from_dict({"repp": "sl-so:4"})
    with pytest.raises(InvalidInput):
        ScenarioConfig.from_dict({"tolerances": {"wat": 1.0}})
    with pytest.raises(InvalidInput):
        ScenarioConfig.from_dict({"analyses": ["nope"]})


def test_tolerance_resolution():
    cfg = ScenarioConfig.from_dict({"tolerances": {"clusterGap": 1e-4}})
    tols = cfg.resolve_tolerances()
    assert tols.cluster_gap == 1e-4
    assert tols.eig == DEFAULT_TOLS.eig


def test_rep_spec_parsing():
    assert parse_rep_spec("sl-so:4").sizes == (4,)
    assert parse_rep_spec("product:sl-so:3,sl-so:2").sizes == (3, 2)
    with pytest.raises(InvalidInput):
        parse_rep_spec("so:4")
    with pytest.raises(InvalidInput):
        parse_rep_spec("sl-so:x")


def test_point_spec_parsing():
    rep = parse_rep_spec("sl-so:3")
    v = parse_point_spec(rep, "veronese")
    assert abs(np.trace(v)) < 1e-12
    d = parse_point_spec(rep, "diag:1,2,6")
    assert np.allclose(np.diag(d), [-2.0, -1.0, 3.0])   # mean-centered
    r1 = parse_point_spec(rep, "random-regular:5")
    assert np.allclose(r1, parse_point_spec(rep, "random-regular:5"))
    with pytest.raises(InvalidInput):
        parse_point_spec(rep, "diag:1,2")
    with pytest.raises(InvalidInput):
        parse_point_spec(rep, "circle")


def test_product_point_spec():
    rep = parse_rep_spec("product:sl-so:3,sl-so:3")
    p = parse_point_spec(rep, "veronese;veronese")
    assert p.shape == (6, 6)
    assert np.allclose(p[:3, 3:], 0.0)
    with pytest.raises(InvalidInput):
        parse_point_spec(rep, "veronese")


def test_render_formatting():
    out = _render({"b": 1.5, "a": True, "c": None, "d": [1, 2.0]})
    assert out == '{"a":true,"b":1.5,"c":null,"d":[1,2]}'
    assert _render(0.1) == "0.10000000000000001"
    assert _render(float("nan")) == '"nan"'
    assert _render("a\"b\nc") == '"a\\"b\\nc"'


def test_render_coerces_numpy():
    out = _render({"x": np.float64(0.5), "n": np.int64(3),
                   "b": np.bool_(True), "v": np.arange(2.0)})
    assert out == '{"b":true,"n":3,"v":[0,1],"x":0.5}'


def test_render_rejects_unknown_types():
    with pytest.raises(InvalidInput):
        _render({"x": object()})


def test_empty_scenario_passes():
    report = run_scenario(ScenarioConfig())
    assert report.passed
    assert report.exit_code == 0
    assert report.analyses == {}


def test_orbit_scenario_body_is_deterministic():
    cfg = ScenarioConfig.from_dict({"rep": "sl-so:4", "point": "veronese",
                                    "analyses": ["orbit"], "seed": 3})
    r1 = run_scenario(cfg)
    r2 = run_scenario(cfg)
    assert r1.passed and r1.exit_code == 0
    assert r1.body_text() == r2.body_text()
    assert r1.analyses["orbit"]["dim"] == 3
    assert r1.analyses["orbit"]["homothecy"]["isHomothecy"]


def test_failing_analysis_does_not_cancel_siblings():
    # veronese orbits are not isoparametric, so coxeter hard-errors
    cfg = ScenarioConfig.from_dict({"rep": "sl-so:4", "point": "veronese",
                                    "analyses": ["orbit", "coxeter"]})
    report = run_scenario(cfg)
    assert report.analyses["orbit"]["ok"]
    assert not report.analyses["coxeter"]["ok"]
    assert report.analyses["coxeter"]["error"]["type"] == "NotIsoparametric"
    assert report.hard_error
    assert not report.passed
    assert report.exit_code == 1
    assert report.body()["summary"]["failures"] == ["coxeter"]


def test_bad_rep_reported_per_analysis():
    cfg = ScenarioConfig.from_dict({"rep": "sl-so:1", "point": "veronese",
                                    "analyses": ["orbit"]})
    report = run_scenario(cfg)
    assert report.hard_error
    assert "error" in report.analyses["orbit"]


def test_document_contains_timings():
    cfg = ScenarioConfig.from_dict({"rep": "sl-so:4", "point": "veronese",
                                    "analyses": ["orbit"]})
    report = run_scenario(cfg)
    assert '"timings"' in report.document_text()
    assert '"timings"' not in report.body_text()


def test_holonomy_and_bound_analyses():
    cfg = ScenarioConfig.from_dict({"rep": "sl-so:4", "point": "veronese",
                                    "analyses": ["holonomy", "bound"]})
    report = run_scenario(cfg)
    assert report.passed
    h = report.analyses["holonomy"]
    assert h["algebraDim"] == 3
    assert h["rank"] == 1
    assert h["conjectureClass"] == "s-orbit-compatible"
    b = report.analyses["bound"]
    assert b["bound"] == 1
    assert b["attained"]
    assert b["certificate"]["pairs"] == 1
