import json
import os

import numpy as np
import pytest

from imcflab.cli import main as cli_main
from imcflab.geometry import compute_tensors
from imcflab.scenario import (
    ALL_CHECKS,
    SERIES_COLUMNS,
    ScenarioConfig,
    config_from_dict,
    emit_report,
    parse_config,
    run_scenario,
    sweep,
    verify_run,
)


def curve_config(**overrides):
    data = {
        "backend": "curve",
        "shape": {"kind": "sphere", "radius": 1.0},
        "resolution": 64,
        "t_end": 0.6,
        "dt": 2e-3,
        "sample_interval": 0.05,
        "p": [2.0],
        "seed": 42,
    }
    data.update(overrides)
    return config_from_dict(data)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def test_parse_minimal_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({
        "backend": "surface",
        "shape": {"kind": "sphere", "radius": 1.0},
        "t_end": 1.0,
    }))
    cfg = parse_config(path)
    assert cfg.speed == "imcf"
    assert cfg.checks == "all"
    fc = cfg.flow_config()
    assert fc.cfl_factor == 0.2
    assert fc.interval == pytest.approx(1.0 / 50)


def test_unknown_key_named():
    with pytest.raises(ValueError, match="wibble"):
        config_from_dict({"backend": "surface", "t_end": 1.0, "wibble": 1})


def test_alpha_bound_named():
    with pytest.raises(ValueError, match=r"alpha.*\(0, 1\]"):
        config_from_dict({"backend": "surface", "t_end": 1.0, "alpha": 1.5})


def test_more_validation_errors():
    with pytest.raises(ValueError, match="t_end"):
        config_from_dict({"backend": "surface", "t_end": -2.0})
    with pytest.raises(ValueError, match="p values"):
        config_from_dict({"backend": "surface", "t_end": 1.0, "p": [1.0]})
    with pytest.raises(ValueError, match="unknown check"):
        config_from_dict({"backend": "surface", "t_end": 1.0,
                          "checks": ["no_such"]})
    with pytest.raises(ValueError, match="shape key"):
        config_from_dict({"backend": "surface", "t_end": 1.0,
                          "shape": {"kind": "sphere", "radiu": 1.0}})


def test_p_list_configures_two_series():
    cfg = curve_config(p=[2.0, 3.0])
    assert cfg.p == [2.0, 3.0]


# ---------------------------------------------------------------------------
# run artifacts
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def curve_artifact(tmp_path_factory):
    out = tmp_path_factory.mktemp("curve_run")
    return run_scenario(curve_config(), out)


def test_artifact_complete(curve_artifact):
    root = curve_artifact.path
    for name in ("config.json", "series.csv", "report.json", "summary.md"):
        assert (root / name).exists()
    assert curve_artifact.status == "completed"
    snaps = os.listdir(root / "snapshots")
    assert len(snaps) == len(curve_artifact.trace)
    assert all(s.startswith("snapshot_t") for s in snaps)
    eigs = os.listdir(root / "eigenfunctions")
    assert len(eigs) == len(curve_artifact.trace)


def test_series_schema_and_monotone_time(curve_artifact):
    lines = (curve_artifact.path / "series.csv").read_text().splitlines()
    assert lines[0].split(",") == SERIES_COLUMNS
    t = [float(row.split(",")[0]) for row in lines[1:]]
    assert all(b > a for a, b in zip(t, t[1:]))


def test_every_configured_check_reported(curve_artifact):
    payload = json.loads((curve_artifact.path / "report.json").read_text())
    ids = [c["details"]["check_id"] for c in payload["checks"]]
    assert set(ids) == set(ALL_CHECKS)


def test_checks_pass_on_round_curve(curve_artifact):
    bad = [r for r in curve_artifact.reports
           if not r.passed and r.status != "skipped"]
    assert bad == []
    assert curve_artifact.all_passed


def test_summary_table(curve_artifact):
    text = (curve_artifact.path / "summary.md").read_text()
    assert "| check |" in text
    assert "area_growth_law" in text


def test_determinism(tmp_path):
    a = run_scenario(curve_config(), tmp_path / "a")
    b = run_scenario(curve_config(), tmp_path / "b")
    assert (tmp_path / "a" / "series.csv").read_bytes() == \
        (tmp_path / "b" / "series.csv").read_bytes()
    assert (tmp_path / "a" / "report.json").read_bytes() == \
        (tmp_path / "b" / "report.json").read_bytes()


def test_aborted_run_records_cause(tmp_path):
    # mean curvature flow shrinks the circle to a point before t_end
    cfg = curve_config(speed="mcf", t_end=0.5, dt=5e-3,
                       shape={"kind": "sphere", "radius": 0.5})
    art = run_scenario(cfg, tmp_path / "collapse")
    assert art.status == "aborted"
    payload = json.loads((art.path / "report.json").read_text())
    assert payload["status"] == "aborted"
    assert payload["abort_time"] > 0
    assert "Error" in payload["abort_reason"]
    summary = (art.path / "summary.md").read_text()
    assert "aborted" in summary


def test_hypothesis_violation_aborts(tmp_path):
    cfg = curve_config(shape={"kind": "perturbed_sphere", "radius": 1.0,
                              "amplitude": 0.45},
                       resolution=128, seed=5)
    surf = cfg.build_surface()
    assert np.min(compute_tensors(surf).mean_curvature) < 0  # setup sanity
    art = run_scenario(cfg, tmp_path / "nonconvex")
    assert art.status == "aborted"
    payload = json.loads((art.path / "report.json").read_text())
    assert "hypothesis-violation" in payload["abort_reason"]


def test_verify_run_roundtrip(curve_artifact, tmp_path):
    art = verify_run(curve_artifact.path)
    assert art.status == "completed"
    before = {(r.name, r.passed) for r in curve_artifact.reports}
    after = {(r.name, r.passed) for r in art.reports}
    assert after == before


def test_verify_run_check_subset(curve_artifact):
    art = verify_run(curve_artifact.path, checks=["area_growth"])
    ids = {r.details["check_id"] for r in art.reports}
    assert ids == {"area_growth"}


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def test_sweep_alpha_bound_constants(tmp_path):
    base = config_from_dict({
        "backend": "surface",
        "shape": {"kind": "sphere", "radius": 1.0},
        "resolution": 1,
        "t_end": 0.1,
        "dt": 5e-3,
        "sample_interval": 0.05,
        "checks": ["isoperimetric"],
    })
    arts = sweep(base, "alpha", [0.5, 1.0], tmp_path / "sweep")
    assert len(arts) == 2
    c_values = [a.reports[0].details["C"] for a in arts]
    assert c_values[0] == pytest.approx(np.e, rel=1e-12)
    assert c_values[1] == 1.0
    combined = (tmp_path / "sweep" / "combined.csv").read_text().splitlines()
    assert combined[0] == "parameter,value,check,margin,tolerance,status,C"
    assert len(combined) == 3


def test_sweep_validation(tmp_path):
    base = curve_config()
    with pytest.raises(ValueError):
        sweep(base, "gamma", [1.0], tmp_path / "x")
    with pytest.raises(ValueError):
        sweep(base, "alpha", [], tmp_path / "y")


def test_emit_report_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        emit_report(tmp_path)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def write_config(tmp_path, **overrides):
    data = {
        "backend": "curve",
        "shape": {"kind": "sphere", "radius": 1.0},
        "resolution": 48,
        "t_end": 0.5,
        "dt": 2e-3,
        "sample_interval": 0.05,
        "checks": ["area_growth", "monotone", "h_decay"],
    }
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def test_cli_simulate_and_report(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "run"
    assert cli_main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "run completed" in stdout
    assert cli_main(["report", "--run", str(out)]) == 0
    assert cli_main(["verify", "--run", str(out),
                     "--checks", "area_growth"]) == 0


def test_cli_sweep(tmp_path):
    cfg = write_config(tmp_path, backend="surface", resolution=1,
                       t_end=0.1, checks=["isoperimetric"])
    out = tmp_path / "sweepdir"
    rc = cli_main(["sweep", "--config", str(cfg), "--param", "alpha",
                   "--values", "0.5,1.0", "--out", str(out)])
    assert rc == 0
    assert (out / "combined.csv").exists()


def test_cli_bad_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"backend": "surface", "t_end": 1.0,
                                "wibble": 2}))
    assert cli_main(["simulate", "--config", str(path),
                     "--out", str(tmp_path / "o")]) == 2
