import json

import numpy as np
import pytest

from neckpinch.cli import main
from neckpinch.config import ConfigError, RunConfig, config_from_dict, load_config
from neckpinch.flow import FlowConfig, evolve
from neckpinch.grid import PeriodicGrid
from neckpinch.monitors import constants, run_monitors, type1_classifier
from neckpinch.output import CSV_HEADER, write_series, write_summary
from neckpinch.presets import Profile, biaxial, get_preset, presets, sphere


# --- presets ----------------------------------------------------------------


def test_presets_contains_canonical_names():
    names = [p.name for p in presets()]
    for required in ("fig-a", "fig-b", "fig-c", "sphere", "biaxial"):
        assert required in names


def test_fig_a_profiles():
    g = PeriodicGrid(64)
    st = get_preset("fig-a").build(g)
    assert np.allclose(st.phi.values, 1.0)
    assert np.allclose(st.a.values, np.cos(g.z) + 1.5)
    assert np.allclose(st.b.values, np.cos(g.z) + 2.5)
    assert np.allclose(st.c.values, np.cos(g.z) + 3.5)


def test_fig_b_profiles():
    g = PeriodicGrid(64)
    st = get_preset("fig-b").build(g)
    assert np.allclose(st.a.values, np.cos(2 * g.z) + 1.5)
    assert np.allclose(st.b.values, np.sin(g.z) + 4.0)
    assert np.allclose(st.c.values, 6.0)


def test_fig_c_profiles():
    g = PeriodicGrid(64)
    st = get_preset("fig-c").build(g)
    assert np.allclose(st.a.values, 0.5 * np.cos(g.z) + 1.0)
    assert np.allclose(st.b.values, np.cos(g.z) + 2.0)
    assert np.allclose(st.c.values, 2.0 * np.cos(g.z) + 4.0)


def test_sphere_preset_parameterized():
    g = PeriodicGrid(32)
    st = sphere(3.0).build(g)
    for f in (st.a, st.b, st.c):
        assert np.allclose(f.values, 3.0)
    st = get_preset("sphere", {"r": 2.0}).build(g)
    assert np.allclose(st.a.values, 2.0)


def test_biaxial_preset():
    st = biaxial(1.0, 2.0).build(PeriodicGrid(32))
    assert np.allclose(st.a.values, 1.0)
    assert np.array_equal(st.b.values, st.c.values)


def test_profile_samples_kind():
    g = PeriodicGrid(32)
    values = tuple(1.0 + 0.1 * np.sin(g.z))
    p = Profile(kind="samples", samples=values)
    assert np.allclose(p.evaluate(g), values)
    with pytest.raises(ValueError):
        p.evaluate(PeriodicGrid(64))


def test_profile_rejects_unknown_kind():
    with pytest.raises(ValueError):
        Profile(kind="tanh")


# --- config ------------------------------------------------------------------


def test_config_defaults_applied():
    cfg = config_from_dict({"preset": "fig-a", "grid_n": 256})
    assert cfg.preset == "fig-a"
    assert cfg.grid_n == 256
    assert cfg.flow == FlowConfig()
    assert cfg.formats == ("csv", "json")


def test_config_rejects_odd_grid():
    with pytest.raises(ConfigError):
        config_from_dict({"grid_n": 31})


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"preset": "fig-a", "grid_m": 64})
    with pytest.raises(ConfigError):
        config_from_dict({"flow": {"dt": 0.1}})


def test_config_flow_override():
    cfg = config_from_dict({"preset": "fig-a", "flow": {"a_min_stop": 0.01}})
    assert cfg.flow.a_min_stop == 0.01
    assert cfg.flow.cfl_safety == FlowConfig().cfl_safety


def test_config_round_trip(tmp_path):
    cfg = RunConfig()
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.as_dict()))
    assert load_config(path) == cfg


def test_config_inline_profiles():
    cfg = config_from_dict(
        {
            "grid_n": 32,
            "profiles": {
                "phi0": {"kind": "const", "offset": 1.0},
                "a0": {"kind": "cos", "amplitude": 1.0, "offset": 1.5},
                "b0": {"kind": "cos", "amplitude": 1.0, "offset": 2.5},
                "c0": {"kind": "cos", "amplitude": 1.0, "offset": 3.5},
            },
        }
    )
    st = cfg.build_preset().build(PeriodicGrid(cfg.grid_n))
    g = PeriodicGrid(32)
    assert np.allclose(st.a.values, np.cos(g.z) + 1.5)


def test_config_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


# --- serialization --------------------------------------------------------------


@pytest.fixture(scope="module")
def sphere_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("sphere")
    st = sphere(2.0).build(PeriodicGrid(48))
    traj, report = evolve(st, FlowConfig(cfl_safety=0.1, a_min_stop=0.05))
    return out, traj, report


def test_write_series_schema(sphere_outputs):
    out, traj, _ = sphere_outputs
    path = out / "series.csv"
    write_series(traj, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[0] == "t,dt,a_min,b_min,c_max,ratio_max,ecc_bc,ecc_ac,s_min,rm_max"
    assert len(lines) - 1 == len(traj.samples)
    # spot-check the exact-solution column and the vanishing eccentricities
    row = lines[-1].split(",")
    t, a_min = float(row[0]), float(row[2])
    assert a_min**2 == pytest.approx(4.0 - 4.0 * t, rel=1e-3)
    assert float(row[6]) == 0.0 and float(row[7]) == 0.0


def test_write_series_deterministic(sphere_outputs, tmp_path):
    out, traj, _ = sphere_outputs
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_series(traj, p1)
    write_series(traj, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_summary_keys(sphere_outputs, tmp_path):
    _, traj, report = sphere_outputs
    reports = run_monitors(traj, report)
    type1 = type1_classifier(traj, report)
    consts = constants(traj.samples[0].ratio_max)
    path = tmp_path / "summary.json"
    write_summary(traj, report, reports, type1, consts, {"preset": "sphere"}, path)
    doc = json.loads(path.read_text())
    assert doc["config"] == {"preset": "sphere"}
    assert doc["stop_reason"] == "a_min_reached"
    assert doc["t_estimate"] == pytest.approx(1.0, abs=1e-4)
    assert doc["type1"]["classification"] == "TypeI"
    assert doc["type1"]["ratio_band"][0] == pytest.approx(2.0, abs=1e-2)
    assert doc["theorem_constants"]["lambda"] == 1.0
    assert set(doc["monitors"]) == set(reports)
    assert doc["monitors"]["ordering"]["passed"] is True


def test_write_summary_null_estimate_on_t_max_stop(tmp_path):
    st = sphere(2.0).build(PeriodicGrid(32))
    traj, report = evolve(st, FlowConfig(t_max=1e-5))
    assert report is None
    path = tmp_path / "summary.json"
    write_summary(traj, report, {}, None, None, {}, path)
    doc = json.loads(path.read_text())
    assert doc["t_estimate"] is None
    assert doc["stop_reason"] == "t_max_reached"


# --- CLI ----------------------------------------------------------------------


def test_cli_run_sphere(tmp_path, capsys):
    code = main(
        ["run", "--preset", "sphere", "--grid-n", "48", "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "series.csv").exists()
    assert (tmp_path / "summary.json").exists()
    captured = capsys.readouterr()
    assert "stop=a_min_reached" in captured.out


def test_cli_presets(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("fig-a", "fig-b", "fig-c", "sphere", "biaxial"):
        assert name in out


def test_cli_usage_error_exit_code():
    assert main(["run", "--no-such-flag"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["run", "--preset", "no-such-preset"]) == 1


def test_cli_strict_sphere_passes(tmp_path):
    code = main(
        [
            "run",
            "--preset",
            "sphere",
            "--grid-n",
            "48",
            "--out",
            str(tmp_path),
            "--strict",
        ]
    )
    assert code == 0


def test_cli_strict_fig_a_passes(tmp_path):
    code = main(
        [
            "run",
            "--preset",
            "fig-a",
            "--grid-n",
            "64",
            "--out",
            str(tmp_path),
            "--strict",
        ]
    )
    assert code == 0


def test_cli_strict_violation_exit_code(tmp_path):
    # a near-zero tolerance scale turns the benign discretization-level
    # ordering wiggle on fig-a into a hard violation
    cfg_path = tmp_path / "tight.json"
    cfg_path.write_text(
        json.dumps(
            {
                "preset": "fig-a",
                "grid_n": 64,
                "kappa": 1e-12,
                "out_dir": str(tmp_path / "out"),
            }
        )
    )
    assert main(["run", "--config", str(cfg_path), "--strict"]) == 3


def test_cli_convergence(capsys):
    assert main(["convergence"]) == 0
    out = capsys.readouterr().out
    assert out.count("measured orders") == 3


def test_cli_curvature(tmp_path, capsys):
    code = main(
        ["curvature", "--preset", "fig-a", "--grid-n", "64", "--out", str(tmp_path)]
    )
    assert code == 0
    table = (tmp_path / "curvature.csv").read_text().splitlines()
    assert table[0].startswith("z,k01,")
    assert len(table) == 65


def test_cli_run_with_config(tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(
        json.dumps(
            {
                "preset": "sphere",
                "preset_params": {"r": 2.0},
                "grid_n": 32,
                "flow": {"a_min_stop": 0.5},
                "out_dir": str(tmp_path / "out"),
            }
        )
    )
    assert main(["run", "--config", str(cfg_path)]) == 0
    doc = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert doc["config"]["flow"]["a_min_stop"] == 0.5


def test_cli_format_subset(tmp_path):
    code = main(
        [
            "run",
            "--preset",
            "sphere",
            "--grid-n",
            "32",
            "--out",
            str(tmp_path),
            "--format",
            "csv",
        ]
    )
    assert code == 0
    assert (tmp_path / "series.csv").exists()
    assert not (tmp_path / "summary.json").exists()


def test_cli_monitor_subset(tmp_path):
    code = main(
        [
            "run",
            "--preset",
            "sphere",
            "--grid-n",
            "32",
            "--out",
            str(tmp_path),
            "--monitors",
            "ordering,cmax_bound",
        ]
    )
    assert code == 0
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert set(doc["monitors"]) == {"ordering", "cmax_bound"}


def test_cli_identical_runs_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert (
            main(["run", "--preset", "sphere", "--grid-n", "32", "--out", str(out)])
            == 0
        )
    assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()
