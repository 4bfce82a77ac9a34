import json

import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from delaylwr.cli import main, parse_delays, UsageError
from delaylwr.core import ConfigError, grid_new
from delaylwr.experiments import PRESET_NAMES, preset
from delaylwr.io import (
    DIAGNOSTICS_HEADER,
    RunSetup,
    dump_config,
    load_config_text,
    parse_config,
    setup_to_dict,
    write_density_csv,
    write_diagnostics_csv,
)
from delaylwr.solver import Trajectory, run

TEST0_YAML = """\
grid: {a: 0, b: 1, nx: 50}
bc: {kind: periodic}
delay_steps: 15
dt: {kind: fixed, value: 0.01}
stop: {kind: time, value: 3}
feasibility: warn
velocity: {kind: greenshields, v_max: 1, rho_max: 1}
initial: {kind: sinusoidal, k: 1}
"""


def test_config_equivalent_to_preset(tmp_path):
    path = tmp_path / "test0.yaml"
    path.write_text(TEST0_YAML)
    setup = parse_config(path)
    p = preset("test0")
    assert setup.config == p.solver_config
    assert setup.model == p.velocity_model
    assert setup.initial == p.initial_condition
    a = run(setup.config, setup.initial_field(), setup.model)
    b = p.run()
    assert all(np.array_equal(f, g) for (_, f), (_, g) in zip(a.snapshots, b.snapshots))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_config_round_trip(name):
    setup = RunSetup.from_preset(preset(name), snapshot_every=3)
    again = load_config_text(dump_config(setup))
    assert again == setup


def test_round_trip_adaptive_and_explicit_alpha():
    text = TEST0_YAML.replace("dt: {kind: fixed, value: 0.01}", "dt: {kind: adaptive, safety: 0.8, velocity_cap: true}")
    text = text.replace("velocity: {kind: greenshields, v_max: 1, rho_max: 1}",
                        "velocity: {kind: cut, rho_f: 0.2, rho_c: 0.75, alpha: 0.5}")
    text = text.replace("stop: {kind: time, value: 3}", "stop: {kind: steps, value: 40}")
    setup = load_config_text(text)
    assert setup.model.alpha == 0.5
    assert load_config_text(dump_config(setup)) == setup


def bad(text, match):
    with pytest.raises(ConfigError, match=match):
        load_config_text(text)


def test_cfl_violation_rejected():
    # dx/max rho0 = 0.02/0.75 = 0.02666...
    bad(TEST0_YAML.replace("value: 0.01", "value: 0.05"), r"CFL.*0\.0266667")


def test_rho_f_above_rho_c_rejected():
    bad(TEST0_YAML.replace("{kind: greenshields, v_max: 1, rho_max: 1}", "{kind: cut, rho_f: 0.8, rho_c: 0.75}"), "rho_f")


def test_unknown_keys_rejected():
    bad(TEST0_YAML + "colour: red\n", "colour")
    bad(TEST0_YAML.replace("nx: 50", "nx: 50, ny: 3"), "grid.ny")


def test_misc_validation():
    bad(TEST0_YAML.replace("nx: 50", "nx: 50.5"), "grid.nx")
    bad(TEST0_YAML.replace("kind: periodic", "kind: wrap"), "bc.kind")
    bad(TEST0_YAML.replace("delay_steps: 15\n", ""), "delay_steps")
    bad(TEST0_YAML.replace("feasibility: warn", "feasibility: maybe"), "feasibility")
    bad(TEST0_YAML.replace("kind: sinusoidal, k: 1", "kind: sinusoidal, k: 1, left: 0.2"), "initial")
    bad(TEST0_YAML.replace("{kind: greenshields, v_max: 1, rho_max: 1}", "{kind: greenshields, v_max: 2}"), "v_max")


def test_parse_error_has_line(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("grid: {a: 0, b: 1\ndelay_steps: [\n")
    with pytest.raises(ConfigError, match=r"broken\.yaml:\d+:\d+"):
        parse_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(tmp_path / "missing.yaml")


def test_density_csv_shape(tmp_path):
    g = grid_new(0, 0.3, 3)
    traj = Trajectory(snapshots=[(0.0, np.array([0.1, 0.2, 0.3]))])
    path = tmp_path / "d.csv"
    write_density_csv(traj, g, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert all(len(line.split(",")) == 4 for line in lines)
    assert lines[0].split(",")[0] == "t"


def test_density_csv_header_and_precision(tmp_path):
    p = preset("test0")
    traj = p.run(snapshot_every=50)
    path = tmp_path / "d.csv"
    write_density_csv(traj, p.solver_config.grid, path)
    header = path.read_text().splitlines()[0].split(",")
    assert float(header[1]) == 0.01
    assert len(header) == 51
    row = path.read_text().splitlines()[-1].split(",")
    assert [float(v) for v in row[1:]] == traj.final.tolist()  # 17 digits round-trip exactly


def test_density_csv_needs_snapshots(tmp_path):
    with pytest.raises(ValueError):
        write_density_csv(Trajectory(), grid_new(0, 1, 3), tmp_path / "x.csv")


def test_diagnostics_csv(tmp_path):
    traj = preset("test2").run()
    path = tmp_path / "diag.csv"
    write_diagnostics_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == DIAGNOSTICS_HEADER
    assert len(lines) == 302
    first = lines[1].split(",")
    assert first[0] == "0" and float(first[3]) == pytest.approx(0.35)


def test_cli_preset_writes_three_files(tmp_path, capsys):
    out = tmp_path / "d"
    assert main(["preset", "test0", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["density.csv", "diagnostics.csv", "manifest.json"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["termination"]["status"] == "completed"
    assert manifest["config"]["delay_steps"] == 15


def test_cli_overshoot_records_step(tmp_path):
    out = tmp_path / "d"
    assert main(["preset", "test0-overshoot", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert isinstance(manifest["metrics"]["first_overshoot_step"], int)


def test_cli_unknown_preset(tmp_path, capsys):
    assert main(["preset", "nope", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "test0" in err and "trigger" in err


def test_cli_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["preset"]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == 1
    assert main(["sweep", "--preset", "test2", "--delays", "x..y", "--out", str(tmp_path)]) == 1


def test_cli_exit_codes_abort_and_collapse(tmp_path):
    cfg = yaml.safe_load(TEST0_YAML)
    cfg["delay_steps"] = 18
    cfg["feasibility"] = "abort"
    (tmp_path / "abort.yaml").write_text(yaml.safe_dump(cfg))
    assert main(["run", "--config", str(tmp_path / "abort.yaml"), "--out", str(tmp_path / "a")]) == 2
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["termination"]["status"] == "feasibility_abort"

    cfg = yaml.safe_load(TEST0_YAML)
    cfg["dt"] = {"kind": "adaptive", "safety": 1e-13}
    (tmp_path / "collapse.yaml").write_text(yaml.safe_dump(cfg))
    assert main(["run", "--config", str(tmp_path / "collapse.yaml"), "--out", str(tmp_path / "c")]) == 3


def test_rerun_from_manifest_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["preset", "trigger", "--out", str(a), "--t-final", "0.5", "--delay", "9"]) == 0
    assert main(["run", "--config", str(a / "manifest.json"), "--out", str(b)]) == 0
    for name in ("density.csv", "diagnostics.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_compare(tmp_path):
    assert main(["compare", "--preset", "test0", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "comparison.json").read_text())
    assert summary["amplitude_delayed"] > summary["initial_amplitude"] > summary["amplitude_undelayed"]
    assert (tmp_path / "delayed" / "manifest.json").exists()
    assert (tmp_path / "undelayed" / "density.csv").exists()
    assert len((tmp_path / "amplitude.csv").read_text().splitlines()) == 302


def test_cli_sweep(tmp_path):
    assert main(["sweep", "--preset", "test0", "--delays", "15,18", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "delay_steps,final_amplitude,wave_count,overshoot_step,sg_flag,status"
    assert [line.split(",")[0] for line in lines[1:]] == ["15", "18"]


def test_parse_delays():
    assert parse_delays("4..7") == [4, 5, 6, 7]
    assert parse_delays("3,9") == [3, 9]
    with pytest.raises(UsageError):
        parse_delays("")
    with pytest.raises(UsageError):
        parse_delays("7..4")


@given(st.integers(3, 200), st.integers(0, 30), st.floats(0.001, 0.02))
def test_round_trip_property(nx, delay, dt):
    text = TEST0_YAML.replace("nx: 50", f"nx: {nx}").replace("delay_steps: 15", f"delay_steps: {delay}")
    text = text.replace("value: 0.01", f"value: {dt!r}").replace("b: 1,", "b: 10,")
    setup = load_config_text(text)
    assert load_config_text(dump_config(setup)) == setup
    assert setup_to_dict(load_config_text(dump_config(setup))) == setup_to_dict(setup)
