"""YAML run configs, CSV outputs and the run manifest."""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from delaylwr.core import ConfigError, Dirichlet, GridSpec, Periodic, grid_new
from delaylwr.diagnostics import amplitude, count_waves
from delaylwr.experiments import DEFAULT_PROMINENCE, InitialCondition, Preset
from delaylwr.solver import Adaptive, FinalTime, Fixed, MaxSteps, SolverConfig, Trajectory
from delaylwr.velocity import CutPiecewise, Greenshields

DIAGNOSTICS_HEADER = (
    "step,time,dt,mass,rho_min,rho_max,tv_space,tv_time_inc,linf_ok,tv_ok,overshoot"
)
DEFAULT_SNAPSHOT_EVERY = 5

_SCHEMA = {
    "grid": {"a", "b", "nx"},
    "bc": {"kind", "left", "right"},
    "delay_steps": None,
    "dt": {"kind", "value", "safety", "velocity_cap"},
    "stop": {"kind", "value"},
    "feasibility": None,
    "velocity": {"kind", "v_max", "rho_max", "rho_f", "rho_c", "alpha"},
    "initial": {"kind", "k", "left", "right", "x_jump", "ambient", "bump", "lo", "hi", "value"},
    "snapshot_every": None,
}
_REQUIRED = ("grid", "delay_steps", "dt", "stop", "velocity", "initial")


@dataclass(frozen=True)
class RunSetup:
    config: SolverConfig
    model: object
    initial: InitialCondition
    snapshot_every: int = DEFAULT_SNAPSHOT_EVERY

    def initial_field(self) -> np.ndarray:
        return self.initial(self.config.grid)

    @classmethod
    def from_preset(cls, p: Preset, snapshot_every: int = DEFAULT_SNAPSHOT_EVERY) -> "RunSetup":
        return cls(p.solver_config, p.velocity_model, p.initial_condition, snapshot_every)


def _number(section, key, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _integer(section, key, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return int(value)


def _require(section, d, *keys):
    missing = [k for k in keys if k not in d]
    if missing:
        raise ConfigError(f"{section}: missing key(s) {', '.join(missing)}")


def setup_from_dict(raw: dict) -> RunSetup:
    """Validate a nested config mapping; unknown keys are errors."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at top level")
    for key, value in raw.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        allowed = _SCHEMA[key]
        if allowed is not None:
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must be a mapping")
            for sub in value:
                if sub not in allowed:
                    raise ConfigError(f"unknown config key {key}.{sub}")
    _require("config", raw, *_REQUIRED)

    g = raw["grid"]
    _require("grid", g, "a", "b", "nx")
    grid = grid_new(_number("grid", "a", g["a"]), _number("grid", "b", g["b"]), _integer("grid", "nx", g["nx"]))

    bc_raw = raw.get("bc", {"kind": "periodic"})
    kind = bc_raw.get("kind", "periodic")
    if kind == "periodic":
        if set(bc_raw) - {"kind"}:
            raise ConfigError("bc.left/bc.right only apply to dirichlet boundaries")
        bc = Periodic()
    elif kind == "dirichlet":
        _require("bc", bc_raw, "left", "right")
        bc = Dirichlet(_number("bc", "left", bc_raw["left"]), _number("bc", "right", bc_raw["right"]))
    else:
        raise ConfigError(f"bc.kind must be 'periodic' or 'dirichlet', got {kind!r}")

    dt_raw = raw["dt"]
    _require("dt", dt_raw, "kind")
    if dt_raw["kind"] == "fixed":
        _require("dt", dt_raw, "value")
        if set(dt_raw) - {"kind", "value"}:
            raise ConfigError("dt.safety/dt.velocity_cap only apply to adaptive steps")
        policy = Fixed(_number("dt", "value", dt_raw["value"]))
    elif dt_raw["kind"] == "adaptive":
        if "value" in dt_raw:
            raise ConfigError("dt.value only applies to fixed steps")
        cap = dt_raw.get("velocity_cap", False)
        if not isinstance(cap, bool):
            raise ConfigError(f"dt.velocity_cap must be true/false, got {cap!r}")
        policy = Adaptive(_number("dt", "safety", dt_raw.get("safety", 1.0)), cap)
    else:
        raise ConfigError(f"dt.kind must be 'fixed' or 'adaptive', got {dt_raw['kind']!r}")

    stop_raw = raw["stop"]
    _require("stop", stop_raw, "kind", "value")
    if stop_raw["kind"] == "steps":
        stop = MaxSteps(_integer("stop", "value", stop_raw["value"]))
    elif stop_raw["kind"] == "time":
        stop = FinalTime(_number("stop", "value", stop_raw["value"]))
    else:
        raise ConfigError(f"stop.kind must be 'steps' or 'time', got {stop_raw['kind']!r}")

    config = SolverConfig(
        grid=grid,
        bc=bc,
        t_delay_steps=_integer("config", "delay_steps", raw["delay_steps"]),
        dt_policy=policy,
        stop=stop,
        feasibility=raw.get("feasibility", "warn"),
    )

    v = raw["velocity"]
    _require("velocity", v, "kind")
    v_max = _number("velocity", "v_max", v.get("v_max", 1.0))
    rho_max = _number("velocity", "rho_max", v.get("rho_max", 1.0))
    if v["kind"] == "greenshields":
        if set(v) - {"kind", "v_max", "rho_max"}:
            raise ConfigError("velocity.rho_f/rho_c/alpha only apply to kind 'cut'")
        model = Greenshields(v_max, rho_max)
    elif v["kind"] == "cut":
        _require("velocity", v, "rho_f", "rho_c")
        alpha = v.get("alpha", "auto")
        alpha = None if alpha == "auto" else _number("velocity", "alpha", alpha)
        model = CutPiecewise(
            v_max=v_max,
            rho_f=_number("velocity", "rho_f", v["rho_f"]),
            rho_c=_number("velocity", "rho_c", v["rho_c"]),
            alpha=alpha,
            rho_max=rho_max,
        )
    else:
        raise ConfigError(f"velocity.kind must be 'greenshields' or 'cut', got {v['kind']!r}")

    ic_raw = dict(raw["initial"])
    _require("initial", ic_raw, "kind")
    ic_kind = ic_raw.pop("kind")
    params = {}
    for key, value in ic_raw.items():
        params[key] = _integer("initial", key, value) if key == "k" else _number("initial", key, value)
    initial = InitialCondition(ic_kind, params)

    every = _integer("config", "snapshot_every", raw.get("snapshot_every", DEFAULT_SNAPSHOT_EVERY))
    if every < 1:
        raise ConfigError("snapshot_every must be >= 1")

    setup = RunSetup(config, model, initial, every)
    config.check_initial(setup.initial_field())
    return setup


def setup_to_dict(setup: RunSetup) -> dict:
    cfg = setup.config
    out = {
        "grid": {"a": cfg.grid.a, "b": cfg.grid.b, "nx": cfg.grid.nx},
        "bc": {"kind": "periodic"} if isinstance(cfg.bc, Periodic)
        else {"kind": "dirichlet", "left": cfg.bc.left, "right": cfg.bc.right},
        "delay_steps": cfg.t_delay_steps,
    }
    if isinstance(cfg.dt_policy, Fixed):
        out["dt"] = {"kind": "fixed", "value": cfg.dt_policy.dt}
    else:
        out["dt"] = {
            "kind": "adaptive",
            "safety": cfg.dt_policy.safety,
            "velocity_cap": cfg.dt_policy.velocity_cap,
        }
    if isinstance(cfg.stop, MaxSteps):
        out["stop"] = {"kind": "steps", "value": cfg.stop.n}
    else:
        out["stop"] = {"kind": "time", "value": cfg.stop.t_f}
    out["feasibility"] = cfg.feasibility

    m = setup.model
    if isinstance(m, Greenshields):
        out["velocity"] = {"kind": "greenshields", "v_max": m.v_max, "rho_max": m.rho_max}
    else:
        out["velocity"] = {
            "kind": "cut",
            "v_max": m.v_max,
            "rho_max": m.rho_max,
            "rho_f": m.rho_f,
            "rho_c": m.rho_c,
            "alpha": "auto" if m.auto_alpha else m.alpha,
        }
    out["initial"] = {"kind": setup.initial.kind, **setup.initial.params}
    out["snapshot_every"] = setup.snapshot_every
    return out


def dump_config(setup: RunSetup) -> str:
    return yaml.safe_dump(setup_to_dict(setup), sort_keys=False)


def load_config_text(text: str, source: str = "<config>") -> RunSetup:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"{where}: {getattr(exc, 'problem', None) or exc}") from None
    # a run manifest carries its resolved config under "config"
    if isinstance(raw, dict) and "tool_version" in raw and "config" in raw:
        raw = raw["config"]
    return setup_from_dict(raw)


def parse_config(path) -> RunSetup:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return load_config_text(text, str(path))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_density_csv(traj: Trajectory, grid: GridSpec, path) -> None:
    """Header row ``t`` plus the cell centers, then one row per snapshot."""
    if not traj.snapshots:
        raise ValueError("trajectory has no snapshots")
    lines = [",".join(["t"] + [_fmt(x) for x in grid.centers])]
    for t, field in traj.snapshots:
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in field]))
    _write(path, "\n".join(lines) + "\n")


def write_diagnostics_csv(traj: Trajectory, path) -> None:
    lines = [DIAGNOSTICS_HEADER]
    for d in traj.diagnostics:
        lines.append(",".join([
            str(d.step), _fmt(d.time), _fmt(d.dt), _fmt(d.mass), _fmt(d.rho_min),
            _fmt(d.rho_max_val), _fmt(d.tv_space), _fmt(d.tv_time_increment),
            str(int(d.linf_ok)), str(int(d.tv_space_ok)), str(int(d.overshoot)),
        ]))
    _write(path, "\n".join(lines) + "\n")


def _write(path, text):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def build_manifest(setup: RunSetup, traj: Trajectory, artifacts: dict) -> dict:
    from delaylwr import __version__

    final = traj.final
    return {
        "tool_version": __version__,
        "config": setup_to_dict(setup),
        "artifacts": artifacts,
        "termination": {"status": traj.termination.status, "step": traj.termination.step},
        "metrics": {
            "final_time": traj.snapshots[-1][0],
            "final_mass": traj.diagnostics[-1].mass,
            "final_amplitude": amplitude(final),
            "wave_count": count_waves(final, DEFAULT_PROMINENCE),
            "first_overshoot_step": traj.first_overshoot_step,
        },
    }


def write_run(setup: RunSetup, traj: Trajectory, out_dir) -> dict:
    """Write density CSV, diagnostics CSV and manifest into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {"density": "density.csv", "diagnostics": "diagnostics.csv"}
    write_density_csv(traj, setup.config.grid, out_dir / artifacts["density"])
    write_diagnostics_csv(traj, out_dir / artifacts["diagnostics"])
    manifest = build_manifest(setup, traj, artifacts)
    _write(out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
