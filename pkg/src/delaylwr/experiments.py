"""Initial data, named presets, delayed/undelayed comparison and delay sweeps."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from delaylwr.core import ConfigError, Dirichlet, GridSpec, Periodic, grid_new
from delaylwr.diagnostics import amplitude, count_waves
from delaylwr.solver import FinalTime, Fixed, SolverConfig, Trajectory, run
from delaylwr.velocity import CutPiecewise, Greenshields, VelocityModel

log = logging.getLogger(__name__)

DEFAULT_PROMINENCE = 0.05


def ic_sinusoidal(grid: GridSpec, k: int) -> np.ndarray:
    if k < 1:
        raise ConfigError(f"wave number k must be >= 1, got {k}")
    return 5 / 8 + np.sin(2 * k * np.pi * grid.centers) / 8


def ic_riemann(grid: GridSpec, left: float, right: float, x_jump: float) -> np.ndarray:
    _check_density("left", left)
    _check_density("right", right)
    return np.where(grid.centers < x_jump, float(left), float(right))


def ic_cell_perturbation(grid: GridSpec, ambient: float, bump: float, lo: float, hi: float) -> np.ndarray:
    """Ambient density with the cells centered in ``[lo, hi]`` raised to ``bump``.

    If the interval holds no cell center, the single cell containing its
    midpoint is raised instead.
    """
    _check_density("ambient", ambient)
    _check_density("bump", bump)
    if not lo < hi:
        raise ConfigError(f"need lo < hi, got [{lo}, {hi}]")
    if lo < grid.a or hi > grid.b:
        raise ConfigError(f"perturbation [{lo}, {hi}] outside domain [{grid.a}, {grid.b}]")
    x = grid.centers
    inside = (x >= lo) & (x <= hi)
    if not inside.any():
        cell = min(int((0.5 * (lo + hi) - grid.a) // grid.dx), grid.nx - 1)
        inside[cell] = True
    return np.where(inside, float(bump), float(ambient))


def ic_constant(grid: GridSpec, value: float) -> np.ndarray:
    _check_density("value", value)
    return np.full(grid.nx, float(value))


def _check_density(name, value):
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} density {value} not in [0, 1]")


_IC_BUILDERS = {
    "sinusoidal": (ic_sinusoidal, ("k",)),
    "riemann": (ic_riemann, ("left", "right", "x_jump")),
    "perturbation": (ic_cell_perturbation, ("ambient", "bump", "lo", "hi")),
    "constant": (ic_constant, ("value",)),
}


@dataclass(frozen=True)
class InitialCondition:
    """Named rule producing a density field on a grid, e.g. ``("sinusoidal", {"k": 1})``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _IC_BUILDERS:
            raise ConfigError(f"unknown initial.kind {self.kind!r}; valid: {sorted(_IC_BUILDERS)}")
        expected = set(_IC_BUILDERS[self.kind][1])
        if set(self.params) != expected:
            raise ConfigError(
                f"initial.kind={self.kind} takes keys {sorted(expected)}, got {sorted(self.params)}"
            )

    def __call__(self, grid: GridSpec) -> np.ndarray:
        builder, _ = _IC_BUILDERS[self.kind]
        return builder(grid, **self.params)


@dataclass(frozen=True)
class Preset:
    name: str
    solver_config: SolverConfig
    initial_condition: InitialCondition
    velocity_model: VelocityModel
    expected_checks: tuple = ()

    def initial_field(self) -> np.ndarray:
        return self.initial_condition(self.solver_config.grid)

    def with_delay(self, delay_steps: int) -> "Preset":
        return replace(self, solver_config=replace(self.solver_config, t_delay_steps=delay_steps))

    def with_final_time(self, t_f: float) -> "Preset":
        return replace(self, solver_config=replace(self.solver_config, stop=FinalTime(t_f)))

    def run(self, snapshot_every: int = 5, **kwargs) -> Trajectory:
        return run(self.solver_config, self.initial_field(), self.velocity_model, snapshot_every, **kwargs)


def _unit_periodic(delay, dt=0.01, t_f=3.0):
    return SolverConfig(
        grid=grid_new(0.0, 1.0, 50),
        bc=Periodic(),
        t_delay_steps=delay,
        dt_policy=Fixed(dt),
        stop=FinalTime(t_f),
        feasibility="warn",
    )


def _build_presets():
    gs = Greenshields(1.0, 1.0)
    cut = CutPiecewise(v_max=1.0, rho_f=0.2, rho_c=0.75)
    sine1 = InitialCondition("sinusoidal", {"k": 1})
    sine2 = InitialCondition("sinusoidal", {"k": 2})
    step = InitialCondition("riemann", {"left": 0.6, "right": 0.1, "x_jump": 0.5})
    bump = InitialCondition("perturbation", {"ambient": 0.2, "bump": 0.35, "lo": 1.34, "hi": 1.342})
    trigger_cfg = SolverConfig(
        grid=grid_new(0.0, 2.0, 100),
        bc=Dirichlet(0.2, 0.2),
        t_delay_steps=21,
        dt_policy=Fixed(0.009),
        stop=FinalTime(3.0),
        feasibility="warn",
    )
    presets = [
        Preset("test0", _unit_periodic(15), sine1, gs,
               ("amplitude(t_f) >= initial amplitude", "never exceeds rho_max")),
        Preset("test0-lwr", _unit_periodic(0), sine1, gs,
               ("amplitude(t_f) <= 0.2 * initial amplitude",)),
        Preset("test0-overshoot", _unit_periodic(18), sine1, gs,
               ("exceeds rho_max at some step",)),
        Preset("test1-k1", _unit_periodic(16), sine1, gs, ("one wave at t_f",)),
        Preset("test1-k2", _unit_periodic(22), sine2, gs, ("two waves at t_f",)),
        Preset("test2", _unit_periodic(10), step, cut,
               ("reaches rho_c", "amplitude(t_f) >= initial amplitude")),
        Preset("test2-lowdelay", _unit_periodic(4), step, cut,
               ("stays below rho_c after step 50", "amplitude(t_f) < initial amplitude")),
        Preset("trigger", trigger_cfg, bump, cut,
               ("peak moves upstream", "peak grows above 0.35")),
    ]
    return {p.name: p for p in presets}


PRESETS = _build_presets()
PRESET_NAMES = tuple(PRESETS)


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}") from None


def amplitude_series(traj: Trajectory) -> np.ndarray:
    return np.array([d.rho_max_val - d.rho_min for d in traj.diagnostics])


def max_density_reached(traj: Trajectory, after_step: int = 0) -> float:
    return max(d.rho_max_val for d in traj.diagnostics if d.step >= after_step)


def shows_stop_and_go(traj: Trajectory, model: VelocityModel) -> bool:
    """Final amplitude >= initial amplitude, and for cut velocities some cell reached rho_c."""
    grows = amplitude(traj.final) >= amplitude(traj.snapshots[0][1])
    if isinstance(model, CutPiecewise):
        return grows and max_density_reached(traj) >= model.rho_c
    return grows


@dataclass
class ComparisonReport:
    initial_amplitude: float
    amplitude_delayed: float
    amplitude_undelayed: float
    ratio: float
    times: np.ndarray
    series_delayed: np.ndarray
    series_undelayed: np.ndarray
    delayed: Trajectory
    undelayed: Trajectory


def compare_delayed_undelayed(base: Preset, snapshot_every: int = 5) -> ComparisonReport:
    delayed = base.run(snapshot_every)
    undelayed = base.with_delay(0).run(snapshot_every)
    a_d, a_u = amplitude(delayed.final), amplitude(undelayed.final)
    if a_u > 0:
        ratio = a_d / a_u
    else:
        ratio = 1.0 if a_d == 0 else float("inf")
    return ComparisonReport(
        initial_amplitude=amplitude(base.initial_field()),
        amplitude_delayed=a_d,
        amplitude_undelayed=a_u,
        ratio=ratio,
        times=np.array([d.time for d in delayed.diagnostics]),
        series_delayed=amplitude_series(delayed),
        series_undelayed=amplitude_series(undelayed),
        delayed=delayed,
        undelayed=undelayed,
    )


@dataclass(frozen=True)
class SweepRecord:
    delay_steps: int
    final_amplitude: float = float("nan")
    wave_count: int = -1
    overshoot_step: Optional[int] = None
    sg_flag: bool = False
    status: str = "completed"
    error: str = ""


def _sweep_one(base: Preset, delay: int) -> SweepRecord:
    try:
        traj = base.with_delay(delay).run()
    except Exception as exc:  # recorded per run; the sweep continues
        log.warning("delay %d failed: %s", delay, exc)
        return SweepRecord(delay_steps=delay, status="error", error=f"{type(exc).__name__}: {exc}")
    return SweepRecord(
        delay_steps=delay,
        final_amplitude=amplitude(traj.final),
        wave_count=count_waves(traj.final, DEFAULT_PROMINENCE),
        overshoot_step=traj.first_overshoot_step,
        sg_flag=shows_stop_and_go(traj, base.velocity_model),
        status=traj.termination.status,
    )


def delay_sweep(base: Preset, delays, workers: int = 1) -> list:
    """One run per delay, records ordered by delay."""
    delays = sorted(set(int(d) for d in delays))
    if not delays:
        raise ConfigError("delay sweep needs at least one delay")
    if min(delays) < 0:
        raise ConfigError("delays must be >= 0")
    if workers <= 1:
        return [_sweep_one(base, d) for d in delays]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_one, [base] * len(delays), delays))


def record_row(rec: SweepRecord) -> dict:
    return dataclasses.asdict(rec)
