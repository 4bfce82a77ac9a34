"""Altered Lax-Friedrichs stepper for the delayed LWR model.

The flux of cell ``i`` at step ``n`` is ``V(rho_i^{n-T}) * rho_i^n``: the
velocity factor is read from the field ``T`` steps back, the density factor
from the current field.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from delaylwr.core import (
    BoundaryCondition,
    ConfigError,
    Dirichlet,
    GridSpec,
    Periodic,
    history_delayed,
    history_init,
    pad_ghosts,
)
from delaylwr.diagnostics import StepDiagnostics, initial_diagnostics, step_diagnostics
from delaylwr.velocity import VelocityModel

log = logging.getLogger(__name__)

VACUUM_FLOOR = 1e-12
COLLAPSE_FACTOR = 1e-12


class NumericalFailure(ArithmeticError):
    def __init__(self, step, cell, value):
        super().__init__(f"non-finite density {value!r} at step {step}, cell {cell}")
        self.step = step
        self.cell = cell


@dataclass(frozen=True)
class Fixed:
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")


@dataclass(frozen=True)
class Adaptive:
    """CFL-adaptive time step (experimental: the physical delay drifts with dt).

    With ``velocity_cap`` the CFL denominator also includes the largest velocity
    used in the step, which restores positivity when every density is below
    ``v_max``.
    """

    safety: float = 1.0
    velocity_cap: bool = False

    def __post_init__(self):
        if not (0 < self.safety <= 1):
            raise ConfigError(f"dt.safety must be in (0, 1], got {self.safety}")


@dataclass(frozen=True)
class MaxSteps:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"stop after >= 1 step, got {self.n}")


@dataclass(frozen=True)
class FinalTime:
    t_f: float

    def __post_init__(self):
        if not self.t_f > 0:
            raise ConfigError(f"final time must be > 0, got {self.t_f}")


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    bc: BoundaryCondition = Periodic()
    t_delay_steps: int = 0
    dt_policy: Union[Fixed, Adaptive] = Fixed(0.01)
    stop: Union[MaxSteps, FinalTime] = FinalTime(3.0)
    feasibility: Literal["warn", "abort"] = "warn"

    def __post_init__(self):
        if self.t_delay_steps < 0:
            raise ConfigError(f"delay_steps must be >= 0, got {self.t_delay_steps}")
        if self.feasibility not in ("warn", "abort"):
            raise ConfigError(f"feasibility must be 'warn' or 'abort', got {self.feasibility!r}")

    def check_initial(self, rho0) -> None:
        """Reject initial data of the wrong size or violating the fixed-dt CFL."""
        rho0 = np.asarray(rho0, dtype=float)
        if rho0.shape != (self.grid.nx,):
            raise ConfigError(f"initial field has shape {rho0.shape}, grid has nx={self.grid.nx}")
        if not np.all(np.isfinite(rho0)):
            raise ConfigError("initial field contains non-finite values")
        if np.any(rho0 < 0):
            raise ConfigError("initial field must be nonnegative")
        if isinstance(self.dt_policy, Fixed):
            limit = self.grid.dx / max(float(np.max(np.abs(rho0))), VACUUM_FLOOR)
            if self.dt_policy.dt > limit:
                raise ConfigError(
                    f"fixed dt={self.dt_policy.dt} violates the positivity CFL "
                    f"dt <= dx/max|rho0| = {limit:.6g}"
                )


@dataclass(frozen=True)
class Termination:
    status: Literal["completed", "feasibility_abort", "cfl_collapse"] = "completed"
    step: Optional[int] = None


@dataclass
class Trajectory:
    snapshots: list = field(default_factory=list)  # (time, field) pairs
    diagnostics: list = field(default_factory=list)
    termination: Termination = Termination()
    first_overshoot_step: Optional[int] = None

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1][1]


def neighbors(values, i: int, bc: BoundaryCondition) -> tuple:
    nx = len(values)
    if isinstance(bc, Periodic):
        return values[(i - 1) % nx], values[(i + 1) % nx]
    left = bc.left if i == 0 else values[i - 1]
    right = bc.right if i == nx - 1 else values[i + 1]
    return left, right


def lf_step(current, delayed, dt, grid: GridSpec, model: VelocityModel, bc: BoundaryCondition, step=None):
    current = np.asarray(current, dtype=float)
    delayed = np.asarray(delayed, dtype=float)
    if current.shape != delayed.shape or current.shape != (grid.nx,):
        raise ValueError("current and delayed fields must both have length nx")
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")

    cur = pad_ghosts(current, bc)
    old = pad_ghosts(delayed, bc)
    left, right = cur[:-2], cur[2:]
    lam = dt / (2 * grid.dx)
    new = 0.5 * (right + left) - lam * (model(old[2:]) * right - model(old[:-2]) * left)

    bad = np.flatnonzero(~np.isfinite(new))
    if bad.size:
        raise NumericalFailure(step, int(bad[0]), new[bad[0]])
    return new


def cfl_dt(current, delayed, grid: GridSpec, safety: float = 1.0, velocity_bound: float = 0.0) -> float:
    """``safety * dx / max(|rho^n|, |rho^{n-T}|)`` over all cells.

    ``velocity_bound`` joins the maximum in the denominator when given. Near
    vacuum the step is capped at ``safety * dx``.
    """
    m = max(
        float(np.max(np.abs(current))),
        float(np.max(np.abs(delayed))),
        float(velocity_bound),
    )
    if m < VACUUM_FLOOR:
        return safety * grid.dx
    return safety * grid.dx / m


def _rho_max(model) -> float:
    return getattr(model, "rho_max", 1.0)


def run(cfg: SolverConfig, rho0, model: VelocityModel, snapshot_every: int = 5, ignore_delay: bool = False) -> Trajectory:
    """Advance ``rho0`` until ``cfg.stop``.

    Diagnostics are recorded for the initial state and every step; snapshots
    every ``snapshot_every`` steps plus the final state. ``ignore_delay`` feeds
    the current field as the delayed one regardless of ``t_delay_steps``.
    """
    if snapshot_every < 1:
        raise ConfigError("snapshot_every must be >= 1")
    cfg.check_initial(rho0)
    rho0 = np.array(rho0, dtype=float)
    grid, bc, delay = cfg.grid, cfg.bc, cfg.t_delay_steps
    rho_max = _rho_max(model)
    policy, stop = cfg.dt_policy, cfg.stop

    if isinstance(stop, MaxSteps):
        n_steps = stop.n
    elif isinstance(policy, Fixed):
        n_steps = math.ceil(stop.t_f / policy.dt - 1e-9)
    else:
        n_steps = None

    buf = history_init(rho0, delay)
    traj = Trajectory(snapshots=[(0.0, buf.initial)])
    traj.diagnostics.append(initial_diagnostics(rho0, grid, bc, rho_max))
    t = 0.0
    step = 0
    warned_negative = False

    while True:
        if n_steps is not None:
            if step >= n_steps:
                break
        elif stop.t_f - t <= COLLAPSE_FACTOR * grid.dx:
            break

        cur = buf.current
        old = cur if ignore_delay else history_delayed(buf, step, delay)
        if isinstance(policy, Fixed):
            dt = policy.dt
        else:
            vbound = float(np.max(model(old))) if policy.velocity_cap else 0.0
            dt = cfl_dt(cur, old, grid, policy.safety, vbound)
            if dt < COLLAPSE_FACTOR * grid.dx:
                traj.termination = Termination("cfl_collapse", step)
                log.warning("adaptive dt collapsed to %g at step %d", dt, step)
                break
            if isinstance(stop, FinalTime):
                dt = min(dt, stop.t_f - t)

        new = lf_step(cur, old, dt, grid, model, bc, step=step + 1)
        step += 1
        t = step * dt if isinstance(policy, Fixed) else t + dt
        buf.push(new)
        diag = step_diagnostics(step, t, dt, new, cur, old, grid, bc, rho_max)
        traj.diagnostics.append(diag)

        if diag.rho_min < 0 and not warned_negative:
            warned_negative = True
            log.warning("negative density %g at step %d", diag.rho_min, step)
        if diag.overshoot and traj.first_overshoot_step is None:
            traj.first_overshoot_step = step
            log.warning("density %g exceeds rho_max at step %d; model no longer reliable", diag.rho_max_val, step)
            if cfg.feasibility == "abort":
                traj.termination = Termination("feasibility_abort", step)
                traj.snapshots.append((t, buf.current))
                return traj
        if step % snapshot_every == 0:
            traj.snapshots.append((t, buf.current))

    if traj.snapshots[-1][0] != t:
        traj.snapshots.append((t, buf.current))
    return traj
