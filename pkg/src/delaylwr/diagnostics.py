"""Per-step measurements, the discrete bound checks, and experiment metrics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from delaylwr.core import BoundaryCondition, GridSpec, Periodic, pad_ghosts

log = logging.getLogger(__name__)

BOUND_TOL = 1e-12


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    time: float
    dt: float
    mass: float
    rho_min: float
    rho_max_val: float
    tv_space: float
    tv_time_increment: float
    linf_ok: bool
    tv_space_ok: bool
    overshoot: bool


def total_mass(field, grid: GridSpec) -> float:
    return grid.dx * float(np.sum(field))


def tv_space(field, bc: BoundaryCondition = Periodic()) -> float:
    """Sum of |jumps| over all interfaces, incl. the wrap or the two ghost interfaces."""
    field = np.asarray(field, dtype=float)
    padded = pad_ghosts(field, bc)
    if isinstance(bc, Periodic):
        # pad_ghosts duplicates the wrap interface on both ends
        padded = padded[1:]
    return float(np.sum(np.abs(np.diff(padded))))


def tv_time_increment(prev, next) -> float:
    prev, next = np.asarray(prev, dtype=float), np.asarray(next, dtype=float)
    if prev.shape != next.shape:
        raise ValueError(f"shape mismatch {prev.shape} vs {next.shape}")
    return float(np.sum(np.abs(next - prev)))


def check_linf_bound(next_max: float, cur_max: float, delayed_max: float) -> bool:
    return next_max <= 1.5 * max(cur_max, delayed_max) + BOUND_TOL


def check_tv_bound(tv_next: float, tv_cur: float, tv_delayed: float, m: float) -> bool:
    """TV growth estimate ``2 (5 + 1/m) max(TV^n, TV^{n-T})``.

    ``m`` is the sup over cells of the current and delayed densities. With
    ``m == 0`` the estimate is vacuous; any nonzero ``tv_next`` is then an
    anomaly and is reported as a failed check.
    """
    if m <= 0:
        if tv_next > BOUND_TOL:
            log.warning("vacuous TV bound: m=0 but TV^{n+1}=%g", tv_next)
            return False
        return True
    return tv_next <= 2.0 * (5.0 + 1.0 / m) * max(tv_cur, tv_delayed) + BOUND_TOL


def step_diagnostics(
    step: int,
    time: float,
    dt: float,
    new: np.ndarray,
    cur: np.ndarray,
    delayed: np.ndarray,
    grid: GridSpec,
    bc: BoundaryCondition,
    rho_max: float,
) -> StepDiagnostics:
    cur_sup = float(np.max(np.abs(cur)))
    delayed_sup = float(np.max(np.abs(delayed)))
    tv_new = tv_space(new, bc)
    new_max = float(np.max(new))
    return StepDiagnostics(
        step=step,
        time=time,
        dt=dt,
        mass=total_mass(new, grid),
        rho_min=float(np.min(new)),
        rho_max_val=new_max,
        tv_space=tv_new,
        tv_time_increment=tv_time_increment(cur, new),
        linf_ok=check_linf_bound(new_max, cur_sup, delayed_sup),
        tv_space_ok=check_tv_bound(
            tv_new, tv_space(cur, bc), tv_space(delayed, bc), max(cur_sup, delayed_sup)
        ),
        overshoot=new_max > rho_max,
    )


def initial_diagnostics(rho0, grid: GridSpec, bc: BoundaryCondition, rho_max: float):
    rho0 = np.asarray(rho0, dtype=float)
    return StepDiagnostics(
        step=0,
        time=0.0,
        dt=0.0,
        mass=total_mass(rho0, grid),
        rho_min=float(np.min(rho0)),
        rho_max_val=float(np.max(rho0)),
        tv_space=tv_space(rho0, bc),
        tv_time_increment=0.0,
        linf_ok=True,
        tv_space_ok=True,
        overshoot=float(np.max(rho0)) > rho_max,
    )


def amplitude(field) -> float:
    field = np.asarray(field, dtype=float)
    return float(field.max() - field.min())


def count_waves(field, min_prominence: float = 0.05) -> int:
    """Number of crests on the periodic circle with prominence >= ``min_prominence``.

    A crest is a strict local maximum; a plateau counts once. Prominence is the
    crest height above the higher of the two lowest points reached when walking
    left and right until a strictly higher value (or the crest itself) is met.
    """
    if min_prominence <= 0:
        raise ValueError("min_prominence must be > 0")
    values = np.asarray(field, dtype=float)
    # collapse runs of equal values, including a run wrapping past the end
    runs = [v for i, v in enumerate(values) if i == 0 or v != values[i - 1]]
    if len(runs) > 1 and runs[0] == runs[-1]:
        runs.pop()
    n = len(runs)
    if n < 2:
        return 0

    count = 0
    for i, peak in enumerate(runs):
        if not (runs[i - 1] < peak and runs[(i + 1) % n] < peak):
            continue
        lows = []
        for direction in (-1, 1):
            low = peak
            j = (i + direction) % n
            while j != i and runs[j] <= peak:
                low = min(low, runs[j])
                j = (j + direction) % n
            lows.append(low)
        if peak - max(lows) >= min_prominence:
            count += 1
    return count


def guaranteed_horizon_geometric(dx: float, rho0_sup: float) -> float:
    """Time reachable when the sup norm may grow by 3/2 per step under the CFL."""
    if rho0_sup <= 0:
        return math.inf
    return 3.0 * dx / rho0_sup


def horizon_partial_sum_delay(
    dx: float, rho0_max: float, dt_rho_sup: float, T: float, n: int
) -> float:
    """``dx * sum_{i=1..n} 1 / (rho0_max + i * dt_rho_sup * T / 2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if min(dx, rho0_max, dt_rho_sup, T) < 0:
        raise ValueError("arguments must be nonnegative")
    i = np.arange(1, n + 1, dtype=float)
    denom = rho0_max + i * (0.5 * dt_rho_sup * T)
    if np.any(denom == 0):
        return math.inf
    return float(dx * np.sum(1.0 / denom))


def estimate_time_derivative_sup(diagnostics, nx: int) -> float:
    """Largest mean |d rho / dt| over the recorded steps."""
    rates = [d.tv_time_increment / (nx * d.dt) for d in diagnostics if d.dt > 0]
    return max(rates, default=0.0)
