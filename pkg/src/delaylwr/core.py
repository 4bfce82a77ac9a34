"""Uniform cell-centered grids and the delay history ring buffer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class HistoryError(LookupError):
    """A history query outside the retained window."""


@dataclass(frozen=True)
class GridSpec:
    a: float
    b: float
    nx: int
    dx: float

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.b - self.a


def grid_new(a: float, b: float, nx: int) -> GridSpec:
    if not isinstance(nx, (int, np.integer)) or isinstance(nx, bool):
        raise ConfigError(f"grid.nx must be an integer, got {nx!r}")
    if nx < 3:
        raise ConfigError(f"grid.nx must be >= 3, got {nx}")
    a, b = float(a), float(b)
    if not np.isfinite(a) or not np.isfinite(b) or b <= a:
        raise ConfigError(f"grid needs finite b > a, got a={a}, b={b}")
    return GridSpec(a=a, b=b, nx=int(nx), dx=(b - a) / nx)


@dataclass(frozen=True)
class Periodic:
    kind = "periodic"


@dataclass(frozen=True)
class Dirichlet:
    """Ghost cells beyond each end hold a fixed density, also in the delayed field."""

    left: float
    right: float
    kind = "dirichlet"

    def __post_init__(self):
        for name, value in (("left", self.left), ("right", self.right)):
            if not (0.0 <= value <= 1.0):
                raise ConfigError(f"Dirichlet {name} value {value} not in [0, 1]")


BoundaryCondition = Union[Periodic, Dirichlet]


def pad_ghosts(field: np.ndarray, bc: BoundaryCondition) -> np.ndarray:
    """Field with one ghost cell prepended and appended."""
    if isinstance(bc, Periodic):
        return np.concatenate((field[-1:], field, field[:1]))
    return np.concatenate(([bc.left], field, [bc.right]))


class HistoryBuffer:
    """Ring buffer holding the last ``delay_steps + 1`` density fields.

    Slot ``m % capacity`` holds the field of step ``m``. Every slot is
    pre-filled with the initial field so that the constant-in-time history on
    ``[-T, 0]`` is available from the first step. Queries for steps ``<= 0``
    return the initial field.
    """

    def __init__(self, rho0: np.ndarray, delay_steps: int):
        if delay_steps < 0:
            raise ConfigError(f"delay_steps must be >= 0, got {delay_steps}")
        rho0 = np.array(rho0, dtype=float)
        rho0.setflags(write=False)
        self.delay_steps = int(delay_steps)
        self.capacity = self.delay_steps + 1
        self.initial = rho0
        self._slots = [rho0] * self.capacity
        self.head = 0

    def __len__(self) -> int:
        return len(self._slots)

    def push(self, field: np.ndarray) -> None:
        field = np.array(field, dtype=float)
        if field.shape != self.initial.shape:
            raise ValueError(f"field shape {field.shape} != {self.initial.shape}")
        field.setflags(write=False)
        self.head += 1
        self._slots[self.head % self.capacity] = field

    def get(self, step: int) -> np.ndarray:
        oldest = self.head - self.delay_steps
        # the whole constant history is reachable until the window leaves t <= 0
        if step <= 0 and oldest <= 0:
            return self.initial
        if step < oldest or step > self.head:
            raise HistoryError(
                f"step {step} outside retained window [{oldest}, {self.head}]"
            )
        return self._slots[step % self.capacity]

    @property
    def current(self) -> np.ndarray:
        return self.get(self.head)


def history_init(rho0: np.ndarray, t_delay_steps: int) -> HistoryBuffer:
    return HistoryBuffer(rho0, t_delay_steps)


def history_delayed(buf: HistoryBuffer, n: int, t_delay_steps: int) -> np.ndarray:
    """Field at step ``n - t_delay_steps`` (the initial field if that is <= 0)."""
    if n != buf.head:
        raise HistoryError(f"query at step {n} but buffer head is {buf.head}")
    if t_delay_steps != buf.delay_steps:
        raise HistoryError(
            f"delay {t_delay_steps} does not match buffer delay {buf.delay_steps}"
        )
    return buf.get(n - t_delay_steps)
