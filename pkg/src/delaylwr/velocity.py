"""Velocity closures V(rho) and the delayed flux V(rho_delayed) * rho."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from delaylwr.core import ConfigError


def alpha_continuous(v_max: float, rho_f: float, rho_c: float) -> float:
    """Coefficient making the cut velocity continuous at ``rho_f``.

    Continuity at ``rho_c`` holds for every alpha since ``1/rho - 1/rho_c``
    vanishes there.
    """
    if rho_f <= 0:
        raise ConfigError("rho_f must be > 0 for a continuous alpha to exist")
    if rho_c <= rho_f:
        raise ConfigError(f"need rho_f < rho_c, got {rho_f} >= {rho_c}")
    return v_max / (1.0 / rho_f - 1.0 / rho_c)


@dataclass(frozen=True)
class Greenshields:
    v_max: float = 1.0
    rho_max: float = 1.0

    def __post_init__(self):
        if not (self.v_max > 0 and self.rho_max > 0):
            raise ConfigError("Greenshields needs v_max > 0 and rho_max > 0")
        if self.v_max > self.rho_max:
            raise ConfigError(
                f"v_max ({self.v_max}) must not exceed rho_max ({self.rho_max})"
            )

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        # cut at zero for rho > rho_max; the upper cut only matters for rho < 0
        return np.clip(self.v_max * (1.0 - rho / self.rho_max), 0.0, self.v_max)


@dataclass(frozen=True)
class CutPiecewise:
    """Free flow up to ``rho_f``, ``alpha (1/rho - 1/rho_c)`` up to ``rho_c``, then 0.

    ``alpha=None`` selects the coefficient that makes V continuous.
    """

    v_max: float = 1.0
    rho_f: float = 0.2
    rho_c: float = 0.75
    alpha: float | None = None
    rho_max: float = 1.0

    def __post_init__(self):
        if not (0 <= self.rho_f < self.rho_c <= self.rho_max):
            raise ConfigError(
                "need 0 <= rho_f < rho_c <= rho_max, got "
                f"rho_f={self.rho_f}, rho_c={self.rho_c}, rho_max={self.rho_max}"
            )
        if not self.v_max > 0:
            raise ConfigError("v_max must be > 0")
        if self.v_max > self.rho_max:
            raise ConfigError(
                f"v_max ({self.v_max}) must not exceed rho_max ({self.rho_max})"
            )
        if self.alpha is None:
            object.__setattr__(
                self, "alpha", alpha_continuous(self.v_max, self.rho_f, self.rho_c)
            )
        elif not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")

    @property
    def auto_alpha(self) -> bool:
        return self.rho_f > 0 and self.alpha == alpha_continuous(
            self.v_max, self.rho_f, self.rho_c
        )

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            middle = self.alpha * (1.0 / rho - 1.0 / self.rho_c)
        # an explicit alpha may exceed v_max just above rho_f
        middle = np.clip(middle, 0.0, self.v_max)
        return np.where(
            rho <= self.rho_f, self.v_max, np.where(rho >= self.rho_c, 0.0, middle)
        )


VelocityModel = Union[Greenshields, CutPiecewise]


def velocity(model: VelocityModel, rho):
    """Evaluate V(rho); scalars in, float out."""
    arr = np.asarray(rho, dtype=float)
    if np.any(arr < 0):
        raise ValueError(f"velocity undefined for negative density {rho!r}")
    out = model(arr)
    return float(out) if out.ndim == 0 else out


def flux(model: VelocityModel, rho_delayed, rho_current):
    """Delayed flux: velocity read at the delayed density, carried by the current one."""
    if np.any(np.asarray(rho_current) < 0):
        raise ValueError(f"flux undefined for negative density {rho_current!r}")
    out = np.asarray(velocity(model, rho_delayed)) * np.asarray(rho_current, dtype=float)
    return float(out) if out.ndim == 0 else out
