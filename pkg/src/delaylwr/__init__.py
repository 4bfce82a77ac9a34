"""Delayed LWR traffic model: altered Lax-Friedrichs solver and diagnostics."""

from delaylwr.core import (
    ConfigError,
    GridSpec,
    HistoryBuffer,
    HistoryError,
    grid_new,
    history_delayed,
    history_init,
)
from delaylwr.velocity import (
    CutPiecewise,
    Greenshields,
    alpha_continuous,
    flux,
    velocity,
)
from delaylwr.solver import (
    Adaptive,
    Dirichlet,
    Fixed,
    FinalTime,
    MaxSteps,
    NumericalFailure,
    Periodic,
    SolverConfig,
    Termination,
    Trajectory,
    cfl_dt,
    lf_step,
    neighbors,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "Adaptive",
    "ConfigError",
    "CutPiecewise",
    "Dirichlet",
    "FinalTime",
    "Fixed",
    "Greenshields",
    "GridSpec",
    "HistoryBuffer",
    "HistoryError",
    "MaxSteps",
    "NumericalFailure",
    "Periodic",
    "SolverConfig",
    "Termination",
    "Trajectory",
    "alpha_continuous",
    "cfl_dt",
    "flux",
    "grid_new",
    "history_delayed",
    "history_init",
    "lf_step",
    "neighbors",
    "run",
    "velocity",
]
