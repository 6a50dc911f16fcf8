"""One-dimensional simulation of the coupled system and its scalar bounds."""
from __future__ import annotations

from .classify import classify, temporal_residual
from .core import (Field, FrontObservation, Grid, InitialProfile, OutcomeReport, SimConfig,
                   Stepper, determinism_hash, front_position, init_field, laplacian,
                   observe_front, resolve_step, step, trapezoid_mass)
from .export import read_history, read_snapshot, write_history, write_snapshot
from .runner import (RunResult, reference_level, run, scalar_run, simulate, simulate_scalar,
                     upper_state)

__all__ = [
    "Field", "FrontObservation", "Grid", "InitialProfile", "OutcomeReport", "RunResult",
    "SimConfig", "Stepper", "classify", "determinism_hash", "front_position", "init_field",
    "laplacian", "observe_front", "read_history", "read_snapshot", "reference_level",
    "resolve_step", "run", "scalar_run", "simulate", "simulate_scalar", "step",
    "temporal_residual", "trapezoid_mass", "upper_state", "write_history", "write_snapshot",
]
