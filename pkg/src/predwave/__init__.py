"""Extinction and invasion of a prey under a generalist predator.

Dimensionless reaction-diffusion model with Holling type II predation:
threshold curves, steady-state analysis, front-direction criteria, 1-D
simulation, regime classification and parameter-space cartography.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (ConfigurationError, DomainError, InvalidParameterError,
                     NoRealRootsError, NumericalBlowupError, PredwaveError, RegimeError)
from .kinetics import Params, RawParams, nondimensionalize, reaction_rhs
from .ode_analysis import SteadyState, h_star, h_star_star, integrate_ode, r_crit, steady_states
from .wave_thresholds import (ScalarBistable, ThresholdSet, h1, h_minus, h_plus, potential_W,
                              threshold_set, u_pm, v_bar, wave_speed_sign)

__all__ = [
    "ConfigurationError", "DomainError", "InvalidParameterError", "NoRealRootsError",
    "NumericalBlowupError", "Params", "PredwaveError", "RawParams", "RegimeError",
    "ScalarBistable", "SteadyState", "ThresholdSet", "h1", "h_minus", "h_plus", "h_star",
    "h_star_star", "integrate_ode", "nondimensionalize", "potential_W", "r_crit",
    "reaction_rhs", "steady_states", "threshold_set", "u_pm", "v_bar", "wave_speed_sign",
]
