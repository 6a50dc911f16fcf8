"""Outcome and spatial-regime classification of a sampled simulation.

Decision tree, evaluated on the sampled history:

(a) prey gone everywhere and the initially occupied region decayed together
    (max/min ratio there stayed below 10)          -> uniform_extinction / uniform_decay
(b) prey gone, but a bump whose maximum moved right by more than 20 cells
    while the wake collapsed below eps               -> extinction / pulse
(c) prey gone after a retreating front left a plateau near u_ref
                                                     -> extinction / ETW
(d) advancing front with a plateau near u* behind    -> invasion / ITW
(c) and (d) also need at least 10 sampled front positions.
(e) stationary (residual < 1e-7), heterogeneous (var u > 1e-4), and h < h*
                                                     -> invasion / turing
Anything else is ``undetermined``; the outcome then follows the final field.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..kinetics import Params
from ..wave_thresholds import ThresholdSet
from .core import Field, FrontObservation, OutcomeReport, SimConfig, observe_front

UNIFORM_RATIO = 10.0
STATIONARY_RESIDUAL = 1e-7
TURING_VARIANCE = 1e-4
PLATEAU_RTOL = 0.25
PULSE_CELLS = 20
SPEED_DEADBAND = 1e-3
MIN_FRONT_SAMPLES = 10


def temporal_residual(history: list[Field]) -> float:
    if len(history) < 2:
        return math.inf
    a, b = history[-1], history[-2]
    return float(max(np.abs(a.u - b.u).max(), np.abs(a.v - b.v).max()))


def _uniform_decay(history: list[Field], eps: float) -> bool:
    occupied = history[0].u >= 0.5
    if not occupied.any():
        return False
    for f in history:
        w = f.u[occupied]
        top = w.max()
        if top < eps:
            break
        if w.min() <= 0 or top / w.min() >= UNIFORM_RATIO:
            return False
    return True


def _pulse(history: list[Field], cfg: SimConfig, eps: float) -> bool:
    grid = cfg.grid
    x = grid.x
    probes = grid.probe_indices()
    right = (1.0 - cfg.buffer_frac) * grid.L
    alive = []
    for f in history:
        i = int(np.argmax(f.u))
        if f.u[i] <= 10 * eps or x[i] >= right:
            break
        alive.append((f, x[i]))
    if len(alive) < 3:
        return False
    xs = np.array([xm for _, xm in alive])
    dx = grid.dx
    if xs[-1] - xs[0] <= PULSE_CELLS * dx or np.any(np.diff(xs) < -2 * dx):
        return False
    # wake: some probe the bump has passed is already below eps
    for f, xm in alive:
        passed = [j for j in probes if x[j] < xm - PULSE_CELLS * dx]
        if passed and min(f.u[j] for j in passed) < eps:
            return True
    return False


def _plateau_near(values, ref: float) -> bool:
    values = np.asarray(values)
    return values.size > 0 and bool(np.all(np.abs(values - ref) <= PLATEAU_RTOL * ref))


def classify(p: Params, history: list[Field], thresholds: Optional[ThresholdSet],
             cfg: SimConfig, u_ref: float, u_star: Optional[float],
             front: Optional[FrontObservation] = None) -> OutcomeReport:
    """Label a run from its sampled fields.

    ``u_ref`` is the plateau used for the front level, ``u_star`` the stable
    homogeneous prey level when one exists.
    """
    eps = cfg.extinction_eps
    grid = cfg.grid
    x = grid.x
    final = history[-1]
    if front is None:
        level = cfg.front_level if cfg.front_level is not None else 0.5 * u_ref
        front = observe_front(history, grid, level, cfg.buffer_frac)
    speed = front.fitted_speed
    residual = temporal_residual(history)
    diag = {
        "max_u_final": float(final.u.max()),
        "spatial_variance_final": float(final.u.var()),
        "temporal_residual": residual,
        "t_final": float(final.t),
    }
    extinct = diag["max_u_final"] < eps
    # a travelling-wave label needs a fit window of at least five samples
    tracked = len(front.times) >= MIN_FRONT_SAMPLES and math.isfinite(speed)

    def report(outcome, regime):
        return OutcomeReport(outcome, regime, speed, diag)

    if extinct:
        if _uniform_decay(history, eps):
            return report("uniform_extinction", "uniform_decay")
        if _pulse(history, cfg, eps):
            return report("extinction", "pulse")
        if tracked and speed < -SPEED_DEADBAND:
            t_fit = front.times[len(front.times) // 2:]
            behind = [f.u[0] for f in history if f.t in set(t_fit.tolist())]
            if _plateau_near(behind, u_ref):
                return report("extinction", "ETW")
        return report("extinction", "undetermined")

    if u_star is not None and tracked and speed > SPEED_DEADBAND:
        x_f = front.positions[-1]
        behind = [final.u[j] for j in grid.probe_indices() if x[j] < x_f - PULSE_CELLS * grid.dx]
        if _plateau_near(behind, u_star):
            return report("invasion", "ITW")
    h_star = thresholds.h_star if thresholds is not None else None
    if (residual < STATIONARY_RESIDUAL and diag["spatial_variance_final"] > TURING_VARIANCE
            and h_star is not None and p.h < h_star):
        return report("invasion", "turing")
    return report("invasion", "undetermined")
