"""Driving loops for the coupled system and the scalar comparison equation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError, RegimeError
from ..kinetics import Params
from ..ode_analysis import positive_high
from ..wave_thresholds import ScalarBistable, ThresholdSet, threshold_set, u_pm, v_bar
from .classify import STATIONARY_RESIDUAL, classify
from .core import (Field, FrontObservation, OutcomeReport, SimConfig, Stepper, check_finite,
                   determinism_hash, front_position, init_field, observe_front, resolve_step)

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    final: Field
    front: FrontObservation
    report: OutcomeReport
    history: list[Field]
    scheme: str
    dt: float

    @property
    def hash(self) -> str:
        return determinism_hash(self.final)


def upper_state(p: Params) -> Optional[float]:
    """u* of the homogeneous coexistence state, if one exists."""
    if p.E <= 1:
        return None
    s = positive_high(p.E, p.h, p.alpha, p.r)
    return None if s is None else s.u


def reference_level(p: Params) -> float:
    """Plateau u_ref behind the front: u*, else u+ of the v=1 scalar equation, else 1."""
    us = upper_state(p)
    if us is not None:
        return us
    try:
        return u_pm(p.E, p.h)[1]
    except DomainError:
        return 1.0


def thresholds_for(E: float, alpha: float) -> Optional[ThresholdSet]:
    """Threshold set, or None where it is undefined (E <= 1)."""
    if E <= 1:
        return None
    try:
        return threshold_set(E, alpha)
    except (DomainError, RegimeError, ValueError) as exc:
        log.warning("thresholds unavailable at E=%g alpha=%g: %s", E, alpha, exc)
        return None


def _sample_times(cfg: SimConfig, dt: float) -> tuple[int, int]:
    steps_per_sample = max(1, int(round(cfg.sample_dt / dt)))
    n_total = int(math.ceil(cfg.t_end / dt - 1e-9))
    return steps_per_sample, n_total


def simulate(p: Params, cfg: SimConfig, initial: Optional[Field] = None,
             reaction: bool = True) -> RunResult:
    """Integrate the coupled system, sampling every ``cfg.sample_dt``.

    Stops early once the prey is below ``extinction_eps`` everywhere, the
    invasion front has reached the right buffer with all probes occupied,
    or the field has become stationary.
    """
    scheme, dt = resolve_step(p, cfg)
    f0 = initial if initial is not None else init_field(cfg)
    if f0.u.shape != (cfg.grid.nx,) or f0.v.shape != (cfg.grid.nx,):
        raise DomainError("initial field does not match the grid")
    u, v = f0.u.astype(float).copy(), f0.v.astype(float).copy()
    t = float(f0.t)
    stepper = Stepper(p, cfg.grid, scheme, dt, reaction=reaction)
    u_ref = reference_level(p)
    level = cfg.front_level if cfg.front_level is not None else 0.5 * u_ref
    x = cfg.grid.x
    probes = cfg.grid.probe_indices()
    right = (1.0 - cfg.buffer_frac) * cfg.grid.L
    eps = cfg.extinction_eps

    history = [Field(t, u.copy(), v.copy())]
    inv = {"min_v": float(v.min()), "max_v": float(v.max()),
           "min_u_preclamp": float(u.min()), "max_u": float(u.max())}
    per_sample, n_total = _sample_times(cfg, dt)
    n = 0
    while n < n_total:
        k = min(per_sample, n_total - n)
        for _ in range(k):
            m = stepper.advance(u, v)
            if m < inv["min_u_preclamp"]:
                inv["min_u_preclamp"] = m
        n += k
        t = float(f0.t) + n * dt
        f = Field(t, u.copy(), v.copy())
        check_finite(f)
        history.append(f)
        inv["min_v"] = min(inv["min_v"], float(v.min()))
        inv["max_v"] = max(inv["max_v"], float(v.max()))
        inv["max_u"] = max(inv["max_u"], float(u.max()))
        if u.max() < eps:
            break
        pos = front_position(x, u, level)
        if (pos is None or pos >= right) and min(u[j] for j in probes) > 10 * eps and u[0] > eps:
            break
        a, b = history[-1], history[-2]
        if max(np.abs(a.u - b.u).max(), np.abs(a.v - b.v).max()) < STATIONARY_RESIDUAL:
            break

    final = history[-1]
    front = observe_front(history, cfg.grid, level, cfg.buffer_frac)
    us = upper_state(p)
    report = classify(p, history, thresholds_for(p.E, p.alpha), cfg, u_ref, us, front)
    report.diagnostics.update(inv)
    report.diagnostics.update({"n_steps": n, "dt": dt, "u_ref": u_ref,
                               "v_bar": v_bar(p.E, p.h, p.alpha)})
    report.diagnostics["scheme"] = scheme
    report.diagnostics["hash"] = determinism_hash(final)
    return RunResult(final, front, report, history, scheme, dt)


def run(p: Params, cfg: SimConfig) -> tuple[Field, FrontObservation, OutcomeReport]:
    res = simulate(p, cfg)
    if res.report.regime == "undetermined":
        log.warning("run at %s ended undetermined (%s)", p, res.report.outcome)
    return res.final, res.front, res.report


def simulate_scalar(sb: ScalarBistable, cfg: SimConfig) -> tuple[FrontObservation, list[Field]]:
    """Prey equation with the predator frozen at ``sb.v_level``."""
    p = Params(E=sb.E_eff, h=sb.h_eff, alpha=0.0, r=1.0, d=1.0)
    try:
        u_plus = u_pm(p.E, p.h)[1]
    except DomainError as exc:
        raise RegimeError(f"scalar equation not bistable: {exc}") from exc
    scheme, dt = resolve_step(p, cfg)
    f0 = init_field(cfg)
    u, v = f0.u.copy(), f0.v.copy()
    stepper = Stepper(p, cfg.grid, scheme, dt, frozen_v=True)
    level = cfg.front_level if cfg.front_level is not None else 0.5 * u_plus
    x = cfg.grid.x
    lo, hi = cfg.buffer_frac * cfg.grid.L, (1.0 - cfg.buffer_frac) * cfg.grid.L
    per_sample, n_total = _sample_times(cfg, dt)
    history = [f0]
    n = 0
    while n < n_total:
        k = min(per_sample, n_total - n)
        for _ in range(k):
            stepper.advance(u, v)
        n += k
        f = Field(n * dt, u.copy(), v)
        check_finite(f)
        history.append(f)
        if u.max() < cfg.extinction_eps:
            break
        pos = front_position(x, u, level)
        if pos is None or not lo <= pos <= hi:
            break
    return observe_front(history, cfg.grid, level, cfg.buffer_frac), history


def scalar_run(sb: ScalarBistable, cfg: SimConfig) -> FrontObservation:
    return simulate_scalar(sb, cfg)[0]
