"""Steady states, stability and the ODE thresholds h* and h**.

Positive steady states (u, f_h(u)) of the space-free system are the roots
in (0, 1) of the cubic P_h. Solving P_h(u) = 0 for h gives the explicit curve
h(u); its minimum over (0, 1) is h*, below which only the prey-free states
exist. Above h* the larger root u* is stable unless h lies in the thin band
(h*, h**), where stability depends on the predator growth rate r.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from . import kinetics as kin
from .errors import DomainError, InvalidParameterError, RegimeError
from .kinetics import Params

log = logging.getLogger(__name__)

SCAN_POINTS = 4096
ROOT_XTOL = 1e-15
GOLDEN_TOL = 1e-10
DEGENERACY_TOL = 1e-9

STABLE = "stable"
UNSTABLE = "unstable"
CONDITIONAL = "conditional"


@dataclass(frozen=True)
class SteadyState:
    u: float
    v: float
    kind: str
    stability: str
    r_crit: Optional[float] = None

    def stable_at(self, r: float) -> bool:
        if self.stability == CONDITIONAL:
            return r > self.r_crit
        return self.stability == STABLE

    def as_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "kind": self.kind,
                "stability": self.stability, "r_crit": self.r_crit}


@dataclass(frozen=True)
class OdeRegime:
    label: str
    h_star: Optional[float] = None
    h_star_star: Optional[float] = None


def _require_E(E: float) -> None:
    if not E > 1:
        raise RegimeError(f"E={E!r} <= 1: (0,1) is unstable and the thresholds are undefined")


def mu(E: float, h: float) -> float:
    """Location where the prey nullcline f_h peaks: (Eh - 1) / (2Eh)."""
    return (E * h - 1.0) / (2.0 * E * h)


def h_of_u(E: float, alpha: float, u):
    """Handling time at which u is a positive steady-state prey level."""
    _require_E(E)
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr <= 0) | (u_arr >= 1)):
        raise DomainError("h(u) is only defined for u strictly inside (0, 1)")
    w = u_arr * (1.0 - u_arr)
    out = (0.5 * E * (1.0 + np.sqrt(1.0 + 4.0 * alpha * w)) + u_arr - 1.0) / (E * w)
    return float(out) if out.ndim == 0 else out


def h_star(E: float, alpha: float) -> tuple[float, float]:
    """Minimum of h(u) over (0, 1) and its argmin u_crit."""
    _require_E(E)
    grid = (np.arange(SCAN_POINTS) + 0.5) / SCAN_POINTS
    i = int(np.argmin(h_of_u(E, alpha, grid)))
    lo = grid[i - 1] if i > 0 else grid[0] * 1e-3
    hi = grid[i + 1] if i < SCAN_POINTS - 1 else 1.0 - (1.0 - grid[-1]) * 1e-3
    res = minimize_scalar(lambda x: h_of_u(E, alpha, x), bracket=(lo, grid[i], hi),
                          method="golden", tol=GOLDEN_TOL)
    u_crit = float(res.x)
    return h_of_u(E, alpha, u_crit), u_crit


def stability_cubic(E: float, alpha: float, x):
    """(x+1)^3 - 4E(x^2 + x(E alpha + 1) - E alpha) with x = Eh."""
    return (x + 1.0) ** 3 - 4.0 * E * (x * x + x * (E * alpha + 1.0) - E * alpha)


def h_star_star(E: float, alpha: float) -> float:
    """Handling time above which the upper positive state is unconditionally stable."""
    hs, _ = h_star(E, alpha)
    lo = E * hs
    f = lambda x: stability_cubic(E, alpha, x)
    # the cubic is negative at E h* and positive at +inf
    hi = 2.0 * lo + 1.0
    while f(hi) <= 0:
        hi *= 2.0
    xs = np.linspace(lo, hi, SCAN_POINTS)
    vals = f(xs)
    k = int(np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0])
    return brentq(f, xs[k], xs[k + 1], xtol=ROOT_XTOL) / E


def _scan_roots(fn, grid: np.ndarray) -> list[float]:
    """Roots of ``fn`` on ``grid``: exact zeros at nodes plus brentq on sign changes."""
    vals = fn(grid)
    sgn = np.sign(vals)
    roots = [float(x) for x in grid[sgn == 0]]
    for k in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        roots.append(brentq(fn, grid[k], grid[k + 1], xtol=ROOT_XTOL))
    return sorted(roots)


def _unit_grid() -> np.ndarray:
    grid = np.arange(SCAN_POINTS + 1) / SCAN_POINTS
    grid[0], grid[-1] = 1e-15, 1.0 - 1e-15
    return grid


def _positive_roots(p: Params) -> list[float]:
    return _scan_roots(lambda x: kin.steady_cubic(p, x), _unit_grid())


def positive_states_by_isoclines(p: Params) -> list[float]:
    """Roots of f_h = g_h in (0, 1), found independently of P_h."""
    return _scan_roots(lambda x: kin.iso_f(p, x) - kin.iso_g(p, x), _unit_grid())


def _eigen_stability(p: Params, u: float, v: float) -> str:
    eig = np.linalg.eigvals(kin.jacobian(p, u, v))
    return STABLE if np.all(eig.real < 0) else UNSTABLE


def _upper_state(p: Params, u: float) -> SteadyState:
    v = float(kin.iso_f(p, u))
    m = mu(p.E, p.h)
    if m < u - DEGENERACY_TOL:
        return SteadyState(u, v, "positive_high", STABLE)
    rc = float(kin.theta(p, u) * kin.iso_f_prime(p, u) / v)
    if m <= u:
        # |mu - u*| below tolerance: leave the verdict to r
        return SteadyState(u, v, "positive_high", CONDITIONAL, max(rc, 0.0))
    return SteadyState(u, v, "positive_high", CONDITIONAL, rc)


def steady_states(E: float, h: float, alpha: float, r: float) -> list[SteadyState]:
    """All non-negative steady states with their stability verdicts."""
    p = Params(E=E, h=h, alpha=alpha, r=r)
    states = [
        SteadyState(0.0, 0.0, "trivial_00", UNSTABLE),
        SteadyState(1.0, 0.0, "trivial_10", UNSTABLE),
        SteadyState(0.0, 1.0, "control_01", STABLE if E > 1 else UNSTABLE),
    ]
    roots = _positive_roots(p)
    if E > 1:
        if not roots and h > 1.0 / E:
            hs, uc = h_star(E, alpha)
            if abs(h - hs) <= DEGENERACY_TOL:
                roots = [uc, uc]
        if len(roots) == 2:
            lo, hi = sorted(roots)
            states.append(SteadyState(lo, float(kin.iso_f(p, lo)), "positive_low", UNSTABLE))
            states.append(_upper_state(p, hi))
        elif roots:
            log.warning("unexpected positive root count %d at E=%g h=%g", len(roots), E, h)
    else:
        # E <= 1: up to three positive states, verdict from the eigenvalues
        roots = sorted(roots)
        for i, u in enumerate(roots):
            kind = "positive_high" if i == len(roots) - 1 else "positive_low"
            v = float(kin.iso_f(p, u))
            states.append(SteadyState(u, v, kind, _eigen_stability(p, u, v)))
    return states


def positive_high(E: float, h: float, alpha: float, r: float = 1.0) -> Optional[SteadyState]:
    for s in steady_states(E, h, alpha, r):
        if s.kind == "positive_high":
            return s
    return None


def r_crit(E: float, h: float, alpha: float) -> Optional[float]:
    """Predator growth rate below which (u*, v*) loses stability; None if always stable."""
    _require_E(E)
    s = positive_high(E, h, alpha)
    if s is None:
        raise RegimeError(f"no positive steady state at E={E}, h={h}, alpha={alpha}")
    return s.r_crit


def ode_regime(E: float, h: float, alpha: float) -> OdeRegime:
    if E <= 1:
        return OdeRegime("unstable_control")
    hs, _ = h_star(E, alpha)
    hss = h_star_star(E, alpha)
    if h < hs:
        label = "monostable"
    elif h > hss:
        label = "bistable"
    else:
        label = "conditional_bistable"
    return OdeRegime(label, hs, hss)


@dataclass
class OdeTrajectory:
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    converged: bool
    asymptote: tuple[float, float]
    nearest: Optional[str] = None
    residual: float = field(default=math.inf)

    def as_dict(self) -> dict:
        return {"converged": self.converged, "u_final": self.asymptote[0],
                "v_final": self.asymptote[1], "nearest_state": self.nearest,
                "residual": self.residual, "t_final": float(self.t[-1])}


def integrate_ode(p: Params, u0: float, v0: float, t_end: float = 2000.0,
                  rtol: float = 1e-10, atol: float = 1e-12) -> OdeTrajectory:
    """Integrate the space-free system with an adaptive RK45 scheme.

    Stops early once the max-norm of the vector field drops below 1e-10.
    """
    if not t_end > 0:
        raise InvalidParameterError(f"t_end={t_end!r} must be > 0")
    if not (0 < u0 <= 1 and v0 >= 1):
        raise InvalidParameterError("initial data must satisfy 0 < u0 <= 1 <= v0")

    def rhs(_t, y):
        u, v = max(y[0], 0.0), max(y[1], 0.0)
        du, dv = kin.reaction_rhs(p, u, v)
        return [du, dv]

    def settled(_t, y):
        return max(abs(c) for c in rhs(_t, y)) - 1e-10
    settled.terminal = True
    settled.direction = -1

    sol = solve_ivp(rhs, (0.0, t_end), [u0, v0], method="RK45", rtol=rtol, atol=atol,
                    events=settled)
    u_end, v_end = float(sol.y[0, -1]), float(sol.y[1, -1])
    res = max(abs(c) for c in rhs(0.0, [u_end, v_end]))
    converged = sol.status == 1 or res < 1e-10
    nearest = None
    states = steady_states(p.E, p.h, p.alpha, p.r)
    if states:
        dist = [math.hypot(s.u - u_end, s.v - v_end) for s in states]
        nearest = states[int(np.argmin(dist))].kind
    return OdeTrajectory(sol.t, sol.y[0], sol.y[1], converged, (u_end, v_end), nearest, res)
