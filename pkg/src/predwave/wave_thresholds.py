"""Scalar bistable comparison equations and the PDE thresholds h1, h-, h+.

Freezing the predator at a constant level ``v_level`` turns the prey equation
into the scalar bistable problem

    u_t = u_xx + u(1 - u) - E v_level u / (1 + E h u),

which is the same equation with (E, h) replaced by (E v_level, h / v_level).
With v_level = 1 it bounds the prey from above, with v_level = v_bar from
below. The sign of its front speed equals the sign of the potential W
evaluated at the upper stable state.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from scipy.optimize import brentq

from .errors import DomainError, NoRealRootsError, RegimeError
from .ode_analysis import h_star, h_star_star

ROOT_XTOL = 1e-10
SIGN_ATOL = 1e-10
H_MINUS_CAP = 16.0 / 3.0 + 1.0


def _require_E(E: float) -> None:
    if not E > 1:
        raise DomainError(f"E={E!r} <= 1: the control state (0,1) is unstable; thresholds need E > 1")


@dataclass(frozen=True)
class ScalarBistable:
    """Prey equation with the predator frozen at ``v_level``."""

    E_eff: float
    h_eff: float
    v_level: float

    @classmethod
    def frozen(cls, E: float, h: float, v_level: float = 1.0) -> "ScalarBistable":
        if v_level < 1:
            raise DomainError(f"v_level={v_level!r} must be >= 1")
        return cls(E * v_level, h / v_level, v_level)


@dataclass(frozen=True)
class ThresholdSet:
    E: float
    alpha: float
    h1: float
    h_star: float
    h_star_star: float
    h_minus: float
    h_plus: float
    u_crit: float
    zone_I: Optional[tuple[float, float]] = None
    zone_II: Optional[tuple[float, float]] = None

    def as_dict(self) -> dict:
        d = asdict(self)
        for k in ("zone_I", "zone_II"):
            d[k] = list(d[k]) if d[k] is not None else None
        return d


def h1(E: float) -> float:
    _require_E(E)
    return (2.0 * E - 1.0 + 2.0 * math.sqrt(E * (E - 1.0))) / E


def u_pm(E: float, h: float) -> tuple[float, float]:
    """Positive steady states u- <= u+ of the scalar equation with v = 1."""
    _require_E(E)
    if not h > 0:
        raise DomainError(f"h={h!r} must be > 0")
    a = 1.0 - 1.0 / (E * h)
    disc = a * a - 4.0 * (E - 1.0) / (E * h)
    if disc < 0:
        if disc < -1e-13 or h < h1(E) - 1e-12:
            raise NoRealRootsError(f"h={h!r} < h1(E)={h1(E)!r}: no positive scalar steady state")
        disc = 0.0
    s = math.sqrt(disc)
    return 0.5 * (a - s), 0.5 * (a + s)


def potential_W(E: float, h: float, u: float) -> float:
    """Closed form of the integral of s(1-s) - E s/(1 + E h s) over [0, u]."""
    if not h > 0:
        raise DomainError(f"h={h!r} must be > 0")
    return u * u / 2.0 - u ** 3 / 3.0 - u / h + math.log1p(E * h * u) / (E * h * h)


def _W_upper(E: float, h: float) -> float:
    return potential_W(E, h, u_pm(E, h)[1])


def wave_speed_sign(E: float, h: float, atol: float = SIGN_ATOL) -> int:
    """Sign (-1, 0, +1) of the bistable front speed; -1 means the prey retreats."""
    _require_E(E)
    if not h > h1(E):
        raise RegimeError(f"h={h!r} <= h1(E)={h1(E)!r}: the scalar equation is not bistable")
    w = _W_upper(E, h)
    if abs(w) <= atol:
        return 0
    return 1 if w > 0 else -1


def h_minus(E: float) -> float:
    """Unique h > h1(E) at which the upper-state potential changes sign."""
    lo = h1(E) + 1e-9
    return brentq(lambda h: _W_upper(E, h), lo, H_MINUS_CAP, xtol=ROOT_XTOL)


def v_bar(E: float, h: float, alpha: float) -> float:
    """Uniform upper bound of the predator density."""
    return 1.0 + alpha * E / (1.0 + E * h)


def h_plus(E: float, alpha: float) -> float:
    """Root of h - v_bar h-(E v_bar); above it the subsolution invades."""
    hm = h_minus(E)
    if alpha == 0:
        return hm

    def F(h):
        vb = v_bar(E, h, alpha)
        return h - vb * h_minus(E * vb)

    hi = hm + 1.0
    while F(hi) <= 0:
        hi *= 2.0
    return brentq(F, hm, hi, xtol=ROOT_XTOL)


def threshold_set(E: float, alpha: float) -> ThresholdSet:
    _require_E(E)
    hs, uc = h_star(E, alpha)
    hm = h_minus(E)
    hp = h_plus(E, alpha)
    lo_I = max(hs, hm)
    zone_I = (lo_I, hp) if lo_I < hp else None
    zone_II = (hm, hs) if hm < hs else None
    return ThresholdSet(E=E, alpha=alpha, h1=h1(E), h_star=hs, h_star_star=h_star_star(E, alpha),
                        h_minus=hm, h_plus=hp, u_crit=uc, zone_I=zone_I, zone_II=zone_II)
