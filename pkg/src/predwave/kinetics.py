"""Dimensionless predator-prey kinetics.

The reaction part of the model is

    du/dt = u(1 - u) - E u v / (1 + E h u)
    dv/dt = r (v(1 - v) + alpha E u v / (1 + E h u))

with prey ``u`` growing logistically and a generalist predator ``v`` with a
Holling type II functional response. Every other module evaluates the
reaction terms through this one.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, InvalidParameterError, RegimeError


@dataclass(frozen=True)
class RawParams:
    """Dimensional parameters of the original model."""

    D_u: float
    D_v: float
    r1: float
    r2: float
    K1: float
    K2: float
    E_raw: float
    h_raw: float
    gamma: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class Params:
    """Dimensionless parameter bundle (E, h, alpha, r, d)."""

    E: float
    h: float
    alpha: float = 0.0
    r: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        checks = (
            ("E", self.E, self.E > 0, "E > 0"),
            ("h", self.h, self.h >= 0, "h >= 0"),
            ("alpha", self.alpha, self.alpha >= 0, "alpha >= 0"),
            ("r", self.r, self.r > 0, "r > 0"),
            ("d", self.d, self.d > 0, "d > 0"),
        )
        for name, value, ok, rule in checks:
            if not (math.isfinite(value) and ok):
                raise InvalidParameterError(f"{name}={value!r} violates {rule}")

    def require_bistable_range(self) -> None:
        if self.E <= 1:
            raise RegimeError(f"E={self.E!r} <= 1: the control state (0,1) is unstable")

    def as_dict(self) -> dict:
        return asdict(self)


class KineticsPoint(NamedTuple):
    u: float
    v: float


def nondimensionalize(raw: RawParams) -> Params:
    r = raw.r2 / raw.r1
    gamma_scaled = raw.gamma * raw.K1 / raw.K2
    return Params(
        E=raw.E_raw * raw.K2 / raw.r1,
        h=raw.r1 * raw.h_raw * raw.K1 / raw.K2,
        alpha=gamma_scaled / r,
        r=r,
        d=raw.D_v / raw.D_u,
    )


def _check_nonnegative(**arrays) -> None:
    for name, a in arrays.items():
        if np.any(np.asarray(a) < 0):
            raise DomainError(f"{name} must be >= 0")


def predation(p: Params, u, v):
    """Holling II predation term E u v / (1 + E h u). No domain checks."""
    return p.E * u * v / (1.0 + p.E * p.h * u)


def reaction_rhs(p: Params, u, v):
    """Reaction terms (du/dt, dv/dt); works elementwise on arrays."""
    _check_nonnegative(u=u, v=v)
    pred = predation(p, u, v)
    return u * (1.0 - u) - pred, p.r * (v * (1.0 - v) + p.alpha * pred)


def theta(p: Params, u):
    _check_nonnegative(u=u)
    return p.E * u / (1.0 + p.E * p.h * u)


def iso_f(p: Params, u):
    """Prey nullcline v = (1 - u)(1 + E h u) / E."""
    _check_nonnegative(u=u)
    return (1.0 - u) * (1.0 + p.E * p.h * u) / p.E


def iso_f_prime(p: Params, u):
    return (p.E * p.h * (1.0 - 2.0 * u) - 1.0) / p.E


def iso_g(p: Params, u):
    """Predator nullcline v = 1 + alpha E u / (1 + E h u)."""
    _check_nonnegative(u=u)
    return 1.0 + p.alpha * p.E * u / (1.0 + p.E * p.h * u)


def iso_g_prime(p: Params, u):
    return p.alpha * p.E / (1.0 + p.E * p.h * u) ** 2


def steady_cubic(p: Params, u):
    """P_h(u) = (1-u)(1+Ehu)^2 - E(1 + Ehu + E alpha u); positive states are its roots in (0,1)."""
    q = 1.0 + p.E * p.h * u
    return (1.0 - u) * q * q - p.E * (q + p.E * p.alpha * u)


def jacobian(p: Params, u: float, v: float) -> np.ndarray:
    """Exact Jacobian of :func:`reaction_rhs` at (u, v)."""
    _check_nonnegative(u=u, v=v)
    E, h, a, r = p.E, p.h, p.alpha, p.r
    q = 1.0 + E * h * u
    dpred_du = E * v / (q * q)
    dpred_dv = E * u / q
    return np.array(
        [
            [1.0 - 2.0 * u - dpred_du, -dpred_dv],
            [r * a * dpred_du, r * (1.0 - 2.0 * v + a * dpred_dv)],
        ]
    )
