"""Grid, configuration, fields and the time-stepping kernel.

The model is posed on the whole line; here it lives on [0, L] with zero-flux
boundaries, discretised with the standard three-point Laplacian (ghost-node
reflection at the ends). Diffusion is either explicit (forward Euler under
the usual parabolic step bound) or backward Euler (IMEX); the reaction is
always forward Euler.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from ..errors import ConfigurationError, NumericalBlowupError
from ..kinetics import Params

PROBE_FRACTIONS = (0.25, 0.5, 0.75)
IMEX_DT = 0.02
CFL_SAFETY = 0.9
NEGATIVE_CLAMP = -1e-12


@dataclass(frozen=True)
class Grid:
    L: float = 400.0
    nx: int = 4096

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ConfigurationError(f"L={self.L!r} must be > 0")
        if int(self.nx) != self.nx or self.nx < 16:
            raise ConfigurationError(f"nx={self.nx!r} must be an integer >= 16")

    @property
    def dx(self) -> float:
        return self.L / (self.nx - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.nx)

    def probe_indices(self) -> list[int]:
        return [int(round(f * (self.nx - 1))) for f in PROBE_FRACTIONS]


@dataclass(frozen=True)
class InitialProfile:
    """Smoothed step 1 / (1 + exp(k (x - x0))); x0 defaults to L/2."""

    x0: Optional[float] = None
    k: float = 1.0


@dataclass(frozen=True)
class SimConfig:
    grid: Grid = field(default_factory=Grid)
    dt: Optional[float] = None
    t_end: float = 2000.0
    front_level: Optional[float] = None
    extinction_eps: float = 1e-6
    ic: InitialProfile = field(default_factory=InitialProfile)
    scheme: str = "auto"
    sample_dt: float = 5.0
    buffer_frac: float = 0.1

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ConfigurationError(f"dt={self.dt!r} must be > 0")
        if not self.t_end > 0:
            raise ConfigurationError(f"t_end={self.t_end!r} must be > 0")
        if not self.sample_dt > 0:
            raise ConfigurationError(f"sample_dt={self.sample_dt!r} must be > 0")
        if not self.extinction_eps > 0:
            raise ConfigurationError("extinction_eps must be > 0")
        if self.scheme not in ("auto", "explicit", "imex"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if not 0 < self.buffer_frac < 0.5:
            raise ConfigurationError("buffer_frac must lie in (0, 0.5)")

    @property
    def x0(self) -> float:
        return self.grid.L / 2 if self.ic.x0 is None else self.ic.x0

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        grid = Grid(**d.pop("grid", {}))
        ic = InitialProfile(**d.pop("ic", {}))
        return cls(grid=grid, ic=ic, **d)


@dataclass(frozen=True)
class Field:
    t: float
    u: np.ndarray
    v: np.ndarray


@dataclass
class FrontObservation:
    times: np.ndarray
    positions: np.ndarray
    fitted_speed: float
    level: float

    def as_dict(self) -> dict:
        return {"level": self.level, "fitted_speed": _finite_or_none(self.fitted_speed),
                "times": self.times.tolist(), "positions": self.positions.tolist()}


@dataclass
class OutcomeReport:
    outcome: str
    regime: str
    front_speed: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"outcome": self.outcome, "regime": self.regime,
                "front_speed": _finite_or_none(self.front_speed),
                "diagnostics": {k: _finite_or_none(v) for k, v in self.diagnostics.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> "OutcomeReport":
        speed = d.get("front_speed")
        diag = {k: (math.nan if v is None else v) for k, v in d.get("diagnostics", {}).items()}
        return cls(d["outcome"], d["regime"], math.nan if speed is None else speed, diag)


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def resolve_step(p: Params, cfg: SimConfig) -> tuple[str, float]:
    """Pick the diffusion scheme and a time step aligned with the sampling interval."""
    dx = cfg.grid.dx
    bound = dx * dx / (2.0 * max(1.0, p.d))
    scheme = cfg.scheme
    if scheme == "auto":
        scheme = "explicit" if CFL_SAFETY * bound >= IMEX_DT / 10 else "imex"
    if cfg.dt is not None:
        if scheme == "explicit" and cfg.dt > bound:
            raise ConfigurationError(
                f"dt={cfg.dt!r} exceeds the explicit diffusion bound dx^2/(2 max(1,d))={bound:.3g}")
        return scheme, cfg.dt
    target = CFL_SAFETY * bound if scheme == "explicit" else IMEX_DT
    n = math.ceil(cfg.sample_dt / target)
    return scheme, cfg.sample_dt / n


def init_field(cfg: SimConfig) -> Field:
    L = cfg.grid.L
    x0 = cfg.x0
    if not 0.1 * L <= x0 <= 0.9 * L:
        raise ConfigurationError(f"front position x0={x0!r} must lie in [0.1L, 0.9L]")
    if not cfg.ic.k > 0:
        raise ConfigurationError("IC steepness k must be > 0")
    x = cfg.grid.x
    # exp overflow to inf on the right gives exactly 0, which is intended
    with np.errstate(over="ignore"):
        u = 1.0 / (1.0 + np.exp(cfg.ic.k * (x - x0)))
    return Field(0.0, u, np.ones_like(x))


def _neumann_band(nx: int, c: float) -> np.ndarray:
    """Banded form of I - c * Lap with reflecting ends."""
    ab = np.zeros((3, nx))
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :-1] = -c
    ab[0, 1] = -2.0 * c
    ab[2, -2] = -2.0 * c
    return ab


def laplacian(w: np.ndarray, dx: float, out: Optional[np.ndarray] = None) -> np.ndarray:
    if out is None:
        out = np.empty_like(w)
    out[1:-1] = w[:-2] + w[2:] - 2.0 * w[1:-1]
    out[0] = 2.0 * (w[1] - w[0])
    out[-1] = 2.0 * (w[-2] - w[-1])
    out *= 1.0 / (dx * dx)
    return out


def trapezoid_mass(w: np.ndarray, dx: float) -> float:
    """Discrete mass conserved exactly by the reflecting Laplacian."""
    return dx * (w.sum() - 0.5 * (w[0] + w[-1]))


class Stepper:
    """In-place integrator for one parameter set and step size.

    With ``frozen_v`` the predator stays at its initial value, which turns the
    system into the scalar comparison equation.
    """

    def __init__(self, p: Params, grid: Grid, scheme: str, dt: float,
                 frozen_v: bool = False, reaction: bool = True):
        self.p, self.grid, self.scheme, self.dt = p, grid, scheme, dt
        self.frozen_v, self.reaction = frozen_v, reaction
        self.dx = grid.dx
        self._lap = np.empty(grid.nx)
        if scheme == "imex":
            c = dt / self.dx ** 2
            self._band_u = _neumann_band(grid.nx, c)
            self._band_v = _neumann_band(grid.nx, c * p.d)

    def advance(self, u: np.ndarray, v: np.ndarray) -> float:
        """Advance (u, v) by one step in place; returns min(u) before clamping."""
        p, dt = self.p, self.dt
        if self.reaction:
            pred = p.E * u * v / (1.0 + p.E * p.h * u)
            fu = u * (1.0 - u) - pred
            if not self.frozen_v:
                fv = p.r * (v * (1.0 - v) + p.alpha * pred)
        else:
            fu = fv = 0.0
        if self.scheme == "explicit":
            lap = laplacian(u, self.dx, self._lap)
            u_new = u + dt * (lap + fu)
            if not self.frozen_v:
                lap = laplacian(v, self.dx, self._lap)
                v[:] = v + dt * (p.d * lap + fv)
        else:
            u_new = solve_banded((1, 1), self._band_u, u + dt * fu, check_finite=False)
            if not self.frozen_v:
                v[:] = solve_banded((1, 1), self._band_v, v + dt * fv, check_finite=False)
        u_min = float(u_new.min())
        if u_min < 0:
            np.maximum(u_new, 0.0, out=u_new)
        u[:] = u_new
        return u_min


def check_finite(f: Field) -> None:
    for name, arr in (("u", f.u), ("v", f.v)):
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NumericalBlowupError(f"non-finite {name}", int(bad[0]), f.t)


def step(p: Params, f: Field, cfg: SimConfig, reaction: bool = True) -> Field:
    """One time step of the coupled system; returns a new Field."""
    scheme, dt = resolve_step(p, cfg)
    u, v = f.u.copy(), f.v.copy()
    Stepper(p, cfg.grid, scheme, dt, reaction=reaction).advance(u, v)
    out = Field(f.t + dt, u, v)
    check_finite(out)
    return out


def front_position(x: np.ndarray, u: np.ndarray, level: float) -> Optional[float]:
    """Rightmost point where u crosses ``level`` downward, linearly interpolated."""
    above = u >= level
    if not above.any() or above[-1]:
        return None
    i = int(np.flatnonzero(above)[-1])
    u0, u1 = u[i], u[i + 1]
    return float(x[i] + (x[i + 1] - x[i]) * (u0 - level) / (u0 - u1))


def observe_front(history: list[Field], grid: Grid, level: float,
                  buffer_frac: float = 0.1) -> FrontObservation:
    """Front positions inside the valid window and the least-squares speed.

    The speed is fitted on the last half of the valid samples.
    """
    x = grid.x
    lo, hi = buffer_frac * grid.L, (1.0 - buffer_frac) * grid.L
    ts, xs = [], []
    for f in history:
        pos = front_position(x, f.u, level)
        if pos is not None and lo <= pos <= hi:
            ts.append(f.t)
            xs.append(pos)
    ts_a, xs_a = np.array(ts), np.array(xs)
    speed = math.nan
    if len(ts) >= 2:
        k = len(ts) // 2
        tail_t, tail_x = ts_a[k:], xs_a[k:]
        if len(tail_t) < 2:
            tail_t, tail_x = ts_a[-2:], xs_a[-2:]
        speed = float(np.polyfit(tail_t, tail_x, 1)[0])
    return FrontObservation(ts_a, xs_a, speed, level)


def determinism_hash(f: Field) -> str:
    h = hashlib.sha256()
    h.update(np.float64(f.t).tobytes())
    h.update(np.ascontiguousarray(f.u, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(f.v, dtype="<f8").tobytes())
    return h.hexdigest()

