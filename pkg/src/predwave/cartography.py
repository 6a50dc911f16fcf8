"""Parameter sweeps: h_crit bisection, E-h zone maps and h_crit(d) curves.

Inside the transition zone [h-, h+] neither scalar bound decides the
outcome, so the coupled system is simulated. The invasion predicate is
assumed monotone in h; a 9-point pre-scan checks this before bisecting.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, PredwaveError, RegimeError
from .kinetics import Params
from .pde_sim import Grid, OutcomeReport, SimConfig, simulate
from .pde_sim.runner import thresholds_for
from .wave_thresholds import ThresholdSet, threshold_set

log = logging.getLogger(__name__)

PRESCAN_POINTS = 9
BISECT_TOL = 1e-3
SWEEP_CONFIG = SimConfig(grid=Grid(L=400.0, nx=1024), t_end=800.0)

ZONES = ("unstable_control", "uniform_extinction", "extinction",
         "transition_I", "transition_II", "invasion")
SWEEP_COLUMNS = ("E", "h", "alpha", "r", "d", "zone", "outcome", "regime", "front_speed",
                 "h1", "h_star", "h_minus", "h_plus")
CURVE_COLUMNS = ("d", "r", "h_crit")


def zone_label(E: float, h: float, ts: Optional[ThresholdSet]) -> str:
    """Analytic zone of (E, h); exactly one label per point."""
    if E <= 1 or ts is None:
        return "unstable_control"
    if h < ts.h1:
        return "uniform_extinction"
    if h < ts.h_minus:
        return "extinction"
    if h > ts.h_plus:
        return "invasion"
    return "transition_I" if h >= ts.h_star else "transition_II"


@dataclass(frozen=True)
class ZoneLabel:
    E: float
    h: float
    zone: str
    outcome: str
    regime: str
    front_speed: float = math.nan
    thresholds: Optional[ThresholdSet] = None

    def row(self, alpha: float, r: float, d: float) -> dict:
        ts = self.thresholds
        g = (lambda k: getattr(ts, k)) if ts is not None else (lambda k: math.nan)
        return {"E": self.E, "h": self.h, "alpha": alpha, "r": r, "d": d, "zone": self.zone,
                "outcome": self.outcome, "regime": self.regime, "front_speed": self.front_speed,
                "h1": g("h1"), "h_star": g("h_star"), "h_minus": g("h_minus"),
                "h_plus": g("h_plus")}


def invades(report: OutcomeReport) -> bool:
    """Invasion predicate; an undetermined surviving run falls back on the front direction."""
    if report.outcome != "invasion":
        return False
    if report.regime != "undetermined":
        return True
    s = report.front_speed
    return not (math.isfinite(s) and s < 0)


def _predicate(args) -> tuple[bool, OutcomeReport]:
    p, cfg = args
    try:
        rep = simulate(p, cfg).report
    except (PredwaveError, FloatingPointError) as exc:
        log.warning("simulation failed at %s: %s", p, exc)
        rep = OutcomeReport("invasion", "undetermined", math.nan, {"error": str(exc)})
    return invades(rep), rep


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


@dataclass
class HcritResult:
    E: float
    alpha: float
    r: float
    d: float
    h_crit: float
    bracket: tuple[float, float]
    scan: list[tuple[float, bool]] = field(default_factory=list)
    monotone: bool = True
    n_runs: int = 0

    def as_dict(self) -> dict:
        return {"E": self.E, "alpha": self.alpha, "r": self.r, "d": self.d,
                "h_crit": None if math.isnan(self.h_crit) else self.h_crit,
                "bracket": list(self.bracket), "monotone": self.monotone,
                "scan": [[h, inv] for h, inv in self.scan], "n_runs": self.n_runs}


def h_crit(E: float, alpha: float, r: float, d: float, cfg: SimConfig = SWEEP_CONFIG,
           tol: float = BISECT_TOL, workers: int = 1) -> HcritResult:
    """Simulated extinction/invasion threshold in h within [h-(E), h+(E, alpha)].

    Returns NaN with the pre-scan attached when the predicate is not monotone.
    """
    if not E > 1:
        raise RegimeError(f"E={E!r} <= 1: (0,1) is unstable, h_crit undefined")
    Params(E=E, h=1.0, alpha=alpha, r=r, d=d)
    ts = threshold_set(E, alpha)
    lo, hi = ts.h_minus, ts.h_plus
    if alpha == 0 or hi - lo <= tol:
        return HcritResult(E, alpha, r, d, lo, (lo, hi))
    hs = np.linspace(lo, hi, PRESCAN_POINTS)
    flags = [inv for inv, _ in _map(_predicate, [(Params(E, float(h), alpha, r, d), cfg)
                                                 for h in hs], workers)]
    scan = [(float(h), bool(f)) for h, f in zip(hs, flags)]
    n_runs = len(hs)
    switches = sum(a != b for a, b in zip(flags[:-1], flags[1:]))
    if switches > 1 or (switches == 1 and flags[0]):
        return HcritResult(E, alpha, r, d, math.nan, (lo, hi), scan, False, n_runs)
    if not any(flags):
        return HcritResult(E, alpha, r, d, hi, (lo, hi), scan, True, n_runs)
    if all(flags):
        return HcritResult(E, alpha, r, d, lo, (lo, hi), scan, True, n_runs)
    k = flags.index(True)
    a, b = float(hs[k - 1]), float(hs[k])
    while b - a > tol:
        m = 0.5 * (a + b)
        inv, _ = _predicate((Params(E, m, alpha, r, d), cfg))
        n_runs += 1
        if inv:
            b = m
        else:
            a = m
    return HcritResult(E, alpha, r, d, 0.5 * (a + b), (lo, hi), scan, True, n_runs)


@dataclass(frozen=True)
class SweepSpec:
    E_range: tuple[float, float, int]
    h_range: tuple[float, float, int]
    alpha: float = 4.0
    r: float = 1.0
    d: float = 1.0
    cfg: SimConfig = SWEEP_CONFIG
    refine_cfg: Optional[SimConfig] = None

    def __post_init__(self):
        for name, rng in (("E_range", self.E_range), ("h_range", self.h_range)):
            lo, hi, n = rng
            if not (lo < hi and int(n) == n and n >= 2):
                raise ConfigurationError(f"{name}={rng!r}: need lo < hi and steps >= 2")
        Params(E=1.0, h=0.0, alpha=self.alpha, r=self.r, d=self.d)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.E_range[0], self.E_range[1], int(self.E_range[2])),
                np.linspace(self.h_range[0], self.h_range[1], int(self.h_range[2])))


def _simulate_cell(args) -> tuple[str, str, float]:
    p, cfg = args
    inv, rep = _predicate((p, cfg))
    outcome = rep.outcome
    if rep.regime == "undetermined" and outcome == "invasion" and not inv:
        outcome = "extinction"
    return outcome, rep.regime, rep.front_speed


def sweep_plane(spec: SweepSpec, workers: int = 1) -> list[ZoneLabel]:
    """Zone map over the E-h grid in row-major (E outer, h inner) order."""
    Es, hs = spec.axes()
    tsets = {float(E): thresholds_for(float(E), spec.alpha) for E in Es}
    labels, jobs = [], []
    for E in Es:
        ts = tsets[float(E)]
        for h in hs:
            z = zone_label(float(E), float(h), ts)
            labels.append((float(E), float(h), z, ts))
            if z.startswith("transition"):
                jobs.append((len(labels) - 1,
                             (Params(float(E), float(h), spec.alpha, spec.r, spec.d), spec.cfg)))
    sims = dict(zip([i for i, _ in jobs], _map(_simulate_cell, [j for _, j in jobs], workers)))
    if spec.refine_cfg is not None:
        sims = _refine(labels, sims, spec, len(hs), workers)
    out = []
    for i, (E, h, z, ts) in enumerate(labels):
        if i in sims:
            outcome, regime, speed = sims[i]
        else:
            outcome = {"unstable_control": "invasion", "invasion": "invasion",
                       "extinction": "extinction",
                       "uniform_extinction": "uniform_extinction"}[z]
            regime, speed = "analytic", math.nan
        out.append(ZoneLabel(E, h, z, outcome, regime, speed, ts))
    return out


def _refine(labels, sims, spec: SweepSpec, nh: int, workers: int) -> dict:
    """Rerun simulated cells whose outcome differs from an h-neighbour."""
    def inv(i):
        return sims[i][0] == "invasion" if i in sims else labels[i][2] in ("invasion",
                                                                           "unstable_control")
    redo = set()
    for i in sims:
        j = i + 1
        if j % nh and j < len(labels) and inv(i) != inv(j):
            redo.update(k for k in (i, j) if k in sims)
    idx = sorted(redo)
    jobs = [(Params(labels[i][0], labels[i][1], spec.alpha, spec.r, spec.d), spec.refine_cfg)
            for i in idx]
    sims = dict(sims)
    sims.update(zip(idx, _map(_simulate_cell, jobs, workers)))
    return sims


def curve_shape(values: Sequence[float], rtol: float = 0.0) -> str:
    """Qualitative shape of a sequence: decreasing, increasing, rise_then_fall or other."""
    v = np.asarray([x for x in values if math.isfinite(x)], dtype=float)
    if v.size < 2:
        return "other"
    slack = rtol * np.abs(v).max()
    diff = np.diff(v)
    if np.all(diff <= slack):
        return "decreasing"
    if np.all(diff >= -slack):
        return "increasing"
    k = int(np.argmax(v))
    if np.all(diff[:k] >= -slack) and np.all(diff[k:] <= slack):
        return "rise_then_fall"
    return "other"


@dataclass
class HcritCurve:
    E: float
    alpha: float
    r: float
    points: list[HcritResult]
    shape: str

    def rows(self) -> list[dict]:
        return [{"d": p.d, "r": p.r, "h_crit": p.h_crit} for p in self.points]


def hcrit_vs_d(E: float, alpha: float, r: float, d_list: Sequence[float],
               cfg: SimConfig = SWEEP_CONFIG, tol: float = BISECT_TOL,
               workers: int = 1, shape_rtol: float = 1e-3) -> HcritCurve:
    points = [h_crit(E, alpha, r, float(d), cfg, tol, workers) for d in d_list]
    return HcritCurve(E, alpha, r, points, curve_shape([p.h_crit for p in points], shape_rtol))


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else format(v, ".17g")
    return str(v)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def read_csv_rows(text: str) -> list[dict]:
    """Parse CSV produced by :func:`rows_to_csv`; numeric cells become floats."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = float(v) if v != "" else math.nan
            except ValueError:
                parsed[k] = v
        out.append(parsed)
    return out


def sweep_csv(labels: Sequence[ZoneLabel], spec: SweepSpec) -> str:
    return rows_to_csv([z.row(spec.alpha, spec.r, spec.d) for z in labels], SWEEP_COLUMNS)


def curve_csv(curve: HcritCurve) -> str:
    return rows_to_csv(curve.rows(), CURVE_COLUMNS)
