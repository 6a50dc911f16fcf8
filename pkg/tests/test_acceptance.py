"""Acceptance gate: ten criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
Tolerances are the contractual ones; nothing here is loosened to force a pass.
"""
from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from predwave.cartography import h_crit
from predwave.kinetics import Params
from predwave.ode_analysis import h_star, integrate_ode, steady_states
from predwave.pde_sim import Grid, SimConfig, scalar_run, simulate
from predwave.wave_thresholds import (ScalarBistable, h1, h_minus, h_plus, v_bar,
                                      wave_speed_sign)

RESULTS: list[str] = []

REGIME_CELLS = [  # (h, d, r, expected regime)
    (5.35, 1.0, 0.01, "pulse"),
    (5.35, 100.0, 1.0, "turing"),
    (5.6, 1.0, 1.0, "ETW"),
    (6.0, 1.0, 0.01, "ITW"),
]


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line, flush=True)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


_regime_runs: dict[tuple, object] = {}


def regime_runs():
    """Benchmark regime cells at default resolution, computed once per session."""
    if not _regime_runs:
        for h, d, r, _ in REGIME_CELLS:
            t0 = time.perf_counter()
            res = simulate(Params(E=2.0, h=h, alpha=4.0, r=r, d=d), SimConfig())
            _regime_runs[(h, d, r)] = (res, time.perf_counter() - t0)
    return _regime_runs


def test_criterion_01_h_star_E2_alpha2():
    (hs, _), dt = timed(lambda: h_star(2.0, 2.0))
    ok = abs(hs - 4.36) <= 0.02 and dt < 1.0
    report(1, ok, f"h*(2,2)={hs:.5f} (target 4.36 +/- 0.02), {dt:.3f}s")
    assert ok


def test_criterion_02_h_star_E2_alpha4():
    (hs, _), dt = timed(lambda: h_star(2.0, 4.0))
    ok = abs(hs - 5.4) <= 0.05 and dt < 1.0
    report(2, ok, f"h*(2,4)={hs:.5f} (target 5.4 +/- 0.05), {dt:.3f}s")
    assert ok


def test_criterion_03_limits():
    t0 = time.perf_counter()
    lo, hi = 1 + 1e-6, 1e6
    checks = []
    for a in (0.25, 0.5, 0.9):
        checks.append((f"h*(E->1,{a})", h_star(lo, a)[0], 1 + a))
    for a in (1.0, 2.0, 4.0):
        checks.append((f"h*(E->1,{a})", h_star(lo, a)[0], 2 * math.sqrt(a)))
    for a in (0.5, 2.0, 4.0):
        checks.append((f"h*(E->inf,{a})", h_star(hi, a)[0], 2 + 2 * math.sqrt(1 + a)))
    checks.append(("h-(E->1)", h_minus(lo), 1.0))
    checks.append(("h-(E->inf)", h_minus(hi), 16 / 3))
    checks.append(("h+(E->inf,4)", h_plus(hi, 4.0), 8.0))
    for E in np.geomspace(1.05, 200.0, 10):
        checks.append((f"h*({E:.3g},0)", h_star(float(E), 0.0)[0], h1(float(E))))
    dt = time.perf_counter() - t0
    bad = [(n, got, want) for n, got, want in checks if abs(got - want) > 1e-2]
    worst = max(abs(g - w) for _, g, w in checks)
    ok = not bad and dt < 10.0
    report(3, ok, f"{len(checks)} limits, worst |err|={worst:.2e}, {dt:.2f}s"
           + (f", failing: {bad}" if bad else ""))
    assert ok


def _speed_samples():
    rng = np.random.default_rng(20240611)
    out = []
    while len(out) < 10:
        E = float(np.exp(rng.uniform(np.log(1.2), np.log(10.0))))
        h = float(h1(E) + rng.uniform(0.05, 3.0))
        if abs(h - h_minus(E)) >= 0.1:
            out.append((E, h))
    return out


def test_criterion_04_speed_sign_oracle():
    t0 = time.perf_counter()
    cfg = SimConfig(grid=Grid(L=200.0, nx=2048), t_end=400.0)
    mism, lines = [], []
    for E, h in _speed_samples():
        c = scalar_run(ScalarBistable.frozen(E, h), cfg).fitted_speed
        s = wave_speed_sign(E, h)
        lines.append(f"({E:.3g},{h:.3g}):{c:+.3f}")
        if not (math.isfinite(c) and np.sign(c) == s):
            mism.append((E, h, c, s))
    near = []
    for E in (1.5, 2.0, 5.0):
        hm = h_minus(E)
        for dh in (-0.005, 0.005):
            c = scalar_run(ScalarBistable.frozen(E, hm + dh), cfg).fitted_speed
            near.append(c)
    near_ok = all(math.isfinite(c) and abs(c) < 0.02 for c in near)
    dt = time.perf_counter() - t0
    ok = not mism and near_ok and dt < 300.0
    report(4, ok, f"10 signs, {len(mism)} mismatches; max |c| near h- = "
           f"{max(abs(c) for c in near):.4f} (< 0.02); {dt:.1f}s")
    assert ok, (mism, near, lines)


def test_criterion_05_regime_labels():
    runs = regime_runs()
    got, total = [], 0.0
    for h, d, r, want in REGIME_CELLS:
        res, dt = runs[(h, d, r)]
        total += dt
        got.append((want, res.report.regime))
    ok = all(w == g for w, g in got) and total < 900.0
    report(5, ok, ", ".join(f"{w}->{g}" for w, g in got) + f"; {total:.1f}s")
    assert ok


def test_criterion_06_invariant_region():
    bad = []
    for (h, d, r), (res, _) in regime_runs().items():
        dg = res.report.diagnostics
        vb = v_bar(2.0, h, 4.0)
        ok = (dg["min_v"] >= 1 - 1e-6 and dg["max_v"] <= vb + 1e-6
              and dg["min_u_preclamp"] >= -1e-12 and dg["max_u"] <= 1 + 1e-6)
        for f in res.history:
            ok = ok and f.v.min() >= 1 - 1e-6 and f.v.max() <= vb + 1e-6
            ok = ok and f.u.min() >= -1e-12 and f.u.max() <= 1 + 1e-6
        if not ok:
            bad.append((h, d, r))
    report(6, not bad, f"4 runs checked at every sample; violations: {bad or 'none'}")
    assert not bad


def test_criterion_07_comparison_principle():
    t0 = time.perf_counter()
    E, h = 2.0, 2.5
    cfg = SimConfig(t_end=200.0, sample_dt=0.5)
    res = simulate(Params(E=E, h=h, alpha=4.0, r=1.0, d=1.0), cfg)
    ts = np.array([f.t for f in res.history])
    phi = solve_ivp(lambda t, y: y * (1 - y) - E * y / (1 + E * h * y), (0, ts[-1]), [1.0],
                    method="DOP853", rtol=1e-12, atol=1e-15, t_eval=ts).y[0]
    excess = max(f.u.max() - p for f, p in zip(res.history, phi))
    final = res.final.u.max()
    dt = time.perf_counter() - t0
    ok = excess <= 1e-6 and final < 1e-6 and dt < 120.0
    report(7, ok, f"max(u - phi)={excess:.2e} (<= 1e-6), final max u={final:.2e}, "
           f"{res.report.outcome}; {dt:.1f}s")
    assert ok


def test_criterion_08_h_crit():
    t0 = time.perf_counter()
    a = h_crit(2.0, 4.0, 1.0, 1.0)
    b = h_crit(2.0, 4.0, 0.01, 1.0)
    lo, hi = h_minus(2.0), h_plus(2.0, 4.0)
    dt = time.perf_counter() - t0
    ok = (a.monotone and b.monotone and lo < a.h_crit < hi and lo < b.h_crit < hi
          and b.h_crit < a.h_crit and dt < 1800.0)
    report(8, ok, f"h_crit(r=1)={a.h_crit:.4f}, h_crit(r=0.01)={b.h_crit:.4f}, "
           f"bracket ({lo:.4f}, {hi:.4f}); {dt:.1f}s")
    assert ok


def test_criterion_09_ode_basins():
    t0 = time.perf_counter()
    p = Params(E=2.0, h=5.0, alpha=2.0, r=1.0)
    u_root = max(r.real for r in np.roots([-100, 80, -9, -1]) if abs(r.imag) < 1e-12)
    hi = integrate_ode(p, 0.9, 1.0)
    lo = integrate_ode(p, 0.01, 1.0)
    low_h = integrate_ode(Params(E=2.0, h=3.0, alpha=2.0, r=1.0), 0.9, 1.0)
    star = [s for s in steady_states(2.0, 5.0, 2.0, 1.0) if s.kind == "positive_high"][0]
    dt = time.perf_counter() - t0
    ok = (hi.converged and abs(hi.asymptote[0] - 0.63) <= 0.01
          and abs(hi.asymptote[0] - u_root) < 1e-6 and abs(hi.asymptote[1] - star.v) < 1e-6
          and lo.converged and lo.nearest == "control_01" and lo.asymptote[0] < 1e-6
          and low_h.converged and low_h.nearest == "control_01" and dt < 10.0)
    report(9, ok, f"u*={hi.asymptote[0]:.5f} (root {u_root:.5f}), from 0.01 -> "
           f"{lo.nearest}, h=3 -> {low_h.nearest}; {dt:.2f}s")
    assert ok


def test_criterion_10_determinism():
    first = {k: res.hash for k, (res, _) in regime_runs().items()}
    again = {}
    for h, d, r, _ in REGIME_CELLS:
        again[(h, d, r)] = simulate(Params(E=2.0, h=h, alpha=4.0, r=r, d=d), SimConfig()).hash
    ok = first == again
    report(10, ok, f"{sum(first[k] == again[k] for k in first)}/4 hashes identical")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
