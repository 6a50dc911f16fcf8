from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from predwave import kinetics as kin
from predwave.errors import DomainError, InvalidParameterError, RegimeError
from predwave.kinetics import Params, RawParams

pos = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
unit = st.floats(min_value=0.0, max_value=1.0)


def test_nondimensionalize_hand_computed():
    raw = RawParams(D_u=2.0, D_v=6.0, r1=0.5, r2=0.25, K1=10.0, K2=4.0,
                    E_raw=0.3, h_raw=0.2, gamma=0.1)
    p = kin.nondimensionalize(raw)
    assert p.d == pytest.approx(3.0)
    assert p.r == pytest.approx(0.5)
    assert p.E == pytest.approx(0.3 * 4.0 / 0.5)
    assert p.h == pytest.approx(0.5 * 0.2 * 10.0 / 4.0)
    assert p.alpha == pytest.approx((0.1 * 10.0 / 4.0) / 0.5)


@pytest.mark.parametrize("field", ["D_u", "K2", "gamma", "h_raw"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_raw_params_must_be_positive(field, bad):
    kw = dict(D_u=1, D_v=1, r1=1, r2=1, K1=1, K2=1, E_raw=1, h_raw=1, gamma=1)
    kw[field] = bad
    with pytest.raises(InvalidParameterError, match=field):
        RawParams(**kw)


@pytest.mark.parametrize("kw", [dict(E=0.0, h=1), dict(E=1, h=-0.1), dict(E=1, h=1, alpha=-1),
                                dict(E=1, h=1, r=0), dict(E=1, h=1, d=-2),
                                dict(E=math.inf, h=1)])
def test_params_invariants(kw):
    with pytest.raises(InvalidParameterError):
        Params(**kw)


def test_params_h_zero_allowed_and_bistable_gate():
    Params(E=2, h=0.0)
    with pytest.raises(RegimeError, match="unstable"):
        Params(E=1.0, h=1).require_bistable_range()


def test_reaction_rhs_rejects_negative_densities():
    p = Params(E=2, h=3)
    with pytest.raises(DomainError):
        kin.reaction_rhs(p, -0.1, 1.0)
    with pytest.raises(DomainError):
        kin.reaction_rhs(p, np.array([0.1, 0.2]), np.array([1.0, -1.0]))


def test_control_state_is_a_rest_point():
    p = Params(E=2, h=3, alpha=4, r=0.3)
    du, dv = kin.reaction_rhs(p, 0.0, 1.0)
    assert du == 0.0 and dv == 0.0


@settings(max_examples=60, deadline=None)
@given(E=pos, h=pos, alpha=pos, u=unit)
def test_steady_cubic_identity(E, h, alpha, u):
    # (1 + Ehu)(f_h - g_h) = P_h / E
    p = Params(E=E, h=h, alpha=alpha)
    lhs = (1 + E * h * u) * (kin.iso_f(p, u) - kin.iso_g(p, u))
    rhs = kin.steady_cubic(p, u) / E
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * (1 + abs(rhs) + E * h))


@settings(max_examples=60, deadline=None)
@given(E=pos, h=pos, alpha=pos, r=pos, u=st.floats(0.01, 1.0), v=st.floats(0.5, 3.0))
def test_jacobian_matches_finite_differences(E, h, alpha, r, u, v):
    p = Params(E=E, h=h, alpha=alpha, r=r)
    J = kin.jacobian(p, u, v)
    eps = 1e-6
    fd = np.empty((2, 2))
    for j, (du, dv) in enumerate([(eps, 0), (0, eps)]):
        fp = np.array(kin.reaction_rhs(p, u + du, v + dv))
        fm = np.array(kin.reaction_rhs(p, u - du, v - dv))
        fd[:, j] = (fp - fm) / (2 * eps)
    np.testing.assert_allclose(J, fd, rtol=1e-5, atol=1e-5 * (1 + np.abs(J).max()))


@settings(max_examples=40, deadline=None)
@given(E=pos, h=pos, u=st.floats(1e-3, 0.999))
def test_iso_f_prime_is_derivative(E, h, u):
    p = Params(E=E, h=h)
    eps = 1e-6
    fd = (kin.iso_f(p, u + eps) - kin.iso_f(p, u - eps)) / (2 * eps)
    assert kin.iso_f_prime(p, u) == pytest.approx(fd, rel=1e-5, abs=1e-7 * (1 + h + 1 / E))


def test_iso_g_prime_is_derivative():
    p = Params(E=2.0, h=3.0, alpha=4.0)
    u, eps = 0.3, 1e-6
    fd = (kin.iso_g(p, u + eps) - kin.iso_g(p, u - eps)) / (2 * eps)
    assert kin.iso_g_prime(p, u) == pytest.approx(fd, rel=1e-7)


def test_positive_rest_point_zeroes_both_equations():
    # E=2, h=5, alpha=2: P_h(u) = -100u^3 + 80u^2 - 9u - 1
    u = max(r.real for r in np.roots([-100, 80, -9, -1]) if abs(r.imag) < 1e-12)
    p = Params(E=2, h=5, alpha=2, r=0.7)
    v = kin.iso_f(p, u)
    du, dv = kin.reaction_rhs(p, u, v)
    assert abs(du) < 1e-12 and abs(dv) < 1e-12
    assert kin.steady_cubic(p, u) == pytest.approx(0.0, abs=1e-12)


def test_theta_and_predation_consistent():
    p = Params(E=2, h=3)
    assert kin.predation(p, 0.4, 1.3) == pytest.approx(kin.theta(p, 0.4) * 1.3)


def test_as_dict_round_trip():
    p = Params(E=2, h=5.35, alpha=4, r=0.01, d=100)
    assert Params(**p.as_dict()) == p
