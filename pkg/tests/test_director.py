import numpy as np
import pytest
from hypothesis import given

from binghamq.dynamics.director import (
    el_director_rhs,
    integrate_director,
    measured_tumbling_period,
    shear_angle_rhs,
    shear_gradient,
    steady_shear_angle,
    tumbling_period,
)
from binghamq.leslie import leslie_coefficients

from conftest import matrix3, unit_vectors

C7 = leslie_coefficients(7.0)
C10 = leslie_coefficients(10.0)


@given(unit_vectors, matrix3(scale=2.0), matrix3(scale=1.0))
def test_rhs_tangent(n, kappa, hm):
    h = hm[0]
    assert abs(el_director_rhs(n, kappa, h, C7) @ n) <= 1e-12


def test_steady_angle_flow_aligning():
    th = steady_shear_angle(C7)
    assert abs(np.cos(2 * th) - 1 / C7.lambda_) <= 1e-8
    assert abs(shear_angle_rhs(th, C7.lambda_)) <= 1e-12
    # the director ODE converges to the same angle
    n = integrate_director([1.0, 0.0, 0.0], shear_gradient(), C7, [60.0])[-1]
    assert abs(np.arctan2(n[1], n[0]) - th) <= 1e-8


def test_shear_angle_matches_3d_equation():
    lam = C7.lambda_
    for th in np.linspace(-1.0, 1.0, 7):
        n = np.array([np.cos(th), np.sin(th), 0.0])
        dn = el_director_rhs(n, shear_gradient(), None, C7)
        dth = np.cross(n, dn)[2]
        assert abs(dth - shear_angle_rhs(th, lam)) <= 1e-14


def test_tumbling_period():
    assert steady_shear_angle(C10) is None
    t_an = tumbling_period(C10)
    assert np.isfinite(t_an)
    assert abs(measured_tumbling_period(C10) - t_an) <= 1e-8 * t_an
    assert tumbling_period(C7) == np.inf


@pytest.mark.parametrize("rate", [0.5, 2.0])
def test_period_scales_inversely_with_rate(rate):
    assert tumbling_period(C10, rate) == pytest.approx(tumbling_period(C10) / rate)
