import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from binghamq.equilibria import ak, order_parameters
from binghamq.quadrature import (
    FOUR_PI,
    build_rule,
    diagonal_moments,
    isotropic_moments,
    moments_of,
    q4_of,
)
from binghamq.tensors import IDENTITY, ddot, mq_apply, rotate2, rotate4, uniaxial

from conftest import matrix3, rotation_from_angles, angles, traceless_sym

E3 = np.array([0.0, 0.0, 1.0])


def exact_monomial(a, b, c):
    """Sphere integral of x^a y^b z^c from the Gamma-function formula."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    g = special.gamma
    return 2.0 * g((a + 1) / 2) * g((b + 1) / 2) * g((c + 1) / 2) / g((a + b + c + 3) / 2)


def test_rule_basics():
    assert abs(build_rule(1).weights.sum() - 4 * np.pi) < 1e-14
    r = build_rule(16)
    assert abs(r.weights.sum() - 4 * np.pi) < 1e-12
    assert np.abs(np.linalg.norm(r.nodes, axis=1) - 1.0).max() < 1e-14
    assert np.all(r.weights > 0)
    assert r.degree == 31 and r.size == 16 * 32
    z = r.nodes[:, 2]
    assert abs(r.integrate(z**2) - 4 * np.pi / 3) < 1e-13
    assert abs(r.integrate(z**6) - 4 * np.pi / 7) < 1e-12
    with pytest.raises(ValueError):
        build_rule(0)


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_polynomial_exactness(a, b, c):
    r = build_rule(8)
    if a + b + c > r.degree:
        return
    x, y, z = r.nodes.T
    assert abs(r.integrate(x**a * y**b * z**c) - exact_monomial(a, b, c)) < 1e-13


def test_isotropic_moments():
    ms = moments_of(np.zeros((3, 3)), build_rule(16))
    assert abs(ms.z - FOUR_PI) < 1e-12
    assert np.abs(ms.m2 - IDENTITY / 3).max() < 1e-15
    assert abs(ms.m4.dense[0, 0, 0, 0] - 0.2) < 1e-15
    assert abs(ms.m4.dense[0, 0, 1, 1] - 1 / 15) < 1e-15
    assert abs(ms.m6.dense[0, 0, 0, 0, 0, 0] - 1 / 7) < 1e-15
    assert np.abs(isotropic_moments(4) - ms.m4.components).max() < 1e-15
    assert np.abs(isotropic_moments(6) - ms.m6.components).max() < 1e-15


def test_axisymmetric_against_1d_integrals():
    eta = 3.0
    ms = moments_of(uniaxial(eta, E3), build_rule(32))
    assert abs(ms.m2[2, 2] - ak(2, eta) / ak(0, eta)) < 1e-13
    assert abs(ms.m4.dense[2, 2, 2, 2] - ak(4, eta) / ak(0, eta)) < 1e-13
    # Z = 4 pi e^{-eta/3} A0(eta)
    assert abs(ms.log_z - (np.log(4 * np.pi * ak(0, eta)) - eta / 3)) < 1e-13


@given(traceless_sym(scale=4.0), angles)
def test_equivariance(b, ang):
    r = rotation_from_angles(*ang)
    rule = build_rule(32)
    ms, mr = moments_of(b, rule), moments_of(rotate2(b, r), rule)
    assert abs(ms.log_z - mr.log_z) < 1e-11
    assert np.abs(rotate2(ms.m2, r) - mr.m2).max() < 1e-11
    assert np.abs(rotate4(ms.m4.dense, r) - mr.m4.dense).max() < 1e-11


@given(traceless_sym(scale=6.0))
def test_moment_set_invariants(b):
    ms = moments_of(b, build_rule(32))
    assert ms.z > 0
    assert abs(np.trace(ms.m2) - 1.0) < 1e-12
    assert np.abs(ms.m4.trace_pair() - ms.m2).max() < 1e-12
    assert np.abs(ms.m6.trace_pair() - ms.m4.dense).max() < 1e-12


def test_overflow_guard():
    ms = moments_of(uniaxial(400.0, E3), build_rule(32), with_m6=False)
    assert np.isfinite(ms.log_z)
    assert np.all(np.isfinite(ms.m2))


@given(traceless_sym(scale=10.0 / np.sqrt(2.0)))
def test_level_doubling(b):
    a, c = moments_of(b, build_rule(24)), moments_of(b, build_rule(48))
    assert np.abs(a.m2 - c.m2).max() < 1e-10
    assert np.abs(a.m4.components - c.m4.components).max() < 1e-10
    assert np.abs(a.m6.components - c.m6.components).max() < 1e-10


def test_q4_isotropic():
    assert np.abs(q4_of(np.zeros((3, 3)), build_rule(16)).dense).max() < 1e-15


def test_q4_aligned_limit():
    # uniaxial density: Q4_3333 = (8/35) S4 exactly, with S4 from 1-D integrals
    q4 = q4_of(uniaxial(40.0, E3), build_rule(48))
    assert abs(q4.dense[2, 2, 2, 2] - 8.0 / 35.0 * order_parameters(40.0)[1]) < 1e-12
    # S4 ~ 1 - 5/eta, so the distance to 8/35 is ~ 1.1/eta: below 2e-2 from eta = 80
    q4 = q4_of(uniaxial(80.0, E3), build_rule(64))
    assert abs(q4.dense[2, 2, 2, 2] - 8.0 / 35.0) < 2e-2


@given(traceless_sym(scale=5.0))
def test_q4_traceless(b):
    q4 = q4_of(b, build_rule(32)).dense
    assert np.abs(np.einsum("iikl->kl", q4)).max() < 1e-11


@given(traceless_sym(scale=4.0), matrix3())
def test_lemma_positivity_at_quadrature_level(b, e):
    rule = build_rule(32)
    ms = moments_of(b, rule, with_m6=False)
    lhs = ddot(mq_apply(ms.q, ms.m4, e), e)
    # node-wise |m x (m.E)|^2 weighted by the density
    m = rule.nodes
    f = rule.weights * np.exp(np.einsum("ni,ij,nj->n", m, b, m) - ms.log_z)
    w = np.cross(m, m @ e)
    rhs = f @ np.sum(w * w, axis=1)
    assert abs(lhs - rhs) < 1e-11
    assert rhs >= 0.0


@pytest.mark.parametrize("level", [16, 17])
def test_diagonal_moments_match_full_rule(level):
    rule = build_rule(level)
    beta = np.array([[1.5, -0.5, -1.0], [0.0, 0.0, 0.0], [4.0, -2.0, -2.0]])
    dm = diagonal_moments(beta, rule, with_sixth=True)
    for k, bk in enumerate(beta):
        ms = moments_of(np.diag(bk), rule)
        assert abs(dm.log_z[k] - ms.log_z) < 1e-12
        assert np.abs(dm.second[k] - np.diag(ms.m2)).max() < 1e-13
        assert np.abs(dm.m4_dense()[k] - ms.m4.dense).max() < 1e-13
        assert np.abs(dm.m6_dense()[k] - ms.m6.dense).max() < 1e-13
