import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binghamq.equilibria import critical_alpha, nematic_order
from binghamq.errors import SubCritical
from binghamq.leslie import (
    COEFFICIENT_NAMES,
    coefficients_from_order,
    ericksen_coefficient,
    frank_constants,
    frank_from_order,
    leslie_coefficients,
)

ALPHAS = np.linspace(critical_alpha()[0] + 1e-3, 20.0, 15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_coefficient_identities(alpha):
    c = leslie_coefficients(alpha)
    assert abs(c.parodi_residual) <= 1e-14
    assert c.gamma2 == -c.s2
    assert abs(c.alpha2 + c.alpha3 + c.s2) <= 1e-15
    assert abs(c.gamma1 - (c.alpha3 - c.alpha2)) <= 1e-14 * c.gamma1
    assert abs(c.gamma2 - (c.alpha6 - c.alpha5)) <= 1e-15
    assert abs(c.lambda_ + c.gamma2 / c.gamma1) <= 1e-14 * abs(c.lambda_)
    assert abs(c.gamma1 * c.lambda_ - c.s2) <= 1e-14
    assert c.gamma1 > 0
    assert all(np.isfinite(c.dissipation_coefficients()))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_lambda_equals_kinematic_value(alpha):
    # at B = alpha Q the tumbling parameter equals the moment expression
    # (14 + 5 S2 + 16 S4) / (35 S2) of the homogeneous director kinematics
    c = leslie_coefficients(alpha)
    assert abs(c.lambda_ - (14 + 5 * c.s2 + 16 * c.s4) / (35 * c.s2)) < 1e-10


def test_lambda_regimes():
    assert leslie_coefficients(7.0).lambda_ > 1
    assert abs(leslie_coefficients(10.0).lambda_) < 1


def test_lambda_against_s2_logged():
    # lambda is not monotone in S2 (minimum near alpha = 10); logged for reference
    lam, s2 = [], []
    for a in ALPHAS:
        c = leslie_coefficients(a)
        lam.append(c.lambda_)
        s2.append(c.s2)
    order = np.argsort(s2)
    print("lambda vs S2:", list(zip(np.array(s2)[order].round(4), np.array(lam)[order].round(4))))
    assert np.all(np.diff(np.array(s2)[order]) > 0)
    assert min(lam) > 0.9


def test_explicit_order_parameters():
    c = leslie_coefficients(7.0, s2=0.5, s4=0.2)
    assert c.s2 == 0.5 and np.isnan(c.eta)
    assert c.as_dict()["alpha1"] == -0.1
    assert set(COEFFICIENT_NAMES) <= set(c.as_dict())
    with pytest.raises(ValueError):
        leslie_coefficients(7.0, s2=0.5)
    with pytest.raises(ValueError):
        coefficients_from_order(0.0, 0.1, 7.0)
    with pytest.raises(SubCritical):
        leslie_coefficients(5.0)


def test_frank_one_constant():
    _, s2, s4 = nematic_order(7.0)
    k = frank_constants((1.0, 0, 0, 0, 0), 7.0)
    assert abs(k.k1 - 2 * s2**2) <= 1e-14 and k.k1 == k.k2 == k.k3


@given(st.lists(st.floats(-3.0, 3.0), min_size=5, max_size=5))
def test_frank_identities(j):
    s2, s4 = 0.55, 0.2
    k = frank_from_order(j, s2, s4)
    assert abs((k.k3 - k.k1) - (4 / 7 * s4**2 * j[3] + 2 * j[4] * s2 * s4)) < 1e-14
    parts = [frank_from_order(np.eye(5)[i] * j[i], s2, s4) for i in range(5)]
    for name in ("k1", "k2", "k3"):
        assert abs(getattr(k, name) - sum(getattr(p, name) for p in parts)) < 1e-14


def test_frank_input_length():
    with pytest.raises(ValueError):
        frank_constants((1.0, 2.0), 7.0)


def test_ericksen_coefficient():
    assert ericksen_coefficient(7.0, 0.0) == 0.0
    _, s2, _ = nematic_order(7.0)
    g = 0.8
    k = frank_constants((7.0 * g / 2, 0, 0, 0, 0), 7.0)
    assert abs(ericksen_coefficient(7.0, g) - k.k1) < 1e-14
    with pytest.raises(ValueError):
        ericksen_coefficient(7.0, -1.0)


def test_molecular_field_is_laplacian():
    # discrete E_F = coef/2 sum |grad n|^2 dx on a periodic 1-D grid; its
    # gradient in n equals -coef * Laplacian(n) dx (so h = coef Lap n)
    coef = ericksen_coefficient(7.0, 1.0)
    m, dx = 64, 2 * np.pi / 64
    x = np.arange(m) * dx
    th = 0.4 * np.sin(x)
    n = np.stack([np.cos(th), np.sin(th), 0 * th], axis=1)

    def energy(nf):
        d = (np.roll(nf, -1, axis=0) - nf) / dx
        return 0.5 * coef * np.sum(d * d) * dx

    lap = (np.roll(n, -1, axis=0) - 2 * n + np.roll(n, 1, axis=0)) / dx**2
    eps = 1e-6
    for i in (0, 17, 40):
        for c in range(3):
            e = np.zeros_like(n)
            e[i, c] = eps
            fd = (energy(n + e) - energy(n - e)) / (2 * eps)
            assert abs(fd / dx + coef * lap[i, c]) < 1e-6
