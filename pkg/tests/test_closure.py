import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binghamq.closure import (
    MIN_MARGIN,
    bulk_potential,
    check_admissible,
    random_admissible,
    roundtrip_study,
    solve_bq,
    solve_field,
)
from binghamq.equilibria import order_parameters
from binghamq.errors import NoConvergence, NonAdmissible
from binghamq.quadrature import FOUR_PI, build_rule, moments_of
from binghamq.tensors import IDENTITY, TRACELESS_BASIS, contract42, ddot, mq_apply, rotate2, uniaxial

from conftest import admissible_q, angles, matrix3, rotation_from_angles, unit_vectors

E3 = np.array([0.0, 0.0, 1.0])


def test_check_admissible_cases():
    a = check_admissible(np.zeros((3, 3)))
    assert a.admissible and abs(a.margin - 1 / 3) < 1e-15
    assert not check_admissible(uniaxial(1.0, E3)).admissible
    a = check_admissible(uniaxial(0.95, E3))
    # top eigenvalue is 2/3 - 0.0333; the double eigenvalue -0.95/3 is closer to -1/3
    assert abs(2 / 3 - a.eigenvalues[0] - (2 / 3 - 0.95 * 2 / 3)) < 1e-15
    assert a.admissible and abs(a.margin - 0.05 / 3) < 1e-15


def test_isotropic_fixed_point():
    r = solve_bq(np.zeros((3, 3)))
    assert np.abs(r.b).max() == 0.0
    assert abs(r.moments.z - FOUR_PI) < 1e-12
    assert r.iterations <= 1


def test_uniaxial_recovers_eta():
    eta = 3.0
    s2, _ = order_parameters(eta)
    for n in (E3, np.array([1.0, 2.0, 2.0]) / 3.0):
        r = solve_bq(uniaxial(s2, n))
        assert np.abs(r.b - uniaxial(eta, n)).max() < 1e-8


@given(admissible_q())
def test_roundtrip_and_lemma_identities(q):
    rule = build_rule(32)
    r = solve_bq(q, rule)
    assert r.residual <= 1e-11
    assert r.jacobian_min_eig > 0.0
    fwd = moments_of(r.b, rule)
    assert np.abs(fwd.q - q).max() <= 1e-10
    b, m4 = r.b, r.moments.m4
    assert np.abs(1.5 * q - (b @ q + b / 3 - contract42(m4, b))).max() <= 1e-9
    assert np.abs(b @ q - q @ b).max() <= 1e-9
    # solver moments agree with full-sphere quadrature at the returned B
    assert np.abs(fwd.m4.components - m4.components).max() < 1e-12
    assert np.abs(fwd.m6.components - r.moments.m6.components).max() < 1e-12


@given(admissible_q(), angles)
def test_equivariance(q, ang):
    rot = rotation_from_angles(*ang)
    b1 = solve_bq(q).b
    b2 = solve_bq(rotate2(q, rot)).b
    assert np.abs(rotate2(b1, rot) - b2).max() <= 1e-9


@given(admissible_q(margin=0.05), st.integers(0, 4))
def test_entropy_derivative_is_b(q, k):
    # d(-ln Z + Q:B)/dQ = B along each basis direction, five-point central differences
    e, h = TRACELESS_BASIS[k], 1e-4
    f = [bulk_potential(q + j * h * e) for j in (-2, -1, 1, 2)]
    fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
    assert abs(fd - ddot(solve_bq(q).b, e)) < 1e-6


@given(admissible_q(), matrix3(scale=2.0))
def test_eigenframe_operator_matches_dense(q, a):
    cf = solve_field(q)
    ms = moments_of(cf.b, build_rule(32), with_m6=False)
    assert np.abs(cf.apply_m(a) - mq_apply(q, ms.m4, a)).max() < 1e-11
    assert np.abs(cf.contract_m4(a) - contract42(ms.m4, a)).max() < 1e-11


def test_batched_matches_single(rng):
    qs = np.stack([random_admissible(rng) for _ in range(6)]).reshape(2, 3, 3, 3)
    cf = solve_field(qs)
    assert cf.b.shape == (2, 3, 3, 3)
    for i in range(2):
        for j in range(3):
            assert np.abs(cf.b[i, j] - solve_bq(qs[i, j]).b).max() < 1e-9


def test_warm_start_is_fast(rng):
    q = random_admissible(rng)
    b = solve_bq(q).b
    dq = 1e-4 * TRACELESS_BASIS[1]
    assert solve_bq(q + dq, b_guess=b).iterations <= 2


def test_errors():
    with pytest.raises(NonAdmissible):
        solve_bq(uniaxial(1.2, E3))
    with pytest.raises(NonAdmissible):
        solve_bq(np.diag([2 / 3 - 0.5 * MIN_MARGIN, -1 / 3 + 0.5 * MIN_MARGIN, -1 / 3]))
    with pytest.raises(ValueError):
        solve_bq(np.zeros((3, 3)), tol=1e-13)
    with pytest.raises(NoConvergence) as info:
        solve_bq(uniaxial(0.9, E3), max_iter=1)
    assert info.value.best_residual > 0


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.3))
def test_random_admissible_respects_margin(seed, margin):
    q = random_admissible(np.random.default_rng(seed), margin)
    assert check_admissible(q).margin.min() >= margin - 1e-15
    assert abs(np.trace(q)) < 1e-15


def test_roundtrip_study_small():
    rep = roundtrip_study(samples=20, seed=3)
    assert rep.passed()
    assert rep.max_residual <= 1e-10
