import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from binghamq.quadrature import build_rule, isotropic_moments, moments_of
from binghamq.tensors import (
    IDENTITY,
    MONOMIALS,
    TRACELESS_BASIS,
    Sym4Moment,
    Sym6Moment,
    SymTraceless3,
    contract42,
    contract62,
    ddot,
    eig,
    expand_symmetric,
    from_basis,
    from_vec5,
    mq_apply,
    mq_transpose_apply,
    orthonormal_completion,
    random_rotation,
    reduce_symmetric,
    rotate2,
    rotate4,
    split_velocity_gradient,
    sym,
    to_basis,
    to_vec5,
    uniaxial,
)

from conftest import matrix3, traceless_sym, unit_vectors


def iso_m4():
    return Sym4Moment(isotropic_moments(4))


def test_eig_zero():
    lam, frame = eig(np.zeros((3, 3)))
    assert np.array_equal(lam, np.zeros(3))
    assert np.allclose(np.abs(frame), IDENTITY)


def test_eig_uniaxial():
    lam, frame = eig(uniaxial(0.6, [0.0, 0.0, 1.0]))
    assert np.allclose(lam, [0.4, -0.2, -0.2], atol=1e-15)
    assert np.allclose(np.abs(frame[:, 0]), [0.0, 0.0, 1.0])


@given(traceless_sym())
def test_eig_reconstructs(q):
    lam, frame = eig(q)
    assert np.all(np.diff(lam) <= 0)
    assert abs(lam.sum()) < 1e-14
    assert np.abs(frame @ np.diag(lam) @ frame.T - q).max() < 1e-13
    assert np.abs(frame.T @ frame - IDENTITY).max() < 1e-13


def test_vec5_and_basis_roundtrip(rng):
    a = sym(rng.standard_normal((4, 3, 3)))
    a -= np.trace(a, axis1=-2, axis2=-1)[..., None, None] * IDENTITY / 3
    assert np.abs(from_vec5(to_vec5(a)) - a).max() < 1e-15
    assert np.abs(from_basis(to_basis(a)) - a).max() < 1e-15
    gram = np.einsum("iab,jab->ij", TRACELESS_BASIS, TRACELESS_BASIS)
    assert np.abs(gram - np.eye(5)).max() < 1e-15


def test_symtraceless3_storage():
    q = SymTraceless3([0.1, 0.2, 0.3, 0.4, 0.5])
    m = q.matrix
    assert np.array_equal(m, m.T)
    assert np.trace(m) == 0.0
    assert np.array_equal(SymTraceless3.from_matrix(m).comps, q.comps)
    with pytest.raises(ValueError):
        SymTraceless3([1.0, 2.0])


def test_symmetric_storage_roundtrip(rng):
    for rank, n in ((2, 6), (4, 15), (6, 28)):
        assert len(MONOMIALS[rank]) == n
        c = rng.standard_normal(n)
        assert np.abs(reduce_symmetric(expand_symmetric(c, rank), rank) - c).max() < 1e-15
    d = expand_symmetric(rng.standard_normal(15), 4)
    for perm in ((1, 0, 2, 3), (2, 3, 0, 1), (3, 1, 2, 0)):
        assert np.array_equal(d, d.transpose(perm))


def test_moment_contractions_match_lower_rank():
    ms = moments_of(np.diag([1.0, 0.5, -1.5]), build_rule(24))
    assert np.abs(ms.m4.trace_pair() - ms.m2).max() < 1e-12
    assert np.abs(ms.m6.trace_pair() - ms.m4.dense).max() < 1e-12


def test_mq_isotropic_identity_vanishes():
    assert np.abs(mq_apply(np.zeros((3, 3)), iso_m4(), IDENTITY)).max() < 1e-15


def test_mq_of_b_is_three_halves_q():
    b = np.diag([2.0, -0.5, -1.5])
    ms = moments_of(b, build_rule(32))
    assert np.abs(mq_apply(ms.q, ms.m4, b) - 1.5 * ms.q).max() < 1e-12


@given(traceless_sym(scale=3.0), traceless_sym(), matrix3())
def test_mq_symmetry_and_trace(b, a, c):
    ms = moments_of(b, build_rule(24), with_m6=False)
    m = mq_apply(ms.q, ms.m4, a)
    assert abs(np.trace(m + m.T)) < 1e-13
    # M(A):C = M(C):A when A is symmetric
    lhs = ddot(mq_apply(ms.q, ms.m4, a), c)
    rhs = ddot(mq_apply(ms.q, ms.m4, c), a)
    assert abs(lhs - rhs) < 1e-12
    assert np.abs(mq_transpose_apply(ms.q, ms.m4, c) - mq_apply(ms.q, ms.m4, c).T).max() == 0.0


def test_contract42_isotropic():
    assert np.abs(contract42(iso_m4(), IDENTITY) - IDENTITY / 3.0).max() < 1e-16


def test_contract_against_loops(rng):
    m4 = Sym4Moment(rng.standard_normal(15))
    m6 = Sym6Moment(rng.standard_normal(28))
    a = rng.standard_normal((3, 3))
    d4, d6 = m4.dense, m6.dense
    ref4 = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    ref4[i, j] += d4[i, j, k, l] * a[k, l]
    assert np.abs(contract42(m4, a) - ref4).max() < 1e-14
    ref6 = np.zeros((3, 3, 3, 3))
    s = sym(a)
    for idx in np.ndindex(3, 3, 3, 3):
        for m in range(3):
            for n in range(3):
                ref6[idx] += d6[idx + (m, n)] * s[m, n]
    assert np.abs(contract62(m6, s).dense - ref6).max() < 1e-13


@given(unit_vectors)
def test_uniaxial(n):
    assert np.abs(uniaxial(0.0, n)).max() == 0.0
    q = uniaxial(0.7, n)
    assert abs(np.trace(q)) < 1e-15
    assert np.allclose(q @ n, 0.7 * (2.0 / 3.0) * n, atol=1e-14)


def test_uniaxial_rejects_non_unit():
    with pytest.raises(ValueError):
        uniaxial(0.5, [1.0, 1.0, 0.0])


@given(matrix3())
def test_split_velocity_gradient(kappa):
    d, om = split_velocity_gradient(kappa)
    assert np.array_equal(d, d.T)
    assert np.array_equal(om, -om.T)
    assert np.abs(d - om - kappa).max() < 1e-15


def test_rotations(rng):
    r = random_rotation(rng)
    assert np.abs(r @ r.T - IDENTITY).max() < 1e-14
    assert abs(np.linalg.det(r) - 1.0) < 1e-14
    ms = moments_of(np.diag([1.0, 0.0, -1.0]), build_rule(24), with_m6=False)
    rotated = moments_of(rotate2(np.diag([1.0, 0.0, -1.0]), r), build_rule(24), with_m6=False)
    assert np.abs(rotate4(ms.m4.dense, r) - rotated.m4.dense).max() < 1e-11


@given(unit_vectors)
def test_orthonormal_completion(n):
    n1, n2 = orthonormal_completion(n)
    frame = np.stack([n1, n2, n])
    assert np.abs(frame @ frame.T - IDENTITY).max() < 1e-14
    assert np.linalg.det(frame) > 0
