"""Algebra of symmetric traceless 3x3 tensors and fully symmetric moment tensors.

Storage conventions
-------------------
* A symmetric traceless tensor is stored canonically as five numbers
  ``(xx, yy, xy, xz, yz)``; ``zz = -xx - yy``.
* Fully symmetric rank-4 and rank-6 tensors are stored by their monomial
  components.  Component ``p`` of a rank-r tensor holds the entry whose index
  multiset contains ``a`` ones, ``b`` twos and ``c`` threes, with
  ``(a, b, c) = MONOMIALS[r][p]`` (lexicographically descending, ``a+b+c=r``).
  That gives 15 numbers at rank 4 and 28 at rank 6.

All functions accept plain ``numpy`` arrays with arbitrary leading batch
dimensions, so the same code serves single tensors and whole grids.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

IDENTITY = np.eye(3)

# Orthonormal basis of the traceless symmetric matrices under A:B.
_S2, _S6 = np.sqrt(2.0), np.sqrt(6.0)
TRACELESS_BASIS = np.array(
    [
        np.diag([1.0, -1.0, 0.0]) / _S2,
        np.diag([1.0, 1.0, -2.0]) / _S6,
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    ],
    dtype=float,
)
TRACELESS_BASIS[2:] /= _S2
TRACELESS_BASIS.setflags(write=False)


def _monomials(rank):
    out = [
        (a, b, rank - a - b)
        for a in range(rank, -1, -1)
        for b in range(rank - a, -1, -1)
    ]
    return tuple(out)


MONOMIALS = {2: _monomials(2), 4: _monomials(4), 6: _monomials(6)}


def _index_map(rank):
    """Position in MONOMIALS[rank] of every dense index tuple, flattened."""
    lookup = {m: p for p, m in enumerate(MONOMIALS[rank])}
    idx = np.empty(3**rank, dtype=np.intp)
    for flat, tup in enumerate(itertools.product(range(3), repeat=rank)):
        idx[flat] = lookup[(tup.count(0), tup.count(1), tup.count(2))]
    return idx


_INDEX_MAPS = {r: _index_map(r) for r in (2, 4, 6)}
# one representative dense position per monomial, used for reduction
_REPRESENTATIVE = {
    r: np.array([int(np.argmax(_INDEX_MAPS[r] == p)) for p in range(len(MONOMIALS[r]))])
    for r in (2, 4, 6)
}


def expand_symmetric(components, rank):
    """Dense ``(..., 3, ..., 3)`` tensor from monomial components."""
    components = np.asarray(components, dtype=float)
    dense = components[..., _INDEX_MAPS[rank]]
    return dense.reshape(components.shape[:-1] + (3,) * rank)


def reduce_symmetric(dense, rank):
    """Monomial components of a dense tensor (assumed fully symmetric)."""
    dense = np.asarray(dense, dtype=float)
    flat = dense.reshape(dense.shape[: dense.ndim - rank] + (3**rank,))
    return flat[..., _REPRESENTATIVE[rank]]


def monomial_values(vectors, rank):
    """Evaluate every rank-``rank`` monomial at the given 3-vectors.

    Returns an array ``(..., n_monomials)``; the weighted average of this
    over a density is the reduced moment tensor.
    """
    v = np.asarray(vectors, dtype=float)
    powers = [np.stack([v[..., i] ** p for p in range(rank + 1)], axis=-1) for i in range(3)]
    cols = [powers[0][..., a] * powers[1][..., b] * powers[2][..., c] for a, b, c in MONOMIALS[rank]]
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class _SymmetricMoment:
    components: np.ndarray
    rank = 0

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        if comps.shape[-1] != len(MONOMIALS[self.rank]):
            raise ValueError(
                f"expected {len(MONOMIALS[self.rank])} components, got {comps.shape[-1]}"
            )
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @cached_property
    def dense(self):
        d = expand_symmetric(self.components, self.rank)
        d.setflags(write=False)
        return d

    @classmethod
    def from_dense(cls, dense):
        return cls(reduce_symmetric(dense, cls.rank))

    def trace_pair(self):
        """Contraction over the last index pair (one rank lower, dense)."""
        return np.trace(self.dense, axis1=-2, axis2=-1)


class Sym4Moment(_SymmetricMoment):
    """Fully symmetric rank-4 tensor, 15 stored components."""

    rank = 4


class Sym6Moment(_SymmetricMoment):
    """Fully symmetric rank-6 tensor, 28 stored components."""

    rank = 6


@dataclass(frozen=True)
class SymTraceless3:
    """Symmetric traceless 3x3 tensor in canonical 5-component storage."""

    comps: np.ndarray

    def __post_init__(self):
        c = np.array(self.comps, dtype=float)
        if c.shape[-1] != 5:
            raise ValueError("SymTraceless3 needs 5 components (xx, yy, xy, xz, yz)")
        c.setflags(write=False)
        object.__setattr__(self, "comps", c)

    @classmethod
    def from_matrix(cls, a):
        return cls(to_vec5(a))

    @property
    def matrix(self):
        return from_vec5(self.comps)

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m if dtype is None else m.astype(dtype)


def as_matrix(a):
    """Accept a SymTraceless3 or any array-like and return a float ndarray."""
    if isinstance(a, SymTraceless3):
        return a.matrix
    return np.asarray(a, dtype=float)


def to_vec5(a):
    a = as_matrix(a)
    s = sym(a)
    return np.stack(
        [s[..., 0, 0], s[..., 1, 1], s[..., 0, 1], s[..., 0, 2], s[..., 1, 2]], axis=-1
    )


def from_vec5(c):
    c = np.asarray(c, dtype=float)
    xx, yy, xy, xz, yz = (c[..., k] for k in range(5))
    zz = -xx - yy
    rows = [
        np.stack([xx, xy, xz], axis=-1),
        np.stack([xy, yy, yz], axis=-1),
        np.stack([xz, yz, zz], axis=-1),
    ]
    return np.stack(rows, axis=-2)


def to_basis(a):
    """Coordinates of a traceless symmetric tensor in TRACELESS_BASIS."""
    return np.einsum("...ij,pij->...p", as_matrix(a), TRACELESS_BASIS)


def from_basis(coords):
    return np.einsum("...p,pij->...ij", np.asarray(coords, dtype=float), TRACELESS_BASIS)


def sym(a):
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def skew(a):
    a = np.asarray(a, dtype=float)
    return 0.5 * (a - np.swapaxes(a, -1, -2))


def traceless(a):
    a = np.asarray(a, dtype=float)
    tr = np.trace(a, axis1=-2, axis2=-1)
    return a - tr[..., None, None] * IDENTITY / 3.0


def ddot(a, b):
    """Double contraction A:B = sum_ij A_ij B_ij."""
    return np.einsum("...ij,...ij->...", np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def split_velocity_gradient(kappa):
    """Return ``(D, Omega)`` for ``kappa = (grad v)^T``.

    ``D = (kappa + kappa^T)/2`` and ``Omega = (kappa^T - kappa)/2``.
    """
    kappa = np.asarray(kappa, dtype=float)
    kt = np.swapaxes(kappa, -1, -2)
    return 0.5 * (kappa + kt), 0.5 * (kt - kappa)


def uniaxial(s, n):
    """``s (n n - I/3)`` for a unit vector ``n``."""
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n, axis=-1)
    if np.any(np.abs(norm - 1.0) > 1e-12):
        raise ValueError("director must be a unit vector (|n| = 1 within 1e-12)")
    s = np.asarray(s, dtype=float)
    return s[..., None, None] * (np.einsum("...i,...j->...ij", n, n) - IDENTITY / 3.0)


def eig(q):
    """Eigenvalues in descending order and the matching orthonormal frame.

    ``frame[..., :, k]`` is the eigenvector of ``eigenvalues[..., k]`` and
    ``frame @ diag(eigenvalues) @ frame.T`` reconstructs ``q``.
    """
    q = sym(as_matrix(q))
    lam, vec = np.linalg.eigh(q)
    order = np.argsort(-lam, axis=-1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=-1)
    vec = np.take_along_axis(vec, order[..., None, :], axis=-1)
    return lam, vec


def _dense4(m4):
    if isinstance(m4, _SymmetricMoment):
        return m4.dense
    m4 = np.asarray(m4, dtype=float)
    return expand_symmetric(m4, 4) if m4.shape[-1] == 15 else m4


def contract42(m4, a):
    """``(M4 : A)_ij = M4_ijkl A_kl``."""
    return np.einsum("...ijkl,...kl->...ij", _dense4(m4), np.asarray(a, dtype=float))


def contract62(m6, a):
    """``(M6 : A)_ijkl = M6_ijklmn A_mn`` returned as a Sym4Moment."""
    d6 = m6.dense if isinstance(m6, _SymmetricMoment) else np.asarray(m6, dtype=float)
    if d6.shape[-1] == 28:
        d6 = expand_symmetric(d6, 6)
    full = np.einsum("...ijklmn,...mn->...ijkl", d6, np.asarray(a, dtype=float))
    return Sym4Moment(reduce_symmetric(full, 4))


def mq_apply(q, m4, a):
    """Closure operator ``A/3 + Q.A - A:M4``."""
    q = as_matrix(q)
    a = np.asarray(a, dtype=float)
    return a / 3.0 + q @ a - contract42(m4, a)


def mq_transpose_apply(q, m4, a):
    """Transpose of :func:`mq_apply` as a matrix, ``A/3 + A^T.Q - A^T:M4``."""
    return np.swapaxes(mq_apply(q, m4, a), -1, -2)


def rotate2(a, r):
    return r @ np.asarray(a, dtype=float) @ np.swapaxes(r, -1, -2)


def rotate4(t, r):
    return np.einsum("...ia,...jb,...kc,...ld,...abcd->...ijkl", r, r, r, r, t)


def random_rotation(rng):
    """Haar-distributed rotation matrix from a numpy Generator."""
    z = rng.standard_normal((3, 3))
    qm, rm = np.linalg.qr(z)
    qm = qm * np.sign(np.diag(rm))
    if np.linalg.det(qm) < 0:
        qm[:, 0] = -qm[:, 0]
    return qm


def orthonormal_completion(n):
    """Two unit vectors completing ``n`` to a right-handed orthonormal frame."""
    n = np.asarray(n, dtype=float)
    helper = IDENTITY[int(np.argmin(np.abs(n)))]
    n1 = np.cross(n, helper)
    n1 /= np.linalg.norm(n1)
    n2 = np.cross(n, n1)
    return n1, n2
