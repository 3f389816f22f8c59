"""Product quadrature on the unit sphere and Bingham-density moments.

The rule is Gauss-Legendre in ``cos(theta)`` times an equispaced azimuthal
grid offset by half a spacing.  The offset keeps every node off the planes
``x = 0`` and ``y = 0``; together with an even number of Gauss points this
makes the node set invariant under each coordinate reflection, which
:func:`diagonal_moments` exploits to integrate even densities over one
octant only.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .tensors import (
    IDENTITY,
    MONOMIALS,
    Sym4Moment,
    Sym6Moment,
    as_matrix,
    expand_symmetric,
    monomial_values,
)

DEFAULT_LEVEL = 32
FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    level: int

    @property
    def size(self):
        return self.weights.size

    def integrate(self, values):
        """Integral of node values over the sphere (last axis = nodes)."""
        return np.asarray(values) @ self.weights

    # cached node tables --------------------------------------------------
    @property
    def _cache(self):
        try:
            return self.__dict__["_tables"]
        except KeyError:
            tables = {}
            object.__setattr__(self, "_tables", tables)
            return tables

    def monomials(self, rank):
        tab = self._cache
        if rank not in tab:
            m = monomial_values(self.nodes, rank)
            m.setflags(write=False)
            tab[rank] = m
        return tab[rank]

    def octant(self):
        """Octant tables for even Bingham densities in a principal frame.

        Returns ``(sq, log_w, table, triples)``: ``sq`` is ``(N, 3)`` squared
        node coordinates, ``log_w`` the log of the weights times 8, ``table``
        is ``(N, 13)`` holding ``1``, the three squares and the nine pairwise
        products (normalisation, second and fourth moments in one product),
        and ``triples`` is ``(N, 27)`` for the sixth moments.  Odd levels have no
        reflection-symmetric node set and fall back to the full rule.
        """
        tab = self._cache
        if "octant" not in tab:
            if self.level % 2:
                sq = self.nodes**2
                w = self.weights.copy()
            else:
                keep = np.all(self.nodes > 0.0, axis=1)
                sq = self.nodes[keep] ** 2
                w = 8.0 * self.weights[keep]
            pairs = np.einsum("na,nb->nab", sq, sq).reshape(-1, 9)
            table = np.concatenate([np.ones((sq.shape[0], 1)), sq, pairs], axis=1)
            triples = np.einsum("na,nb,nc->nabc", sq, sq, sq).reshape(-1, 27)
            log_w = np.log(w)
            for arr in (sq, log_w, table, triples):
                arr.setflags(write=False)
            tab["octant"] = (sq, log_w, table, triples)
        return tab["octant"]


@lru_cache(maxsize=16)
def build_rule(level=DEFAULT_LEVEL):
    """Gauss-Legendre (``level`` points) x uniform azimuth (``2 level`` points).

    Integrates spherical polynomials of degree ``2 level - 1`` exactly.
    """
    level = int(level)
    if level < 1:
        raise ValueError("quadrature level must be >= 1")
    x, wx = np.polynomial.legendre.leggauss(level)
    nphi = 2 * level
    phi = (np.arange(nphi) + 0.5) * (2.0 * np.pi / nphi)
    wphi = 2.0 * np.pi / nphi
    sin_t = np.sqrt(1.0 - x**2)
    nodes = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(x, nphi),
        ],
        axis=1,
    )
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.repeat(wx * wphi, nphi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, degree=2 * level - 1, level=level)


@dataclass(frozen=True, eq=False)
class MomentSet:
    """Partition function and moments of ``exp(mm:B)/Z`` (possibly batched)."""

    z: np.ndarray
    log_z: np.ndarray
    m2: np.ndarray
    m4: Sym4Moment
    m6: Sym6Moment | None = None

    @property
    def q(self):
        return self.m2 - IDENTITY / 3.0


def _shifted_weights(exponent, weights):
    shift = exponent.max(axis=-1, keepdims=True)
    e = weights * np.exp(exponent - shift)
    total = e.sum(axis=-1, keepdims=True)
    return e / total, shift[..., 0] + np.log(total[..., 0])


def moments_of(b, rule=None, with_m6=True):
    """Moments of the Bingham density ``exp(mm:B)/Z`` by quadrature.

    ``b`` may carry leading batch dimensions.  Exponents are shifted by their
    largest node value before exponentiation; ``log_z`` is exact and ``z`` is
    ``exp(log_z)`` (which may overflow to ``inf`` only for absurd fields).
    """
    rule = rule or build_rule()
    b = as_matrix(b)
    exponent = np.einsum("ni,...ij,nj->...n", rule.nodes, b, rule.nodes)
    p, log_z = _shifted_weights(exponent, rule.weights)
    m2 = expand_symmetric(p @ rule.monomials(2), 2)
    m4 = Sym4Moment(p @ rule.monomials(4))
    m6 = Sym6Moment(p @ rule.monomials(6)) if with_m6 else None
    return MomentSet(z=np.exp(log_z), log_z=log_z, m2=m2, m4=m4, m6=m6)


def q4_of(b, rule=None):
    """Fourth-order traceless moment of the Bingham density at ``b``."""
    ms = moments_of(b, rule, with_m6=False)
    m4 = ms.m4.dense
    m2 = ms.m2
    d = IDENTITY
    six = (
        np.einsum("...ab,gm->...abgm", m2, d)
        + np.einsum("...gm,ab->...abgm", m2, d)
        + np.einsum("...ag,bm->...abgm", m2, d)
        + np.einsum("...bm,ag->...abgm", m2, d)
        + np.einsum("...am,bg->...abgm", m2, d)
        + np.einsum("...bg,am->...abgm", m2, d)
    )
    three = (
        np.einsum("ab,gm->abgm", d, d)
        + np.einsum("ag,bm->abgm", d, d)
        + np.einsum("am,bg->abgm", d, d)
    )
    return Traceless4.from_dense(m4 - six / 7.0 + three / 35.0)


class Traceless4(Sym4Moment):
    """Fully symmetric rank-4 tensor with every pair contraction zero."""


@dataclass(frozen=True, eq=False)
class DiagonalMoments:
    """Even moments of ``exp(sum_a beta_a m_a^2)`` in its own principal frame.

    ``second[a] = <m_a^2>``, ``fourth[a, b] = <m_a^2 m_b^2>`` and, when
    requested, ``sixth[a, b, c] = <m_a^2 m_b^2 m_c^2>``.
    """

    log_z: np.ndarray
    second: np.ndarray
    fourth: np.ndarray
    sixth: np.ndarray | None = None

    def m4_dense(self):
        """Dense rank-4 moment in the principal frame."""
        f = self.fourth
        t = np.zeros(f.shape[:-2] + (3, 3, 3, 3))
        for a in range(3):
            for b in range(3):
                t[..., a, a, b, b] = f[..., a, b]
                t[..., a, b, a, b] = f[..., a, b]
                t[..., a, b, b, a] = f[..., a, b]
        return t

    def m6_dense(self):
        s = self.sixth
        if s is None:
            raise ValueError("sixth moments were not computed")
        t = np.zeros(s.shape[:-3] + (3,) * 6)
        idx = np.array(
            [tup for tup in np.ndindex(*(3,) * 6)], dtype=np.intp
        )
        counts = np.stack([(idx == a).sum(axis=1) for a in range(3)], axis=1)
        even = np.all(counts % 2 == 0, axis=1)
        for tup, cnt in zip(idx[even], counts[even]):
            a, b, c = cnt // 2
            # sixth[a,b,c] stores <m_a^2 m_b^2 m_c^2>; rebuild from exponents
            trip = [0] * a + [1] * b + [2] * c
            t[(...,) + tuple(tup)] = s[..., trip[0], trip[1], trip[2]]
        return t


def diagonal_moments(beta, rule=None, with_sixth=False):
    """Moments of a diagonal Bingham field ``diag(beta)`` via the octant rule."""
    rule = rule or build_rule()
    sq, log_w, table, triples = rule.octant()
    beta = np.asarray(beta, dtype=float)
    # m_a^2 sum to one, so max(beta) bounds every exponent
    shift = beta.max(axis=-1)
    e = np.exp(beta @ sq.T + (log_w - shift[..., None]))
    s = e @ table
    total = s[..., 0]
    second = s[..., 1:4] / total[..., None]
    fourth = (s[..., 4:] / total[..., None]).reshape(s.shape[:-1] + (3, 3))
    sixth = None
    if with_sixth:
        sixth = ((e @ triples) / total[..., None]).reshape(s.shape[:-1] + (3, 3, 3))
    return DiagonalMoments(log_z=shift + np.log(total), second=second, fourth=fourth, sixth=sixth)


def isotropic_moments(rank=4):
    """Exact monomial moments of the uniform density (B = 0)."""
    return np.array(
        [_iso(a) * _iso(b) * _iso(c) / _iso_norm(rank) for a, b, c in MONOMIALS[rank]]
    )


def _iso(k):
    # double factorial (k-1)!! for even k, 0 for odd
    if k % 2:
        return 0.0
    out = 1.0
    for j in range(k - 1, 0, -2):
        out *= j
    return out


def _iso_norm(rank):
    out = 1.0
    for j in range(rank + 1, 1, -2):
        out *= j
    return out
