"""Linear operators on traceless symmetric tensors at a uniaxial equilibrium.

All four maps act on the five-dimensional space of symmetric traceless 3x3
matrices with the Frobenius inner product.  Matrix representations use
:data:`binghamq.tensors.TRACELESS_BASIS`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibria import EquilibriumData, equilibrium_data
from .tensors import (
    IDENTITY,
    TRACELESS_BASIS,
    contract42,
    contract62,
    ddot,
    orthonormal_completion,
)

TAGS = ("Qn", "Jn", "Kn", "Ln")
SYMMETRY_TOL = 1e-10
KERNEL_REL_TOL = 1e-8


def qn_apply(b, eq: EquilibriumData):
    """``M4:B - I (Q0:B)/3 - Q0 (Q0:B)``."""
    b = np.asarray(b, dtype=float)
    qb = ddot(eq.q0, b)[..., None, None]
    return contract42(eq.m4, b) - IDENTITY * qb / 3.0 - eq.q0 * qb


def jn_apply(b, eq: EquilibriumData):
    """``B/3 + (B.Q0 + Q0.B)/2 - B:M4``."""
    b = np.asarray(b, dtype=float)
    return b / 3.0 + 0.5 * (b @ eq.q0 + eq.q0 @ b) - contract42(eq.m4, b)


def kn_apply(b, eq: EquilibriumData):
    """``B - alpha Qn(B)``."""
    return np.asarray(b, dtype=float) - eq.alpha * qn_apply(b, eq)


def ln_apply(b, eq: EquilibriumData):
    """``-2 Jn(Kn(B))``."""
    return -2.0 * jn_apply(kn_apply(b, eq), eq)


_APPLY = {"Qn": qn_apply, "Jn": jn_apply, "Kn": kn_apply, "Ln": ln_apply}


def _matrix_of(fn, eq):
    images = fn(TRACELESS_BASIS, eq)
    # column j holds the coordinates of fn(E_j)
    return np.einsum("jab,iab->ij", images, TRACELESS_BASIS)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    matrix: np.ndarray
    tag: str
    n: np.ndarray
    alpha: float
    eta: float
    s2: float
    s4: float

    @property
    def asymmetry(self):
        return float(np.abs(self.matrix - self.matrix.T).max())

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    def kernel(self, rel_tol=KERNEL_REL_TOL):
        """Orthonormal kernel basis (as coordinate vectors) by eigen-solve."""
        w, v = np.linalg.eigh(0.5 * (self.matrix + self.matrix.T))
        scale = max(np.abs(w).max(), 1.0)
        return v[:, np.abs(w) <= rel_tol * scale]

    def validate(self):
        """Raise ``ValueError`` if the structural properties fail."""
        if self.asymmetry > SYMMETRY_TOL:
            raise ValueError(f"{self.tag} matrix not symmetric (asymmetry {self.asymmetry:.2e})")
        w = self.eigenvalues
        if self.tag == "Jn" and w.min() <= 0.0:
            raise ValueError("Jn is not positive definite")
        if self.tag == "Kn" and w.min() < -SYMMETRY_TOL:
            raise ValueError("Kn has a negative eigenvalue")
        if self.tag in ("Kn", "Ln") and self.kernel().shape[1] != 2:
            raise ValueError(f"{self.tag} kernel is not two-dimensional")


def operator_matrix(tag, eq: EquilibriumData | None = None, n=None, alpha=None, validate=True):
    """5x5 matrix of one of the operators ``Qn``, ``Jn``, ``Kn``, ``Ln``.

    Pass either an :class:`EquilibriumData` or ``alpha`` (and optionally ``n``).
    """
    if tag not in _APPLY:
        raise ValueError(f"tag must be one of {TAGS}")
    if eq is None:
        if alpha is None:
            raise ValueError("need equilibrium data or alpha")
        eq = equilibrium_data(alpha, (0.0, 0.0, 1.0) if n is None else n)
    om = OperatorMatrix(
        matrix=_matrix_of(_APPLY[tag], eq), tag=tag, n=eq.n,
        alpha=eq.alpha, eta=eq.eta, s2=eq.s2, s4=eq.s4,
    )
    if validate:
        om.validate()
    return om


def kernel_basis(n):
    """``(n n1 + n1 n)/sqrt2, (n n2 + n2 n)/sqrt2`` for a completion ``n1, n2`` of ``n``."""
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("director must be a unit vector (|n| = 1 within 1e-12)")
    out = []
    for m in orthonormal_completion(n):
        out.append((np.outer(n, m) + np.outer(m, n)) / np.sqrt(2.0))
    return np.stack(out)


def kn_quadratic_form(b, eq: EquilibriumData):
    """``<Kn(B), B>`` from the closed expression in the director frame.

    Rotating ``B`` so that ``n`` becomes the third axis, the form reduces to
    ``c (B12^2 - B11 B22) + alpha (S2^2 - S4) (B11 + B22)^2`` with
    ``c = (6A2 - 5A4 - A0) / (2 (A2 - A4))``.
    """
    n1, n2 = orthonormal_completion(eq.n)
    p = np.stack([n1, n2, eq.n])
    bh = p @ np.asarray(b, dtype=float) @ p.T
    c = (6 * eq.a2 - 5 * eq.a4 - eq.a0) / (2 * (eq.a2 - eq.a4))
    return (
        c * (bh[..., 0, 1] ** 2 - bh[..., 0, 0] * bh[..., 1, 1])
        + eq.alpha * (eq.s2**2 - eq.s4) * (bh[..., 0, 0] + bh[..., 1, 1]) ** 2
    )


def positivity_certificate(eq: EquilibriumData):
    """Both sides of the identity behind non-negativity of ``Kn``.

    Returns ``(lhs, rhs)`` with ``lhs = 4 alpha (S2^2 - S4) - c`` and
    ``rhs = 3 (3A2^2 + 2A0A2 - 5A0A4) / ((A2 - A4) A0)``.
    """
    a0, a2, a4 = eq.a0, eq.a2, eq.a4
    c = (6 * a2 - 5 * a4 - a0) / (2 * (a2 - a4))
    lhs = 4 * eq.alpha * (eq.s2**2 - eq.s4) - c
    rhs = 3.0 / (a2 - a4) * (3 * a2 * a2 + 2 * a0 * a2 - 5 * a0 * a4) / a0
    return lhs, rhs


def q6_identity_sides(b, eq: EquilibriumData, m6=None):
    """Left and right sides of the sixth-moment identity for direction ``b``.

    ``lhs = B0 : [M6:B - M4 (Q0:B)]`` and
    ``rhs = B0.Qn(B) + B.Q0 + B/3 - B:M4 - 3/2 Qn(B)``.
    """
    b = np.asarray(b, dtype=float)
    m6 = eq.m6() if m6 is None else m6
    t4 = contract62(m6, b).dense - eq.m4.dense * ddot(eq.q0, b)
    lhs = np.einsum("kl,klij->ij", eq.b0, t4)
    qb = qn_apply(b, eq)
    rhs = eq.b0 @ qb + b @ eq.q0 + b / 3.0 - contract42(eq.m4, b) - 1.5 * qb
    return lhs, rhs


def check_q6_identity(b, eq: EquilibriumData, m6=None):
    """Infinity-norm residual of the sixth-moment identity."""
    lhs, rhs = q6_identity_sides(b, eq, m6)
    return float(np.abs(lhs - rhs).max())


def commutator_residual(b, eq: EquilibriumData):
    """``|Kn(B).Q0 - Q0.Kn(B)|_inf``; zero for every ``B`` at an equilibrium."""
    k = kn_apply(b, eq)
    return float(np.abs(k @ eq.q0 - eq.q0 @ k).max())
