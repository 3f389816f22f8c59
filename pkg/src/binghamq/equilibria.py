"""Critical points of the Maier-Saupe bulk energy under the Bingham closure.

Uniaxial critical points have ``B = eta (nn - I/3)`` with ``eta`` a root of

    3 e^eta / A0(eta) = 3 + 2 eta + 4 eta^2 / alpha,

where ``A_k(eta) = int_0^1 x^k exp(eta x^2) dx``.  The factor 4 in the last
term is what makes ``B = alpha Q`` hold at the root with ``Q = S2 (nn - I/3)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .errors import NoConvergence, SubCritical
from .quadrature import build_rule, diagonal_moments
from .tensors import (
    IDENTITY,
    Sym4Moment,
    Sym6Moment,
    orthonormal_completion,
    reduce_symmetric,
)

SCAN_STEP = 1e-2
SCAN_MAX = 80.0
ROOT_XTOL = 1e-13
# below this |eta| the reduced residual is evaluated from its Taylor series
_SERIES_RADIUS = 0.05
_SERIES_TERMS = 16


# A_k integrals -----------------------------------------------------------

def _ak_scaled(k, eta):
    """``exp(-max(eta, 0)) * A_k(eta)`` by adaptive Gauss-Kronrod."""
    shift = max(eta, 0.0)
    val, _ = integrate.quad(
        lambda x: x**k * np.exp(eta * (x * x) - shift),
        0.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return val, shift


def ak(k, eta):
    """``A_k(eta) = int_0^1 x^k exp(eta x^2) dx`` for k in {0, 2, 4, 6}."""
    if k not in (0, 2, 4, 6):
        raise ValueError("k must be one of 0, 2, 4, 6")
    eta = float(eta)
    if abs(eta) > 500.0:
        raise ValueError("|eta| must not exceed 500")
    val, shift = _ak_scaled(k, eta)
    return val * np.exp(shift)


def ak_ratios(eta):
    """``(A2/A0, A4/A0, A6/A0)`` without overflow for large ``eta``."""
    eta = float(eta)
    a0, _ = _ak_scaled(0, eta)
    return tuple(_ak_scaled(k, eta)[0] / a0 for k in (2, 4, 6))


# bifurcation residual ---------------------------------------------------

def _g(eta):
    """``e^eta / A0(eta)`` via closed forms (Dawson / error function)."""
    eta = np.asarray(eta, dtype=float)
    out = np.ones_like(eta)
    pos = eta > 0
    neg = eta < 0
    sp = np.sqrt(eta[pos])
    out[pos] = sp / special.dawsn(sp)
    sn = np.sqrt(-eta[neg])
    out[neg] = np.exp(eta[neg]) * 2.0 * sn / (np.sqrt(np.pi) * special.erf(sn))
    return out


@lru_cache(maxsize=1)
def _g_series():
    n = np.arange(_SERIES_TERMS + 3)
    fact = special.factorial(n)
    exp_c = 1.0 / fact
    a0_c = 1.0 / (fact * (2 * n + 1))
    # power-series division exp / A0
    g = np.zeros(n.size)
    for j in range(n.size):
        g[j] = exp_c[j] - np.dot(g[:j], a0_c[j:0:-1])
    return g


def eta_residual(eta, alpha):
    """``3 e^eta / A0 - (3 + 2 eta + 4 eta^2 / alpha)`` (vectorised in eta)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    eta_arr = np.asarray(eta, dtype=float)
    out = 3.0 * _g(eta_arr) - 3.0 - 2.0 * eta_arr - 4.0 * eta_arr**2 / alpha
    return out if out.ndim else float(out)


def reduced_residual(eta, alpha):
    """``eta_residual / eta^2``, finite at ``eta = 0``.

    Non-isotropic roots are the roots of this function; near zero it is
    evaluated from the Taylor series of ``e^eta / A0`` to avoid cancellation.
    """
    eta = np.asarray(eta, dtype=float)
    out = np.empty_like(eta)
    small = np.abs(eta) < _SERIES_RADIUS
    big = ~small
    e = eta[big]
    out[big] = eta_residual(e, alpha) / e**2
    c = 3.0 * _g_series()[2:]
    c[0] -= 4.0 / alpha
    out[small] = np.polynomial.polynomial.polyval(eta[small], c)
    return out if out.ndim else float(out)


def _g_derivs(eta):
    """``g, g', g''`` of ``g = e^eta/A0`` from the A_k ratios."""
    r2, r4, _ = ak_ratios(eta)
    g = float(_g(np.array(eta)))
    d1 = g * (1.0 - r2)
    d2 = d1 * (1.0 - r2) - g * (r4 - r2 * r2)
    return g, d1, d2


# order parameters -------------------------------------------------------

def order_parameters(eta):
    """``(S2, S4)`` of the uniaxial Bingham density with parameter ``eta``."""
    if eta == 0.0:
        return 0.0, 0.0
    r2, r4, _ = ak_ratios(eta)
    s2 = (3.0 * r2 - 1.0) / 2.0
    s4 = (35.0 * r4 - 30.0 * r2 + 3.0) / 8.0
    return s2, s4


def scan_range(alpha):
    """Eta interval scanned for roots at the given alpha."""
    return -(0.5 * alpha + 10.0), max(SCAN_MAX, alpha + 10.0)


@dataclass(frozen=True)
class EquilibriumBranch:
    """Roots of the bifurcation equation at fixed alpha.

    ``roots`` is sorted descending, so for three roots it reads
    ``(eta1, eta2, 0)`` or ``(eta1, 0, eta2)`` depending on the sign of eta2.
    """

    alpha: float
    roots: tuple
    a_k: tuple = field(repr=False)
    s2: tuple
    s4: tuple

    @property
    def eta1(self):
        return max(self.roots)

    @property
    def nematic(self):
        return len(self.roots) > 1

    @property
    def eta2(self):
        others = sorted((r for r in self.roots if r != 0.0 and r != self.eta1), reverse=True)
        return others[0] if others else None

    def residuals(self):
        return [eta_residual(r, self.alpha) for r in self.roots]


def _refine(f, a, b):
    return optimize.brentq(f, a, b, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)


def _nonzero_roots(alpha, step=SCAN_STEP):
    lo, hi = scan_range(alpha)
    grid = np.arange(lo, hi + step, step)
    vals = reduced_residual(grid, alpha)
    f = lambda x: reduced_residual(x, alpha)  # noqa: E731
    roots = []
    sign = np.sign(vals)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        roots.append(_refine(f, grid[i], grid[i + 1]))
    for i in np.nonzero(sign == 0)[0]:
        roots.append(float(grid[i]))
    # closely spaced root pairs hide between grid points: look at interior
    # extrema of |f| that do not change sign and polish them
    mag = np.abs(vals)
    interior = np.nonzero((mag[1:-1] < mag[:-2]) & (mag[1:-1] < mag[2:]) & (sign[:-2] == sign[2:]))[0] + 1
    for i in interior:
        s = sign[i]
        res = optimize.minimize_scalar(
            lambda x: s * f(x), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
            options={"xatol": 1e-13},
        )
        xm = float(res.x)
        if s * f(xm) < 0:
            roots.append(_refine(f, grid[i - 1], xm))
            roots.append(_refine(f, xm, grid[i + 1]))
    return sorted(roots, reverse=True)


def solve_branches(alpha):
    """All roots of the bifurcation equation at ``alpha`` (always including 0).

    At ``alpha == critical_alpha()`` the double root is reported once.
    """
    alpha = float(alpha)
    if not 0.0 < alpha <= 100.0:
        raise ValueError("alpha must lie in (0, 100]")
    a_star, e_star = critical_alpha()
    if abs(alpha - a_star) <= 1e-12 * a_star:
        found = [e_star]
    else:
        found = _nonzero_roots(alpha)
    roots = sorted(set(found) | {0.0}, reverse=True)
    a_k, s2, s4 = [], [], []
    for r in roots:
        a_k.append(tuple(ak(k, r) for k in (0, 2, 4)))
        o2, o4 = order_parameters(r)
        s2.append(o2)
        s4.append(o4)
    return EquilibriumBranch(alpha=alpha, roots=tuple(roots), a_k=tuple(a_k), s2=tuple(s2), s4=tuple(s4))


def alpha_of_eta(eta):
    """Alpha at which ``eta`` solves the bifurcation equation."""
    eta = np.asarray(eta, dtype=float)
    return 4.0 * eta**2 / (3.0 * _g(eta) - 3.0 - 2.0 * eta)


@lru_cache(maxsize=1)
def critical_alpha():
    """``(alpha*, eta*)``: the fold of the nematic branch.

    Newton on ``(r, dr/deta) = 0`` in ``(eta, alpha)``, seeded from the
    minimum of :func:`alpha_of_eta` on a grid.
    """
    grid = np.arange(0.05, 40.0, SCAN_STEP)
    al = alpha_of_eta(grid)
    i = int(np.argmin(np.where(al > 0, al, np.inf)))
    eta, alpha = float(grid[i]), float(al[i])
    for _ in range(50):
        g, g1, g2 = _g_derivs(eta)
        r = 3 * g - 3 - 2 * eta - 4 * eta**2 / alpha
        r_e = 3 * g1 - 2 - 8 * eta / alpha
        if max(abs(r), abs(r_e)) <= 1e-13:
            break
        jac = np.array(
            [[r_e, 4 * eta**2 / alpha**2], [3 * g2 - 8 / alpha, 8 * eta / alpha**2]]
        )
        d_eta, d_alpha = np.linalg.solve(jac, [-r, -r_e])
        eta += d_eta
        alpha += d_alpha
    g, g1, _ = _g_derivs(eta)
    r = 3 * g - 3 - 2 * eta - 4 * eta**2 / alpha
    r_e = 3 * g1 - 2 - 8 * eta / alpha
    if max(abs(r), abs(r_e)) > 1e-10:
        raise NoConvergence(
            "critical alpha Newton failed", best_residual=max(abs(r), abs(r_e))
        )
    return alpha, eta


def critical_residuals():
    """Residuals of both defining equations at the computed critical point."""
    alpha, eta = critical_alpha()
    g, g1, _ = _g_derivs(eta)
    return 3 * g - 3 - 2 * eta - 4 * eta**2 / alpha, 3 * g1 - 2 - 8 * eta / alpha


def fact_one(eta):
    """The two inequality expressions ``(3A2^2 + 2A0A2 - 5A0A4, 6A2 - 5A4 - A0)``
    divided by ``A0^2`` and ``A0`` respectively (signs unchanged)."""
    r2, r4, _ = ak_ratios(eta)
    return 3 * r2 * r2 + 2 * r2 - 5 * r4, 6 * r2 - 5 * r4 - 1.0


# equilibrium data -------------------------------------------------------

def uniaxial_m4(s2, s4, n):
    """Closed-form fourth moment of the uniaxial equilibrium density."""
    n = np.asarray(n, dtype=float)
    d = IDENTITY
    nn = np.outer(n, n)
    nnnn = np.einsum("i,j,k,l->ijkl", n, n, n, n)
    six = (
        np.einsum("ij,kl->ijkl", nn, d)
        + np.einsum("ik,jl->ijkl", nn, d)
        + np.einsum("il,jk->ijkl", nn, d)
        + np.einsum("jk,il->ijkl", nn, d)
        + np.einsum("jl,ik->ijkl", nn, d)
        + np.einsum("kl,ij->ijkl", nn, d)
    )
    three = np.einsum("ij,kl->ijkl", d, d) + np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d)
    c3 = s4 / 35.0 - 2.0 * s2 / 21.0 + 1.0 / 15.0
    return s4 * nnnn + (s2 - s4) / 7.0 * six + c3 * three


@dataclass(frozen=True, eq=False)
class EquilibriumData:
    alpha: float
    eta: float
    s2: float
    s4: float
    a0: float
    a2: float
    a4: float
    n: np.ndarray
    q0: np.ndarray
    b0: np.ndarray
    m4: Sym4Moment

    @property
    def m4_dense(self):
        return self.m4.dense

    def m6(self, rule=None):
        """Sixth moment at ``b0`` by quadrature with the pole along ``n``."""
        rule = rule or build_rule()
        n1, n2 = orthonormal_completion(self.n)
        frame = np.stack([n1, n2, self.n], axis=1)
        beta = self.eta * (np.array([0.0, 0.0, 1.0]) - 1.0 / 3.0)
        dm = diagonal_moments(beta, rule, with_sixth=True)
        d6 = dm.m6_dense()
        for _ in range(6):
            d6 = np.einsum("ia,abcdef->bcdefi", frame, d6)
        return Sym6Moment(reduce_symmetric(d6, 6))


def equilibrium_data(alpha, n=(0.0, 0.0, 1.0)):
    """Uniaxial equilibrium on the eta1 branch with director ``n``."""
    alpha = float(alpha)
    a_star, _ = critical_alpha()
    if alpha <= a_star:
        raise SubCritical(f"alpha={alpha:g} is not above the critical value {a_star:.12g}")
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("director must be a unit vector (|n| = 1 within 1e-12)")
    branch = solve_branches(alpha)
    eta = branch.eta1
    s2, s4 = order_parameters(eta)
    p = np.outer(n, n) - IDENTITY / 3.0
    m4 = Sym4Moment(reduce_symmetric(uniaxial_m4(s2, s4, n), 4))
    a0, a2, a4 = (ak(k, eta) for k in (0, 2, 4))
    return EquilibriumData(
        alpha=alpha, eta=eta, s2=s2, s4=s4, a0=a0, a2=a2, a4=a4,
        n=n, q0=s2 * p, b0=eta * p, m4=m4,
    )


def nematic_order(alpha):
    """``(eta1, S2, S4)`` on the nematic branch (SubCritical below alpha*)."""
    a_star, _ = critical_alpha()
    if alpha <= a_star:
        raise SubCritical(f"alpha={alpha:g} is not above the critical value {a_star:.12g}")
    eta = solve_branches(alpha).eta1
    s2, s4 = order_parameters(eta)
    return eta, s2, s4
