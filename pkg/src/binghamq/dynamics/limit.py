"""Small-Deborah limit: Q-tensor runs compared with the director reference.

Two scenarios are supported.

``homogeneous-shear``
    Spatially uniform ``Q`` under the simple shear ``v = (y, 0, 0)``, started
    on the uniaxial equilibrium with director ``e_x``.  The reference is the
    homogeneous Ericksen-Leslie director ODE with the Leslie coefficients of
    the same ``alpha``.

``periodic-1D-splay``
    ``Q`` varies along ``x`` only and the velocity is frozen at zero.  The
    in-plane director angle starts as ``theta0 + a sin(k x)``.  With ``eps``
    tied to ``De`` the one-constant director equation reduces to the heat
    equation ``theta_t = (K / gamma1) theta_xx`` with ``K = alpha G S2^2``,
    so the reference is exact: ``theta0 + a exp(-K k^2 t / gamma1) sin(k x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..equilibria import nematic_order
from ..leslie import ericksen_coefficient, leslie_coefficients
from ..closure import check_admissible
from ..tensors import IDENTITY, eig, uniaxial
from .coupled import FieldState, step_coupled, suggest_dt
from .director import integrate_director, shear_gradient
from .homogeneous import integrate_homogeneous
from .params import FlowParams
from .spectral import SpectralGrid

SCENARIOS = ("homogeneous-shear", "periodic-1D-splay")


@dataclass(frozen=True)
class LimitRow:
    de: float
    error: float  # max angular error (radians)
    biaxiality: float  # max over cells
    manifold_distance: float  # max |Q - S2 (nn - I/3)|_F
    s2: float  # mean S2 read off the top eigenvalue
    s2_error: float
    min_margin: float  # smallest admissibility margin seen during the run
    order: float = float("nan")  # log2(err(previous) / err(this)) per halving


@dataclass(frozen=True)
class LimitTable:
    scenario: str
    alpha: float
    t_end: float
    s2_eq: float
    rows: tuple = field(default_factory=tuple)

    @property
    def orders(self):
        return [r.order for r in self.rows[1:]]

    @property
    def manifold_constant(self):
        """Fitted ``C`` in ``distance <= C De``."""
        return max(r.manifold_distance / r.de for r in self.rows)

    def as_records(self):
        return [r.__dict__ for r in self.rows]


def biaxiality(q):
    """``1 - 6 (tr Q^3)^2 / (tr Q^2)^3``: zero for uniaxial, one for maximal biaxiality."""
    q = np.asarray(q, dtype=float)
    t2 = np.einsum("...ij,...ji->...", q, q)
    t3 = np.einsum("...ij,...jk,...ki->...", q, q, q)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 1.0 - 6.0 * t3**2 / t2**3
    return np.where(t2 > 0, out, 0.0)


def extract_director(q, reference=None):
    """Principal eigenvector of ``Q``; sign chosen to agree with ``reference``.

    The top eigenvector is tracked by continuity: when ``reference`` is given
    the returned vector has a non-negative dot product with it.
    """
    _, frame = eig(q)
    n = frame[..., :, 0]
    if reference is not None:
        s = np.sign(np.sum(n * reference, axis=-1))
        n = n * np.where(s == 0, 1.0, s)[..., None]
    return n


def _angle_error(n, n_ref):
    c = np.abs(np.sum(n * n_ref, axis=-1)) / (
        np.linalg.norm(n, axis=-1) * np.linalg.norm(n_ref, axis=-1)
    )
    return np.arccos(np.clip(c, -1.0, 1.0))


def _row(de, q, n, n_ref, s2_eq, min_margin):
    lam = np.linalg.eigvalsh(q)[..., -1]
    s2 = 1.5 * lam
    nn = np.einsum("...i,...j->...ij", n, n)
    dist = np.linalg.norm(q - s2_eq * (nn - IDENTITY / 3.0), axis=(-2, -1))
    return LimitRow(
        de=float(de),
        error=float(np.max(_angle_error(n, n_ref))),
        biaxiality=float(np.max(biaxiality(q))),
        manifold_distance=float(np.max(dist)),
        s2=float(np.mean(s2)),
        s2_error=float(np.max(np.abs(s2 - s2_eq))),
        min_margin=float(min_margin),
    )


def _homogeneous_shear(de, p, t_end, rate):
    c = leslie_coefficients(p.alpha_ms)
    kappa = shear_gradient(rate)
    n0 = np.array([1.0, 0.0, 0.0])
    n_ref = integrate_director(n0, kappa, c, [t_end])[-1]
    _, hist = integrate_homogeneous(uniaxial(c.s2, n0), kappa, p.with_(de=de), t_end)
    q = hist[-1]
    margin = check_admissible(hist).margin.min()
    return _row(de, q, extract_director(q, n_ref), n_ref, c.s2, margin)


def splay_reference(x, t, p: FlowParams, theta0=0.0, amp=0.2, k=1.0):
    """Exact in-plane angle of the one-constant director heat equation."""
    c = leslie_coefficients(p.alpha_ms)
    rate = ericksen_coefficient(p.alpha_ms, p.g_const) * k * k / c.gamma1
    return theta0 + amp * np.exp(-rate * t) * np.sin(k * x)


def splay_state(grid: SpectralGrid, s2, theta):
    n = np.stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)], axis=-1)
    q = s2 * (np.einsum("...i,...j->...ij", n, n) - IDENTITY / 3.0)
    return FieldState(grid=grid, q=q, v=np.zeros(grid.shape + (2,)), freeze_velocity=True)


def _periodic_splay(de, p, t_end, nx, amp, k):
    p = p.with_(de=de, eps=de, de_equals_eps=True, gamma_par=0.0, gamma_perp=0.0)
    _, s2, _ = nematic_order(p.alpha_ms)
    grid = SpectralGrid(nx, 1)
    x, _ = grid.coordinates()
    state = splay_state(grid, s2, splay_reference(x, 0.0, p, amp=amp, k=k))
    dt0 = suggest_dt(state, p)
    nsteps = max(1, int(np.ceil(t_end / dt0 - 1e-12)))
    dt = t_end / nsteps
    margin = state.min_margin()
    for _ in range(nsteps):
        step_coupled(state, p, dt)
        margin = min(margin, state.min_margin())
    th = splay_reference(x, t_end, p, amp=amp, k=k)
    n_ref = np.stack([np.cos(th), np.sin(th), np.zeros_like(th)], axis=-1)
    return _row(de, state.q, extract_director(state.q, n_ref), n_ref, s2, margin)


def limit_study(de_list, scenario, p: FlowParams, t_end=2.0, rate=1.0, nx=32, amp=0.2, k=1.0):
    """Director error of the Q-tensor model against its small-De reference.

    ``de_list`` must be strictly decreasing.  The returned table carries the
    empirical order ``log2(err_prev / err) / log2(de_prev / de)`` per row.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}")
    de_list = [float(d) for d in de_list]
    if not de_list or any(d <= 0 for d in de_list):
        raise ValueError("de values must be positive")
    if any(b >= a for a, b in zip(de_list, de_list[1:])):
        raise ValueError("de values must be strictly decreasing")
    _, s2_eq, _ = nematic_order(p.alpha_ms)
    rows = []
    for de in de_list:
        if scenario == "homogeneous-shear":
            row = _homogeneous_shear(de, p, t_end, rate)
        else:
            row = _periodic_splay(de, p, t_end, nx, amp, k)
        if rows:
            prev = rows[-1]
            order = np.log(prev.error / row.error) / np.log(prev.de / row.de)
            row = LimitRow(**{**row.__dict__, "order": float(order)})
        rows.append(row)
    return LimitTable(scenario=scenario, alpha=p.alpha_ms, t_end=float(t_end), s2_eq=s2_eq, rows=tuple(rows))
