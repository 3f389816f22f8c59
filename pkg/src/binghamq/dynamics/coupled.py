"""Coupled Q-tensor / velocity solver on a doubly periodic box.

The flow is planar (two velocity components depending on ``x, y``) while
``Q`` keeps all five degrees of freedom.  Time stepping is the IMEX
Runge-Kutta scheme ARS(4,4,3): the constant-coefficient linear parts
``-6 Q / De``, ``c_e Lap Q`` and ``(gamma/Re) Lap v`` are implicit (diagonal in
Fourier space), everything else is explicit.  ``c_e = 2 alpha G eps / (5 De)``
is the elastic stiffness of the closure operator at the isotropic state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..closure import MIN_MARGIN, check_admissible, solve_field
from ..errors import AdmissibilityLost, CFLViolation, NonAdmissible
from ..tensors import IDENTITY, ddot, sym, traceless
from .params import FlowParams
from .spectral import SpectralGrid

# ARS(4,4,3): implicit (A) and explicit (AE) tableaux with the leading
# explicit stage included; the scheme is stiffly accurate.
ARS443_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1 / 2, 0.0, 0.0, 0.0],
        [0.0, 1 / 6, 1 / 2, 0.0, 0.0],
        [0.0, -1 / 2, 1 / 2, 1 / 2, 0.0],
        [0.0, 3 / 2, -3 / 2, 1 / 2, 1 / 2],
    ]
)
ARS443_AE = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 2, 0.0, 0.0, 0.0, 0.0],
        [11 / 18, 1 / 18, 0.0, 0.0, 0.0],
        [5 / 6, -5 / 6, 1 / 2, 0.0, 0.0],
        [1 / 4, 7 / 4, 3 / 4, -7 / 4, 0.0],
    ]
)
CFL_LIMIT = 0.5
DIVERGENCE_TOL = 1e-12


@dataclass(eq=False)
class FieldState:
    """Grid state: ``q`` is ``(nx, ny, 3, 3)``, ``v`` is ``(nx, ny, 2)``."""

    grid: SpectralGrid
    q: np.ndarray
    v: np.ndarray
    t: float = 0.0
    steps: int = 0
    freeze_velocity: bool = False
    b: np.ndarray | None = field(default=None, repr=False)
    # closure solved at the current q (reused by the next step / report)
    closure: object = field(default=None, repr=False)

    def copy(self):
        return FieldState(
            grid=self.grid, q=self.q.copy(), v=self.v.copy(), t=self.t, steps=self.steps,
            freeze_velocity=self.freeze_velocity, b=None if self.b is None else self.b.copy(),
            closure=self.closure,
        )

    def min_margin(self):
        return float(check_admissible(self.q).margin.min())

    def max_divergence(self):
        return float(np.abs(self.grid.velocity_divergence(self.v)).max())


def band_limit(grid: SpectralGrid, f):
    """Apply the two-thirds dealiasing mask to a physical field."""
    return grid.ifft(grid.dealias_hat(grid.fft(f)))


def velocity_gradient(grid: SpectralGrid, v):
    """``kappa[..., i, j] = d v_i / d x_j`` as a 3x3 field (planar flow)."""
    g = grid.gradient(v)  # (..., 2 components, 2 directions)
    kappa = np.zeros(v.shape[:-1] + (3, 3))
    kappa[..., :2, :2] = g
    return kappa


def _advect(grid, u, grad_f):
    # (u . grad) f for gradients stored with the direction as last axis
    return grad_f[..., 0] * u[..., 0, None, None] + grad_f[..., 1] * u[..., 1, None, None]


def _n_flux(grad_a, closure, p: FlowParams, q):
    """Flux ``C_ij : d_j A`` of the translational operator, direction last."""
    m4 = closure.m4_dense()
    x = q if p.n_operator_trace_variant == "Q" else q + IDENTITY / 3.0
    flux = np.zeros(grad_a.shape[:-3] + (3, 3, 2))
    if p.gamma_perp:
        t = np.einsum("...abkl,...kli->...abi", m4, grad_a)
        t -= np.einsum("...kl,...kli->...i", x, grad_a)[..., None, None, :] * IDENTITY[..., None] / 3.0
        flux += p.gamma_perp * t
    if p.gamma_par != p.gamma_perp:
        m6 = closure.m6_dense()[..., :2, :2]
        t = np.einsum("...abklij,...klj->...abi", m6, grad_a)
        t -= (
            np.einsum("...klij,...klj->...i", m4[..., :2, :2], grad_a)[..., None, None, :]
            * IDENTITY[..., None] / 3.0
        )
        flux += (p.gamma_par - p.gamma_perp) * t
    return flux


def n_operator_apply(a, q, p: FlowParams, grid: SpectralGrid, closure=None):
    """Translational-diffusion operator applied to a tensor field ``a``."""
    if closure is None:
        closure = solve_field(q, with_sixth=p.gamma_par != p.gamma_perp)
    grad_a = grid.gradient(np.asarray(a, dtype=float))
    return grid.divergence(_n_flux(grad_a, closure, p, q))


def n_operator_density(a, q, p: FlowParams, grid: SpectralGrid, closure=None):
    """Pointwise ``d_i A : C_ij : d_j A`` (non-negative); ``-integral`` of it equals
    ``integral N(A):A`` on the periodic grid."""
    if closure is None:
        closure = solve_field(q, with_sixth=p.gamma_par != p.gamma_perp)
    grad_a = grid.gradient(np.asarray(a, dtype=float))
    return np.einsum("...abi,...abi->...", _n_flux(grad_a, closure, p, q), grad_a)


def elastic_stiffness(p: FlowParams):
    """``c_e``: coefficient of the implicit ``Lap Q`` term."""
    return 2.0 * p.elastic / (5.0 * p.de)


def _sixth_needed(p):
    return p.translational and p.gamma_par != p.gamma_perp


def _closure_at(q, p, b_guess):
    try:
        return solve_field(q, b_guess=b_guess, with_sixth=_sixth_needed(p))
    except NonAdmissible as exc:
        raise AdmissibilityLost(str(exc)) from exc


def explicit_terms(grid, q, v, p: FlowParams, b_guess=None, freeze_velocity=False, closure=None):
    """Explicit tendencies ``(N_Q, N_v, closure)`` in physical space."""
    cf = _closure_at(q, p, b_guess) if closure is None else closure
    c = 0.5 * p.g_const * p.eps
    qh = grid.fft(q)
    lapq = grid.ifft(grid.lap_hat(qh))
    grad_q = np.stack([grid.ifft(grid.dx_hat(qh)), grid.ifft(grid.dy_hat(qh))], axis=-1)
    kappa = velocity_gradient(grid, v)
    kt = np.swapaxes(kappa, -1, -2)

    nq = (4.0 * p.alpha_ms / p.de) * sym(cf.apply_m(q + c * lapq)) - elastic_stiffness(p) * lapq
    nq += 2.0 * sym(cf.apply_m(kt))
    nq -= _advect(grid, v, grad_q)
    mu = cf.b - p.alpha_ms * (q + c * lapq)
    if p.translational:
        nq += (p.eps / p.de) * n_operator_apply(mu, q, p, grid, cf)
    nq = traceless(sym(nq))

    if freeze_velocity:
        return nq, np.zeros_like(v), cf
    w = p.polymer_weight
    d = sym(kappa)
    sigma = (w / p.de) * 2.0 * cf.apply_m(mu) + 0.5 * w * cf.contract_m4(d)
    # divergence acts on the first stress index
    force = grid.divergence(np.swapaxes(sigma[..., :2, :2], -1, -2))
    lap_grad = grid.gradient(lapq)  # (..., 3, 3, 2)
    force += (w / p.de) * p.alpha_ms * c * np.einsum("...kl,...kli->...i", q, lap_grad)
    grad_v = kappa[..., :2, :2]
    force -= np.einsum("...i,...ji->...j", v, grad_v)
    return nq, force, cf


@dataclass
class StepInfo:
    dt: float
    cfl: float
    min_margin: float
    max_divergence: float
    newton_iterations: int


def cfl_number(state: FieldState, dt):
    g = state.grid
    v = state.v
    return float(dt * (np.abs(v[..., 0]).max() / g.dx + np.abs(v[..., 1]).max() / g.dy))


def step_coupled(state: FieldState, p: FlowParams, dt, info=None):
    """Advance ``state`` in place by one ARS(4,4,3) step and return it."""
    grid = state.grid
    cfl = cfl_number(state, dt)
    if cfl > CFL_LIMIT:
        raise CFLViolation(f"advective CFL {cfl:.3f} exceeds {CFL_LIMIT}")
    freeze = state.freeze_velocity
    lq = -6.0 / p.de - elastic_stiffness(p) * grid.k2
    lv = -(p.gamma_solvent / p.re) * grid.k2
    lq = lq[..., None, None]
    lv = lv[..., None]

    qh0 = grid.fft(state.q)
    vh0 = grid.fft(state.v)
    stage_q, stage_v = [qh0], [vh0]
    nq_hat, nv_hat = [], []
    b = state.b
    iters = 0
    q_phys, v_phys = state.q, state.v
    cached = state.closure
    for i in range(1, 5):
        nq, nv, cf = explicit_terms(grid, q_phys, v_phys, p, b, freeze, cached)
        cached = None
        b = cf.b
        iters += int(cf.iterations.sum())
        nq_hat.append(grid.dealias_hat(grid.fft(nq)))
        nv_hat.append(grid.leray_hat(grid.dealias_hat(grid.fft(nv))))
        rq = qh0.copy()
        rv = vh0.copy()
        for j in range(i):
            ae, ai = ARS443_AE[i, j], ARS443_A[i, j]
            if ae:
                rq += dt * ae * nq_hat[j]
                rv += dt * ae * nv_hat[j]
            if ai:
                rq += dt * ai * lq * stage_q[j]
                rv += dt * ai * lv * stage_v[j]
        aii = ARS443_A[i, i]
        yq = rq / (1.0 - dt * aii * lq)
        yv = vh0 if freeze else rv / (1.0 - dt * aii * lv)
        stage_q.append(yq)
        stage_v.append(yv)
        q_phys = traceless(sym(grid.ifft(yq)))
        v_phys = grid.ifft(yv)

    state.q = q_phys
    state.v = v_phys
    state.b = b
    state.closure = None
    state.t += dt
    state.steps += 1
    margin = state.min_margin()
    if margin < MIN_MARGIN:
        raise AdmissibilityLost(f"Q left the admissible set at t={state.t:.6g} (margin {margin:.3e})")
    div = state.max_divergence()
    if div > DIVERGENCE_TOL:
        raise RuntimeError(f"velocity divergence {div:.3e} after projection")
    if info is not None:
        info.append(StepInfo(dt=dt, cfl=cfl, min_margin=margin, max_divergence=div, newton_iterations=iters))
    return state


@dataclass(frozen=True)
class EnergyReport:
    t: float
    kinetic: float
    bulk: float
    elastic: float
    e2: float
    total: float
    viscous: float
    closure: float
    rotational: float
    translational: float
    min_integrand: float
    min_margin: float
    max_speed: float

    @property
    def dissipation(self):
        return self.viscous + self.closure + self.rotational + self.translational


def energy_report(state: FieldState, p: FlowParams):
    """Energy of the closed model and its dissipation channels at ``state``.

    The viscous channel is ``(gamma/Re)|grad v|^2``, the work of the
    ``(gamma/Re) Lap v`` term on a divergence-free field.
    """
    grid = state.grid
    q, v = state.q, state.v
    if state.closure is None:
        state.closure = _closure_at(q, p, state.b)
    cf = state.closure
    qh = grid.fft(q)
    lapq = grid.ifft(grid.lap_hat(qh))
    grad_q = np.stack([grid.ifft(grid.dx_hat(qh)), grid.ifft(grid.dy_hat(qh))], axis=-1)
    a = p.alpha_ms
    w = p.polymer_weight

    kinetic = 0.5 * grid.integrate(np.sum(v * v, axis=-1))
    bulk_density = -cf.log_z + np.sum(cf.q_eigenvalues * cf.beta, axis=-1) - 0.5 * a * ddot(q, q)
    elastic_density = 0.25 * p.elastic * np.sum(grad_q * grad_q, axis=(-3, -2, -1))
    bulk = grid.integrate(bulk_density)
    elastic = grid.integrate(elastic_density)
    e2 = bulk + elastic

    kappa = velocity_gradient(grid, v)
    d = sym(kappa)
    visc = (p.gamma_solvent / p.re) * np.sum(kappa * kappa, axis=(-2, -1))
    clos = 0.5 * w * ddot(cf.contract_m4(d), d)
    mu = cf.b - a * (q + 0.5 * p.g_const * p.eps * lapq)
    rot = 4.0 * w / p.de**2 * ddot(mu, cf.apply_m(mu))
    if p.translational:
        trans = p.eps * w / p.de**2 * n_operator_density(mu, q, p, grid, cf)
    else:
        trans = np.zeros_like(rot)
    mins = min(float(x.min()) for x in (visc, clos, rot, trans))
    return EnergyReport(
        t=state.t,
        kinetic=float(kinetic),
        bulk=float(bulk),
        elastic=float(elastic),
        e2=float(e2),
        total=float(kinetic + w / p.de * e2),
        viscous=float(grid.integrate(visc)),
        closure=float(grid.integrate(clos)),
        rotational=float(grid.integrate(rot)),
        translational=float(grid.integrate(trans)),
        min_integrand=mins,
        min_margin=float(check_admissible(q).margin.min()),
        max_speed=float(np.sqrt(np.sum(v * v, axis=-1)).max()),
    )


def suggest_dt(state: FieldState, p: FlowParams, safety=0.4):
    """Conservative step from the explicit rates (relaxation, elastic, flow)."""
    g = state.grid
    kmax2 = float(g.k2[g.dealias > 0].max()) if np.any(g.dealias > 0) else 0.0
    rate = (4.0 * p.alpha_ms * 0.5 + 2.0) / p.de
    rate += 2.0 * p.elastic * kmax2 / p.de * 0.5
    rate += p.polymer_weight * kmax2
    if p.translational:
        rate += p.eps / p.de * max(p.gamma_par, p.gamma_perp) * kmax2
    speed = float(np.abs(state.v).max()) + 1e-300
    dt = safety * 2.5 / rate
    return min(dt, 0.5 * CFL_LIMIT * min(g.dx, g.dy) / speed)


def perturbed_equilibrium(grid: SpectralGrid, s2, rng, angle_amp=0.3, speed_amp=0.1, modes=3):
    """Uniaxial state with a smooth random in-plane director perturbation.

    The director is ``(cos th, sin th, 0)`` where ``th`` is a random
    trigonometric polynomial of degree ``modes``; the velocity is a random
    divergence-free field built from a stream function of the same degree.
    Both are band-limited to the dealiasing mask.
    """
    x, y = grid.coordinates()

    def random_field(amp):
        f = np.zeros(grid.shape)
        for kx in range(-modes, modes + 1):
            for ky in range(0, modes + 1):
                if kx == 0 and ky == 0:
                    continue
                a, b = rng.standard_normal(2)
                ph = 2 * np.pi * (kx * x / grid.lx + ky * y / grid.ly)
                f += a * np.cos(ph) + b * np.sin(ph)
        return amp * f / np.abs(f).max()

    th = random_field(angle_amp)
    n = np.stack([np.cos(th), np.sin(th), np.zeros_like(th)], axis=-1)
    q = s2 * (np.einsum("...i,...j->...ij", n, n) - IDENTITY / 3.0)
    q = traceless(sym(band_limit(grid, q)))
    psi = random_field(1.0)
    g = grid.gradient(psi)
    v = np.stack([g[..., 1], -g[..., 0]], axis=-1)
    if speed_amp:
        v *= speed_amp / np.abs(v).max()
    else:
        v[:] = 0.0
    v = grid.ifft(grid.leray_hat(grid.dealias_hat(grid.fft(v))))
    return FieldState(grid=grid, q=q, v=v)


def taylor_green(grid: SpectralGrid, q_uniform, amplitude=1.0):
    """Taylor-Green vortex ``(sin x cos y, -cos x sin y)`` with uniform ``Q``."""
    x, y = grid.coordinates()
    kx, ky = 2 * np.pi / grid.lx, 2 * np.pi / grid.ly
    v = amplitude * np.stack(
        [np.sin(kx * x) * np.cos(ky * y), -(kx / ky) * np.cos(kx * x) * np.sin(ky * y)], axis=-1
    )
    q = np.broadcast_to(np.asarray(q_uniform, dtype=float), grid.shape + (3, 3)).copy()
    return FieldState(grid=grid, q=q, v=v)
