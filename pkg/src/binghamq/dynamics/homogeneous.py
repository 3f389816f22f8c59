"""Spatially homogeneous Q dynamics under a prescribed velocity gradient."""
from __future__ import annotations

import numpy as np

from ..closure import MIN_MARGIN, check_admissible, solve_field
from ..errors import AdmissibilityLost, NonAdmissible
from ..tensors import as_matrix, sym, traceless
from .params import FlowParams


def flow_term(closure, kappa):
    """``M(kappa^T) + M(kappa^T)^T`` for closure state ``closure``."""
    kt = np.swapaxes(np.asarray(kappa, dtype=float), -1, -2)
    return 2.0 * sym(closure.apply_m(kt))


def relaxation_term(q, closure, p: FlowParams):
    """``(-6 Q + 4 alpha M(Q)) / De``."""
    return (-6.0 * q + 4.0 * p.alpha_ms * closure.apply_m(q)) / p.de


def rhs_homogeneous(q, kappa, p: FlowParams, rule=None, b_guess=None, return_closure=False):
    """Time derivative of a homogeneous ``Q`` in the velocity gradient ``kappa``.

    ``kappa[i, j] = d v_i / d x_j``.
    """
    q = as_matrix(q)
    cf = solve_field(q, rule, b_guess=b_guess)
    out = traceless(sym(relaxation_term(q, cf, p)) + flow_term(cf, kappa))
    return (out, cf) if return_closure else out


def rhs_lemma_form(q, kappa, p: FlowParams, rule=None):
    """The same derivative written as ``-(4/De) M(B_Q - alpha Q) + flow``."""
    q = as_matrix(q)
    cf = solve_field(q, rule)
    return sym(-4.0 / p.de * cf.apply_m(cf.b - p.alpha_ms * q)) + flow_term(cf, kappa)


def _require_admissible(q):
    margin = check_admissible(q).margin
    if np.any(margin < MIN_MARGIN):
        raise AdmissibilityLost(f"Q left the admissible set (margin {float(np.min(margin)):.3e})")


def step_homogeneous(q, kappa, p: FlowParams, dt, rule=None, b_guess=None, return_b=False):
    """One classical fourth-order Runge-Kutta step."""
    q = as_matrix(q)
    stages = []
    b = b_guess
    try:
        k1, cf = rhs_homogeneous(q, kappa, p, rule, b, return_closure=True)
        b = cf.b
        k2 = rhs_homogeneous(q + 0.5 * dt * k1, kappa, p, rule, b)
        k3 = rhs_homogeneous(q + 0.5 * dt * k2, kappa, p, rule, b)
        k4 = rhs_homogeneous(q + dt * k3, kappa, p, rule, b)
    except NonAdmissible as exc:
        raise AdmissibilityLost(str(exc)) from exc
    stages = (k1, k2, k3, k4)
    q_new = traceless(sym(q + dt / 6.0 * (stages[0] + 2 * stages[1] + 2 * stages[2] + stages[3])))
    _require_admissible(q_new)
    return (q_new, b) if return_b else q_new


def stable_dt(p: FlowParams, kappa=None, safety=0.5):
    """Step size probe: RK4 stability on the stiffest relaxation rate.

    The linearised relaxation rate is bounded by ``(6 + 4 alpha) / De``; the
    real-axis RK4 stability limit is about 2.78.
    """
    rate = (6.0 + 4.0 * p.alpha_ms) / p.de
    if kappa is not None:
        rate += 2.0 * float(np.abs(np.asarray(kappa)).sum(axis=-1).max())
    return safety * 2.78 / rate


def integrate_homogeneous(q0, kappa, p: FlowParams, t_end, dt=None, rule=None, callback=None):
    """Integrate to ``t_end`` with RK4; returns ``(times, q_history)``."""
    dt = stable_dt(p, kappa) if dt is None else dt
    nsteps = max(1, int(np.ceil(t_end / dt - 1e-12)))
    dt = t_end / nsteps
    q = as_matrix(q0)
    b = None
    hist = [q]
    for k in range(nsteps):
        q, b = step_homogeneous(q, kappa, p, dt, rule, b_guess=b, return_b=True)
        hist.append(q)
        if callback is not None:
            callback((k + 1) * dt, q)
    return np.linspace(0.0, t_end, nsteps + 1), np.array(hist)
