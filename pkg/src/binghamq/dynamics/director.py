"""Ericksen-Leslie director dynamics used as the small-Deborah reference."""
from __future__ import annotations

import numpy as np
from scipy import integrate

from ..leslie import LeslieCoefficients
from ..tensors import split_velocity_gradient


def el_director_rhs(n, kappa, h, c: LeslieCoefficients):
    """``dn/dt = -Omega.n + (I - nn)(h - gamma2 D.n) / gamma1`` (no advection)."""
    n = np.asarray(n, dtype=float)
    d, om = split_velocity_gradient(kappa)
    h = np.zeros_like(n) if h is None else np.asarray(h, dtype=float)
    f = h - c.gamma2 * np.einsum("...ij,...j->...i", d, n)
    proj = f - np.sum(f * n, axis=-1, keepdims=True) * n
    return -np.einsum("...ij,...j->...i", om, n) + proj / c.gamma1


def shear_gradient(rate=1.0):
    """``kappa`` of the simple shear ``v = (rate * y, 0, 0)``."""
    k = np.zeros((3, 3))
    k[0, 1] = rate
    return k


def shear_angle_rhs(theta, lam, rate=1.0):
    """In-plane angle equation under simple shear, ``(-1 + lam cos 2 theta) rate / 2``."""
    return 0.5 * rate * (-1.0 + lam * np.cos(2.0 * theta))


def integrate_director(n0, kappa, c: LeslieCoefficients, t_eval, rtol=1e-11, atol=1e-13):
    """Integrate the homogeneous director equation, renormalising at output times."""
    t_eval = np.asarray(t_eval, dtype=float)
    sol = integrate.solve_ivp(
        lambda t, y: el_director_rhs(y, kappa, None, c),
        (0.0, float(t_eval[-1])),
        np.asarray(n0, dtype=float),
        method="DOP853",
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
    )
    n = sol.y.T
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def steady_shear_angle(c: LeslieCoefficients, theta0=0.0, damping=0.5, tol=1e-14, max_iter=10_000):
    """Flow-aligning angle by damped fixed-point iteration on the angle ODE.

    Iterates ``theta <- theta + damping * rhs(theta) / |d rhs / d theta|``
    from ``theta0``; returns ``None`` when ``|lambda| <= 1`` (no steady state).
    """
    lam = c.lambda_
    if abs(lam) <= 1.0:
        return None
    theta = float(theta0)
    for _ in range(max_iter):
        f = shear_angle_rhs(theta, lam)
        slope = abs(lam * np.sin(2.0 * theta)) or 1.0
        step = damping * f / max(slope, 0.1)
        theta += step
        if abs(f) < tol:
            return theta
    raise RuntimeError("steady shear angle iteration did not converge")


def tumbling_period(c: LeslieCoefficients, rate=1.0):
    """Period of the in-plane rotation for ``|lambda| < 1``: ``2 pi / (rate sqrt(1 - lambda^2))``."""
    lam = c.lambda_
    if abs(lam) >= 1.0:
        return np.inf
    return 2.0 * np.pi / (rate * np.sqrt(1.0 - lam * lam))


def measured_tumbling_period(c: LeslieCoefficients, rate=1.0, turns=2):
    """Period from integrating the angle ODE until it has decreased by ``turns * pi``."""
    lam = c.lambda_

    def passed(t, y):
        return y[0] + turns * np.pi

    passed.terminal = True
    sol = integrate.solve_ivp(
        lambda t, y: [shear_angle_rhs(y[0], lam, rate)],
        (0.0, 1e6), [0.0], events=passed, rtol=1e-12, atol=1e-14, method="DOP853",
    )
    if not sol.t_events[0].size:
        return np.inf
    return float(sol.t_events[0][0]) / turns
