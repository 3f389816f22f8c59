"""Bingham closure: invert ``Q -> B_Q`` and expose the closure moments.

The conjugate field shares the eigenframe of ``Q``, so the inversion is a
Newton iteration on two eigenvalues of ``B`` carried out in that frame with
the quadrature pole aligned to one principal axis.  Every routine here works
on a single tensor or on a whole batch (``(..., 3, 3)``) at once; the field
solver relies on the batched form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NonAdmissible
from .quadrature import DiagonalMoments, MomentSet, build_rule, diagonal_moments, moments_of
from .tensors import (
    IDENTITY,
    Sym4Moment,
    Sym6Moment,
    as_matrix,
    eig,
    reduce_symmetric,
    random_rotation,
    rotate2,
    rotate4,
    sym,
    traceless,
)

LOWER, UPPER = -1.0 / 3.0, 2.0 / 3.0
MIN_MARGIN = 1e-6
DEFAULT_TOL = 1e-11
DEFAULT_MAX_ITER = 100
# Near Q = 0 the closure linearises to Q = (2/15) B, i.e. B = 7.5 Q; a smaller
# factor keeps the cold start inside the Newton basin for strongly ordered Q.
COLD_START_FACTOR = 5.0
MAX_HALVINGS = 30


@dataclass(frozen=True)
class Admissibility:
    eigenvalues: np.ndarray
    margin: np.ndarray

    @property
    def admissible(self):
        return np.all(self.margin > 0.0)


def check_admissible(q):
    """Eigenvalues of ``q`` and their distance to the ends of (-1/3, 2/3).

    ``margin`` is negative (or zero) when an eigenvalue is outside (on) the
    boundary.
    """
    lam, _ = eig(q)
    margin = np.minimum(lam - LOWER, UPPER - lam).min(axis=-1)
    return Admissibility(eigenvalues=lam, margin=margin)


@dataclass(frozen=True, eq=False)
class ClosureField:
    """Batched closure state in each cell's principal frame.

    ``frame[..., :, a]`` is the a-th principal axis (eigenvalues of ``Q`` in
    descending order) and ``beta[..., a]`` the matching eigenvalue of ``B``.
    """

    frame: np.ndarray
    q_eigenvalues: np.ndarray
    beta: np.ndarray
    moments: DiagonalMoments
    iterations: np.ndarray
    residual: np.ndarray
    jacobian_min_eig: np.ndarray

    @property
    def b(self):
        return rotate2(_diag(self.beta), self.frame)

    @property
    def log_z(self):
        return self.moments.log_z

    def m4_dense(self):
        return rotate4(self.moments.m4_dense(), self.frame)

    def m6_dense(self):
        d6 = self.moments.m6_dense()
        for _ in range(6):
            d6 = _rotate_first(d6, self.frame)
        return d6

    def apply_m(self, a):
        """Closure operator ``A/3 + Q.A - A:M4`` evaluated in the principal frame."""
        r = self.frame
        rt = np.swapaxes(r, -1, -2)
        a_hat = rt @ np.asarray(a, dtype=float) @ r
        q_hat = self.q_eigenvalues
        f = self.moments.fourth
        diag_a = np.diagonal(a_hat, axis1=-2, axis2=-1)
        contr = f * (a_hat + np.swapaxes(a_hat, -1, -2))
        idx = np.arange(3)
        contr[..., idx, idx] = np.einsum("...ac,...c->...a", f, diag_a)
        out_hat = a_hat / 3.0 + q_hat[..., :, None] * a_hat - contr
        return r @ out_hat @ rt

    def contract_m4(self, a):
        """``A:M4`` in the global frame."""
        r = self.frame
        rt = np.swapaxes(r, -1, -2)
        a_hat = rt @ np.asarray(a, dtype=float) @ r
        f = self.moments.fourth
        diag_a = np.diagonal(a_hat, axis1=-2, axis2=-1)
        contr = f * (a_hat + np.swapaxes(a_hat, -1, -2))
        idx = np.arange(3)
        contr[..., idx, idx] = np.einsum("...ac,...c->...a", f, diag_a)
        return r @ contr @ rt


def _rotate_first(t, r):
    # rotate the leading tensor index and cycle it to the back; six calls
    # rotate a rank-6 tensor completely
    return np.einsum("...ia,...abcdef->...bcdefi", r, t)


def _diag(beta):
    return beta[..., :, None] * IDENTITY


def _pole_permutation(lam):
    """Quadrature axis order per cell: the most isolated eigen-axis goes to the pole.

    Returns ``perm`` with ``perm[..., k]`` = eigen-axis placed on quadrature
    axis ``k`` (k = 2 is the pole).  Aligning the isolated axis with the pole
    leaves the smallest eigenvalue gap to the azimuthal (trapezoid) direction.
    """
    top_gap = lam[..., 0] - lam[..., 1]
    bottom_gap = lam[..., 1] - lam[..., 2]
    pole_first = top_gap > bottom_gap
    perm = np.where(pole_first[..., None], np.array([1, 2, 0]), np.array([0, 1, 2]))
    return perm


def _moments_in_frame(beta, perm, rule, with_sixth=False):
    """Diagonal moments for eigen-ordered ``beta`` using the pole permutation."""
    beta_q = np.take_along_axis(beta, perm, axis=-1)
    dm = diagonal_moments(beta_q, rule, with_sixth=with_sixth)
    inv = np.argsort(perm, axis=-1)
    second = np.take_along_axis(dm.second, inv, axis=-1)
    fourth = np.take_along_axis(dm.fourth, inv[..., :, None], axis=-2)
    fourth = np.take_along_axis(fourth, inv[..., None, :], axis=-1)
    sixth = None
    if with_sixth:
        sixth = dm.sixth
        sixth = np.take_along_axis(sixth, inv[..., :, None, None], axis=-3)
        sixth = np.take_along_axis(sixth, inv[..., None, :, None], axis=-2)
        sixth = np.take_along_axis(sixth, inv[..., None, None, :], axis=-1)
    return DiagonalMoments(log_z=dm.log_z, second=second, fourth=fourth, sixth=sixth)


def solve_field(q, rule=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, b_guess=None,
                with_sixth=False, raise_on_failure=True):
    """Batched inversion of the moment relation for every tensor in ``q``.

    ``b_guess`` (same shape as ``q``) warm-starts the iteration; otherwise
    ``B = 5 Q`` is used.
    """
    rule = rule or build_rule()
    # the moment relation only constrains the traceless part
    q = traceless(sym(as_matrix(q)))
    batch = q.shape[:-2]
    q = q.reshape(-1, 3, 3)
    if b_guess is not None:
        b_guess = as_matrix(b_guess).reshape(-1, 3, 3)
    lam, frame = eig(q)
    margin = np.minimum(lam - LOWER, UPPER - lam).min(axis=-1)
    if np.any(margin < MIN_MARGIN):
        raise NonAdmissible(
            f"Q eigenvalues must lie in (-1/3, 2/3) with margin >= {MIN_MARGIN:g}; "
            f"smallest margin {float(np.min(margin)):.3e}"
        )
    target = lam + 1.0 / 3.0
    perm = _pole_permutation(lam)

    if b_guess is None:
        beta = COLD_START_FACTOR * lam
    else:
        b_hat = np.swapaxes(frame, -1, -2) @ as_matrix(b_guess) @ frame
        beta = np.diagonal(b_hat, axis1=-2, axis2=-1).copy()
    # the third eigenvalue is pinned to zero during the solve (shift invariance)
    beta = beta - beta[..., 2:3]

    dm = _moments_in_frame(beta, perm, rule)
    res = np.abs(dm.second - target).max(axis=-1)
    iterations = np.zeros(res.shape, dtype=int)
    jac_min = np.full(res.shape, np.inf)
    active = res > tol
    it = 0
    while np.any(active) and it < max_iter:
        it += 1
        idx = np.nonzero(active)
        b_a = beta[idx]
        sec = dm.second[idx]
        fou = dm.fourth[idx]
        r = sec[..., :2] - target[idx][..., :2]
        j11 = fou[..., 0, 0] - sec[..., 0] ** 2
        j22 = fou[..., 1, 1] - sec[..., 1] ** 2
        j12 = fou[..., 0, 1] - sec[..., 0] * sec[..., 1]
        det = j11 * j22 - j12**2
        half_tr = 0.5 * (j11 + j22)
        jmin = half_tr - np.sqrt(np.maximum(half_tr**2 - det, 0.0))
        jac_min[idx] = np.minimum(jac_min[idx], jmin)
        step = np.stack(
            [-(j22 * r[..., 0] - j12 * r[..., 1]) / det, -(j11 * r[..., 1] - j12 * r[..., 0]) / det],
            axis=-1,
        )
        step = np.concatenate([step, np.zeros(step.shape[:-1] + (1,))], axis=-1)
        old = res[idx]
        t = np.ones(old.shape)
        pending = np.ones(old.shape, dtype=bool)
        new_beta = b_a.copy()
        new_res = old.copy()
        new_dm = None
        for _ in range(MAX_HALVINGS + 1):
            trial = b_a + t[..., None] * step
            trial_dm = _moments_in_frame(trial, perm[idx], rule)
            trial_res = np.abs(trial_dm.second - target[idx]).max(axis=-1)
            accept = pending & (trial_res < old)
            new_beta[accept] = trial[accept]
            new_res[accept] = trial_res[accept]
            if new_dm is None:
                new_dm = trial_dm
            else:
                for name in ("second", "fourth"):
                    getattr(new_dm, name)[accept] = getattr(trial_dm, name)[accept]
                new_dm.log_z[accept] = trial_dm.log_z[accept]
            pending &= ~accept
            if not np.any(pending):
                break
            t = np.where(pending, 0.5 * t, t)
        beta[idx] = new_beta
        res[idx] = new_res
        iterations[idx] += 1
        dm.second[idx] = new_dm.second
        dm.fourth[idx] = new_dm.fourth
        dm.log_z[idx] = new_dm.log_z
        stalled = np.zeros(active.shape, dtype=bool)
        stalled[idx] = pending
        active = (res > tol) & ~stalled
    if raise_on_failure and np.any(res > tol):
        raise NoConvergence(
            f"Bingham inversion did not reach tol={tol:g} in {max_iter} iterations "
            f"(best residual {float(res.max()):.3e})",
            best_residual=float(res.max()),
        )
    # shifting beta by c leaves the density unchanged and moves log Z by -c
    shift = beta.mean(axis=-1)
    beta = beta - shift[..., None]
    if with_sixth:
        dm = _moments_in_frame(beta, perm, rule, with_sixth=True)
    else:
        dm = DiagonalMoments(log_z=dm.log_z - shift, second=dm.second, fourth=dm.fourth)

    def shaped(a, tail=0):
        return None if a is None else a.reshape(batch + a.shape[a.ndim - tail:])

    dm = DiagonalMoments(
        log_z=shaped(dm.log_z),
        second=shaped(dm.second, 1),
        fourth=shaped(dm.fourth, 2),
        sixth=shaped(dm.sixth, 3),
    )
    return ClosureField(
        frame=shaped(frame, 2),
        q_eigenvalues=shaped(lam, 1),
        beta=shaped(beta, 1),
        moments=dm,
        iterations=shaped(iterations),
        residual=shaped(res),
        jacobian_min_eig=shaped(jac_min),
    )


@dataclass(frozen=True, eq=False)
class BinghamResult:
    b: np.ndarray
    moments: MomentSet
    iterations: int
    residual: float
    jacobian_min_eig: float = field(default=np.inf)


def solve_bq(q, rule=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, b_guess=None):
    """Conjugate field ``B_Q`` of a single admissible ``Q``."""
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    cf = solve_field(q, rule, tol, max_iter, b_guess=b_guess, with_sixth=True)
    moments = MomentSet(
        z=np.exp(cf.log_z),
        log_z=cf.log_z,
        m2=rotate2(_diag(cf.moments.second), cf.frame),
        m4=Sym4Moment(reduce_symmetric(cf.m4_dense(), 4)),
        m6=Sym6Moment(reduce_symmetric(cf.m6_dense(), 6)),
    )
    return BinghamResult(
        b=cf.b,
        moments=moments,
        iterations=int(cf.iterations),
        residual=float(cf.residual),
        jacobian_min_eig=float(cf.jacobian_min_eig),
    )


def bulk_potential(q, rule=None, **kw):
    """``-ln Z_Q + Q:B_Q`` (the entropy part of the bulk energy)."""
    cf = solve_field(q, rule, **kw)
    return -cf.log_z + np.sum(cf.q_eigenvalues * cf.beta, axis=-1)


def random_admissible(rng, min_margin=0.02):
    """Random admissible ``Q`` with all eigenvalues at least ``min_margin`` inside.

    Eigenvalue pairs are drawn uniformly and rejected until the third one is
    also inside; the eigenframe is a Haar-random rotation.
    """
    lo, hi = LOWER + min_margin, UPPER - min_margin
    if lo >= hi or 3 * lo > 0 or 3 * hi < 0:
        raise ValueError("min_margin leaves no admissible eigenvalues")
    while True:
        lam = rng.uniform(lo, hi, 2)
        l3 = -lam.sum()
        if lo <= l3 <= hi:
            break
    r = random_rotation(rng)
    return r @ np.diag([lam[0], lam[1], l3]) @ r.T


@dataclass(frozen=True)
class RoundtripReport:
    samples: int
    max_residual: float  # |moment(B) - Q|_inf, moments by the global rule
    max_solver_residual: float
    median_cold: float
    median_warm: float
    max_iterations: int

    def passed(self, tol=1e-10, cold=8, warm=3):
        return self.max_residual <= tol and self.median_cold <= cold and self.median_warm <= warm


def roundtrip_study(samples=200, seed=0, min_margin=0.02, level=None, warm_step=1e-3):
    """Solve ``samples`` random admissible ``Q`` and re-integrate the moments.

    The check recomputes ``M2`` from ``B`` with the full-sphere rule, which
    shares no code with the eigenframe solver.  Warm starts solve a
    perturbation ``Q + dQ`` (``|dQ| ~ warm_step``) from the converged ``B``.
    """
    rng = np.random.default_rng(seed)
    rule = build_rule(level) if level else build_rule()
    qs = [random_admissible(rng, min_margin) for _ in range(samples)]
    res = [solve_bq(q, rule) for q in qs]
    cold = [r.iterations for r in res]
    err = [float(np.abs(moments_of(r.b, rule, with_m6=False).q - q).max()) for r, q in zip(res, qs)]
    warm = []
    for q, r in zip(qs, res):
        dq = traceless(sym(warm_step * rng.standard_normal((3, 3))))
        warm.append(solve_bq(q + dq, rule, b_guess=r.b).iterations)
    return RoundtripReport(
        samples=samples,
        max_residual=max(err),
        max_solver_residual=max(r.residual for r in res),
        median_cold=float(np.median(cold)),
        median_warm=float(np.median(warm)),
        max_iterations=max(cold),
    )
