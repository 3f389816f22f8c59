"""Ericksen-Leslie and Oseen-Frank coefficients of the closed model."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .equilibria import nematic_order

COEFFICIENT_NAMES = (
    "alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "gamma1", "gamma2", "lambda_",
)


@dataclass(frozen=True)
class LeslieCoefficients:
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float
    gamma1: float
    gamma2: float
    lambda_: float
    # provenance
    alpha_ms: float
    eta: float
    s2: float
    s4: float

    @property
    def parodi_residual(self):
        return (self.alpha2 + self.alpha3) - (self.alpha6 - self.alpha5)

    def dissipation_coefficients(self):
        """Coefficients of the director-theory dissipation quadratic form.

        Returns ``(alpha5 + alpha6 - gamma2^2/gamma1, alpha1 + gamma2^2/gamma1,
        1/gamma1)``; their signs are reported, not enforced.
        """
        r = self.gamma2**2 / self.gamma1
        return self.alpha5 + self.alpha6 - r, self.alpha1 + r, 1.0 / self.gamma1

    def as_dict(self):
        return asdict(self)


def coefficients_from_order(s2, s4, alpha_ms, eta=float("nan")):
    """Leslie coefficients at given order parameters and coupling strength."""
    if s2 <= 0:
        raise ValueError("S2 must be positive")
    lam = 1.0 / 3.0 + 2.0 / (3.0 * s2) - 2.0 / (s2 * alpha_ms)
    gamma1 = 1.0 / (1.0 / (3.0 * s2) + 2.0 / (3.0 * s2**2) - 2.0 / (s2**2 * alpha_ms))
    return LeslieCoefficients(
        alpha1=-s4 / 2.0,
        alpha2=-(s2 / 2.0) * (1.0 + 1.0 / lam),
        alpha3=-(s2 / 2.0) * (1.0 - 1.0 / lam),
        alpha4=4.0 / 15.0 - 5.0 * s2 / 21.0 - s4 / 35.0,
        alpha5=s4 / 7.0 + 6.0 * s2 / 7.0,
        alpha6=s4 / 7.0 - s2 / 7.0,
        gamma1=gamma1,
        gamma2=-s2,
        lambda_=lam,
        alpha_ms=float(alpha_ms),
        eta=float(eta),
        s2=float(s2),
        s4=float(s4),
    )


def leslie_coefficients(alpha, s2=None, s4=None):
    """Leslie coefficients on the nematic branch at Maier-Saupe strength ``alpha``.

    Supplying both ``s2`` and ``s4`` skips the equilibrium solve and evaluates
    the formulas at those order parameters instead.
    """
    if (s2 is None) != (s4 is None):
        raise ValueError("give both s2 and s4 or neither")
    if s2 is None:
        eta, s2, s4 = nematic_order(alpha)
    else:
        eta = float("nan")
    return coefficients_from_order(s2, s4, alpha, eta)


@dataclass(frozen=True)
class FrankConstants:
    k1: float
    k2: float
    k3: float
    j: tuple
    s2: float
    s4: float


def frank_from_order(j, s2, s4):
    j1, j2, j3, j4, j5 = (float(x) for x in j)
    sq2, sq4, x = s2 * s2, s4 * s4, s2 * s4
    k1 = 2 * sq2 * (j1 + j3) + sq4 * (16 * j2 / 7 + 92 * j4 / 49) - 6.0 / 7.0 * j5 * x
    k2 = 2 * sq2 * j1 + sq4 * (16 * j2 / 7 + 12 * j4 / 49) - 2.0 / 7.0 * j5 * x
    k3 = 2 * sq2 * (j1 + j3) + sq4 * (16 * j2 / 7 + 120 * j4 / 49) + 8.0 / 7.0 * j5 * x
    return FrankConstants(k1=k1, k2=k2, k3=k3, j=(j1, j2, j3, j4, j5), s2=s2, s4=s4)


def frank_constants(j, alpha):
    """Splay, twist and bend constants for interaction moments ``j = (J1..J5)``."""
    if len(j) != 5:
        raise ValueError("need five interaction moments J1..J5")
    _, s2, s4 = nematic_order(alpha)
    return frank_from_order(j, s2, s4)


def ericksen_coefficient(alpha, g):
    """``alpha G S2^2``: the one-constant Frank modulus of the closed model."""
    if g < 0:
        raise ValueError("G must be non-negative")
    _, s2, _ = nematic_order(alpha)
    return alpha * g * s2 * s2
