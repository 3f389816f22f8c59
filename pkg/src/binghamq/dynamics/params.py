"""Dimensionless parameters of the closed Q-tensor flow model."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

TRACE_VARIANTS = ("Q", "M2")


@dataclass(frozen=True)
class FlowParams:
    """Parameters of the Q-tensor / velocity system.

    ``gamma_solvent`` may equal 1 (pure solvent, Q decoupled from the flow),
    which is used for Navier-Stokes checks.  ``n_operator_trace_variant``
    selects whether the translational-diffusion operator subtracts
    ``Q_kl / 3`` (``"Q"``) or ``M2_kl / 3`` (``"M2"``) in its isotropic part;
    the two agree on traceless arguments.
    """

    de: float = 1.0
    re: float = 1.0
    gamma_solvent: float = 0.5
    eps: float = 0.01
    alpha_ms: float = 7.0
    g_const: float = 1.0
    gamma_par: float = 0.0
    gamma_perp: float = 0.0
    n_operator_trace_variant: str = "Q"
    de_equals_eps: bool = False

    def __post_init__(self):
        if self.de <= 0:
            raise ValueError("de must be positive")
        if self.re <= 0:
            raise ValueError("re must be positive")
        if not 0.0 < self.gamma_solvent <= 1.0:
            raise ValueError("gamma_solvent must lie in (0, 1]")
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if self.alpha_ms <= 0:
            raise ValueError("alpha_ms must be positive")
        if self.g_const < 0:
            raise ValueError("g_const must be non-negative")
        if self.gamma_par < 0 or self.gamma_perp < 0:
            raise ValueError("translational diffusion coefficients must be non-negative")
        if self.n_operator_trace_variant not in TRACE_VARIANTS:
            raise ValueError(f"n_operator_trace_variant must be one of {TRACE_VARIANTS}")
        if self.de_equals_eps and self.de != self.eps:
            raise ValueError("de_equals_eps is set but de != eps")

    @property
    def elastic(self):
        """Coefficient ``alpha G eps`` of the gradient energy."""
        return self.alpha_ms * self.g_const * self.eps

    @property
    def polymer_weight(self):
        """``(1 - gamma) / Re``, the prefactor of the closure stresses."""
        return (1.0 - self.gamma_solvent) / self.re

    @property
    def translational(self):
        return self.gamma_par > 0 or self.gamma_perp > 0

    def with_(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return asdict(self)
