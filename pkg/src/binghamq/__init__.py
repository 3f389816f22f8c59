"""Bingham-closed Q-tensor model of nematic liquid crystals.

Submodules:

- :mod:`binghamq.tensors`: symmetric tensor algebra and moment storage
- :mod:`binghamq.quadrature`: sphere quadrature and Bingham moments
- :mod:`binghamq.closure`: the moment inversion ``Q -> B``
- :mod:`binghamq.equilibria`: uniaxial critical points and the phase diagram
- :mod:`binghamq.operators`: linearised operators at an equilibrium
- :mod:`binghamq.leslie`: Leslie and Frank coefficients
- :mod:`binghamq.dynamics`: homogeneous, spatial and director solvers
"""
from .closure import BinghamResult, check_admissible, solve_bq, solve_field
from .equilibria import (
    critical_alpha,
    equilibrium_data,
    nematic_order,
    solve_branches,
)
from .errors import (
    AdmissibilityLost,
    BinghamError,
    CFLViolation,
    NoConvergence,
    NonAdmissible,
    SubCritical,
)
from .leslie import frank_constants, leslie_coefficients
from .operators import operator_matrix
from .quadrature import build_rule, moments_of

__all__ = [
    "AdmissibilityLost", "BinghamError", "BinghamResult", "CFLViolation", "NoConvergence",
    "NonAdmissible", "SubCritical", "build_rule", "check_admissible", "critical_alpha",
    "equilibrium_data", "frank_constants", "leslie_coefficients", "moments_of",
    "nematic_order", "operator_matrix", "solve_branches", "solve_bq", "solve_field",
]
