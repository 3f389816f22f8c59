"""Time integration of the closed Q-tensor model."""
from .coupled import (
    EnergyReport,
    FieldState,
    energy_report,
    n_operator_apply,
    n_operator_density,
    perturbed_equilibrium,
    step_coupled,
    suggest_dt,
    taylor_green,
)
from .director import (
    el_director_rhs,
    integrate_director,
    measured_tumbling_period,
    shear_gradient,
    steady_shear_angle,
    tumbling_period,
)
from .homogeneous import integrate_homogeneous, rhs_homogeneous, stable_dt, step_homogeneous
from .limit import LimitTable, limit_study
from .params import FlowParams
from .spectral import SpectralGrid

__all__ = [
    "EnergyReport", "FieldState", "FlowParams", "LimitTable", "SpectralGrid",
    "el_director_rhs", "energy_report", "integrate_director", "integrate_homogeneous",
    "limit_study", "measured_tumbling_period", "n_operator_apply", "n_operator_density",
    "perturbed_equilibrium", "rhs_homogeneous", "shear_gradient", "stable_dt",
    "steady_shear_angle", "step_coupled", "step_homogeneous", "suggest_dt",
    "taylor_green", "tumbling_period",
]
