"""
Numerical core of the spreading toolkit.

Modules:
    params: kinetic parameters, closed-form speeds and determinacy conditions
    kinetics: reaction terms, cooperative transform, kinetic ODE
    domain: masked grids, domain generators, tube radii, geodesics
    stencil: zero-flux finite-volume Laplacian
    storage: snapshot and mask file formats
    solver: time integration and the comparison harness
    waves: minimal wave speed by shooting, 1D front speeds
    speeds: spreading-speed traces and estimates on run records
    analysis: supersolution residuals, ball eigenvalues, cusp equilibration
    errors: exception hierarchy
"""

from .errors import SpreadingError
from .params import (
    Determinacy,
    KineticParams,
    alhasanat_ou_conditions,
    exterior_upper_bound,
    huang_condition,
    kanon_bounds,
    kpp_speed,
    linear_speed,
    llw_linear_determinacy,
)
from .kinetics import PointState, dulac_divergence, find_equilibria, kinetic_ode_solve
from .domain import DirectionQuery, DomainMask, build_mask, compute_R, geodesic_distance
from .solver import InitialCondition, Probe, RunRecord, SolverConfig, StatePair, evolve, comparison_test
from .waves import front_speed_from_pde, min_wave_speed, wave_residual
from .speeds import estimate_speeds, speed_matrix, trace_fronts
from .analysis import ball_eigenpair, min_R0_for_epsilon, rayleigh_eigenvalue, supersolution_residual

__all__ = [
    "SpreadingError",
    "Determinacy",
    "KineticParams",
    "alhasanat_ou_conditions",
    "exterior_upper_bound",
    "huang_condition",
    "kanon_bounds",
    "kpp_speed",
    "linear_speed",
    "llw_linear_determinacy",
    "PointState",
    "dulac_divergence",
    "find_equilibria",
    "kinetic_ode_solve",
    "DirectionQuery",
    "DomainMask",
    "build_mask",
    "compute_R",
    "geodesic_distance",
    "InitialCondition",
    "Probe",
    "RunRecord",
    "SolverConfig",
    "StatePair",
    "evolve",
    "comparison_test",
    "front_speed_from_pde",
    "min_wave_speed",
    "wave_residual",
    "estimate_speeds",
    "speed_matrix",
    "trace_fronts",
    "ball_eigenpair",
    "min_R0_for_epsilon",
    "rayleigh_eigenvalue",
    "supersolution_residual",
]
