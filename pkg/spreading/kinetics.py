"""
Spatially homogeneous layer: reaction terms, the cooperative change of
variables (u, v) -> (u, 1 - v), and the kinetic ODE system.
"""

import csv
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import root

from .errors import IntegrationError, PoleError, PreconditionError
from .params import KineticParams

logger = logging.getLogger(__name__)

STATE_TOL = 1e-12


@dataclass(frozen=True)
class PointState:
    """A pair of densities, both in [0, 1]."""
    u: float
    v: float

    def __post_init__(self):
        for name in ("u", "v"):
            value = float(getattr(self, name))
            if not (-STATE_TOL <= value <= 1.0 + STATE_TOL):
                raise PreconditionError(f"{name}={value} outside [0, 1]")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float]:
        return self.u, self.v


def reaction_rates(u, v, p: KineticParams):
    """Vectorized competitive reaction terms; accepts scalars or arrays."""
    f = p.r1 * u * (1.0 - u - p.a1 * v)
    g = p.r2 * v * (1.0 - v - p.a2 * u)
    return f, g


def cooperative_rates(u, w, p: KineticParams):
    """Vectorized reaction terms in cooperative coordinates (u, w = 1 - v)."""
    f = p.r1 * u * (1.0 - p.a1 - u + p.a1 * w)
    g = p.r2 * (1.0 - w) * (p.a2 * u - w)
    return f, g


def reaction_competitive(s: PointState, p: KineticParams) -> Tuple[float, float]:
    """Returns (r1 u (1 - u - a1 v), r2 v (1 - v - a2 u))."""
    f, g = reaction_rates(s.u, s.v, p)
    return float(f), float(g)


def to_cooperative(s: PointState) -> PointState:
    return PointState(s.u, 1.0 - s.v)


def from_cooperative(s: PointState) -> PointState:
    return PointState(s.u, 1.0 - s.v)


def reaction_cooperative(s: PointState, p: KineticParams) -> Tuple[float, float]:
    """Returns (r1 u (1 - a1 - u + a1 v), r2 (1 - v)(a2 u - v)) for a cooperative-coordinate state."""
    f, g = cooperative_rates(s.u, s.v, p)
    return float(f), float(g)


def dulac_divergence(s: PointState, p: KineticParams) -> float:
    """
    Divergence of the cooperative vector field weighted by 1 / (u (1 - v)).

    Strictly negative on the open unit square, which rules out closed orbits.

    Raises:
        PoleError: when u == 0 or v == 1
    """
    if s.u == 0.0 or s.v == 1.0:
        raise PoleError(f"dulac weight has a pole at (u, v) = ({s.u}, {s.v})")
    return -p.r1 / (1.0 - s.v) - p.r2 / s.u


@dataclass
class Trajectory:
    """Time samples of the kinetic system in cooperative coordinates."""
    t: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    achieved_tol: float
    max_excursion: float

    @property
    def terminal(self) -> PointState:
        return PointState(self.w1[-1], self.w2[-1])

    def is_monotone(self, slack: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.w1) >= -slack) and np.all(np.diff(self.w2) >= -slack))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["t", "w1", "w2"])
            for row in zip(self.t, self.w1, self.w2):
                writer.writerow([repr(float(x)) for x in row])


def kinetic_ode_solve(initial: PointState, p: KineticParams, horizon: float,
                      tol: float = 1e-9, n_samples: int = 401) -> Trajectory:
    """
    Integrate the cooperative kinetic system with an adaptive RK45 method.

    Args:
        initial (PointState): start point in cooperative coordinates
        p (KineticParams): kinetic parameters
        horizon (float): final time
        tol (float): absolute tolerance, also the allowed excursion outside [0,1]
        n_samples (int): number of reported samples on [0, horizon]

    Returns:
        Trajectory: sampled path, clamped to [0,1] for reporting only

    Raises:
        IntegrationError: on step-size failure or an excursion beyond tol
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    if horizon == 0:
        return Trajectory(np.zeros(1), np.array([initial.u]), np.array([initial.v]), 0.0, 0.0)

    def rhs(_t, y):
        return cooperative_rates(y[0], y[1], p)

    t_eval = np.linspace(0.0, horizon, n_samples)
    sol = solve_ivp(rhs, (0.0, horizon), [initial.u, initial.v], method="RK45",
                    t_eval=t_eval, atol=tol, rtol=1e-8)
    if sol.status < 0:
        raise IntegrationError(f"kinetic ODE failed: {sol.message}")
    y = sol.y
    excursion = float(max(0.0, -y.min(), y.max() - 1.0))
    if excursion > tol:
        raise IntegrationError(f"kinetic ODE left [0,1]^2 by {excursion:.3e} (tol {tol:.1e})")
    if excursion > 0:
        logger.debug("clamping kinetic trajectory excursion %.3e for reporting", excursion)
    y = np.clip(y, 0.0, 1.0)
    return Trajectory(sol.t, y[0], y[1], achieved_tol=tol, max_excursion=excursion)


def find_equilibria(p: KineticParams, grid: int = 11, tol: float = 1e-9) -> List[Tuple[float, float]]:
    """
    Root-finding sweep for competitive equilibria inside [0,1]^2.

    With a1 < 1 < a2 the coexistence point lies outside the square, so the
    sweep returns the three corner states (0,0), (1,0), (0,1).
    """
    def rhs(y):
        return list(reaction_rates(y[0], y[1], p))

    found: List[Tuple[float, float]] = []
    for u0 in np.linspace(0.0, 1.0, grid):
        for v0 in np.linspace(0.0, 1.0, grid):
            sol = root(rhs, [u0, v0], method="hybr", tol=1e-13)
            if not sol.success:
                continue
            u, v = sol.x
            if np.max(np.abs(rhs(sol.x))) > tol:
                continue
            if not (-tol <= u <= 1 + tol and -tol <= v <= 1 + tol):
                continue
            point = (round(float(u), 6) + 0.0, round(float(v), 6) + 0.0)
            if all(abs(point[0] - q[0]) > 1e-6 or abs(point[1] - q[1]) > 1e-6 for q in found):
                found.append(point)
    return sorted(found)
