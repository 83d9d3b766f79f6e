"""
Minimal planar wave speed by shooting, and front speeds measured on a
one-dimensional strip.

Profiles solve

    d1 phi'' - c phi' + r1 phi (1 - phi - a1 psi) = 0
    d2 psi'' - c psi' + r2 psi (1 - psi - a2 phi) = 0

with (phi, psi) -> (0, 1) on the left and (1, 0) on the right. Shooting runs
on the cooperative unknowns (phi, phi', q, q') with q = 1 - psi, so both
components increase along a monotone front.

The unstable manifold at the left state is three-dimensional, so a forward
launch needs two parameters. Orbits are instead launched from the
two-dimensional stable manifold of the right state and integrated toward the
left, which leaves a single launch angle to tune.
"""

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.stats import linregress

from .domain import DomainMask
from .errors import FrontAtEdgeError, IntegrationError, NonMonotonePredicateError
from .params import (
    KineticParams,
    alhasanat_ou_conditions,
    kanon_bounds,
    kpp_speed,
    llw_linear_determinacy,
)
from .solver import SolverConfig, evolve, step_initial

logger = logging.getLogger(__name__)

LAUNCH_AMPLITUDE = 1e-6
ARRIVAL_BOX = 1e-3
RANGE_TOL = 1e-8
SLOPE_TOL = 1e-15
DEFAULT_WINDOW = 200.0
MAX_DOUBLINGS = 4

CONNECTS = "connects"
SUBCRITICAL = "subcritical"
OVERSHOOT = "overshoot"
OSCILLATION = "oscillation"
DIVERGENCE = "divergence"

LATE = "late"
EARLY = "early"


@dataclass
class WaveProfile:
    """Front profile sampled on an increasing xi grid."""
    xi: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    c: float

    def is_monotone(self, slack: float = 1e-10) -> bool:
        return bool(np.all(np.diff(self.phi) >= -slack) and np.all(np.diff(self.psi) <= slack))

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["xi", "phi", "psi"])
            for row in zip(self.xi, self.phi, self.psi):
                writer.writerow([repr(float(x)) for x in row])
        return path


@dataclass
class WaveClassification:
    """
    Outcome of one shooting run at speed c.

    Attributes:
        c (float): speed tried
        mode (str): "connects" or one of subcritical, overshoot, oscillation, divergence
        profile (WaveProfile, optional): the connecting orbit
        decay_rate (float, optional): exponential rate of phi on the left tail
        omega (float, optional): launch angle of the reported orbit
        window (float): integration length actually used
        shots (int): number of orbits integrated
    """
    c: float
    mode: str
    profile: Optional[WaveProfile] = None
    decay_rate: Optional[float] = None
    omega: Optional[float] = None
    window: float = DEFAULT_WINDOW
    shots: int = 0

    @property
    def connects(self) -> bool:
        return self.mode == CONNECTS


@dataclass(frozen=True)
class _TargetModes:
    sigma_p: float
    sigma_s: float
    gamma: float
    omega_end: float


@dataclass
class _Shot:
    label: str
    mode: str
    solution: object = None
    window: float = 0.0


def _target_modes(c: float, p: KineticParams) -> _TargetModes:
    # decaying modes of the linearization at the invaded state, in deviations (1 - phi, 1 - q)
    sigma_p = (c - math.sqrt(c * c + 4 * p.d1 * p.r1)) / (2 * p.d1)
    sigma_s = (c - math.sqrt(c * c + 4 * p.d2 * p.r2 * (p.a2 - 1.0))) / (2 * p.d2)
    denominator = p.r1 + c * sigma_s - p.d1 * sigma_s * sigma_s
    if abs(denominator) < 1e-12:
        denominator = math.copysign(1e-12, denominator if denominator != 0 else 1.0)
    gamma = p.r1 * p.a1 / denominator
    # beyond omega_end the invader deviation starts out growing toward the right state
    omega_end = 0.5 * math.pi + math.atan(gamma * sigma_s / sigma_p)
    return _TargetModes(sigma_p, sigma_s, gamma, omega_end)


def _launch(omega: float, modes: _TargetModes, delta: float = LAUNCH_AMPLITUDE) -> np.ndarray:
    alpha, beta = math.cos(omega), math.sin(omega)
    dev = alpha + modes.gamma * beta
    ddev = alpha * modes.sigma_p + beta * modes.gamma * modes.sigma_s
    scale = delta / math.hypot(dev, beta)
    return np.array([1.0 - scale * dev, -scale * ddev, 1.0 - scale * beta, -scale * beta * modes.sigma_s])


def _profile_rhs(c: float, p: KineticParams):
    def rhs(_xi, y):
        phi, dphi, q, dq = y
        return [
            dphi,
            (c * dphi - p.r1 * phi * (1.0 - p.a1 - phi + p.a1 * q)) / p.d1,
            dq,
            (c * dq - p.r2 * (1.0 - q) * (p.a2 * phi - q)) / p.d2,
        ]
    return rhs


def _terminal(fn):
    fn.terminal = True
    fn.direction = -1
    return fn


# Orbits that miss the left state fall on one of two sides. LATE: the resident
# comes in too slowly, so the invader is lost first, q climbs back or phi dips
# below zero. EARLY: the resident comes in too fast, so q drops below zero,
# phi exceeds one or phi turns upward above its nullcline.
# Events fire when the function decreases through zero along the backward integration.
_EVENTS = (
    (CONNECTS, CONNECTS, _terminal(lambda _x, y: max(y[0], y[2]) - ARRIVAL_BOX)),
    (LATE, OVERSHOOT, _terminal(lambda _x, y: y[0] + RANGE_TOL)),
    (EARLY, OVERSHOOT, _terminal(lambda _x, y: y[2] + RANGE_TOL)),
    (EARLY, OVERSHOOT, _terminal(lambda _x, y: 1.0 + RANGE_TOL - y[0])),
    (LATE, OVERSHOOT, _terminal(lambda _x, y: 1.0 + RANGE_TOL - y[2])),
    (EARLY, OSCILLATION, _terminal(lambda _x, y: y[1] + SLOPE_TOL)),
    (LATE, OSCILLATION, _terminal(lambda _x, y: y[3] + SLOPE_TOL)),
    (LATE, DIVERGENCE, _terminal(lambda _x, y: (y[0] - ARRIVAL_BOX) if y[2] >= 0.5 else 1.0)),
    (EARLY, DIVERGENCE, _terminal(lambda _x, y: (y[2] - ARRIVAL_BOX) if y[0] >= 0.5 else 1.0)),
)


def _side(y) -> str:
    return LATE if y[2] > y[0] else EARLY


def _shoot(c: float, p: KineticParams, omega: float, modes: _TargetModes, window: float) -> _Shot:
    y0 = _launch(omega, modes)
    if y0[1] <= 0:
        return _Shot(EARLY, OSCILLATION)
    rhs = _profile_rhs(c, p)
    length = window
    for _ in range(MAX_DOUBLINGS + 1):
        sol = solve_ivp(rhs, (0.0, -length), y0, method="DOP853", rtol=1e-10, atol=1e-13,
                        events=[event for _, _, event in _EVENTS], dense_output=True)
        if sol.status == -1:
            return _Shot(_side(sol.y[:, -1]), DIVERGENCE, sol, length)
        if sol.status == 1:
            fired = [k for k, times in enumerate(sol.t_events) if len(times)]
            k = min(fired, key=lambda idx: abs(sol.t_events[idx][0]))
            label, mode, _ = _EVENTS[k]
            return _Shot(label, mode, sol, length)
        length *= 2.0
    return _Shot(_side(sol.y[:, -1]), DIVERGENCE, sol, length)


def _classify_connection(c: float, shot: _Shot, omega: float, n: int, shots: int) -> WaveClassification:
    sol = shot.solution
    xi_end = float(sol.t[-1])
    xi = np.linspace(xi_end, 0.0, n)
    y = sol.sol(xi)
    profile = WaveProfile(xi - xi_end, y[0], 1.0 - y[2], c)
    tail = (y[0] > ARRIVAL_BOX) & (y[0] < 10 * ARRIVAL_BOX)
    decay = None
    if np.count_nonzero(tail) >= 3:
        decay = float(np.polyfit(xi[tail], np.log(y[0][tail]), 1)[0])
    return WaveClassification(c, CONNECTS, profile, decay, omega, shot.window, shots)


def wave_residual(c: float, p: KineticParams, window: float = DEFAULT_WINDOW, n: int = 401,
                  scan: int = 12, max_bisections: int = 80) -> WaveClassification:
    """
    Classify speed c: does a monotone front from (0,1) to (1,0) exist?

    Orbits leave the right state along its two-dimensional stable manifold,
    one launch angle per orbit. Angle zero carries no resident and loses the
    invader first; the far end of the arc starts with the invader turning
    back up. The angle is bisected between these two sides, and the
    classification is decided by the first orbit that reaches the 1e-3 box
    around the left state with both components in [0,1] and nondecreasing.

    Args:
        c (float): speed, positive
        p (KineticParams): kinetic parameters
        window (float): initial integration length, doubled while unclassified
        n (int): number of profile samples for a connecting orbit
        scan (int): launch angles tried when the arc ends agree
        max_bisections (int): cap on launch-angle bisections

    Returns:
        WaveClassification: connects, or fails with its mode
    """
    if c <= 0:
        raise ValueError(f"speed must be positive, got {c}")
    if c * c < 4.0 * p.d1 * p.r1 * (1.0 - p.a1):
        return WaveClassification(c, SUBCRITICAL, window=window)
    modes = _target_modes(c, p)
    shots = 0

    def run(omega: float) -> _Shot:
        nonlocal shots
        shots += 1
        return _shoot(c, p, omega, modes, window)

    ends = [0.0, modes.omega_end]
    results = {}
    for omega in ends:
        results[omega] = run(omega)
        if results[omega].label == CONNECTS:
            return _classify_connection(c, results[omega], omega, n, shots)
    grid = ends
    if results[0.0].label == results[modes.omega_end].label:
        grid = [float(w) for w in np.linspace(0.0, modes.omega_end, scan)]
        for omega in grid[1:-1]:
            results[omega] = run(omega)
            if results[omega].label == CONNECTS:
                return _classify_connection(c, results[omega], omega, n, shots)
    bracket = None
    for a, b in zip(grid[:-1], grid[1:]):
        if {results[a].label, results[b].label} == {LATE, EARLY}:
            bracket = (a, b) if results[a].label == LATE else (b, a)
            break
    if bracket is None:
        last = results[grid[-1]]
        logger.debug("c=%.6g: no sign change in launch angle (%s)", c, last.mode)
        return WaveClassification(c, last.mode, window=last.window, shots=shots)
    late, early = bracket
    late_shot = results[late]
    for _ in range(max_bisections):
        if abs(late - early) <= 1e-15 * max(1.0, abs(late)):
            break
        mid = 0.5 * (late + early)
        shot = run(mid)
        if shot.label == CONNECTS:
            return _classify_connection(c, shot, mid, n, shots)
        if shot.label == LATE:
            late, late_shot = mid, shot
        else:
            early = mid
    return WaveClassification(c, late_shot.mode, omega=late, window=late_shot.window, shots=shots)


def kpp_scalar_connects(c: float, d: float, r: float, window: float = DEFAULT_WINDOW) -> bool:
    """Monotone front of d phi'' - c phi' + r phi (1 - phi) = 0 at speed c."""
    if c <= 0 or c * c < 4.0 * d * r:
        return False
    sigma = (c - math.sqrt(c * c + 4.0 * d * r)) / (2.0 * d)
    y0 = [1.0 - LAUNCH_AMPLITUDE, -LAUNCH_AMPLITUDE * sigma]
    arrive = _terminal(lambda _x, y: y[0] - ARRIVAL_BOX)
    floor = _terminal(lambda _x, y: y[0] + RANGE_TOL)
    slope = _terminal(lambda _x, y: y[1] + SLOPE_TOL)
    sol = solve_ivp(lambda _x, y: [y[1], (c * y[1] - r * y[0] * (1.0 - y[0])) / d],
                    (0.0, -window), y0, method="DOP853", rtol=1e-10, atol=1e-13,
                    events=[arrive, floor, slope])
    return sol.status == 1 and len(sol.t_events[0]) > 0


def _connects(c: float, p: KineticParams, window: float) -> bool:
    return wave_residual(c, p, window).connects


@dataclass
class WaveSpeedReport:
    """Minimal wave speed with its final bracket and the Kan-on check."""
    c_star: float
    bracket: Tuple[float, float]
    tol: float
    bound_check: str
    scan: List[Tuple[float, bool]] = field(default_factory=list)
    params: Dict[str, float] = field(default_factory=dict)

    linear_speed: float = 0.0

    def to_dict(self) -> Dict:
        return {"c_star": self.c_star, "bracket": list(self.bracket), "tol": self.tol,
                "bound_check": self.bound_check, "params": self.params,
                "linear_speed": self.linear_speed, "scan": [[c, ok] for c, ok in self.scan]}

    def to_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))
        return path


def wave_speed_report(p: KineticParams, tol: float = 1e-3, window: float = DEFAULT_WINDOW,
                      margin: Optional[float] = None, scan_points: int = 5) -> WaveSpeedReport:
    """
    Bisection for the minimal wave speed over [linear_speed, 2 sqrt(d1 r1) + margin].

    A coarse scan first checks that the existence predicate switches once
    from fail to connect. Ties resolve to the upper endpoint.

    Raises:
        NonMonotonePredicateError: scan is not fail...fail, connect...connect
        IntegrationError: result outside the Kan-on bounds
    """
    lower, upper = kanon_bounds(p)
    margin = 0.1 * upper if margin is None else margin
    start = lower * (1.0 + 1e-9)
    scan_cs = np.linspace(start, upper + margin, scan_points)
    scan = [(float(c), _connects(float(c), p, window)) for c in scan_cs]
    flags = [ok for _, ok in scan]
    first = flags.index(True) if True in flags else None
    if first is None or not all(flags[first:]):
        raise NonMonotonePredicateError(scan)
    if first == 0:
        c_star, bracket = lower, (lower, float(scan_cs[0]))
    else:
        lo, hi = float(scan_cs[first - 1]), float(scan_cs[first])
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _connects(mid, p, window):
                hi = mid
            else:
                lo = mid
        c_star, bracket = hi, (lo, hi)
    ok = lower - tol <= c_star <= upper + tol
    if not ok:
        raise IntegrationError(f"c*={c_star:.6g} outside the Kan-on bounds [{lower:.6g}, {upper:.6g}]")
    logger.info("c*=%.6g in [%.6g, %.6g]", c_star, *bracket)
    return WaveSpeedReport(c_star, bracket, tol, "pass", scan, p.to_dict(), lower)


def min_wave_speed(p: KineticParams, tol: float = 1e-3, window: float = DEFAULT_WINDOW) -> float:
    """Minimal speed c* of monotone fronts, within tol."""
    return wave_speed_report(p, tol, window).c_star


# ---------------------------------------------------------------------------
# parameter sweeps


def random_parameter_sweep(n: int, seed: int) -> List[KineticParams]:
    """n valid monostable parameter sets drawn from one seeded generator."""
    rng = np.random.default_rng(seed)
    draws = []
    for _ in range(n):
        d1, d2, r1, r2 = rng.uniform(0.5, 2.0, size=4)
        a1 = rng.uniform(0.05, 0.9)
        a2 = rng.uniform(1.1, 3.0)
        draws.append(KineticParams(float(d1), float(d2), float(r1), float(r2), float(a1), float(a2)))
    return draws


def _sweep_row(args) -> Dict:
    p, tol, window = args
    lower, upper = kanon_bounds(p)
    row = dict(p.to_dict(), lower=lower, upper=upper, llw=llw_linear_determinacy(p),
               determinacy=alhasanat_ou_conditions(p).value)
    try:
        report = wave_speed_report(p, tol, window)
        row.update(c_star=report.c_star, bound_check=report.bound_check, error="")
    except (NonMonotonePredicateError, IntegrationError) as e:
        row.update(c_star=float("nan"), bound_check="fail", error=str(e))
    return row


def sweep_wave_speeds(params: Sequence[KineticParams], tol: float = 1e-3,
                      window: float = DEFAULT_WINDOW, workers: int = 1) -> List[Dict]:
    """Minimal wave speed of every parameter set, rows in input order."""
    jobs = [(p, tol, window) for p in params]
    if workers <= 1:
        return [_sweep_row(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, jobs))


# ---------------------------------------------------------------------------
# PDE front speed


@dataclass
class FrontSpeed:
    """
    Regression of the level-crossing position of a 1D front.

    Attributes:
        speed (float): slope over the last half of the horizon
        stderr (float): standard error of that slope
        early_speed (float): slope over the first tenth of the horizon
        transient (bool): early and late slopes differ by more than 2%
        times, positions (np.ndarray): the tracked crossing
    """
    speed: float
    stderr: float
    early_speed: float
    transient: bool
    times: np.ndarray
    positions: np.ndarray


def strip_mask(xmin: float, xmax: float, h: float) -> DomainMask:
    """One row of cells: the line with zero-flux ends."""
    nx = int(round((xmax - xmin) / h)) + 1
    return DomainMask(np.ones((1, nx), dtype=bool), h, (xmin, 0.0),
                      {"generator": "strip", "extent": [xmin, xmax, 0.0, 0.0], "h": h})


def level_crossing(values: np.ndarray, xs: np.ndarray, level: float = 0.5) -> float:
    """Rightmost crossing of `level` by a profile that is high on the left, linearly interpolated."""
    above = np.flatnonzero(values >= level)
    if above.size == 0:
        return float("-inf")
    i = int(above[-1])
    if i == values.size - 1:
        return float(xs[-1])
    a, b = values[i], values[i + 1]
    return float(xs[i] + (xs[i + 1] - xs[i]) * (a - level) / (a - b))


def front_speed_from_pde(p: KineticParams, extent: Optional[Tuple[float, float]] = None, h: float = 0.25,
                         horizon: float = 160.0, config: Optional[SolverConfig] = None,
                         front: float = 10.0, level: float = 0.5, edge_cells: int = 10) -> FrontSpeed:
    """
    Speed of the u = level crossing from a step initial condition on a strip.

    Raises:
        FrontAtEdgeError: if the crossing comes within edge_cells of the right end
    """
    if extent is None:
        extent = (0.0, front + 1.2 * kpp_speed(p) * horizon + 2 * edge_cells * h)
    mask = strip_mask(extent[0], extent[1], h)
    config = config or SolverConfig(horizon=horizon, snapshot_every=max(horizon / 200.0, 0.1))
    if config.horizon != horizon:
        config = SolverConfig(**dict(config.to_dict(), horizon=horizon))
    run = evolve(step_initial(mask, front), mask, p, config)
    xs = mask.xs
    limit = xs[-1] - edge_cells * h
    times, positions = [], []
    for snap in run.iter_snapshots():
        x = level_crossing(snap.u[0], xs, level)
        if x >= limit:
            raise FrontAtEdgeError(f"front at x={x:.4g} reached the truncation edge at t={snap.t:.4g}")
        times.append(snap.t)
        positions.append(x)
    times, positions = np.asarray(times), np.asarray(positions)
    late = times >= 0.5 * horizon
    early = times <= 0.1 * horizon
    fit = linregress(times[late], positions[late])
    early_fit = linregress(times[early], positions[early])
    transient = abs(early_fit.slope - fit.slope) > 0.02 * abs(fit.slope)
    if transient:
        logger.info("front transient: early slope %.4g vs late %.4g", early_fit.slope, fit.slope)
    return FrontSpeed(float(fit.slope), float(fit.stderr), float(early_fit.slope), bool(transient), times, positions)
