"""
Preset experiments.

Each preset runs one desk-scale check end to end and returns a
PresetReport holding named criteria. Every preset takes `quick`, which
shrinks grids and horizons so the whole pipeline runs in seconds; quick
reports keep the same criteria but are not expected to meet them.

Reports carry no timestamps or wall times, so repeated runs with the same
settings serialize to identical JSON.
"""

import logging
import math
import os
import tempfile
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Sequence

import numpy as np

from spreading.analysis import (
    J01,
    SampleSpec,
    ball_eigenpair,
    cusp_equilibration_check,
    eigenvalue_curve,
    min_R0_for_epsilon,
    rayleigh_eigenvalue,
    rayleigh_radius_for_bound,
    supersolution_residual,
)
from spreading.domain import (
    DomainMask,
    check_hypothesis_Hyz,
    cusp_profile,
    make_comb_complement,
    make_corridor,
    make_cusp,
    make_exterior,
    make_half_cylinder,
    make_plane,
    make_quarter_space,
    make_spiral,
    square_extent,
)
from spreading.kinetics import PointState, dulac_divergence, find_equilibria, kinetic_ode_solve
from spreading.params import (
    KineticParams,
    exterior_upper_bound,
    kpp_speed,
    linear_speed,
    llw_linear_determinacy,
)
from spreading.solver import (
    BOUND_TOL,
    InitialCondition,
    Probe,
    RunRecord,
    SolverConfig,
    bump_initial,
    comparison_test,
    evolve,
    random_nested_pair,
    step_initial,
)
from spreading.speeds import (
    SpeedEstimate,
    arrival_times,
    estimate_speeds,
    fit_power_law,
    speed_matrix,
    trace_fronts,
    windowed_slopes,
)
from spreading.waves import front_speed_from_pde, min_wave_speed, random_parameter_sweep, sweep_wave_speeds

logger = logging.getLogger(__name__)

P0 = KineticParams(d1=1.0, d2=1.0, r1=1.0, r2=1.0, a1=0.5, a2=1.5)
E1 = (1.0, 0.0)
SPEED_TOL = 0.08
# slope gap below which two estimates on the same grid count as equal
RESOLUTION_FLOOR = 0.03


@dataclass
class Criterion:
    name: str
    measured: Any
    expected: str
    passed: bool


@dataclass
class PresetReport:
    preset: str
    quick: bool
    criteria: List[Criterion]
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.criteria if not c.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {"preset": self.preset, "quick": self.quick, "passed": self.passed,
                "criteria": [asdict(c) for c in self.criteria], "details": self.details}


def within(name: str, measured: float, target: float, rel: float) -> Criterion:
    return Criterion(name, float(measured), f"{target:.6g} +/- {rel:.0%}", abs(measured - target) <= rel * abs(target))


def at_most(name: str, measured: float, bound: float) -> Criterion:
    return Criterion(name, float(measured), f"<= {bound:.6g}", bool(measured <= bound))


def at_least(name: str, measured: float, bound: float) -> Criterion:
    return Criterion(name, float(measured), f">= {bound:.6g}", bool(measured >= bound))


def holds(name: str, flag: bool) -> Criterion:
    return Criterion(name, bool(flag), "true", bool(flag))


def _workers() -> int:
    return int(os.getenv("LVS_WORKERS", "1"))


def _solver(horizon: float, snapshot_every: float, **overrides) -> SolverConfig:
    settings = {"scheme": "explicit", "horizon": horizon, "snapshot_every": snapshot_every,
                "workers": _workers(), "cfl_safety": float(os.getenv("LVS_CFL_SAFETY", "0.9")),
                "tile_rows": int(os.getenv("LVS_TILE_ROWS", "64"))}
    settings.update(overrides)
    return SolverConfig(**settings)


@contextmanager
def scratch_run(initial: InitialCondition, mask: DomainMask, p: KineticParams, config: SolverConfig,
                probes: Sequence[Probe] = ()) -> Iterator[RunRecord]:
    """Evolve with snapshots in a temporary directory that lives as long as the context."""
    with tempfile.TemporaryDirectory(prefix="lvs-") as tmp:
        yield evolve(initial, mask, p, config, probes=probes, output_dir=tmp, keep_in_memory=False)


def _summary(est: SpeedEstimate) -> Dict[str, Any]:
    return {"w_upper": est.w_upper, "upper_hw": est.upper_hw, "w_lower": est.w_lower,
            "lower_hw": est.lower_hw, "trend": est.trend, "stalled": est.stalled,
            "window_slopes": est.window_slopes}


def _declining(slopes: Sequence[float], tol: float) -> bool:
    """Slopes never rise by more than tol and end below where they start."""
    slopes = np.asarray(slopes, dtype=float)
    return bool(np.all(np.diff(slopes) <= tol) and slopes[-1] < slopes[0])


def _exterior_setup(quick: bool):
    half, h, horizon = (30.0, 0.5, 16.0) if quick else (100.0, 0.25, 50.0)
    return make_exterior(5.0, square_extent(half), h), horizon


# ---------------------------------------------------------------------------
# spreading-speed presets


def exterior_exact_speed(quick: bool = False) -> PresetReport:
    """Outside a disk with d1 = d2 and a1 a2 <= 1, every speed equals the linear speed."""
    lin = linear_speed(P0)
    mask, horizon = _exterior_setup(quick)
    anchors = [(0.0, 8.0), (0.0, -8.0), (-8.0, 0.0), (8.0, 8.0)]
    with scratch_run(bump_initial(mask, (8.0, 0.0), 3.0), mask, P0, _solver(horizon, horizon / 50)) as run:
        matrix = speed_matrix(run, E1, anchors, [2.0], epsilon=0.01, workers=_workers())
        halved = speed_matrix(run, E1, anchors[:1], [2.0], epsilon=0.005, workers=_workers())
        edges = dict(run.edge_contacts)
    criteria = []
    for row in [matrix.global_row] + matrix.rows:
        est = row.estimate
        criteria.append(within(f"w_upper[{est.label}]", est.w_upper, lin, SPEED_TOL))
        criteria.append(within(f"w_lower[{est.label}]", est.w_lower, lin, SPEED_TOL))
        criteria.append(holds(f"lower_le_upper[{est.label}]",
                              est.w_lower <= est.w_upper + est.upper_hw + est.lower_hw))
    criteria.append(holds("chain", matrix.chain_ok))
    g, g_half = matrix.global_row.estimate, halved.global_row.estimate
    criteria.append(at_most("epsilon_robust", abs(g.w_upper - g_half.w_upper),
                            g.upper_hw + g_half.upper_hw + RESOLUTION_FLOOR * lin))
    trace = matrix.traces[0]
    late = (trace.times >= 0.25 * trace.times[-1]) & np.isfinite(trace.s_region)
    criteria.append(holds("region_monotone", bool(np.all(np.diff(trace.s_region[late]) >= -mask.h))))
    return PresetReport("exterior_exact_speed", quick, criteria, {
        "linear_speed": lin, "global": _summary(g), "epsilon_half": _summary(g_half),
        "local": {row.estimate.label: _summary(row.estimate) for row in matrix.rows}, "edge_contacts": edges,
    })


EXTERIOR_BOUND_SETS = [
    P0,
    KineticParams(1.0, 3.0, 1.0, 1.0, 0.5, 1.5),
    KineticParams(1.0, 0.5, 1.5, 1.0, 0.3, 2.0),
]


def exterior_bounds(quick: bool = False) -> PresetReport:
    """Outside a disk: w_upper below 2 sqrt(r1) max(sqrt(d1), sqrt(d2/2)), w_lower above the linear speed."""
    half, travel = (30.0, 20.0) if quick else (90.0, 70.0)
    mask = make_exterior(5.0, square_extent(half), 0.5)
    criteria, details = [], {}
    for k, p in enumerate(EXTERIOR_BOUND_SETS):
        horizon = travel / kpp_speed(p)
        with scratch_run(bump_initial(mask, (8.0, 0.0), 3.0), mask, p, _solver(horizon, horizon / 100)) as run:
            matrix = speed_matrix(run, E1, [(0.0, 8.0)], [2.0], workers=_workers())
        g = matrix.global_row.estimate
        bound, lin = exterior_upper_bound(p), linear_speed(p)
        criteria.append(at_most(f"w_upper[set{k}]", g.w_upper, bound * (1 + SPEED_TOL)))
        criteria.append(at_least(f"w_lower[set{k}]", g.w_lower, lin * (1 - SPEED_TOL)))
        criteria.append(holds(f"chain[set{k}]", matrix.chain_ok))
        details[f"set{k}"] = {"params": p.to_dict(), "upper_bound": bound, "linear_speed": lin,
                              "global": _summary(g)}
    return PresetReport("exterior_bounds", quick, criteria, details)


PLANE_SWEEP = [
    P0,
    KineticParams(1.0, 1.0, 1.0, 2.0, 0.3, 1.2),
    KineticParams(1.0, 2.0, 1.0, 1.0, 0.6, 2.5),
    KineticParams(1.5, 0.8, 1.0, 1.2, 0.2, 1.8),
    KineticParams(0.8, 1.2, 1.3, 0.7, 0.7, 1.4),
]


def plane_upper(quick: bool = False) -> PresetReport:
    """On the plane, no speed exceeds 2 sqrt(d1 r1); with d1 = d2 and a1 a2 <= 1 none exceeds the linear speed."""
    travel, h = (15.0, 0.5) if quick else (50.0, 0.5)
    half = 3.0 + 1.2 * travel + 5.0
    mask = make_plane(square_extent(half), h)
    criteria, details = [], {}
    for k, p in enumerate(PLANE_SWEEP):
        horizon = travel / kpp_speed(p)
        with scratch_run(bump_initial(mask, (0.0, 0.0), 3.0), mask, p, _solver(horizon, horizon / 100)) as run:
            matrix = speed_matrix(run, E1, [(0.0, 5.0)], [2.0], workers=_workers())
        g = matrix.global_row.estimate
        cap = kpp_speed(p) * (1 + SPEED_TOL)
        criteria.append(at_most(f"w_upper[set{k}]", g.w_upper, cap))
        criteria.extend(at_most(f"w_upper[set{k},{row.estimate.label}]", row.estimate.w_upper, cap)
                        for row in matrix.rows)
        if p.d1 == p.d2 and p.a1 * p.a2 <= 1.0:
            criteria.append(at_most(f"w_upper_linear[set{k}]", g.w_upper, linear_speed(p) * (1 + SPEED_TOL)))
        criteria.append(holds(f"chain[set{k}]", matrix.chain_ok))
        details[f"set{k}"] = {"params": p.to_dict(), "kpp_speed": kpp_speed(p), "linear_speed": linear_speed(p),
                              "global": _summary(g)}
    return PresetReport("plane_upper", quick, criteria, details)


def comb_position_dependence(quick: bool = False) -> PresetReport:
    """
    Comb with teeth a_n = n^2: the tube below the spine spreads at the linear
    speed while the tube above it slows down tooth after tooth.
    """
    lin = linear_speed(P0)
    if quick:
        extent, h, horizon = (-6.0, 30.0, -8.0, 24.0), 0.5, 14.0
    else:
        extent, h, horizon = (-10.0, 80.0, -20.0, 75.0), 0.25, 50.0
    mask = make_comb_complement(extent, h)
    config = _solver(horizon, horizon / 200)
    with scratch_run(bump_initial(mask, (-3.0, -3.0), 2.0), mask, P0, config) as run:
        below = trace_fronts(run, E1, (0.0, -3.0), 1.0)
        above = trace_fronts(run, E1, (0.0, 2.0), 1.0)
        edges = dict(run.edge_contacts)
    below_est = estimate_speeds(below)
    active = np.isfinite(above.s_edge)
    slopes = windowed_slopes(above.times[active], above.s_edge[active], 4)
    criteria = [
        within("below_spine_speed", below_est.w_upper, lin, 0.10),
        holds("above_spine_declining", _declining(slopes, 0.1 * lin)),
        at_most("above_spine_final_slope", slopes[-1], 0.5 * lin),
    ]
    return PresetReport("comb_position_dependence", quick, criteria, {
        "linear_speed": lin, "below": _summary(below_est), "above_window_slopes": slopes.tolist(),
        "first_clamped_tooth": mask.descriptor.get("first_clamped_tooth"), "edge_contacts": edges,
    })


def spiral_zero(quick: bool = False) -> PresetReport:
    """Along the spiral the front crawls outward: windowed slopes fall and arrival times grow like radius^2."""
    lin = linear_speed(P0)
    half, horizon = (20.0, 60.0) if quick else (40.0, 400.0)
    radii = [7.0, 8.0, 9.0, 10.0] if quick else [8.0, 12.0, 16.0, 20.0, 24.0, 28.0]
    mask = make_spiral(square_extent(half), 0.5, tube_radius=1.0)
    with scratch_run(bump_initial(mask, (0.0, 0.0), 3.0), mask, P0, _solver(horizon, horizon / 200)) as run:
        trace = trace_fronts(run, E1, None, 3.0)
        arrived = arrival_times(run, radii)
    active = np.isfinite(trace.s_edge)
    slopes = windowed_slopes(trace.times[active], trace.s_edge[active], 4)
    law = fit_power_law(radii, arrived)
    criteria = [
        holds("slopes_declining", _declining(slopes, 0.1 * lin)),
        at_most("final_slope", slopes[-1], 0.3 * lin),
        at_least("arrival_exponent", law.exponent, 1.5),
    ]
    return PresetReport("spiral_zero", quick, criteria, {
        "linear_speed": lin, "window_slopes": slopes.tolist(), "radii": radii,
        "arrival_times": arrived.tolist(), "power_law": asdict(law),
    })


CUSP_PARAMS = KineticParams(0.01, 0.01, 1.0, 1.0, 0.5, 1.5)


def _channel_slopes(mask: DomainMask, horizon: float, epsilon: float) -> np.ndarray:
    with scratch_run(step_initial(mask, -0.5), mask, CUSP_PARAMS, _solver(horizon, horizon / 200)) as run:
        trace = trace_fronts(run, E1, (-1.0, 0.0), 0.1, epsilon=epsilon)
    keep = ((trace.times >= horizon / 8) & np.isfinite(trace.s_edge)
            & (trace.s_edge < trace.s_max - 0.1))
    return windowed_slopes(trace.times[keep], trace.s_edge[keep], 3)


def cusp_superlinear(quick: bool = False) -> PresetReport:
    """
    In the cusp the leading edge accelerates and outruns a uniform corridor
    of the entry width; diffusion equilibrates a longer cusp proportionally
    faster than a longer corridor.
    """
    h, horizon = (0.025, 6.0) if quick else (0.0125, 12.0)
    extent = (-1.0, 1.6, -1.0, 1.0)
    cusp = make_cusp(0.0, extent, h, 0.05)
    corridor = make_corridor(0.0, extent, h, float(cusp_profile(0.0)))
    cusp_slopes = _channel_slopes(cusp, horizon, 0.1)
    corridor_slopes = _channel_slopes(corridor, horizon, 0.1)
    if quick:
        check = cusp_equilibration_check(P0, floor_width=0.1, lengths=(0.5, 1.0), h=0.05, t_max=50.0)
    else:
        check = cusp_equilibration_check(P0, floor_width=0.05, lengths=(0.5, 1.0, 2.0), h=0.025, t_max=50.0)
    criteria = [
        holds("cusp_slopes_increasing", bool(np.all(np.diff(cusp_slopes) > 0))),
        at_least("cusp_outruns_corridor", cusp_slopes[-1] - corridor_slopes[-1], 0.0),
        holds("equilibration_faster_than_corridor", check.faster_than_corridor),
    ]
    return PresetReport("cusp_superlinear", quick, criteria, {
        "params": CUSP_PARAMS.to_dict(), "cusp_window_slopes": cusp_slopes.tolist(),
        "corridor_window_slopes": corridor_slopes.tolist(), "equilibration": check.to_dict(),
    })


def halfcyl_lower(quick: bool = False) -> PresetReport:
    """A half-cylinder of radius R >= R0(eps) lets the invader spread at least at the linear speed minus eps."""
    lin, eps, R = linear_speed(P0), 0.5, 6.0
    length, h, horizon, per_radius = (30.0, 0.5, 14.0, 20) if quick else (80.0, 0.25, 45.0, 40)
    mask = make_half_cylinder(E1, 0.0, (0.0, 0.0), R, (-1.0, length, -R - 1.0, R + 1.0), h)
    R0 = min_R0_for_epsilon(P0, eps, h_per_radius=per_radius)
    residual = supersolution_residual("halfcyl_traveling", P0, SampleSpec(R=R, epsilon=eps, h_per_radius=per_radius))
    with scratch_run(bump_initial(mask, (4.0, 0.0), 3.0), mask, P0, _solver(horizon, horizon / 100)) as run:
        est = estimate_speeds(trace_fronts(run, E1, (0.0, 0.0), 2.0))
    criteria = [
        at_most("R0_below_radius", R0, R),
        holds("traveling_subsolution", residual.passed),
        at_least("w_upper", est.w_upper, lin - eps),
    ]
    return PresetReport("halfcyl_lower", quick, criteria, {
        "R": R, "R0": R0, "epsilon": eps, "residual": residual.to_dict(), "estimate": _summary(est),
    })


def quarter_space(quick: bool = False) -> PresetReport:
    """In the quarter plane, anchors off the second wall see the linear speed along e."""
    lin = linear_speed(P0)
    size, horizon = (30.0, 14.0) if quick else (80.0, 45.0)
    mask = make_quarter_space(E1, (0.0, 1.0), 0.0, 0.0, (-1.0, size, -1.0, size), 0.5)
    with scratch_run(bump_initial(mask, (5.0, 5.0), 3.0), mask, P0, _solver(horizon, horizon / 100)) as run:
        matrix = speed_matrix(run, E1, [(0.0, 10.0)], [3.0], workers=_workers())
    criteria = [within(f"w_upper[{row.estimate.label}]", row.estimate.w_upper, lin, SPEED_TOL)
                for row in [matrix.global_row] + matrix.rows]
    criteria.append(holds("chain", matrix.chain_ok))
    return PresetReport("quarter_space", quick, criteria, {
        "linear_speed": lin, "global": _summary(matrix.global_row.estimate),
        "local": {row.estimate.label: _summary(row.estimate) for row in matrix.rows},
    })


def _agree(name: str, a: SpeedEstimate, b: SpeedEstimate, scale: float) -> List[Criterion]:
    return [
        at_most(f"{name}_upper", abs(a.w_upper - b.w_upper), a.upper_hw + b.upper_hw + RESOLUTION_FLOOR * scale),
        at_most(f"{name}_lower", abs(a.w_lower - b.w_lower), a.lower_hw + b.lower_hw + RESOLUTION_FLOOR * scale),
    ]


def independence_data(mask: DomainMask) -> Dict[str, InitialCondition]:
    """Two sub-saturated bumps in different places, each with its own resident dip."""
    return {
        "wide": bump_initial(mask, (8.0, 0.0), 3.0, amplitude=0.9, v_dip=0.15),
        "shallow": bump_initial(mask, (0.0, -9.0), 2.0, amplitude=0.6, v_dip=0.45),
    }


def initial_value_independence(quick: bool = False) -> PresetReport:
    """Two different compactly supported initial data give the same speeds outside the disk."""
    lin = linear_speed(P0)
    mask, horizon = _exterior_setup(quick)
    data = independence_data(mask)
    estimates = {}
    for name, initial in data.items():
        with scratch_run(initial, mask, P0, _solver(horizon, horizon / 50)) as run:
            estimates[name] = speed_matrix(run, E1, [(0.0, 8.0)], [2.0], workers=_workers()).global_row.estimate
    criteria = _agree("global", estimates["wide"], estimates["shallow"], lin)
    return PresetReport("initial_value_independence", quick, criteria, {
        "initial": {name: initial.support for name, initial in data.items()},
        "estimates": {name: _summary(est) for name, est in estimates.items()},
    })


def hypothesis_Hyz_transfer(quick: bool = False) -> PresetReport:
    """
    Where tube slices at y and z stay a bounded geodesic distance apart the
    local speeds agree; on the comb the distance grows without bound.
    """
    lin = linear_speed(P0)
    half, horizon = (30.0, 16.0) if quick else (60.0, 35.0)
    mask = make_exterior(5.0, square_extent(half), 0.5)
    y, z = (0.0, 8.0), (0.0, -8.0)
    exterior = check_hypothesis_Hyz(mask, E1, y, z, 2.0, 2.0, np.linspace(0.0, half - 12.0, 8 if quick else 12))
    with scratch_run(bump_initial(mask, (8.0, 0.0), 3.0), mask, P0, _solver(horizon, horizon / 100)) as run:
        matrix = speed_matrix(run, E1, [y, z], [2.0], workers=_workers())
    comb = make_comb_complement((-6.0, 30.0, -8.0, 24.0), 0.5)
    comb_check = check_hypothesis_Hyz(comb, E1, (0.0, -3.0), (0.0, 2.0), 1.0, 1.0, np.linspace(1.0, 25.0, 10))
    est_y, est_z = matrix.rows[0].estimate, matrix.rows[1].estimate
    criteria = [holds("exterior_hypothesis", exterior.satisfied)]
    criteria.extend(_agree("anchors", est_y, est_z, lin))
    criteria.append(holds("comb_hypothesis_violated", not comb_check.satisfied))
    return PresetReport("hypothesis_Hyz_transfer", quick, criteria, {
        "exterior_bound": exterior.bound, "comb_witness": comb_check.witness,
        "local": {est.label: _summary(est) for est in (est_y, est_z)},
    })


# ---------------------------------------------------------------------------
# wave-speed and oracle presets


def kanon_sandwich(quick: bool = False) -> PresetReport:
    """Minimal wave speeds of random parameter sets lie between the linear and KPP speeds."""
    n, tol = (2, 1e-2) if quick else (50, 1e-3)
    rows = sweep_wave_speeds(random_parameter_sweep(n, seed=0), tol=tol, workers=_workers())
    inside = [row["bound_check"] == "pass" and row["lower"] - tol <= row["c_star"] <= row["upper"] + tol
              for row in rows]
    criteria = [Criterion("all_within_bounds", sum(inside), f"== {n}", all(inside))]
    return PresetReport("kanon_sandwich", quick, criteria, {"tol": tol, "rows": rows})


def linear_determinacy(quick: bool = False) -> PresetReport:
    """Where the linear-determinacy condition holds, the minimal wave speed is the linear speed."""
    n, tol = (2, 1e-2) if quick else (20, 1e-3)
    chosen = [p for p in random_parameter_sweep(10 * n, seed=1) if llw_linear_determinacy(p)][:n]
    rows = []
    for p in chosen:
        c_star = min_wave_speed(p, tol)
        rows.append(dict(p.to_dict(), c_star=c_star, linear_speed=linear_speed(p),
                         gap=abs(c_star - linear_speed(p))))
    worst = max(row["gap"] for row in rows)
    criteria = [
        Criterion("sets_found", len(rows), f"== {n}", len(rows) == n),
        at_most("max_gap", worst, 2 * tol),
    ]
    return PresetReport("linear_determinacy", quick, criteria, {"tol": tol, "rows": rows})


TRIANGLE_SETS = [
    P0,
    KineticParams(1.0, 1.0, 1.0, 1.0, 0.2, 1.5),
    KineticParams(1.0, 0.5, 1.0, 2.0, 0.4, 2.0),
    KineticParams(1.0, 2.0, 1.0, 1.0, 0.5, 1.5),
    KineticParams(1.0, 3.0, 1.0, 3.0, 0.2, 3.0),
]


def ode_pde_triangle(quick: bool = False) -> PresetReport:
    """Front speed of the PDE on a line matches the shooting speed, and both match the linear speed when it determines them."""
    sets, horizon, tol = (TRIANGLE_SETS[:2], 60.0, 1e-2) if quick else (TRIANGLE_SETS, 160.0, 1e-3)
    criteria, rows = [], []
    for k, p in enumerate(sets):
        front = front_speed_from_pde(p, horizon=horizon)
        c_star = min_wave_speed(p, tol)
        criteria.append(within(f"pde_vs_shooting[set{k}]", front.speed, c_star, 0.03))
        if llw_linear_determinacy(p):
            criteria.append(within(f"shooting_vs_linear[set{k}]", c_star, linear_speed(p), 0.03))
            criteria.append(within(f"pde_vs_linear[set{k}]", front.speed, linear_speed(p), 0.03))
        rows.append(dict(p.to_dict(), pde_speed=front.speed, pde_stderr=front.stderr, c_star=c_star,
                         linear_speed=linear_speed(p), transient=front.transient))
    return PresetReport("ode_pde_triangle", quick, criteria, {"horizon": horizon, "rows": rows})


def supersolution_residuals(quick: bool = False) -> PresetReport:
    """The explicit comparison functions satisfy their inequalities under their hypotheses, and fail outside them."""
    spec = (SampleSpec(n_along=20, n_transverse=20, n_time=8, h_per_radius=20) if quick else SampleSpec())
    d2_wide = KineticParams(1.0, 3.0, 1.0, 1.0, 0.5, 1.5)
    cases = {
        "ext_case1": supersolution_residual("ext_case1", P0, spec),
        "ext_case2": supersolution_residual("ext_case2", d2_wide, spec),
        "heat_kernel_pair": supersolution_residual("heat_kernel_pair", P0, spec),
        "halfcyl_traveling": supersolution_residual("halfcyl_traveling", P0, spec),
    }
    criteria = [holds(name, residual.passed) for name, residual in cases.items()]
    misuse = supersolution_residual("ext_case1", d2_wide, spec, enforce_regime=False)
    small = replace(spec, R=2.0)
    undersized = supersolution_residual("halfcyl_traveling", P0, small)
    criteria.append(at_most("ext_case1_witness_when_d2_wide", misuse.min_value, -1e-9))
    criteria.append(at_most("halfcyl_witness_below_R0", undersized.min_value, -1e-9))
    details = {name: residual.to_dict() for name, residual in cases.items()}
    details["ext_case1_d2_wide"] = misuse.to_dict()
    details["halfcyl_R2"] = undersized.to_dict()
    return PresetReport("supersolution_residuals", quick, criteria, details)


def eigenvalue_oracle(quick: bool = False) -> PresetReport:
    """Discrete ball eigenvalues against the Bessel value (j01 / R)^2 and its consequences."""
    per_radius = 40 if quick else 100
    exact = J01 ** 2
    ball = ball_eigenpair(1.0, 1.0 / per_radius).eigenvalue
    plane = make_plane(square_extent(1.5), 1.0 / per_radius)
    rayleigh = rayleigh_eigenvalue(plane, (0.0, 0.0), 1.0)
    curve = eigenvalue_curve([1.0, 2.0, 4.0], h_per_radius=20 if quick else 40)
    eps = 0.5
    margin = P0.r1 * (1 - P0.a1) - (linear_speed(P0) - eps) ** 2 / (4 * P0.d1)
    R0_exact = J01 * math.sqrt(P0.d1 / margin)
    R0 = min_R0_for_epsilon(P0, eps, h_per_radius=20 if quick else 40)
    wide = make_plane(square_extent(12.0), 0.25)
    R_bound = rayleigh_radius_for_bound(wide, (0.0, 0.0), P0)
    R_bound_exact = 0.5 * J01 / math.sqrt(P0.r1 * (1 - P0.a1) / (2 * P0.d1))
    criteria = [
        within("ball_eigenvalue", ball, exact, 0.01),
        within("rayleigh_eigenvalue", rayleigh, exact, 0.01),
        at_most("inverse_square_scaling", curve.scaling_error, 0.02),
        holds("eigenvalues_decrease", curve.decreasing),
        within("R0", R0, R0_exact, 0.05),
        at_most("rayleigh_bound_radius", abs(R_bound - R_bound_exact), 0.05 * R_bound_exact + wide.h),
    ]
    return PresetReport("eigenvalue_oracle", quick, criteria, {
        "exact": exact, "ball": ball, "rayleigh": rayleigh, "curve": [list(row) for row in curve.rows],
        "R0": R0, "R0_exact": R0_exact, "rayleigh_radius": R_bound, "rayleigh_radius_exact": R_bound_exact,
    })


def scheme_monotonicity(quick: bool = False) -> PresetReport:
    """The explicit scheme keeps cooperatively ordered data ordered."""
    pairs, horizon = (2, 2.0) if quick else (10, 5.0)
    masks = {
        "plane": make_plane(square_extent(10.0), 0.5),
        "exterior": make_exterior(3.0, square_extent(12.0), 0.5),
    }
    rng = np.random.default_rng(7)
    config = _solver(horizon, 0.5)
    criteria, worst = [], {}
    for name, mask in masks.items():
        violations = []
        for _ in range(pairs):
            low, high = random_nested_pair(mask, rng)
            violations.append(comparison_test(low, high, mask, P0, config, tol=math.inf).max_violation)
        worst[name] = max(violations)
        criteria.append(at_most(f"ordering[{name}]", worst[name], 1e-10))
    return PresetReport("scheme_monotonicity", quick, criteria, {"pairs": pairs, "max_violation": worst})


def invariant_suite(quick: bool = False) -> PresetReport:
    """Worker determinism, the kinetic limit, the Dulac sign and the equilibria."""
    mask = make_exterior(3.0, square_extent(12.0), 0.5)
    probes = [Probe("east", (6.0, 0.0)), Probe("north_v", (0.0, 6.0), "v")]
    initial = bump_initial(mask, (5.0, 0.0), 1.5)
    horizon = 2.0 if quick else 6.0
    outputs = []
    with tempfile.TemporaryDirectory(prefix="lvs-") as tmp:
        for workers in (1, 4):
            run = evolve(initial, mask, P0, _solver(horizon, 0.5, workers=workers, tile_rows=8), probes=probes)
            path = run.write_probes_csv(Path(tmp) / f"probes_{workers}.csv")
            outputs.append((path.read_bytes(), run.final))
    (bytes_1, final_1), (bytes_4, final_4) = outputs
    deterministic = bytes_1 == bytes_4 and np.array_equal(final_1.u, final_4.u) and np.array_equal(final_1.v, final_4.v)
    inside = mask.inside
    in_box = all(float(f.min()) >= -BOUND_TOL and float(f.max()) <= 1.0 + BOUND_TOL
                 for f in (final_1.u[inside], final_1.v[inside]))
    terminal = kinetic_ode_solve(PointState(0.01, 0.0), P0, 200.0).terminal
    distance = max(abs(terminal.u - 1.0), abs(terminal.v - 1.0))
    grid = np.linspace(0.01, 0.99, 100)
    dulac_max = max(dulac_divergence(PointState(float(u), float(w)), p)
                    for p in random_parameter_sweep(20, seed=2) for u in grid for w in grid)
    corners = find_equilibria(P0)
    criteria = [
        holds("worker_determinism", deterministic),
        holds("fields_in_unit_box", in_box),
        at_most("kinetic_limit", distance, 1e-6),
        at_most("dulac_sign", dulac_max, -1e-12),
        holds("three_corner_equilibria", corners == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]),
    ]
    return PresetReport("invariant_suite", quick, criteria, {
        "kinetic_terminal": [terminal.u, terminal.v], "dulac_max": dulac_max,
        "equilibria": [list(c) for c in corners],
    })
