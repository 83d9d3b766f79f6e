"""
Time integration of the competition-diffusion system on a mask.

Zero-flux boundaries everywhere (mask faces and truncation edges). The
default explicit scheme is monotone under its step bound, so it carries the
comparison principle; the IMEX scheme trades that margin for large steps.
"""

import csv
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

import schemes

from .domain import DomainMask
from .errors import BoundViolationError, ConfigError, OrderingViolationError
from .params import KineticParams
from .stencil import laplacian_neumann
from .storage import read_snapshot, write_snapshot

logger = logging.getLogger(__name__)

BOUND_TOL = 1e-12
EDGE_BAND = 10
EDGE_THRESHOLD = 0.01

__all__ = [
    "StatePair", "InitialCondition", "SolverConfig", "Probe", "Snapshot", "RunRecord",
    "laplacian_neumann", "bump_initial", "step_initial", "random_nested_pair",
    "make_scheme", "step", "evolve", "comparison_test", "ComparisonVerdict",
]


@dataclass
class StatePair:
    """Fields u and v on the mask grid at time t; outside values are never read."""
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def check_bounds(self, mask: DomainMask, tol: float = BOUND_TOL) -> None:
        for name, values in (("u", self.u), ("v", self.v)):
            inside = np.where(mask.inside, values, 0.5)
            low = int(np.argmin(inside))
            high = int(np.argmax(inside))
            if inside.ravel()[low] < -tol:
                raise BoundViolationError(name, np.unravel_index(low, mask.shape), inside.ravel()[low], self.t)
            if inside.ravel()[high] > 1.0 + tol:
                raise BoundViolationError(name, np.unravel_index(high, mask.shape), inside.ravel()[high], self.t)


@dataclass
class InitialCondition:
    """
    Initial data of class Theta: values in [0,1], u0 not identically zero,
    and (u0, v0) = (0, 1) outside the compact support described by `support`.

    Attributes:
        u0, v0 (np.ndarray): cell fields on the mask grid
        support (dict): descriptor of the compact set K
        support_cells (np.ndarray, optional): boolean cells of K; enables the Theta check
    """
    u0: np.ndarray
    v0: np.ndarray
    support: Dict = field(default_factory=dict)
    support_cells: Optional[np.ndarray] = None

    def validate(self, mask: DomainMask) -> None:
        if self.u0.shape != mask.shape or self.v0.shape != mask.shape:
            raise ValueError(f"initial fields must have shape {mask.shape}")
        StatePair(self.u0, self.v0, 0.0).check_bounds(mask)
        if not np.any(self.u0[mask.inside] > 0):
            raise ValueError("u0 vanishes on the mask")
        if self.support_cells is not None:
            outside_k = mask.inside & ~self.support_cells
            if np.any(self.u0[outside_k] != 0.0) or np.any(self.v0[outside_k] != 1.0):
                raise ValueError("initial data differs from (0, 1) outside its support")

    def state(self, mask: DomainMask) -> StatePair:
        self.validate(mask)
        return StatePair(np.where(mask.inside, self.u0, 0.0), np.where(mask.inside, self.v0, 0.0), 0.0)


def _taper(distance: np.ndarray, radius: float, width: float) -> np.ndarray:
    return np.clip((radius - distance) / width, 0.0, 1.0)


def bump_initial(mask: DomainMask, center: Sequence[float], radius: float,
                 amplitude: float = 1.0, v_dip: float = 0.0,
                 taper: Optional[float] = None) -> InitialCondition:
    """
    Invader bump with a piecewise-linear rim, resident at full density by default.

    Args:
        mask (DomainMask): domain
        center (sequence): seed point
        radius (float): support radius r0
        amplitude (float): plateau value of u0, in (0, 1]
        v_dip (float): depth of the resident dip under the bump, in [0, 1]
        taper (float, optional): rim width, default max(2h, r0/4)
    """
    if not 0 < amplitude <= 1 or not 0 <= v_dip <= 1:
        raise ValueError("amplitude must lie in (0, 1] and v_dip in [0, 1]")
    X, Y = mask.centers()
    distance = np.hypot(X - center[0], Y - center[1])
    width = taper if taper is not None else max(2 * mask.h, 0.25 * radius)
    shape = _taper(distance, radius, width)
    u0 = np.where(mask.inside, amplitude * shape, 0.0)
    v0 = np.where(mask.inside, 1.0 - v_dip * shape, 0.0)
    return InitialCondition(u0, v0, {"kind": "bump", "center": list(center), "radius": radius,
                                     "amplitude": amplitude, "v_dip": v_dip},
                            support_cells=distance <= radius)


def step_initial(mask: DomainMask, front: float, axis: int = 0) -> InitialCondition:
    """Invaded state (1, 0) behind the abscissa `front`, invaded-free state (0, 1) ahead."""
    X, Y = mask.centers()
    coord = X if axis == 0 else Y
    behind = coord <= front
    u0 = np.where(mask.inside & behind, 1.0, 0.0)
    v0 = np.where(mask.inside & ~behind, 1.0, 0.0)
    return InitialCondition(u0, v0, {"kind": "step", "front": front, "axis": axis}, support_cells=behind)


def random_nested_pair(mask: DomainMask, rng: np.random.Generator,
                       bumps: int = 3) -> Tuple[InitialCondition, InitialCondition]:
    """Two random Theta data ordered in cooperative coordinates: u_low <= u_high, v_low >= v_high."""
    X, Y = mask.centers()
    xmin, xmax, ymin, ymax = mask.bounds
    inside_points = mask.inside_points

    def random_field(scale: float):
        total = np.zeros(mask.shape)
        support = np.zeros(mask.shape, dtype=bool)
        for _ in range(bumps):
            cx, cy = inside_points[rng.integers(inside_points.shape[0])]
            radius = rng.uniform(0.05, 0.2) * min(xmax - xmin, ymax - ymin)
            distance = np.hypot(X - cx, Y - cy)
            total += scale * rng.uniform(0.2, 1.0) * _taper(distance, radius, 0.5 * radius)
            support |= distance <= radius
        return np.clip(total, 0.0, 1.0), support

    u_low, k1 = random_field(0.5)
    w_low, k2 = random_field(0.4)
    u_extra, k3 = random_field(0.5)
    w_extra, k4 = random_field(0.5)
    u_high = np.minimum(1.0, u_low + u_extra)
    w_high = np.minimum(1.0, w_low + w_extra)
    if not np.any(u_low[mask.inside] > 0):
        u_low = u_low + 0.5 * u_extra
    low = InitialCondition(np.where(mask.inside, u_low, 0.0), np.where(mask.inside, 1.0 - w_low, 0.0),
                           {"kind": "random_low"}, support_cells=k1 | k2 | k3)
    high = InitialCondition(np.where(mask.inside, u_high, 0.0), np.where(mask.inside, 1.0 - w_high, 0.0),
                            {"kind": "random_high"}, support_cells=k1 | k2 | k3 | k4)
    return low, high


@dataclass
class SolverConfig:
    """
    Time-stepping policy.

    Attributes:
        scheme (str): "explicit" or "imex"
        dt (float, optional): fixed step; None derives it from the scheme bound
        cfl_safety (float): fraction of the scheme bound used when dt is None
        snapshot_every (float): snapshot cadence in time units
        horizon (float): final time
        workers (int): tile worker threads
        tile_rows (int): rows per tile
        linear_solver (str): IMEX linear solver, "direct" or "cg"
    """
    scheme: str = "explicit"
    dt: Optional[float] = None
    cfl_safety: float = 0.9
    snapshot_every: float = 1.0
    horizon: float = 10.0
    workers: int = 1
    tile_rows: int = 64
    linear_solver: str = "direct"

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError("solver.cfl_safety", "must lie in (0, 1]")
        if self.snapshot_every <= 0:
            raise ConfigError("solver.snapshot_every", "must be positive")
        if self.horizon < 0:
            raise ConfigError("solver.horizon", "must be non-negative")
        if self.dt is not None and self.dt <= 0:
            raise ConfigError("solver.dt", "must be positive")

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class Probe:
    """Point probe recording one species at every snapshot."""
    probe_id: str
    point: Tuple[float, float]
    species: str = "u"


@dataclass
class Snapshot:
    t: float
    u: np.ndarray
    v: np.ndarray


def make_scheme(mask: DomainMask, p: KineticParams, config: SolverConfig, dt: float = None):
    cls = schemes.get_scheme(config.scheme)
    limit = cls.stable_dt(mask, p, 1.0)
    if config.dt is not None and config.dt > limit:
        raise ConfigError("solver.dt", f"{config.dt} exceeds the {cls.name} step bound {limit:.4g} at h={mask.h}")
    kwargs = {"dt": dt if dt is not None else config.dt, "cfl_safety": config.cfl_safety,
              "workers": config.workers}
    if cls.name == "explicit":
        kwargs["tile_rows"] = config.tile_rows
    else:
        kwargs["linear_solver"] = config.linear_solver
    return cls(mask, p, **kwargs)


def step(state: StatePair, mask: DomainMask, p: KineticParams, config: SolverConfig) -> StatePair:
    """
    Advance one time step.

    Raises:
        BoundViolationError: if any inside value leaves [0,1] by more than 1e-12
        LinearSolveError: if an IMEX diffusion solve fails
    """
    with make_scheme(mask, p, config) as scheme:
        u, v = scheme.step(state.u, state.v)
        result = StatePair(u, v, state.t + scheme.dt)
    result.check_bounds(mask)
    return result


@dataclass
class RunRecord:
    """
    Output of evolve: snapshots (in memory or on disk), probe rows and flags.

    Attributes:
        mask (DomainMask): the domain
        params (KineticParams): parameters used
        config (SolverConfig): time-stepping policy used
        times (List[float]): snapshot times
        snapshots (List[Snapshot]): in-memory snapshots, empty when persisted only
        snapshot_paths (List[Path]): snapshot files when persisted
        probe_rows (List[tuple]): (t, probe_id, value)
        dt (float): step actually used
        steps (int): number of steps taken
        edge_contacts (dict): side -> first time activity reached the truncation band
        wall_time (float): seconds spent integrating
    """
    mask: DomainMask
    params: KineticParams
    config: SolverConfig
    times: List[float] = field(default_factory=list)
    snapshots: List[Snapshot] = field(default_factory=list)
    snapshot_paths: List[Path] = field(default_factory=list)
    probe_rows: List[Tuple[float, str, float]] = field(default_factory=list)
    dt: float = 0.0
    steps: int = 0
    edge_contacts: Dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0

    def __len__(self) -> int:
        return len(self.times)

    def snapshot(self, k: int) -> Snapshot:
        if self.snapshots:
            return self.snapshots[k]
        _, u, v = read_snapshot(self.snapshot_paths[k])
        return Snapshot(self.times[k], u, v)

    def iter_snapshots(self) -> Iterator[Snapshot]:
        for k in range(len(self.times)):
            yield self.snapshot(k)

    @property
    def final(self) -> Snapshot:
        return self.snapshot(len(self.times) - 1)

    def probe_series(self, probe_id: str) -> Tuple[np.ndarray, np.ndarray]:
        rows = [(t, value) for t, pid, value in self.probe_rows if pid == probe_id]
        data = np.array(rows, dtype=float).reshape(-1, 2)
        return data[:, 0], data[:, 1]

    def write_probes_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["t", "probe_id", "value"])
            for t, pid, value in self.probe_rows:
                writer.writerow([repr(float(t)), pid, repr(float(value))])
        return path


def _edge_bands(mask: DomainMask) -> Dict[str, Tuple[slice, slice]]:
    bands = {}
    if mask.nx > 2 * EDGE_BAND:
        bands["xmin"] = (slice(None), slice(0, EDGE_BAND))
        bands["xmax"] = (slice(None), slice(mask.nx - EDGE_BAND, None))
    if mask.ny > 2 * EDGE_BAND:
        bands["ymin"] = (slice(0, EDGE_BAND), slice(None))
        bands["ymax"] = (slice(mask.ny - EDGE_BAND, None), slice(None))
    return bands


def _band_activity(u: np.ndarray, v: np.ndarray, mask: DomainMask, band) -> float:
    cells = mask.inside[band]
    if not cells.any():
        return 0.0
    return float(np.max((u[band] + 1.0 - v[band])[cells]))


def evolve(initial: InitialCondition, mask: DomainMask, p: KineticParams, config: SolverConfig,
           probes: Sequence[Probe] = (), output_dir=None, keep_in_memory: Optional[bool] = None) -> RunRecord:
    """
    Integrate to the horizon, recording snapshots and probes at the cadence.

    The step is shrunk so that every snapshot time is an exact multiple of
    the cadence; a horizon off the cadence gets one shorter final interval.
    Activity reaching a truncation band that started quiet is flagged in the
    record.

    Args:
        initial (InitialCondition): Theta initial data
        mask (DomainMask): domain
        p (KineticParams): kinetic parameters
        config (SolverConfig): time-stepping policy
        probes (sequence): point probes
        output_dir (path, optional): directory for FRLB snapshot files
        keep_in_memory (bool, optional): keep snapshots in memory, default when output_dir is None

    Returns:
        RunRecord: snapshots, probe rows and flags
    """
    state = initial.state(mask)
    keep = (output_dir is None) if keep_in_memory is None else keep_in_memory
    out = Path(output_dir) if output_dir is not None else None
    if out is not None:
        os.makedirs(out, exist_ok=True)
    probe_cells = [(probe, mask.cell_of(probe.point)) for probe in probes]
    for probe, cell in probe_cells:
        if not mask.inside[cell]:
            raise ValueError(f"probe {probe.probe_id} at {probe.point} is outside the mask")
    record = RunRecord(mask=mask, params=p, config=config)
    bands = _edge_bands(mask)
    quiet = {side: _band_activity(state.u, state.v, mask, band) < EDGE_THRESHOLD for side, band in bands.items()}

    def capture(current: StatePair):
        k = len(record.times)
        record.times.append(current.t)
        if keep:
            record.snapshots.append(Snapshot(current.t, current.u.copy(), current.v.copy()))
        if out is not None:
            record.snapshot_paths.append(write_snapshot(out / f"snapshot_{k:05d}.frlb",
                                                        current.t, current.u, current.v, mask))
        for probe, cell in probe_cells:
            field_ = current.u if probe.species == "u" else current.v
            record.probe_rows.append((current.t, probe.probe_id, float(field_[cell])))
        for side, band in bands.items():
            if quiet[side] and side not in record.edge_contacts:
                if _band_activity(current.u, current.v, mask, band) >= EDGE_THRESHOLD:
                    record.edge_contacts[side] = current.t
                    logger.warning("activity reached the %s truncation band at t=%.4g", side, current.t)

    started = time.perf_counter()
    capture(state)
    if config.horizon > 0:
        cls = schemes.get_scheme(config.scheme)
        cadence = config.snapshot_every
        base_dt = config.dt if config.dt is not None else config.cfl_safety * cls.stable_dt(mask, p, 1.0)
        per_snapshot = max(1, int(math.ceil(cadence / base_dt - 1e-9)))
        dt = cadence / per_snapshot
        n_full = int(math.floor(config.horizon / cadence + 1e-9))
        remainder = config.horizon - n_full * cadence
        record.dt = dt

        def advance(scheme, u, v, t0: float, steps: int, step_dt: float):
            for n in range(steps):
                u, v = scheme.step(u, v)
                record.steps += 1
                StatePair(u, v, t0 + (n + 1) * step_dt).check_bounds(mask)
            return u, v

        u, v = state.u, state.v
        with make_scheme(mask, p, config, dt=dt) as scheme:
            for k in range(1, n_full + 1):
                u, v = advance(scheme, u, v, (k - 1) * cadence, per_snapshot, dt)
                capture(StatePair(u, v, k * cadence))
        if remainder > 1e-9 * cadence:
            # last interval is cut short so the run ends on the horizon
            per_tail = max(1, int(math.ceil(remainder / base_dt - 1e-9)))
            tail_dt = remainder / per_tail
            with make_scheme(mask, p, config, dt=tail_dt) as scheme:
                u, v = advance(scheme, u, v, n_full * cadence, per_tail, tail_dt)
                capture(StatePair(u, v, config.horizon))
        logger.info("evolved %d steps (dt=%.4g) to t=%.4g", record.steps, dt, record.times[-1])
    record.wall_time = time.perf_counter() - started
    return record


@dataclass
class ComparisonVerdict:
    max_violation: float
    snapshots_checked: int
    passed: bool


def comparison_test(initial_low: InitialCondition, initial_high: InitialCondition, mask: DomainMask,
                    p: KineticParams, config: SolverConfig, tol: float = 1e-10) -> ComparisonVerdict:
    """
    Evolve two ordered data and check the cooperative order at every snapshot.

    Raises:
        ValueError: if the initial data are not ordered
        OrderingViolationError: if the order is lost by more than tol
    """
    inside = mask.inside
    if np.any(initial_low.u0[inside] > initial_high.u0[inside]) or np.any(initial_low.v0[inside] < initial_high.v0[inside]):
        raise ValueError("initial data are not ordered in cooperative coordinates")
    low = evolve(initial_low, mask, p, config)
    high = evolve(initial_high, mask, p, config)
    worst = 0.0
    for a, b in zip(low.iter_snapshots(), high.iter_snapshots()):
        gap = max(float(np.max((a.u - b.u)[inside])), float(np.max((b.v - a.v)[inside])), 0.0)
        worst = max(worst, gap)
        if gap > tol:
            raise OrderingViolationError(gap, a.t)
    return ComparisonVerdict(worst, len(low), True)
