"""
Finite-horizon spreading speeds measured on solver run records.

A trace follows, along direction e from an anchor, the leading edge (last
tube position still carrying activity u + 1 - v >= eps) and the converged
region (positions from tau = tau_fraction * t onward where 1 - u + v <= eps
on the whole tube ball). Speeds are least-squares slopes of those series.
"""

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .domain import DirectionQuery, DomainMask, compute_R, ray_limit, ray_samples
from .errors import InsufficientSamplesError, NotStronglyUnboundedError, PreconditionError
from .solver import RunRecord

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10
DEFAULT_EPSILON = 0.01
DEFAULT_TAU_FRACTION = 0.2
DRIFT_TOL = 0.05

LINEAR = "linear"
SUBLINEAR = "sublinear"
SUPERLINEAR = "superlinear"


class TubeScanner:
    """
    Precomputed ball-intersection cell lists along one ray.

    Balls B(z + s e, A) are sampled at stride h from s = 0 to the
    truncation. An empty ball in the first half of the ray carries no
    information; one in the second half means the tube has left the domain.
    """

    def __init__(self, mask: DomainMask, q: DirectionQuery, A: float, stride: Optional[float] = None):
        self.mask = mask
        self.q = q
        self.A = float(A)
        self.s = ray_samples(mask, q, 0.0, stride)
        self.s_max = float(self.s[-1])
        balls = mask.kdtree.query_ball_point(q.point(self.s), self.A)
        lengths = np.array([len(b) for b in balls], dtype=np.int64)
        empty = lengths == 0
        tail = self.s >= 0.5 * ray_limit(mask, q)
        if np.any(empty & tail):
            s_bad = float(self.s[np.flatnonzero(empty & tail)[0]])
            raise NotStronglyUnboundedError(f"tube of radius {A} along {q.e} from {q.z} misses the mask at s={s_bad:.4g}")
        self.nonempty = np.flatnonzero(~empty)
        self.cells = np.concatenate([np.asarray(balls[k], dtype=np.int64) for k in self.nonempty]
                                    or [np.zeros(0, dtype=np.int64)])
        self.offsets = np.concatenate(([0], np.cumsum(lengths[self.nonempty])[:-1])).astype(np.int64)

    def sup(self, values: np.ndarray) -> np.ndarray:
        """Max of per-inside-cell values over every ball; -inf for empty balls."""
        out = np.full(self.s.size, -np.inf)
        if self.nonempty.size == 0:
            return out
        out[self.nonempty] = np.maximum.reduceat(values[self.cells], self.offsets)
        return out

    def measure(self, t: float, activity: np.ndarray, deficit: np.ndarray, epsilon: float,
                tau_fraction: float) -> Tuple[float, float]:
        sup_edge = self.sup(activity)
        hits = np.flatnonzero(sup_edge >= epsilon)
        s_edge = float(self.s[hits[-1]]) if hits.size else -math.inf
        sup_region = self.sup(deficit)
        start = int(np.searchsorted(self.s, tau_fraction * t - 1e-12))
        s_region = -math.inf
        if start < self.s.size:
            bad = np.flatnonzero(sup_region[start:] > epsilon)
            stop = start + (int(bad[0]) if bad.size else self.s.size - start)
            if stop > start:
                s_region = float(self.s[stop - 1])
        return s_edge, s_region


@dataclass
class FrontTrace:
    """
    Leading-edge and converged-region positions along one tube.

    Attributes:
        e (tuple): direction
        anchor (tuple, optional): tube anchor; None for the global tube at the origin
        A (float): tube radius
        epsilon (float): activity threshold
        times (np.ndarray): snapshot times, strictly increasing
        s_edge (np.ndarray): leading-edge position, -inf when nothing is active
        s_region (np.ndarray): converged-region end, -inf when nothing has converged past tau
        s_max (float): truncation of the ray
        tau_fraction (float): trailing cut as a fraction of t
    """
    e: Tuple[float, float]
    anchor: Optional[Tuple[float, float]]
    A: float
    epsilon: float
    times: np.ndarray
    s_edge: np.ndarray
    s_region: np.ndarray
    s_max: float
    tau_fraction: float = DEFAULT_TAU_FRACTION

    @property
    def clipped(self) -> bool:
        return bool(np.any(self.s_edge >= self.s_max) or np.any(self.s_region >= self.s_max))

    @property
    def label(self) -> str:
        if self.anchor is None:
            return "global"
        return f"z=({self.anchor[0]:g},{self.anchor[1]:g})"

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["t", "s_edge", "s_region"])
            for row in zip(self.times, self.s_edge, self.s_region):
                writer.writerow([repr(float(x)) for x in row])
        return path


def _check_epsilon(epsilon: float):
    if not 0 < epsilon < 0.5:
        raise PreconditionError(f"epsilon must lie in (0, 1/2), got {epsilon}")


def _query(mask: DomainMask, e, anchor, A: float, validate: bool) -> DirectionQuery:
    q = DirectionQuery.of(e, anchor if anchor is not None else (0.0, 0.0))
    if validate:
        R = compute_R(mask, q)
        if A <= R:
            where = "origin" if anchor is None else f"anchor {tuple(anchor)}"
            raise PreconditionError(f"tube radius A={A} must exceed R={R:.4g} along {q.e} from the {where}")
    return q


def _snapshot_fields(run: RunRecord):
    flat = run.mask.inside_flat
    for snap in run.iter_snapshots():
        u = snap.u.ravel()[flat]
        v = snap.v.ravel()[flat]
        yield snap.t, u + 1.0 - v, 1.0 - u + v


def _trace_many(run: RunRecord, jobs: Sequence[Tuple], epsilon: float, tau_fraction: float,
                workers: int = 1) -> List[FrontTrace]:
    scanners = [TubeScanner(run.mask, q, A) for q, _, A in jobs]
    times, edges, regions = [], [[] for _ in jobs], [[] for _ in jobs]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 and len(jobs) > 1 else None
    try:
        for t, activity, deficit in _snapshot_fields(run):
            times.append(t)
            measure = lambda sc: sc.measure(t, activity, deficit, epsilon, tau_fraction)  # noqa: E731
            results = list(pool.map(measure, scanners)) if pool else [measure(sc) for sc in scanners]
            for k, (s_edge, s_region) in enumerate(results):
                edges[k].append(s_edge)
                regions[k].append(s_region)
    finally:
        if pool:
            pool.shutdown()
    traces = []
    for k, (q, anchor, A) in enumerate(jobs):
        trace = FrontTrace(q.e, anchor, A, epsilon, np.asarray(times), np.asarray(edges[k]),
                           np.asarray(regions[k]), scanners[k].s_max, tau_fraction)
        if trace.clipped:
            logger.warning("%s trace with A=%g was clipped at the truncation s=%.4g", trace.label, A, trace.s_max)
        traces.append(trace)
    return traces


def trace_fronts(run: RunRecord, e: Sequence[float], anchor: Optional[Sequence[float]], A: float,
                 epsilon: float = DEFAULT_EPSILON, tau_fraction: float = DEFAULT_TAU_FRACTION,
                 validate: bool = True) -> FrontTrace:
    """
    Trace one tube over every snapshot of a run.

    Args:
        run (RunRecord): solver output
        e (sequence): direction
        anchor (sequence, optional): tube anchor, None for the global tube
        A (float): tube radius, must exceed R(e) or R(e, z)
        epsilon (float): threshold in (0, 1/2)
        tau_fraction (float): trailing cut of the converged region

    Raises:
        PreconditionError: A too small or epsilon out of range
        NotStronglyUnboundedError: the tube leaves the mask in the tail
    """
    _check_epsilon(epsilon)
    q = _query(run.mask, e, anchor, A, validate)
    anchor = tuple(float(x) for x in anchor) if anchor is not None else None
    return _trace_many(run, [(q, anchor, A)], epsilon, tau_fraction)[0]


# ---------------------------------------------------------------------------
# estimation


@dataclass
class Slope:
    value: float
    half_width: float
    intercept: float = 0.0
    samples: int = 0


def fit_slope(times: np.ndarray, values: np.ndarray, confidence: float = 0.95) -> Slope:
    """Least-squares slope with a Student-t confidence half-width."""
    if times.size < 3:
        raise InsufficientSamplesError(f"need at least 3 samples for a slope, got {times.size}")
    fit = stats.linregress(times, values)
    quantile = stats.t.ppf(0.5 + 0.5 * confidence, times.size - 2)
    stderr = float(fit.stderr) if np.isfinite(fit.stderr) else 0.0
    return Slope(float(fit.slope), float(quantile * stderr), float(fit.intercept), int(times.size))


def windowed_slopes(times: Sequence[float], positions: Sequence[float], n_windows: int = 4) -> np.ndarray:
    """Slopes over successive windows holding equal numbers of finite samples."""
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    keep = np.isfinite(positions)
    times, positions = times[keep], positions[keep]
    if times.size < 3 * n_windows:
        raise InsufficientSamplesError(f"{times.size} finite samples for {n_windows} windows")
    bounds = np.linspace(0, times.size, n_windows + 1).round().astype(int)
    return np.array([stats.linregress(times[a:b], positions[a:b]).slope for a, b in zip(bounds[:-1], bounds[1:])])


def slope_trend(slopes: Sequence[float], rel: float = DRIFT_TOL) -> str:
    """superlinear when slopes rise across every window, sublinear when they fall, else linear."""
    slopes = np.asarray(slopes, dtype=float)
    steps = np.diff(slopes)
    scale = max(float(np.mean(np.abs(slopes))), 1e-12)
    if np.all(steps > 0) and slopes[-1] - slopes[0] > rel * scale:
        return SUPERLINEAR
    if np.all(steps < 0) and slopes[0] - slopes[-1] > rel * scale:
        return SUBLINEAR
    return LINEAR


@dataclass
class SpeedEstimate:
    """
    Upper and lower speed estimates of one trace.

    Attributes:
        w_upper, w_lower (float): slopes of s_edge and s_region over the window
        upper_hw, lower_hw (float): confidence half-widths
        window (tuple): (t_start, t_end) of the regression window
        drift (float): relative slope change between the window halves
        drifting (bool): drift above DRIFT_TOL
        stalled (bool): the converged region stopped growing; w_lower is 0
        trend (str): linear, sublinear or superlinear over successive windows
        window_slopes (list): the successive-window slopes of s_edge
    """
    w_upper: float
    upper_hw: float
    w_lower: float
    lower_hw: float
    window: Tuple[float, float]
    drift: float
    drifting: bool
    stalled: bool
    trend: str
    window_slopes: List[float] = field(default_factory=list)
    label: str = ""
    A: float = 0.0
    epsilon: float = DEFAULT_EPSILON

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["window"] = list(self.window)
        return data


def estimate_speeds(trace: FrontTrace, window_fraction: float = 0.5, n_windows: int = 4,
                    confidence: float = 0.95) -> SpeedEstimate:
    """
    Slopes of s_edge and s_region over the last window_fraction of the horizon.

    The region speed is reported as 0 when the region stalls: no finite
    region samples, or a slope whose confidence interval contains 0. Traces
    too short for n_windows trend windows use as many as fit.

    Raises:
        InsufficientSamplesError: fewer than 10 finite edge samples in the window
    """
    if not 0 < window_fraction <= 1:
        raise ValueError("window_fraction must lie in (0, 1]")
    t = trace.times
    t0 = t[-1] - window_fraction * (t[-1] - t[0])
    in_window = t >= t0 - 1e-12
    edge_ok = in_window & np.isfinite(trace.s_edge)
    if np.count_nonzero(edge_ok) < MIN_SAMPLES:
        raise InsufficientSamplesError(
            f"{np.count_nonzero(edge_ok)} finite edge samples in the window, need {MIN_SAMPLES}"
        )
    upper = fit_slope(t[edge_ok], trace.s_edge[edge_ok], confidence)
    half = np.flatnonzero(edge_ok)
    first, second = half[:half.size // 2], half[half.size // 2:]
    s1 = stats.linregress(t[first], trace.s_edge[first]).slope
    s2 = stats.linregress(t[second], trace.s_edge[second]).slope
    drift = float((s2 - s1) / max(abs(upper.value), 1e-12))
    region_ok = in_window & np.isfinite(trace.s_region)
    stalled = True
    lower = Slope(0.0, 0.0)
    if np.count_nonzero(region_ok) >= MIN_SAMPLES:
        fitted = fit_slope(t[region_ok], trace.s_region[region_ok], confidence)
        if fitted.value > fitted.half_width:
            lower, stalled = fitted, False
        else:
            lower = Slope(0.0, fitted.half_width)
    active = np.isfinite(trace.s_edge)
    # short traces get fewer windows, each still holding three samples
    windows = max(1, min(n_windows, int(np.count_nonzero(active)) // 3))
    slopes = windowed_slopes(t[active], trace.s_edge[active], windows)
    return SpeedEstimate(
        w_upper=upper.value, upper_hw=upper.half_width, w_lower=lower.value, lower_hw=lower.half_width,
        window=(float(t0), float(t[-1])), drift=drift, drifting=abs(drift) > DRIFT_TOL, stalled=stalled,
        trend=slope_trend(slopes), window_slopes=[float(s) for s in slopes],
        label=trace.label, A=trace.A, epsilon=trace.epsilon,
    )


# ---------------------------------------------------------------------------
# speed matrix


@dataclass
class MatrixRow:
    anchor: Optional[Tuple[float, float]]
    A: float
    estimate: SpeedEstimate
    chain_ok: bool = True


@dataclass
class SpeedMatrix:
    """
    Local estimates for every (anchor, A) pair plus the global one.

    `chain_ok` per local row checks
    w_lower(global) <= w_lower(z) <= w_upper(z) <= w_upper(global)
    within summed half-widths; `sup_ok` checks that the largest local upper
    speed does not exceed the global one.
    """
    e: Tuple[float, float]
    epsilon: float
    global_row: MatrixRow
    rows: List[MatrixRow]
    traces: List[FrontTrace]
    sup_ok: bool = True

    @property
    def chain_ok(self) -> bool:
        return all(row.chain_ok for row in self.rows) and self.sup_ok

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["anchor_x", "anchor_y", "A", "epsilon", "w_upper", "upper_hw", "w_lower",
                             "lower_hw", "trend", "stalled", "chain_ok"])
            for row in [self.global_row] + self.rows:
                est = row.estimate
                ax, ay = row.anchor if row.anchor is not None else ("global", "global")
                writer.writerow([ax, ay, row.A, self.epsilon, est.w_upper, est.upper_hw, est.w_lower,
                                 est.lower_hw, est.trend, est.stalled, row.chain_ok])
        return path

    def to_json(self, path) -> Path:
        path = Path(path)
        payload = {
            "e": list(self.e), "epsilon": self.epsilon, "chain_ok": self.chain_ok, "sup_ok": self.sup_ok,
            "global": self.global_row.estimate.to_dict(),
            "local": [dict(row.estimate.to_dict(), anchor=list(row.anchor), chain_ok=row.chain_ok)
                      for row in self.rows],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))
        return path


def _chain_holds(glob: SpeedEstimate, local: SpeedEstimate) -> bool:
    return (glob.w_lower <= local.w_lower + glob.lower_hw + local.lower_hw
            and local.w_lower <= local.w_upper + local.lower_hw + local.upper_hw
            and local.w_upper <= glob.w_upper + local.upper_hw + glob.upper_hw)


def speed_matrix(run: RunRecord, e: Sequence[float], anchors: Sequence[Sequence[float]],
                 A_list: Sequence[float], epsilon: float = DEFAULT_EPSILON,
                 tau_fraction: float = DEFAULT_TAU_FRACTION, window_fraction: float = 0.5,
                 n_windows: int = 4, workers: int = 1) -> SpeedMatrix:
    """
    Estimates for every (anchor, A) pair and for the global tube, in one pass over the snapshots.

    The global tube radius is max(A_list) plus the largest transverse offset
    of the anchors, so every local tube ball sits inside a global one.

    Raises:
        PreconditionError: empty anchors or A_list, or a radius not above R
    """
    if not anchors or not A_list:
        raise PreconditionError("speed_matrix needs at least one anchor and one tube radius")
    _check_epsilon(epsilon)
    mask = run.mask
    offsets = [DirectionQuery.of(e, z).transverse() for z in anchors]
    A_global = max(A_list) + max(offsets)
    jobs = [(_query(mask, e, None, A_global, True), None, A_global)]
    for z in anchors:
        anchor = (float(z[0]), float(z[1]))
        for A in A_list:
            jobs.append((_query(mask, e, anchor, A, True), anchor, float(A)))
    traces = _trace_many(run, jobs, epsilon, tau_fraction, workers)
    estimates = [estimate_speeds(trace, window_fraction, n_windows) for trace in traces]
    glob = estimates[0]
    rows = []
    for (q, anchor, A), est in zip(jobs[1:], estimates[1:]):
        row = MatrixRow(anchor, A, est, _chain_holds(glob, est))
        if not row.chain_ok:
            logger.warning("speed chain violated at anchor %s A=%g", anchor, A)
        rows.append(row)
    best = max(rows, key=lambda r: r.estimate.w_upper)
    sup_ok = best.estimate.w_upper <= glob.w_upper + best.estimate.upper_hw + glob.upper_hw
    return SpeedMatrix(jobs[0][0].e, epsilon, MatrixRow(None, A_global, glob), rows, traces, sup_ok)


# ---------------------------------------------------------------------------
# arrival times


def arrival_times(run: RunRecord, radii: Sequence[float], level: float = 0.5,
                  center: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    """First snapshot time at which some cell at distance >= rho from center has u >= level; nan if never."""
    points = run.mask.inside_points
    dist = np.hypot(points[:, 0] - center[0], points[:, 1] - center[1])
    radii = np.asarray(radii, dtype=float)
    arrived = np.full(radii.size, np.nan)
    flat = run.mask.inside_flat
    for snap in run.iter_snapshots():
        u = snap.u.ravel()[flat]
        reach = float(dist[u >= level].max()) if np.any(u >= level) else -math.inf
        newly = np.isnan(arrived) & (radii <= reach)
        arrived[newly] = snap.t
        if not np.isnan(arrived).any():
            break
    return arrived


@dataclass
class PowerLaw:
    exponent: float
    prefactor: float
    r_value: float


def fit_power_law(radii: Sequence[float], times: Sequence[float]) -> PowerLaw:
    """Fit times ~ prefactor * radii**exponent on the finite, positive pairs."""
    radii = np.asarray(radii, dtype=float)
    times = np.asarray(times, dtype=float)
    keep = np.isfinite(times) & (times > 0) & (radii > 0)
    if np.count_nonzero(keep) < 3:
        raise InsufficientSamplesError("need at least three arrivals for a power-law fit")
    fit = stats.linregress(np.log(radii[keep]), np.log(times[keep]))
    return PowerLaw(float(fit.slope), float(math.exp(fit.intercept)), float(fit.rvalue))
