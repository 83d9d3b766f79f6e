"""
Masked uniform grids standing in for unbounded domains, and the geometric
queries the spreading-speed definitions rely on.

A mask is cell-centered: cell (j, i) has its center at
origin + (i*h, j*h) and is inside iff that center satisfies the analytic
domain predicate. The inside region must be a single 4-connected component.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, sparse
from scipy.optimize import brentq
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .errors import (
    DisconnectedMaskError,
    EmptyMaskError,
    NotStronglyUnboundedError,
    PreconditionError,
    ResolutionError,
    UnreachableError,
)

logger = logging.getLogger(__name__)

Extent = Tuple[float, float, float, float]

# worst-case ratio between the 8-neighbor path metric and Euclidean length, minus one
OCTILE_INFLATION = math.cos(math.pi / 8) + (math.sqrt(2.0) - 1.0) * math.sin(math.pi / 8) - 1.0


def square_extent(half_width: float, half_height: Optional[float] = None) -> Extent:
    """Extent centered at the origin, given as (xmin, xmax, ymin, ymax) of cell centers."""
    half_height = half_width if half_height is None else half_height
    return (-half_width, half_width, -half_height, half_height)


@dataclass(frozen=True, eq=False)
class DomainMask:
    """
    Boolean occupancy grid with spacing and world origin.

    Attributes:
        inside (np.ndarray): bool array of shape (ny, nx)
        h (float): grid spacing
        origin (tuple): world coordinates of the center of cell (0, 0)
        descriptor (dict): analytic description used to build the mask
    """
    inside: np.ndarray
    h: float
    origin: Tuple[float, float]
    descriptor: Dict = field(default_factory=dict)

    def __post_init__(self):
        inside = np.ascontiguousarray(self.inside, dtype=bool)
        inside.setflags(write=False)
        object.__setattr__(self, "inside", inside)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        if inside.ndim != 2:
            raise ValueError("inside must be a 2D array")
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        labels, count = ndimage.label(inside)
        if count == 0:
            raise EmptyMaskError(f"{self.descriptor.get('generator', 'mask')} has no inside cells")
        if count > 1:
            sizes = np.bincount(labels.ravel())[1:]
            raise DisconnectedMaskError(int(count), f"component sizes {sorted(sizes.tolist(), reverse=True)[:5]}")

    @property
    def ny(self) -> int:
        return self.inside.shape[0]

    @property
    def nx(self) -> int:
        return self.inside.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.inside.shape

    @property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.h * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.h * np.arange(self.ny)

    @property
    def bounds(self) -> Extent:
        """Extent of cell centers as (xmin, xmax, ymin, ymax)."""
        return (self.origin[0], self.origin[0] + self.h * (self.nx - 1),
                self.origin[1], self.origin[1] + self.h * (self.ny - 1))

    @property
    def inside_count(self) -> int:
        return int(self.inside.sum())

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ys)

    def cell_of(self, point: Sequence[float]) -> Tuple[int, int]:
        """Nearest cell (j, i) to a world point, clipped to the grid."""
        i = int(round((point[0] - self.origin[0]) / self.h))
        j = int(round((point[1] - self.origin[1]) / self.h))
        return min(max(j, 0), self.ny - 1), min(max(i, 0), self.nx - 1)

    def contains(self, point: Sequence[float]) -> bool:
        i = (point[0] - self.origin[0]) / self.h
        j = (point[1] - self.origin[1]) / self.h
        if not (-0.5 <= i <= self.nx - 0.5 and -0.5 <= j <= self.ny - 0.5):
            return False
        jj, ii = self.cell_of(point)
        return bool(self.inside[jj, ii])

    @cached_property
    def inside_flat(self) -> np.ndarray:
        """Row-major flat indices of inside cells."""
        return np.flatnonzero(self.inside.ravel())

    @cached_property
    def inside_points(self) -> np.ndarray:
        j, i = np.divmod(self.inside_flat, self.nx)
        return np.column_stack((self.origin[0] + self.h * i, self.origin[1] + self.h * j))

    @cached_property
    def kdtree(self) -> cKDTree:
        return cKDTree(self.inside_points)

    @cached_property
    def node_index(self) -> np.ndarray:
        """Map from grid cell to graph node, -1 for outside cells."""
        index = np.full(self.shape, -1, dtype=np.int64)
        index.ravel()[self.inside_flat] = np.arange(self.inside_flat.size)
        return index

    @cached_property
    def graph(self) -> sparse.csr_matrix:
        """8-neighbor grid graph; diagonal moves need both orthogonal cells inside."""
        inside = self.inside
        index = self.node_index
        ny, nx = self.shape
        rows, cols, weights = [], [], []
        diag = self.h * math.sqrt(2.0)
        for dj, di, w in ((0, 1, self.h), (1, 0, self.h), (1, 1, diag), (1, -1, diag)):
            j0, j1 = 0, ny - dj
            i0, i1 = max(0, -di), nx - max(0, di)
            a = inside[j0:j1, i0:i1]
            b = inside[j0 + dj:j1 + dj, i0 + di:i1 + di]
            ok = a & b
            if dj and di:
                ok &= inside[j0 + dj:j1 + dj, i0:i1] & inside[j0:j1, i0 + di:i1 + di]
            src = index[j0:j1, i0:i1][ok]
            dst = index[j0 + dj:j1 + dj, i0 + di:i1 + di][ok]
            rows.append(src)
            cols.append(dst)
            weights.append(np.full(src.size, w))
        n = self.inside_flat.size
        return sparse.coo_matrix(
            (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
        ).tocsr()

    def node_of(self, point: Sequence[float]) -> int:
        if not self.contains(point):
            raise PreconditionError(f"point {tuple(point)} is not inside the mask")
        j, i = self.cell_of(point)
        return int(self.node_index[j, i])


# ---------------------------------------------------------------------------
# generators


def _grid(extent: Extent, h: float):
    xmin, xmax, ymin, ymax = (float(v) for v in extent)
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    if xmax <= xmin or ymax <= ymin:
        raise ValueError(f"degenerate extent {extent}")
    nx = int(round((xmax - xmin) / h)) + 1
    ny = int(round((ymax - ymin) / h)) + 1
    xs = xmin + h * np.arange(nx)
    ys = ymin + h * np.arange(ny)
    X, Y = np.meshgrid(xs, ys)
    return X, Y, (xmin, ymin)


def _unit(e: Sequence[float], name: str = "e") -> np.ndarray:
    vec = np.asarray(e, dtype=float)
    norm = float(np.hypot(vec[0], vec[1]))
    if norm == 0:
        raise PreconditionError(f"{name} must be nonzero")
    return vec / norm


def make_plane(extent: Extent, h: float) -> DomainMask:
    X, _, origin = _grid(extent, h)
    return DomainMask(np.ones(X.shape, dtype=bool), h, origin,
                      {"generator": "plane", "extent": list(extent), "h": h})


def make_exterior(obstacle_radius: float, extent: Extent, h: float,
                  center: Sequence[float] = (0.0, 0.0)) -> DomainMask:
    """Extent minus the closed disk of the given radius."""
    xmin, xmax, ymin, ymax = extent
    cx, cy = center
    if obstacle_radius <= 0:
        raise PreconditionError("obstacle radius must be positive")
    if not (xmin < cx - obstacle_radius and cx + obstacle_radius < xmax
            and ymin < cy - obstacle_radius and cy + obstacle_radius < ymax):
        raise PreconditionError(f"obstacle of radius {obstacle_radius} does not fit strictly inside {extent}")
    X, Y, origin = _grid(extent, h)
    inside = np.hypot(X - cx, Y - cy) > obstacle_radius
    return DomainMask(inside, h, origin, {
        "generator": "exterior", "obstacle_radius": obstacle_radius,
        "center": list(center), "extent": list(extent), "h": h,
    })


def _box(X, Y, box):
    if box is None:
        return np.zeros(X.shape, dtype=bool)
    bx0, bx1, by0, by1 = box
    return (X >= bx0) & (X <= bx1) & (Y >= by0) & (Y <= by1)


def make_half_cylinder(e: Sequence[float], A: float, x0: Sequence[float], R: float,
                       extent: Extent, h: float, seed_box: Optional[Extent] = None) -> DomainMask:
    """Semi-infinite strip {x.e >= A, |(x-x0) - ((x-x0).e)e| < R}, optionally with a seed box."""
    e = _unit(e)
    if R <= 0:
        raise PreconditionError("cylinder radius must be positive")
    X, Y, origin = _grid(extent, h)
    along = X * e[0] + Y * e[1]
    dx, dy = X - x0[0], Y - x0[1]
    proj = dx * e[0] + dy * e[1]
    transverse = np.hypot(dx - proj * e[0], dy - proj * e[1])
    inside = ((along >= A) & (transverse < R)) | _box(X, Y, seed_box)
    if not inside.any():
        raise EmptyMaskError("half-cylinder does not meet the extent")
    return DomainMask(inside, h, origin, {
        "generator": "half_cylinder", "e": e.tolist(), "A": A, "x0": list(x0), "R": R,
        "seed_box": list(seed_box) if seed_box is not None else None,
        "extent": list(extent), "h": h,
    })


def make_quarter_space(e: Sequence[float], e2: Sequence[float], A: float, B: float,
                       extent: Extent, h: float, pad_box: Optional[Extent] = None) -> DomainMask:
    """Quarter plane {x.e > A, x.e2 > B}, optionally padded with a box for initial data."""
    e = np.asarray(e, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    if abs(float(np.dot(e, e2))) > 1e-12:
        raise PreconditionError(f"quarter-space axes must be orthogonal, e.e' = {float(np.dot(e, e2)):.3e}")
    e, e2 = _unit(e), _unit(e2, "e'")
    X, Y, origin = _grid(extent, h)
    inside = ((X * e[0] + Y * e[1] > A) & (X * e2[0] + Y * e2[1] > B)) | _box(X, Y, pad_box)
    if not inside.any():
        raise EmptyMaskError("quarter space does not meet the extent")
    return DomainMask(inside, h, origin, {
        "generator": "quarter_space", "e": e.tolist(), "e2": e2.tolist(), "A": A, "B": B,
        "pad_box": list(pad_box) if pad_box is not None else None,
        "extent": list(extent), "h": h,
    })


def square_teeth(n: int) -> float:
    return float(n * n)


def make_comb_complement(extent: Extent, h: float,
                         teeth_height_rule: Optional[Callable[[int], float]] = None,
                         thickness: float = 1.0 / 3.0,
                         corridor: Optional[float] = None) -> DomainMask:
    """
    Extent minus a thickened comb: spine {x2 = 0, x1 >= 0} and teeth {n} x [0, a_n].

    Teeth taller than the extent are clamped so a bypass corridor of the given
    height stays open below the top edge; the first clamped tooth is recorded.
    """
    rule = teeth_height_rule or square_teeth
    xmin, xmax, ymin, ymax = extent
    if not (ymin < 0 < ymax and xmax > 1):
        raise PreconditionError("comb extent must straddle the spine and contain teeth")
    if not 0 < thickness <= 1.0 / 3.0:
        raise PreconditionError("comb thickness must lie in (0, 1/3]")
    corridor = max(4 * h, 2 * thickness + 2 * h) if corridor is None else corridor
    cap = ymax - corridor
    if cap <= thickness:
        raise PreconditionError("extent too short for a bypass corridor above the teeth")
    X, Y, origin = _grid(extent, h)
    spine = np.where(X >= 0, np.abs(Y), np.hypot(X, Y))
    dist = spine.copy()
    heights: List[float] = []
    first_clamped = None
    for n in range(1, int(math.floor(xmax + thickness)) + 1):
        a_n = float(rule(n))
        if a_n <= 0:
            raise PreconditionError(f"tooth height rule gave {a_n} at n={n}")
        height = min(a_n, cap)
        if height < a_n and first_clamped is None:
            first_clamped = n
        heights.append(height)
        dy = np.clip(Y, 0.0, height) - Y
        dist = np.minimum(dist, np.hypot(X - n, dy))
    inside = dist >= thickness
    if first_clamped is not None:
        logger.info("comb teeth clamped at height %.3g from n=%d", cap, first_clamped)
    try:
        return DomainMask(inside, h, origin, {
            "generator": "comb", "thickness": thickness, "corridor": corridor,
            "teeth_heights": heights, "first_clamped_tooth": first_clamped,
            "extent": list(extent), "h": h,
        })
    except DisconnectedMaskError as exc:
        raise DisconnectedMaskError(exc.components, "comb teeth cut the extent; enlarge the corridor") from exc


def spiral_arc_length(t):
    """Arc length of (t cos t, t sin t) from 0 to t."""
    t = np.asarray(t, dtype=float)
    return 0.5 * (t * np.sqrt(1.0 + t * t) + np.arcsinh(t))


def spiral_points(t_max: float, step: float) -> np.ndarray:
    """Samples of the Archimedean spiral at arc-length spacing <= step."""
    t_fine = np.linspace(0.0, t_max, max(2000, int(200 * t_max)))
    s_fine = spiral_arc_length(t_fine)
    s = np.arange(0.0, s_fine[-1] + step, step)
    t = np.interp(s, s_fine, t_fine)
    return np.column_stack((t * np.cos(t), t * np.sin(t)))


def make_spiral(extent: Extent, h: float, tube_radius: float = 1.0) -> DomainMask:
    """Disk B_{2 pi} united with the tube of the given radius around the spiral (t cos t, t sin t)."""
    gap = 2 * math.pi - 2 * tube_radius
    if gap <= 2 * h:
        raise ResolutionError(f"spacing h={h} cannot separate spiral arms (gap {gap:.3g})")
    xmin, xmax, ymin, ymax = extent
    inscribed = min(-xmin, xmax, -ymin, ymax)
    t_max = inscribed - tube_radius - h
    if t_max <= 2 * math.pi:
        raise PreconditionError("extent too small to hold the spiral beyond the central disk")
    X, Y, origin = _grid(extent, h)
    curve = cKDTree(spiral_points(t_max, h / 2))
    dist, _ = curve.query(np.column_stack((X.ravel(), Y.ravel())), distance_upper_bound=tube_radius)
    tube = (dist < tube_radius).reshape(X.shape)
    inside = tube | (np.hypot(X, Y) < 2 * math.pi)
    return DomainMask(inside, h, origin, {
        "generator": "spiral", "tube_radius": tube_radius, "t_max": t_max,
        "extent": list(extent), "h": h,
    })


def cusp_profile(s):
    """Analytic cusp half-width exp(-e^s + s)."""
    s = np.asarray(s, dtype=float)
    return np.exp(-np.exp(s) + s)


def cusp_clamp_location(A: float, floor_width: float) -> float:
    """Abscissa beyond which the cusp half-width is held at floor_width."""
    start = max(A, 0.0)
    if float(cusp_profile(start)) <= floor_width:
        return start
    return float(brentq(lambda s: float(cusp_profile(s)) - floor_width, start, 10.0, xtol=1e-12))


def cusp_half_width(x1, A: float, floor_width: float):
    """Half-width of the cusp mask at abscissa x1: 1 in the entry box, clamped profile beyond."""
    x1 = np.asarray(x1, dtype=float)
    return np.where(x1 <= A, 1.0, np.maximum(cusp_profile(x1), floor_width))


def make_cusp(A: float, extent: Extent, h: float, floor_width: float,
              length: Optional[float] = None) -> DomainMask:
    """
    Entry box [A-1, A] x (-1, 1) followed by the cusp |x2| < max(exp(-e^x1 + x1), floor_width).

    Args:
        A (float): abscissa where the cusp starts
        extent (Extent): grid extent
        h (float): grid spacing
        floor_width (float): smallest half-width kept, at least h
        length (float, optional): truncate the cusp at x1 <= A + length
    """
    if floor_width < h:
        raise ResolutionError(f"floor_width {floor_width} is below the grid spacing {h}")
    X, Y, origin = _grid(extent, h)
    if not np.any(np.abs(Y[:, 0]) < floor_width):
        raise ResolutionError("no grid row lies within floor_width of the cusp axis")
    half = cusp_half_width(X, A, floor_width)
    inside = (X >= A - 1.0) & (np.abs(Y) < half)
    if length is not None:
        inside &= X <= A + length
    clamp = cusp_clamp_location(A, floor_width)
    return DomainMask(inside, h, origin, {
        "generator": "cusp", "A": A, "floor_width": floor_width, "clamp_x": clamp,
        "length": length, "extent": list(extent), "h": h,
    })


def make_corridor(A: float, extent: Extent, h: float, half_width: float,
                  length: Optional[float] = None) -> DomainMask:
    """Entry box [A-1, A] x (-1, 1) followed by a uniform corridor of the given half-width."""
    X, Y, origin = _grid(extent, h)
    half = np.where(X <= A, 1.0, half_width)
    inside = (X >= A - 1.0) & (np.abs(Y) < half)
    if length is not None:
        inside &= X <= A + length
    return DomainMask(inside, h, origin, {
        "generator": "corridor", "A": A, "half_width": half_width, "length": length,
        "extent": list(extent), "h": h,
    })


GENERATORS: Dict[str, Callable[..., DomainMask]] = {
    "plane": make_plane,
    "exterior": make_exterior,
    "half_cylinder": make_half_cylinder,
    "quarter_space": make_quarter_space,
    "comb": make_comb_complement,
    "spiral": make_spiral,
    "cusp": make_cusp,
    "corridor": make_corridor,
}


def build_mask(generator: str, **kwargs) -> DomainMask:
    """Build a mask by generator name, the way experiment configs refer to them."""
    if generator not in GENERATORS:
        raise PreconditionError(f"unknown domain generator '{generator}', available: {', '.join(GENERATORS)}")
    if "extent" in kwargs:
        kwargs["extent"] = tuple(kwargs["extent"])
    return GENERATORS[generator](**kwargs)


# ---------------------------------------------------------------------------
# queries


@dataclass(frozen=True)
class DirectionQuery:
    """Direction e (unit) and anchor z in world coordinates."""
    e: Tuple[float, float]
    z: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        e = (float(self.e[0]), float(self.e[1]))
        if abs(math.hypot(*e) - 1.0) > 1e-12:
            raise PreconditionError(f"direction {e} is not a unit vector")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "z", (float(self.z[0]), float(self.z[1])))

    @classmethod
    def of(cls, e: Sequence[float], z: Sequence[float] = (0.0, 0.0)) -> "DirectionQuery":
        """Normalizes e before validation."""
        unit = _unit(e)
        return cls((float(unit[0]), float(unit[1])), tuple(z))

    def transverse(self) -> float:
        """|z - (z.e)e|."""
        along = self.z[0] * self.e[0] + self.z[1] * self.e[1]
        return math.hypot(self.z[0] - along * self.e[0], self.z[1] - along * self.e[1])

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return np.column_stack((self.z[0] + s * self.e[0], self.z[1] + s * self.e[1]))


def ray_limit(mask: DomainMask, q: DirectionQuery) -> float:
    """Largest s >= 0 with z + s e inside the extent of cell centers."""
    xmin, xmax, ymin, ymax = mask.bounds
    limit = math.inf
    for lo, hi, start, step in ((xmin, xmax, q.z[0], q.e[0]), (ymin, ymax, q.z[1], q.e[1])):
        if not lo <= start <= hi:
            raise PreconditionError(f"anchor {q.z} outside the extent")
        if step > 1e-15:
            limit = min(limit, (hi - start) / step)
        elif step < -1e-15:
            limit = min(limit, (lo - start) / step)
    return float(limit)


def ray_samples(mask: DomainMask, q: DirectionQuery, s0: float = 0.0,
                stride: Optional[float] = None) -> np.ndarray:
    stride = mask.h if stride is None else stride
    s_max = ray_limit(mask, q)
    if s0 > s_max:
        raise PreconditionError(f"s0={s0} beyond the truncation {s_max:.3g}")
    return np.arange(s0, s_max + 1e-9, stride)


def compute_R(mask: DomainMask, q: DirectionQuery, s0: Optional[float] = None) -> float:
    """
    Smallest tube radius R (multiple of h) such that every ball B(z + s e, R)
    with sampled s >= s0 up to the truncation meets the mask.

    Args:
        mask (DomainMask): domain
        q (DirectionQuery): direction and anchor
        s0 (float, optional): start of the sampled tail, default half the ray length

    Returns:
        float: R quantized to the grid spacing

    Raises:
        NotStronglyUnboundedError: if no radius up to the extent scale works
    """
    s_max = ray_limit(mask, q)
    s0 = 0.5 * s_max if s0 is None else s0
    samples = ray_samples(mask, q, s0)
    dist, _ = mask.kdtree.query(q.point(samples))
    xmin, xmax, ymin, ymax = mask.bounds
    k_max = int(math.ceil(math.hypot(xmax - xmin, ymax - ymin) / mask.h))

    def meets(k: int) -> bool:
        return bool(np.all(dist <= k * mask.h + 1e-9))

    if not meets(k_max):
        raise NotStronglyUnboundedError(f"tube along {q.e} from {q.z} leaves the mask at every radius")
    lo, hi = -1, k_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if meets(mid):
            hi = mid
        else:
            lo = mid
    return hi * mask.h


@dataclass(frozen=True)
class GeodesicResult:
    distance: float
    error_bound: float


def geodesic_distance(mask: DomainMask, x: Sequence[float], y: Sequence[float]) -> GeodesicResult:
    """
    Shortest 8-neighbor path length between two inside points.

    The grid metric over-approximates continuum geodesics by at most
    OCTILE_INFLATION relative; the bound is reported with the distance.
    """
    a, b = mask.node_of(x), mask.node_of(y)
    dist = dijkstra(mask.graph, directed=False, indices=a)[b]
    if not np.isfinite(dist):
        raise UnreachableError(f"{tuple(y)} unreachable from {tuple(x)}")
    return GeodesicResult(float(dist), float(dist) * OCTILE_INFLATION)


def geodesic_field(mask: DomainMask, sources: Sequence[Sequence[float]]) -> np.ndarray:
    """Distance from the nearest source to every cell; inf outside the mask."""
    nodes = sorted({mask.node_of(p) for p in sources})
    dist = dijkstra(mask.graph, directed=False, indices=nodes, min_only=True)
    field_ = np.full(mask.shape, np.inf)
    field_.ravel()[mask.inside_flat] = dist
    return field_


@dataclass
class HypothesisResult:
    satisfied: bool
    bound: float
    samples: List[Tuple[float, float]]
    witness: Optional[Dict] = None


def _representatives(nodes: np.ndarray, count: int) -> np.ndarray:
    if nodes.size <= count:
        return nodes
    return nodes[np.linspace(0, nodes.size - 1, count).round().astype(int)]


def check_hypothesis_Hyz(mask: DomainMask, e: Sequence[float], y: Sequence[float], z: Sequence[float],
                         Ry: float, Rz: float, s_range: Sequence[float],
                         representatives: int = 8, validate: bool = True) -> HypothesisResult:
    """
    Test whether tube slices anchored at y and z stay a bounded geodesic distance apart.

    For every sampled s, the sup of d(y', z') over cells y' in B(y + s e, Ry)
    and z' in B(z + s e, Rz) is estimated from representative sources on both
    sides. The hypothesis is reported violated when this sup grows with s.

    Args:
        mask (DomainMask): domain
        e (sequence): direction
        y, z (sequence): anchors
        Ry, Rz (float): tube radii, above R(e, y) and R(e, z)
        s_range (sequence): sampled positions along e

    Returns:
        HypothesisResult: running sup per sample, verdict, and a witness when violated
    """
    qy, qz = DirectionQuery.of(e, y), DirectionQuery.of(e, z)
    if validate:
        for q, radius, name in ((qy, Ry, "Ry"), (qz, Rz, "Rz")):
            needed = compute_R(mask, q)
            if radius <= needed:
                raise PreconditionError(f"{name}={radius} must exceed R(e, anchor)={needed}")
    s_values = np.asarray(list(s_range), dtype=float)
    if s_values.size < 3:
        raise ValueError("s_range needs at least three samples")
    samples: List[Tuple[float, float]] = []
    pairs = []
    for s in s_values:
        ball_y = np.asarray(mask.kdtree.query_ball_point(qy.point([s])[0], Ry), dtype=np.int64)
        ball_z = np.asarray(mask.kdtree.query_ball_point(qz.point([s])[0], Rz), dtype=np.int64)
        if ball_y.size == 0 or ball_z.size == 0:
            raise PreconditionError(f"empty tube slice at s={s:.3g}")
        worst, pair = 0.0, None
        for sources, targets in ((ball_y, ball_z), (ball_z, ball_y)):
            reps = _representatives(np.sort(sources), representatives)
            dist = dijkstra(mask.graph, directed=False, indices=reps)[:, targets]
            if not np.all(np.isfinite(dist)):
                raise UnreachableError(f"tube slices disconnected at s={s:.3g}")
            k, m = np.unravel_index(int(np.argmax(dist)), dist.shape)
            if dist[k, m] > worst:
                worst = float(dist[k, m])
                pair = (mask.inside_points[reps[k]].tolist(), mask.inside_points[targets[m]].tolist())
        samples.append((float(s), worst))
        pairs.append(pair)
    sups = np.array([v for _, v in samples])
    third = max(1, sups.size // 3)
    growth = float(sups[-third:].max() - sups[:third].max())
    allowance = max(2.0 * (Ry + Rz) + 4 * mask.h, 0.25 * float(s_values[-1] - s_values[0]))
    worst_index = int(np.argmax(sups))
    if growth > allowance:
        witness = {"s": samples[worst_index][0], "pair": pairs[worst_index], "distance": float(sups[worst_index])}
        return HypothesisResult(False, float(sups.max()), samples, witness)
    return HypothesisResult(True, float(sups.max()), samples)


def clearance(mask: DomainMask) -> np.ndarray:
    """Distance from each inside cell center to the nearest outside cell face."""
    return ndimage.distance_transform_edt(mask.inside) * mask.h - 0.5 * mask.h


def boundary_cells(mask: DomainMask) -> np.ndarray:
    """Inside cells with an outside 4-neighbor (extent edges are not boundary)."""
    inside = mask.inside
    outside = ~inside
    touch = np.zeros_like(inside)
    touch[:, :-1] |= outside[:, 1:]
    touch[:, 1:] |= outside[:, :-1]
    touch[:-1, :] |= outside[1:, :]
    touch[1:, :] |= outside[:-1, :]
    return inside & touch


def interior_ball_radius(mask: DomainMask) -> float:
    """
    Discrete interior-ball certificate.

    Largest eps such that every boundary-adjacent inside cell lies within
    eps (plus half a cell) of a cell whose clearance is at least eps.
    Masks without any outside cell return half the smaller extent side.
    """
    xmin, xmax, ymin, ymax = mask.bounds
    if mask.inside.all():
        return 0.5 * min(xmax - xmin, ymax - ymin)
    clear = np.where(mask.inside, clearance(mask), -np.inf)
    boundary = boundary_cells(mask)
    half = 0.5 * mask.h

    def certified(eps: float) -> bool:
        core = clear >= eps - 1e-12
        if not core.any():
            return False
        reach = ndimage.distance_transform_edt(~core) * mask.h
        return bool(reach[boundary].max() <= eps + half + 1e-12)

    k_hi = int(math.floor(float(clear.max()) / half))
    lo, hi = 0, k_hi + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if certified(mid * half):
            lo = mid
        else:
            hi = mid
    return lo * half
