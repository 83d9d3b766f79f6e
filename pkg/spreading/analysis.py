"""
Numerical checks of the analytic constructions behind the speed bounds:
supersolution residuals of the cooperative operators, Dirichlet eigenvalues
on balls (the Rayleigh quotient and the half-cylinder lower bound), and the
equilibration of pure diffusion in a cusp.
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg, splu

import schemes

from .domain import DomainMask, cusp_profile, make_corridor, make_cusp, make_plane, square_extent
from .errors import EigenConvergenceError, PreconditionError, RegimeMismatchError, ResolutionError
from .params import KineticParams, linear_speed
from .solver import bump_initial
from .stencil import laplacian_neumann

logger = logging.getLogger(__name__)

J01 = 2.404825557695773
RESIDUAL_TOL = 1e-9
FD_STEP = 1e-6
FD_STEP_SECOND = 1e-4
CONSTRUCTIONS = ("ext_case1", "ext_case2", "heat_kernel_pair", "halfcyl_traveling")


def definition_operators(u, v, u_t, v_t, lap_u, lap_v, p: KineticParams):
    """
    Operators of the cooperative system, evaluated pointwise.

    L1 = u_t - d1 Δu - r1 u (1 - a1 - u + a1 v)
    L2 = v_t - d2 Δv - r2 (1 - v)(a2 u - v)

    A pair is a supersolution where both are nonnegative.
    """
    L1 = u_t - p.d1 * lap_u - p.r1 * u * (1.0 - p.a1 - u + p.a1 * v)
    L2 = v_t - p.d2 * lap_v - p.r2 * (1.0 - v) * (p.a2 * u - v)
    return L1, L2


@dataclass
class SampleSpec:
    """
    Where residuals are sampled.

    Attributes:
        n_along, n_transverse, n_time (int): sample counts for the exterior constructions
        along (tuple, optional): range of x.e, default (R0 - 10, R0 + 30)
        transverse (tuple): range of the transverse coordinate
        t_range (tuple): time range
        R0 (float): radius of the ball holding the obstacle and the initial support
        e (tuple): direction
        skip_band (float): relative band around branch switches left out
        extent_half (float): half-width of the plane used by heat_kernel_pair
        h (float): grid spacing used by heat_kernel_pair
        bump_radius (float): support radius of the heat initial datum
        kind (str): "evolved" (discrete heat flow) or "gaussian" (exact kernel)
        t0 (float): time shift of the gaussian kernel
        R (float): ball radius for halfcyl_traveling
        h_per_radius (int): resolution of the ball for halfcyl_traveling
        epsilon (float): speed deficit c' = linear_speed - epsilon
        eta (float): amplitude of the traveling subsolution
    """
    n_along: int = 50
    n_transverse: int = 50
    n_time: int = 20
    along: Optional[Tuple[float, float]] = None
    transverse: Tuple[float, float] = (-10.0, 10.0)
    t_range: Tuple[float, float] = (0.0, 5.0)
    R0: float = 5.0
    e: Tuple[float, float] = (1.0, 0.0)
    skip_band: float = 1e-6
    extent_half: float = 10.0
    h: float = 0.2
    bump_radius: float = 2.0
    kind: str = "evolved"
    t0: float = 1.0
    R: float = 6.0
    h_per_radius: int = 40
    epsilon: float = 0.5
    eta: float = 1e-3


@dataclass
class Residual:
    """
    Residual values of one construction.

    Attributes:
        construction (str): construction id
        L1, L2 (np.ndarray): operator values at kept samples
        points (np.ndarray): (x1, x2, t) of kept samples
        branch (np.ndarray): 1 exponential pair, 2 resident capped, 3 both capped
        min_value (float): smallest of L1 and L2
        argmin (dict): location and operator of the minimum
        skipped (int): samples inside the branch-switch band
        fd_error (float): largest relative gap between coded and finite-difference derivatives
    """
    construction: str
    L1: np.ndarray
    L2: np.ndarray
    points: np.ndarray
    branch: np.ndarray
    min_value: float
    argmin: Dict
    skipped: int = 0
    fd_error: float = 0.0

    @property
    def passed(self) -> bool:
        return self.min_value >= -RESIDUAL_TOL

    def branch_counts(self) -> Dict[int, int]:
        values, counts = np.unique(self.branch, return_counts=True)
        return {int(b): int(c) for b, c in zip(values, counts)}

    def to_dict(self) -> Dict:
        return {"construction": self.construction, "min_value": self.min_value, "argmin": self.argmin,
                "skipped": self.skipped, "fd_error": self.fd_error, "passed": self.passed,
                "samples": int(self.L1.size), "branches": self.branch_counts()}

    def to_json(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))
        return path


def _finish(construction: str, L1, L2, points, branch, skipped: int, fd_error: float) -> Residual:
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    both = np.concatenate((L1, L2))
    k = int(np.argmin(both))
    which, idx = ("L1", k) if k < L1.size else ("L2", k - L1.size)
    argmin = {"operator": which, "point": [float(x) for x in points[idx]], "branch": int(branch[idx])}
    if fd_error > 1e-5:
        logger.warning("%s: coded derivatives differ from finite differences by %.2e", construction, fd_error)
    return Residual(construction, L1, L2, points, branch, float(both[k]), argmin, skipped, fd_error)


def _branches(E: np.ndarray, a2: float, band: float) -> Tuple[np.ndarray, np.ndarray]:
    branch = np.where(a2 * E < 1.0, 1, np.where(E < 1.0, 2, 3))
    keep = (np.abs(a2 * E - 1.0) > band) & (np.abs(E - 1.0) > band)
    return branch, keep


def _capped_pair(E, E_t, lap_E, branch, p: KineticParams):
    """min((E, a2 E), (1, 1)) with its time derivatives and Laplacians, branch by branch."""
    one = branch == 3
    u = np.where(one, 1.0, E)
    u_t = np.where(one, 0.0, E_t)
    lap_u = np.where(one, 0.0, lap_E)
    exp_v = branch == 1
    v = np.where(exp_v, p.a2 * E, 1.0)
    v_t = np.where(exp_v, p.a2 * E_t, 0.0)
    lap_v = np.where(exp_v, p.a2 * lap_E, 0.0)
    return u, v, u_t, v_t, lap_u, lap_v


def _exterior_residual(construction: str, p: KineticParams, spec: SampleSpec, k: float) -> Residual:
    e = np.asarray(spec.e, dtype=float)
    e = e / np.hypot(*e)
    perp = np.array([-e[1], e[0]])
    along = spec.along or (spec.R0 - 10.0, spec.R0 + 30.0)
    s, y, t = np.meshgrid(np.linspace(*along, spec.n_along), np.linspace(*spec.transverse, spec.n_transverse),
                          np.linspace(*spec.t_range, spec.n_time), indexing="ij")
    s, y, t = s.ravel(), y.ravel(), t.ravel()

    def exponent(s_, t_):
        return np.exp(-k * (s_ - spec.R0) + 2.0 * p.r1 * t_)

    E = exponent(s, t)
    E_t = 2.0 * p.r1 * E
    lap_E = k * k * E
    fd_t = (exponent(s, t + FD_STEP) - exponent(s, t - FD_STEP)) / (2 * FD_STEP)
    hs = FD_STEP_SECOND
    fd_ss = (exponent(s + hs, t) - 2.0 * E + exponent(s - hs, t)) / (hs * hs)
    moderate = (E > 1e-12) & (E < 1e12)
    fd_error = 0.0
    if moderate.any():
        fd_error = float(max(np.max(np.abs(fd_t - E_t)[moderate] / E_t[moderate]),
                             np.max(np.abs(fd_ss - lap_E)[moderate] / lap_E[moderate])))
    branch, keep = _branches(E, p.a2, spec.skip_band)
    u, v, u_t, v_t, lap_u, lap_v = _capped_pair(E, E_t, lap_E, branch, p)
    L1, L2 = definition_operators(u, v, u_t, v_t, lap_u, lap_v, p)
    x = s[:, None] * e + y[:, None] * perp
    points = np.column_stack((x, t))
    return _finish(construction, L1[keep], L2[keep], points[keep], branch[keep],
                   int(np.count_nonzero(~keep)), fd_error)


def _heat_pair_residual(p: KineticParams, spec: SampleSpec) -> Residual:
    growth = p.r1 * (1.0 - p.a1)
    times = np.linspace(*spec.t_range, spec.n_time)
    L1s, L2s, pts, branches = [], [], [], []
    skipped = 0
    fd_error = 0.0
    mask = make_plane(square_extent(spec.extent_half), spec.h)
    X, Y = mask.centers()
    xs = X[mask.inside]
    ys = Y[mask.inside]

    def accumulate(t, w, w_t, lap_w):
        nonlocal skipped
        G = math.exp(growth * t)
        E = w * G
        E_t = (w_t + growth * w) * G
        lap_E = lap_w * G
        branch, keep = _branches(E, p.a2, spec.skip_band)
        u, v, u_t, v_t, lap_u, lap_v = _capped_pair(E, E_t, lap_E, branch, p)
        L1, L2 = definition_operators(u, v, u_t, v_t, lap_u, lap_v, p)
        L1s.append(L1[keep])
        L2s.append(L2[keep])
        branches.append(branch[keep])
        pts.append(np.column_stack((xs[keep], ys[keep], np.full(int(keep.sum()), t))))
        skipped += int(np.count_nonzero(~keep))

    if spec.kind == "gaussian":
        d = p.d1
        r2 = xs * xs + ys * ys

        def kernel(t_, r2_):
            tau_ = t_ + spec.t0
            return (spec.t0 / tau_) * np.exp(-r2_ / (4 * d * tau_))

        for t in times:
            tau = t + spec.t0
            w = kernel(t, r2)
            w_t = w * (-1.0 / tau + r2 / (4 * d * tau * tau))
            lap_w = w * (r2 / (4 * d * d * tau * tau) - 1.0 / (d * tau))
            big = w > 1e-8
            if big.any():
                fd_t = (kernel(t + FD_STEP, r2) - kernel(t - FD_STEP, r2)) / (2 * FD_STEP)
                hs = FD_STEP_SECOND
                r_ = np.sqrt(r2)
                fd_rr = (kernel(t, (r_ + hs) ** 2) - 2 * w + kernel(t, (r_ - hs) ** 2)) / (hs * hs)
                fd_r = (kernel(t, (r_ + hs) ** 2) - kernel(t, (r_ - hs) ** 2)) / (2 * hs)
                fd_lap = fd_rr + np.where(r_ > 0, fd_r / np.maximum(r_, 1e-300), fd_rr)
                scale = float(np.max(np.abs(w_t[big])))
                fd_error = max(fd_error, float(np.max(np.abs(fd_t - w_t)[big])) / scale,
                               float(np.max(np.abs(fd_lap - lap_w)[big])) / (scale / d))
            accumulate(t, w, w_t, lap_w)
    elif spec.kind == "evolved":
        # w_t is taken from the semi-discrete heat equation the grid field solves
        w = bump_initial(mask, (0.0, 0.0), spec.bump_radius).u0
        dt = 0.2 * spec.h * spec.h / p.d1
        t = 0.0
        for target in times:
            while t < target - 1e-12:
                step = min(dt, target - t)
                w = w + step * p.d1 * laplacian_neumann(w, mask)
                t += step
            lap_w = laplacian_neumann(w, mask)
            w_t = p.d1 * lap_w
            accumulate(t, w[mask.inside], w_t[mask.inside], lap_w[mask.inside])
    else:
        raise ValueError(f"unknown heat kernel kind '{spec.kind}'")
    return _finish("heat_kernel_pair", np.concatenate(L1s), np.concatenate(L2s), np.vstack(pts),
                   np.concatenate(branches), skipped, fd_error)


def _halfcyl_residual(p: KineticParams, spec: SampleSpec) -> Residual:
    R = spec.R
    h = R / spec.h_per_radius
    c_prime = linear_speed(p) - spec.epsilon
    if not 0 < spec.epsilon <= linear_speed(p):
        raise PreconditionError("epsilon must lie in (0, linear_speed]")
    pair = ball_eigenpair(R, h, d1=p.d1)
    ball = pair.operator
    e = np.asarray(spec.e, dtype=float)
    e = e / np.hypot(*e)
    X, Y = pair.mask.centers()
    psi = pair.field.ravel()[ball.cells]
    xs = X.ravel()[ball.cells]
    ys = Y.ravel()[ball.cells]
    w0 = spec.eta * np.exp(-c_prime * (xs * e[0] + ys * e[1]) / (2 * p.d1)) * psi
    lap = -(ball.matrix @ w0)
    grad_e = e[0] * ball.derivative(w0, 0) + e[1] * ball.derivative(w0, 1)
    positive = w0 > 0
    normalized = (p.d1 * lap + c_prime * grad_e)[positive] / w0[positive] + p.r1 * (1.0 - p.a1 - w0[positive])
    points = np.column_stack((xs[positive], ys[positive], np.zeros(int(positive.sum()))))
    return _finish("halfcyl_traveling", normalized, np.zeros(0), points,
                   np.ones(int(positive.sum()), dtype=int), 0, 0.0)


def supersolution_residual(construction: str, p: KineticParams, spec: Optional[SampleSpec] = None,
                           enforce_regime: bool = True) -> Residual:
    """
    Evaluate a construction under the cooperative operators on a sample.

    Constructions:
        ext_case1: min((E, a2 E), (1, 1)), E = exp(-sqrt(r1/d1)(x.e - R0) + 2 r1 t); needs 2 d1 >= d2
        ext_case2: the same with rate sqrt(2 r1/d2); needs 2 d1 < d2
        heat_kernel_pair: min((w G, a2 w G), (1, 1)), G = exp(r1(1-a1)t), w a heat solution; needs d1 = d2, a1 a2 <= 1
        halfcyl_traveling: eta exp(-c'(x.e)/(2 d1)) psi_R on the ball, residual divided by the function

    Args:
        construction (str): construction id
        p (KineticParams): kinetic parameters
        spec (SampleSpec, optional): sample description
        enforce_regime (bool): raise when the parameters miss the construction's hypothesis

    Returns:
        Residual: values, minimum and its location

    Raises:
        RegimeMismatchError: hypothesis not met while enforce_regime is set
    """
    spec = spec or SampleSpec()
    if construction not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction '{construction}', available: {', '.join(CONSTRUCTIONS)}")
    if construction == "ext_case1":
        if enforce_regime and not 2 * p.d1 >= p.d2:
            raise RegimeMismatchError(f"ext_case1 needs 2 d1 >= d2 (d1={p.d1}, d2={p.d2})")
        return _exterior_residual(construction, p, spec, math.sqrt(p.r1 / p.d1))
    if construction == "ext_case2":
        if enforce_regime and not 2 * p.d1 < p.d2:
            raise RegimeMismatchError(f"ext_case2 needs 2 d1 < d2 (d1={p.d1}, d2={p.d2})")
        return _exterior_residual(construction, p, spec, math.sqrt(2 * p.r1 / p.d2))
    if construction == "heat_kernel_pair":
        if enforce_regime and (p.d1 != p.d2 or p.a1 * p.a2 > 1.0 + 1e-12):
            raise RegimeMismatchError("heat_kernel_pair needs d1 == d2 and a1 a2 <= 1")
        return _heat_pair_residual(p, spec)
    return _halfcyl_residual(p, spec)


# ---------------------------------------------------------------------------
# eigenvalues


@dataclass
class BallOperator:
    """
    -Δ on the cells of a mask inside an open ball.

    Faces crossing the sphere carry a Dirichlet condition through the cut-cell
    coefficient 1/(theta h^2), theta the fraction of the face segment inside
    the ball; faces toward outside cells of the mask are zero-flux.
    """
    matrix: sparse.csr_matrix
    cells: np.ndarray
    shape: Tuple[int, int]
    h: float
    neighbors: Dict[Tuple[int, int], Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def derivative(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Three-point derivative on the ball cells with zero at the sphere; one-sided at zero-flux faces."""
        plus = (0, 1) if axis == 0 else (1, 0)
        minus = (0, -1) if axis == 0 else (-1, 0)
        out = np.zeros_like(values)
        (i_p, th_p), (i_m, th_m) = self.neighbors[plus], self.neighbors[minus]
        f_p = np.where(i_p >= 0, values[np.maximum(i_p, 0)], 0.0)
        f_m = np.where(i_m >= 0, values[np.maximum(i_m, 0)], 0.0)
        a = th_m * self.h
        b = th_p * self.h
        open_p = np.isfinite(th_p)
        open_m = np.isfinite(th_m)
        both = open_p & open_m
        out[both] = (-b[both] / (a[both] * (a[both] + b[both])) * f_m[both]
                     + (b[both] - a[both]) / (a[both] * b[both]) * values[both]
                     + a[both] / (b[both] * (a[both] + b[both])) * f_p[both])
        only_p = open_p & ~open_m
        out[only_p] = (f_p[only_p] - values[only_p]) / b[only_p]
        only_m = open_m & ~open_p
        out[only_m] = (values[only_m] - f_m[only_m]) / a[only_m]
        return out


def ball_operator(mask: DomainMask, center: Sequence[float], radius: float) -> BallOperator:
    X, Y = mask.centers()
    dx, dy = X - center[0], Y - center[1]
    ball = mask.inside & (np.hypot(dx, dy) < radius)
    if not ball.any():
        raise PreconditionError(f"ball of radius {radius} around {tuple(center)} holds no inside cell")
    index = np.full(mask.shape, -1, dtype=np.int64)
    cells = np.flatnonzero(ball.ravel())
    index.ravel()[cells] = np.arange(cells.size)
    n = cells.size
    jj, ii = np.divmod(cells, mask.nx)
    h = mask.h
    diag = np.zeros(n)
    rows, cols = [], []
    neighbors = {}
    for dj, di in ((0, 1), (0, -1), (1, 0), (-1, 0)):
        nj, ni = jj + dj, ii + di
        on_grid = (nj >= 0) & (nj < mask.ny) & (ni >= 0) & (ni < mask.nx)
        nj_c, ni_c = np.clip(nj, 0, mask.ny - 1), np.clip(ni, 0, mask.nx - 1)
        in_mask = on_grid & mask.inside[nj_c, ni_c]
        in_ball = on_grid & ball[nj_c, ni_c]
        theta = np.full(n, np.inf)
        theta[in_ball] = 1.0
        cut = in_mask & ~in_ball
        a = (dx[jj, ii] if di else dy[jj, ii])[cut]
        b = (dy[jj, ii] if di else dx[jj, ii])[cut]
        step = di if di else dj
        reach = np.sqrt(np.maximum(radius * radius - b * b, 0.0)) - a * step
        theta[cut] = np.clip(reach / h, 1e-2, 1.0)
        diag[in_ball] += 1.0 / (h * h)
        diag[cut] += 1.0 / (theta[cut] * h * h)
        rows.append(np.flatnonzero(in_ball))
        cols.append(index[nj_c, ni_c][in_ball])
        neighbors[(dj, di)] = (np.where(in_ball, index[nj_c, ni_c], -1), theta)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    off = sparse.coo_matrix((np.full(rows.size, -1.0 / (h * h)), (rows, cols)), shape=(n, n))
    matrix = (sparse.diags(diag) + off).tocsr()
    return BallOperator(matrix, cells, mask.shape, h, neighbors)


def smallest_eigenpair(matrix: sparse.csr_matrix, tol: float = 1e-8, max_iter: int = 500,
                       linear_solver: str = "cg") -> Tuple[float, np.ndarray, int]:
    """
    Inverse power iteration for the smallest eigenvalue of a symmetric positive-definite matrix.

    Raises:
        EigenConvergenceError: inner solve failure or no convergence within max_iter
    """
    n = matrix.shape[0]
    x = np.ones(n) / math.sqrt(n)
    factor = splu(matrix.tocsc()) if linear_solver == "direct" else None
    lam = float(x @ (matrix @ x))
    for k in range(1, max_iter + 1):
        if factor is not None:
            y = factor.solve(x)
        else:
            y, info = cg(matrix, x, x0=x / lam, rtol=min(1e-12, 1e-3 * tol), atol=0.0, maxiter=20 * n)
            if info != 0:
                raise EigenConvergenceError(f"inner conjugate gradient failed (info={info}) at iteration {k}")
        x = y / np.linalg.norm(y)
        new = float(x @ (matrix @ x))
        if abs(new - lam) <= tol * abs(new):
            return new, x, k
        lam = new
    raise EigenConvergenceError(f"inverse iteration did not reach relative tolerance {tol} in {max_iter} steps")


def rayleigh_eigenvalue(mask: DomainMask, z: Sequence[float], r: float, tol: float = 1e-8,
                        linear_solver: str = "cg") -> float:
    """
    Smallest eigenvalue of -Δ on the mask cells inside B(z, r).

    Dirichlet on the sphere and zero flux on the mask boundary, matching
    test functions that vanish near the sphere and are free on the boundary.
    """
    operator = ball_operator(mask, z, r)
    value, _, iterations = smallest_eigenpair(operator.matrix, tol, linear_solver=linear_solver)
    logger.debug("lambda(z=%s, r=%g) = %.8g after %d iterations", tuple(z), r, value, iterations)
    return value


@dataclass
class BallEigenpair:
    """First Dirichlet eigenpair of -d1 Δ on a disk; field has sup 1 and vanishes off the disk."""
    eigenvalue: float
    field: np.ndarray
    mask: DomainMask
    operator: BallOperator
    iterations: int


def _disk_mask(R: float, h: float) -> DomainMask:
    half = h * math.ceil(R / h + 2)
    return make_plane(square_extent(half), h)


def ball_eigenpair(R: float, h: float, tol: float = 1e-8, d1: float = 1.0,
                   linear_solver: str = "cg") -> BallEigenpair:
    """
    First Dirichlet eigenpair of -d1 Δ on the disk of radius R centered at the origin.

    Raises:
        ResolutionError: if R/h < 20
    """
    if R / h < 20 - 1e-9:
        raise ResolutionError(f"R/h={R / h:.3g} below 20")
    mask = _disk_mask(R, h)
    operator = ball_operator(mask, (0.0, 0.0), R)
    value, vector, iterations = smallest_eigenpair(operator.matrix, tol, linear_solver=linear_solver)
    vector = vector if vector.sum() > 0 else -vector
    field_ = np.zeros(mask.shape)
    field_.ravel()[operator.cells] = vector / np.max(vector)
    return BallEigenpair(d1 * value, field_, mask, operator, iterations)


def _ball_eigenvalue(R: float, h_per_radius: int, d1: float, tol: float) -> float:
    return ball_eigenpair(R, R / h_per_radius, tol, d1).eigenvalue


def min_R0_for_epsilon(p: KineticParams, epsilon: float, h_per_radius: int = 40, tol: float = 1e-3,
                       eig_tol: float = 1e-8) -> float:
    """
    Smallest R with lambda_R + (linear_speed - epsilon)^2 / (4 d1) < r1 (1 - a1).

    Bisection on R over ball eigenvalues computed at a fixed number of
    cells per radius, to relative width tol.
    """
    c_lin = linear_speed(p)
    if not 0 < epsilon <= c_lin:
        raise PreconditionError(f"epsilon must lie in (0, {c_lin:.6g}], got {epsilon}")
    budget = p.r1 * (1.0 - p.a1) - (c_lin - epsilon) ** 2 / (4.0 * p.d1)

    def holds(R: float) -> bool:
        return _ball_eigenvalue(R, h_per_radius, p.d1, eig_tol) < budget

    hi = math.sqrt(p.d1 / budget)
    while not holds(hi):
        hi *= 2.0
        if hi > 1e4:
            raise EigenConvergenceError("no radius up to 1e4 satisfies the eigenvalue inequality")
    lo = hi / 2.0
    while holds(lo):
        lo /= 2.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def rayleigh_radius_for_bound(mask: DomainMask, z: Sequence[float], p: KineticParams,
                              tol: Optional[float] = None) -> float:
    """
    Smallest R with lambda_{2R}^z <= r1 (1 - a1) / (2 d1), by bisection on the Rayleigh curve.

    Raises:
        PreconditionError: if balls up to the extent never satisfy the bound
    """
    target = p.r1 * (1.0 - p.a1) / (2.0 * p.d1)
    tol = mask.h / 2 if tol is None else tol
    xmin, xmax, ymin, ymax = mask.bounds
    limit = 0.5 * math.hypot(xmax - xmin, ymax - ymin)

    def holds(R: float) -> bool:
        try:
            return rayleigh_eigenvalue(mask, z, 2.0 * R) <= target
        except PreconditionError:
            return False

    hi = 2.0 * mask.h
    while not holds(hi):
        hi *= 2.0
        if hi > limit:
            raise PreconditionError(f"no ball around {tuple(z)} within the extent reaches the bound {target:.4g}")
    lo = hi / 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class EigenCurve:
    """(R, lambda_R) rows for -d1 Δ on disks at fixed cells per radius."""
    rows: List[Tuple[float, float]]
    decreasing: bool
    scaling_error: float

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["R", "lambda_R"])
            for R, lam in self.rows:
                writer.writerow([repr(float(R)), repr(float(lam))])
        return path


def eigenvalue_curve(R_list: Sequence[float], h_per_radius: int = 40, d1: float = 1.0,
                     tol: float = 1e-8) -> EigenCurve:
    """Eigenvalues over radii; scaling_error is the spread of lambda_R R^2 relative to its mean."""
    rows = [(float(R), _ball_eigenvalue(float(R), h_per_radius, d1, tol)) for R in sorted(R_list)]
    values = np.array([lam for _, lam in rows])
    scaled = np.array([lam * R * R for R, lam in rows])
    decreasing = bool(np.all(np.diff(values) < 0))
    spread = float((scaled.max() - scaled.min()) / scaled.mean())
    return EigenCurve(rows, decreasing, spread)


# ---------------------------------------------------------------------------
# cusp equilibration


@dataclass
class CuspReport:
    """
    Equilibration times of pure diffusion on truncated cusps and on uniform corridors.

    Attributes:
        rows (list): (L, T_cusp, T_corridor)
        ratios (list): (L, T_cusp(2L)/T_cusp(L), T_corridor(2L)/T_corridor(L))
        increasing (bool): T_cusp increases with L
        delta_fraction (float): threshold as a fraction of the conserved mean
    """
    rows: List[Tuple[float, float, float]]
    ratios: List[Tuple[float, float, float]]
    increasing: bool
    delta_fraction: float

    @property
    def faster_than_corridor(self) -> bool:
        return bool(self.ratios) and all(cusp < corridor for _, cusp, corridor in self.ratios)

    def to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["L", "T", "T_corridor"])
            for row in self.rows:
                writer.writerow([repr(float(x)) for x in row])
        return path

    def to_dict(self) -> Dict:
        return asdict(self)


def equilibration_time(mask: DomainMask, p: KineticParams, delta_fraction: float, dt: float,
                       t_max: float, center: Sequence[float], radius: float,
                       linear_solver: Optional[str] = None) -> float:
    """First time min w >= delta_fraction * mean(w) under backward Euler diffusion; inf if never."""
    w = bump_initial(mask, center, radius).u0
    inside = mask.inside
    mean = float(w[inside].mean())
    scheme = schemes.ImexScheme(mask, p, dt=min(dt, schemes.ImexScheme.stable_dt(mask, p)), linear_solver=linear_solver)
    t = 0.0
    with scheme:
        while t < t_max:
            if float(w[inside].min()) >= delta_fraction * mean:
                return t
            w = scheme.diffuse(w, p.d1, scheme.dt)
            t += scheme.dt
    logger.warning("diffusion did not equilibrate on %s within t=%g", mask.descriptor.get("generator"), t_max)
    return math.inf


def cusp_equilibration_check(p: KineticParams, A: float = 0.0, floor_width: float = 0.01,
                             lengths: Sequence[float] = (0.0, 1.0, 2.0), h: float = 0.01,
                             delta_fraction: float = 0.5, dt: float = 0.01, t_max: float = 200.0,
                             linear_solver: Optional[str] = None) -> CuspReport:
    """
    Equilibration curve T(L) on cusps truncated at length L, with a corridor control.

    The corridor keeps the cusp entry half-width over the same length, so
    both differ only in how the channel narrows.
    """
    entry = max(float(cusp_profile(A)), floor_width)
    rows = []
    for L in lengths:
        extent = (A - 1.0, A + max(L, h), -1.0, 1.0)
        cusp = make_cusp(A, extent, h, floor_width, length=L)
        corridor = make_corridor(A, extent, h, entry, length=L)
        seed = (A - 0.5, 0.0)
        t_cusp = equilibration_time(cusp, p, delta_fraction, dt, t_max, seed, 0.4, linear_solver)
        t_corr = equilibration_time(corridor, p, delta_fraction, dt, t_max, seed, 0.4, linear_solver)
        logger.info("L=%g: T_cusp=%.4g T_corridor=%.4g", L, t_cusp, t_corr)
        rows.append((float(L), t_cusp, t_corr))
    times = {L: (tc, tr) for L, tc, tr in rows}
    ratios = []
    for L in sorted(times):
        if L > 0 and 2 * L in times:
            (c1, r1_), (c2, r2_) = times[L], times[2 * L]
            ratios.append((L, c2 / c1, r2_ / r1_))
    ordered = [tc for _, tc, _ in sorted(rows)]
    increasing = bool(np.all(np.diff(ordered) > 0))
    return CuspReport(rows, ratios, increasing, delta_fraction)
