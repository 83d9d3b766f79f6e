import os
import logging
from typing import Tuple

import numpy as np
from dotenv import load_dotenv
from scipy import sparse
from scipy.sparse.linalg import cg, splu

from spreading.domain import DomainMask
from spreading.errors import LinearSolveError
from spreading.kinetics import reaction_rates
from spreading.params import KineticParams
from spreading.stencil import neumann_matrix

# Load .env file from the project root directory
load_dotenv(dotenv_path=os.path.join(os.path.dirname(os.path.dirname(__file__)), '.env'))

CFL_SAFETY = os.getenv("LVS_CFL_SAFETY", "0.9")
LINEAR_SOLVER = os.getenv("LVS_LINEAR_SOLVER", "direct")
RESIDUAL_TOL = 1e-10

logger = logging.getLogger(__name__)


class ImexScheme:
    """
    Backward Euler diffusion with forward Euler reaction.

    The implicit matrix I - dt d L is an M-matrix with unit row sums, so its
    inverse maps [0,1] into itself; the explicit reaction keeps the states in
    [0,1] as long as dt r_s (1 + a_s) <= 1. Only the reaction bounds the step,
    which is what fine grids need.

    Attributes:
        mask (DomainMask): the domain
        params (KineticParams): kinetic parameters
        dt (float): time step
        linear_solver (str): "direct" (sparse LU, factored once) or "cg"
    """
    name = "imex"

    def __init__(self, mask: DomainMask, params: KineticParams, dt: float = None,
                 cfl_safety: float = None, workers: int = 1, linear_solver: str = None):
        self.mask = mask
        self.params = params
        safety = float(cfl_safety if cfl_safety is not None else CFL_SAFETY)
        limit = self.stable_dt(mask, params, 1.0)
        self.dt = float(dt) if dt is not None else safety * limit
        if self.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt={self.dt:.4g} exceeds the reaction step limit {limit:.4g}")
        self.linear_solver = (linear_solver or LINEAR_SOLVER).lower()
        if self.linear_solver not in ("direct", "cg"):
            raise ValueError(f"unknown linear solver '{self.linear_solver}'")
        self.workers = workers
        self.laplacian = neumann_matrix(mask)
        self._flat = mask.inside_flat
        self._systems = {}

    @staticmethod
    def stable_dt(mask: DomainMask, params: KineticParams, safety: float = 1.0) -> float:
        """Reaction-only step bound: safety / max_s r_s (1 + a_s)."""
        return safety / max(params.r1 * (1.0 + params.a1), params.r2 * (1.0 + params.a2))

    def _system(self, d: float, dt: float):
        key = (d, dt)
        if key not in self._systems:
            n = self._flat.size
            matrix = (sparse.identity(n, format="csr") - (dt * d) * self.laplacian).tocsc()
            factor = splu(matrix) if self.linear_solver == "direct" else None
            self._systems[key] = (matrix, factor)
        return self._systems[key]

    def _solve(self, d: float, dt: float, rhs: np.ndarray, guess: np.ndarray) -> np.ndarray:
        matrix, factor = self._system(d, dt)
        try:
            if factor is not None:
                x = factor.solve(rhs)
            else:
                x, info = cg(matrix, rhs, x0=guess, rtol=1e-13, atol=0.0, maxiter=10 * rhs.size)
                if info != 0:
                    raise LinearSolveError(f"conjugate gradient did not converge (info={info})")
        except RuntimeError as exc:
            raise LinearSolveError(f"implicit diffusion solve failed: {exc}") from exc
        residual = float(np.max(np.abs(matrix @ x - rhs)))
        if residual > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(rhs)))):
            raise LinearSolveError(f"implicit diffusion residual {residual:.3e} above tolerance")
        return x

    def step(self, u: np.ndarray, v: np.ndarray, dt: float = None) -> Tuple[np.ndarray, np.ndarray]:
        dt = self.dt if dt is None else dt
        p = self.params
        uu = u.ravel()[self._flat]
        vv = v.ravel()[self._flat]
        f, g = reaction_rates(uu, vv, p)
        u_out = np.zeros_like(u)
        v_out = np.zeros_like(v)
        u_out.ravel()[self._flat] = self._solve(p.d1, dt, uu + dt * f, uu)
        v_out.ravel()[self._flat] = self._solve(p.d2, dt, vv + dt * g, vv)
        return u_out, v_out

    def diffuse(self, w: np.ndarray, d: float, dt: float = None) -> np.ndarray:
        """One backward Euler step of pure diffusion w_t = d Δw."""
        dt = self.dt if dt is None else dt
        ww = w.ravel()[self._flat]
        out = np.zeros_like(w)
        out.ravel()[self._flat] = self._solve(d, dt, ww, ww)
        return out

    def close(self):
        self._systems.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
