import os
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np
from dotenv import load_dotenv

from spreading.domain import DomainMask
from spreading.params import KineticParams
from spreading.stencil import face_weights, laplacian_rows

# Load .env file from the project root directory
load_dotenv(dotenv_path=os.path.join(os.path.dirname(os.path.dirname(__file__)), '.env'))

CFL_SAFETY = os.getenv("LVS_CFL_SAFETY", "0.9")
TILE_ROWS = os.getenv("LVS_TILE_ROWS", "64")

logger = logging.getLogger(__name__)


class ExplicitScheme:
    """
    Forward Euler on diffusion plus reaction, applied tile by tile.

    Under the step bound returned by stable_dt every update is a monotone
    combination of the previous values, so the discrete comparison principle
    holds and [0,1] is preserved without clamping. Tiles are fixed row slabs
    that do not depend on the worker count, and each tile writes a disjoint
    slice of the output from the read-only previous state.

    Attributes:
        mask (DomainMask): the domain
        params (KineticParams): kinetic parameters
        dt (float): time step
        workers (int): number of threads used for tiles
        tiles (List[Tuple[int, int]]): row ranges updated independently
    """
    name = "explicit"

    def __init__(self, mask: DomainMask, params: KineticParams, dt: float = None,
                 cfl_safety: float = None, workers: int = 1, tile_rows: int = None):
        self.mask = mask
        self.params = params
        safety = float(cfl_safety if cfl_safety is not None else CFL_SAFETY)
        limit = self.stable_dt(mask, params, 1.0)
        self.dt = float(dt) if dt is not None else safety * limit
        if self.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt={self.dt:.4g} exceeds the monotonicity limit {limit:.4g}")
        self.weights = face_weights(mask)
        self.inv_h2 = 1.0 / (mask.h * mask.h)
        rows = int(tile_rows if tile_rows is not None else TILE_ROWS)
        self.tiles: List[Tuple[int, int]] = [(j, min(j + rows, mask.ny)) for j in range(0, mask.ny, rows)]
        self.workers = max(1, int(workers))
        self._pool = ThreadPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        logger.debug("explicit scheme dt=%.4g tiles=%d workers=%d", self.dt, len(self.tiles), self.workers)

    @staticmethod
    def stable_dt(mask: DomainMask, params: KineticParams, safety: float = 1.0) -> float:
        """Largest monotone step: safety / max_s(4 d_s / h^2 + r_s (1 + a_s))."""
        h2 = mask.h * mask.h
        rate = max(4.0 * params.d1 / h2 + params.r1 * (1.0 + params.a1),
                   4.0 * params.d2 / h2 + params.r2 * (1.0 + params.a2))
        return safety / rate

    def _update(self, tile, up, vp, u_out, v_out, dt):
        j0, j1 = tile
        p = self.params
        u = up[j0 + 1:j1 + 1, 1:-1]
        v = vp[j0 + 1:j1 + 1, 1:-1]
        lap_u = laplacian_rows(up, self.weights, j0, j1, self.inv_h2)
        lap_v = laplacian_rows(vp, self.weights, j0, j1, self.inv_h2)
        u_out[j0:j1] = u + dt * (p.d1 * lap_u + p.r1 * u * (1.0 - u - p.a1 * v))
        v_out[j0:j1] = v + dt * (p.d2 * lap_v + p.r2 * v * (1.0 - v - p.a2 * u))

    def step(self, u: np.ndarray, v: np.ndarray, dt: float = None) -> Tuple[np.ndarray, np.ndarray]:
        dt = self.dt if dt is None else dt
        up = np.pad(u, 1, mode="edge")
        vp = np.pad(v, 1, mode="edge")
        u_out = np.empty_like(u)
        v_out = np.empty_like(v)
        if self._pool is None:
            for tile in self.tiles:
                self._update(tile, up, vp, u_out, v_out, dt)
        else:
            list(self._pool.map(lambda tile: self._update(tile, up, vp, u_out, v_out, dt), self.tiles))
        return u_out, v_out

    def diffuse(self, w: np.ndarray, d: float, dt: float = None) -> np.ndarray:
        """One explicit step of pure diffusion w_t = d Δw."""
        dt = self.dt if dt is None else dt
        wp = np.pad(w, 1, mode="edge")
        return w + dt * d * laplacian_rows(wp, self.weights, 0, self.mask.ny, self.inv_h2)

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
