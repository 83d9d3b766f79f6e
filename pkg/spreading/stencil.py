"""
Finite-volume 5-point stencil with zero flux across every face that
separates an inside cell from an outside cell or the extent edge.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .domain import DomainMask


@dataclass(frozen=True)
class FaceWeights:
    """1.0 where the face between a cell and its neighbor is open, else 0.0."""
    east: np.ndarray
    west: np.ndarray
    north: np.ndarray
    south: np.ndarray


def face_weights(mask: DomainMask) -> FaceWeights:
    inside = mask.inside
    east = np.zeros(inside.shape)
    west = np.zeros(inside.shape)
    north = np.zeros(inside.shape)
    south = np.zeros(inside.shape)
    horizontal = inside[:, :-1] & inside[:, 1:]
    vertical = inside[:-1, :] & inside[1:, :]
    east[:, :-1] = horizontal
    west[:, 1:] = horizontal
    north[:-1, :] = vertical
    south[1:, :] = vertical
    return FaceWeights(east, west, north, south)


def laplacian_rows(padded: np.ndarray, weights: FaceWeights, j0: int, j1: int, inv_h2: float) -> np.ndarray:
    """Discrete Laplacian on rows [j0, j1) from an edge-padded field."""
    c = padded[j0 + 1:j1 + 1, 1:-1]
    rows = slice(j0, j1)
    flux = (weights.east[rows] * (padded[j0 + 1:j1 + 1, 2:] - c)
            + weights.west[rows] * (padded[j0 + 1:j1 + 1, :-2] - c)
            + weights.north[rows] * (padded[j0 + 2:j1 + 2, 1:-1] - c)
            + weights.south[rows] * (padded[j0:j1, 1:-1] - c))
    return flux * inv_h2


def laplacian_neumann(field: np.ndarray, mask: DomainMask, weights: FaceWeights = None) -> np.ndarray:
    """
    Zero-flux 5-point Laplacian of a cell field on the mask.

    Values on outside cells are ignored and the result there is 0. Face
    fluxes telescope, so the sum over inside cells vanishes up to rounding.
    """
    weights = weights or face_weights(mask)
    values = np.where(mask.inside, field, 0.0)
    padded = np.pad(values, 1, mode="edge")
    lap = laplacian_rows(padded, weights, 0, mask.ny, 1.0 / (mask.h * mask.h))
    return np.where(mask.inside, lap, 0.0)


def neumann_matrix(mask: DomainMask) -> sparse.csr_matrix:
    """Sparse zero-flux Laplacian on the inside cells, ordered like mask.inside_flat."""
    index = mask.node_index
    inside = mask.inside
    rows, cols = [], []
    for a, b in ((inside[:, :-1] & inside[:, 1:], (slice(None), slice(1, None))),
                 (inside[:-1, :] & inside[1:, :], (slice(1, None), slice(None)))):
        src = index[:a.shape[0], :a.shape[1]][a]
        dst = index[b][a]
        rows.extend([src, dst])
        cols.extend([dst, src])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    n = mask.inside_flat.size
    adjacency = sparse.coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n)).tocsr()
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    return ((adjacency - sparse.diags(degree)) / (mask.h * mask.h)).tocsr()
