"""Radial finite-difference operators.

The derivative lives on the staggered faces r_{i+1/2}.  A fourth-order
four-point stencil gives (Du)_{i+1/2}; the origin uses the even ghost
u_{-1} = u_1 and the far end the linear ghost u_N = 2 u_{N-1} - u_{N-2}.
The stiffness matrix K = D^T S D with face weights S = sigma_n r^(n-1) h
defines both the gradient energy ||Du||^2 = u^T K u and the Laplacian
Delta u = -W^{-1} K u, so summation by parts holds to round-off and the
discrete Euler-Lagrange residual is the exact gradient of the discrete
energy.

For n = 3 the origin weight is zero and the origin value is not an
unknown: it is reconstructed by even extrapolation,
u_0 = (15 u_1 - 6 u_2 + u_3) / 10 (exact for a + b r^2 + c r^4), and the
derivative stencil reads it through that formula.  The Laplacian reported
at r = 0 is the same extrapolation of the neighbouring values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solveh_banded

from .model import GridMismatchError, RadialField, RadialGrid

# four-point staggered first derivative, scaled by 1/(24 h)
_FACE_STENCIL = np.array([1.0, -27.0, 27.0, -1.0]) / 24.0
HALF_BANDWIDTH = 3
# even extrapolation to r = 0 from nodes 1, 2, 3
ORIGIN_EXTRAPOLATION = np.array([1.5, -0.6, 0.1])


def _derivative_matrix(num_points: int, h: float) -> sp.csr_matrix:
    nf = num_points - 1
    faces = np.arange(nf)
    rows, cols, vals = [], [], []
    for k, offset in enumerate((-1, 0, 1, 2)):
        j = faces + offset
        coef = _FACE_STENCIL[k] / h
        inside = (j >= 0) & (j <= num_points - 1)
        rows.append(faces[inside])
        cols.append(j[inside])
        vals.append(np.full(inside.sum(), coef))
        below = j < 0
        if below.any():
            rows.append(faces[below])
            cols.append(np.ones(below.sum(), dtype=int))
            vals.append(np.full(below.sum(), coef))
        above = j > num_points - 1
        if above.any():
            f = faces[above]
            rows += [f, f]
            cols += [np.full(f.size, num_points - 1), np.full(f.size, num_points - 2)]
            vals += [np.full(f.size, 2 * coef), np.full(f.size, -coef)]
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nf, num_points),
    )


def _fold_origin(D: sp.csr_matrix) -> sp.csr_matrix:
    """Replace the origin column by its extrapolation from nodes 1..3."""
    D = D.tolil()
    col0 = D[:, 0].toarray().ravel()
    for k, c in enumerate(ORIGIN_EXTRAPOLATION):
        D[:, k + 1] = D[:, k + 1].toarray().ravel()[:, None] + c * col0[:, None]
    D[:, 0] = 0.0
    return D.tocsr()


@dataclass(frozen=True, eq=False)
class RadialOperator:
    """Discrete radial Laplacian with its derivative and stiffness matrices.

    `stiffness` is a symmetric 7-band matrix; `laplacian_matrix` is the
    banded stencil -W^{-1} K on nodes with positive weight.
    """

    grid: RadialGrid
    derivative: sp.csr_matrix = field(repr=False)
    face_weights: np.ndarray = field(repr=False)
    stiffness: sp.csr_matrix = field(repr=False)
    bands: np.ndarray = field(repr=False)

    @property
    def reconstructed_origin(self) -> bool:
        return self.grid.quad_weights[0] == 0.0

    @property
    def first_free(self) -> int:
        return 1 if self.reconstructed_origin else 0

    @property
    def laplacian_matrix(self) -> sp.csr_matrix:
        w = np.asarray(self.grid.quad_weights)
        inv = np.zeros_like(w)
        inv[w > 0] = 1.0 / w[w > 0]
        return (-sp.diags(inv) @ self.stiffness).tocsr()


def _build_operator(grid: RadialGrid) -> RadialOperator:
    n, N, h = grid.n, grid.num_points, grid.spacing
    D = _derivative_matrix(N, h)
    if grid.quad_weights[0] == 0.0:
        D = _fold_origin(D)
    faces = (np.asarray(grid.nodes[:-1]) + np.asarray(grid.nodes[1:])) / 2
    S = grid.sphere_factor * faces ** (n - 1) * h
    K = (D.T @ sp.diags(S) @ D).tocsr()
    K = ((K + K.T) / 2).tocsr()
    K.eliminate_zeros()
    S.setflags(write=False)
    # upper banded storage of K for scipy.linalg.solveh_banded
    bands = np.zeros((HALF_BANDWIDTH + 1, N))
    for k in range(HALF_BANDWIDTH + 1):
        bands[HALF_BANDWIDTH - k, k:] = K.diagonal(k)
    bands.setflags(write=False)
    return RadialOperator(grid, D, S, K, bands)


@lru_cache(maxsize=32)
def radial_operator(grid: RadialGrid) -> RadialOperator:
    """The (cached) operator for a grid."""
    return _build_operator(grid)


def _values(f) -> np.ndarray:
    return np.asarray(f.values if isinstance(f, RadialField) else f, dtype=float)


def origin_value(values: np.ndarray) -> float:
    return float(np.dot(ORIGIN_EXTRAPOLATION, np.asarray(values)[1:4]))


def conform(op: RadialOperator, values: np.ndarray) -> np.ndarray:
    """Admissible nodal values: u(r_max) = 0 and, for n = 3, the reconstructed origin."""
    values = np.array(values, dtype=float)
    values[-1] = 0.0
    if op.reconstructed_origin:
        values[0] = origin_value(values)
    return values


def laplacian_values(op: RadialOperator, values: np.ndarray) -> np.ndarray:
    w = np.asarray(op.grid.quad_weights)
    Ku = op.stiffness @ values
    lap = np.zeros_like(values)
    pos = w > 0
    lap[pos] = -Ku[pos] / w[pos]
    if not pos[0]:
        lap[0] = origin_value(lap)
    return lap


def apply_laplacian(op: RadialOperator, f: RadialField) -> RadialField:
    if f.grid != op.grid:
        raise GridMismatchError("field and operator use different grids")
    return RadialField(op.grid, laplacian_values(op, np.asarray(f.values)))


def lp_norm_p(f, p: float, grid: RadialGrid | None = None) -> float:
    """(sum_i w_i |f_i|^p)^(1/p)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    grid = f.grid if grid is None else grid
    return float(np.dot(grid.quad_weights, np.abs(_values(f)) ** p)) ** (1.0 / p)


def lp_integral(f, p: float, grid: RadialGrid | None = None) -> float:
    """sum_i w_i |f_i|^p, i.e. ||f||_p^p without the root."""
    grid = f.grid if grid is None else grid
    return float(np.dot(grid.quad_weights, np.abs(_values(f)) ** p))


def weighted_inner(f, g, grid: RadialGrid | None = None) -> float:
    grid = f.grid if grid is None else grid
    return float(np.dot(grid.quad_weights, _values(f) * _values(g)))


def face_derivative(f: RadialField) -> np.ndarray:
    """(Df) on the staggered faces."""
    return radial_operator(f.grid).derivative @ np.asarray(f.values)


def h1_seminorm_sq(f: RadialField) -> float:
    """Discrete ||grad f||_2^2 = sum_faces s_f (Df)_f^2."""
    op = radial_operator(f.grid)
    Df = op.derivative @ np.asarray(f.values)
    return float(np.dot(op.face_weights, Df * Df))


def gradient_inner(f: RadialField, g: RadialField) -> float:
    op = radial_operator(f.grid)
    return float(np.dot(op.face_weights, (op.derivative @ f.values) * (op.derivative @ g.values)))


class ShiftedSolver:
    """Solves (K + c W) x = rhs on the free nodes with x(r_max) = 0.

    For n = 3 the origin is not free; the returned vector carries the
    reconstructed origin value.
    """

    def __init__(self, op: RadialOperator, shift: float):
        self._first = op.first_free
        bands = np.array(op.bands[:, self._first:-1])
        bands[HALF_BANDWIDTH] += shift * np.asarray(op.grid.quad_weights[self._first:-1])
        self._bands = bands

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        out = np.zeros(rhs.shape[0])
        out[self._first:-1] = solveh_banded(self._bands, rhs[self._first:-1], check_finite=False)
        if self._first:
            out[0] = origin_value(out)
        return out
