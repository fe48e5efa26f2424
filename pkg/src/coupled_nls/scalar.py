"""Scalar ground state u0 of -Delta u + u = u^(2q-1) and its omega-rescaling v0."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .descent import DescentOptions, descend
from .discretization import conform, laplacian_values, radial_operator
from .model import ProblemParams, RadialField, RadialGrid, validate_params

SCALAR_TOL_RESIDUAL = 1e-11
RESIDUAL_ACCEPT = 1e-4


class ConvergenceError(RuntimeError):
    """The iterative solver stopped before meeting its tolerance."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ScalarGroundState:
    profile: RadialField
    q: float
    energy: float
    residual_norm: float
    iterations: int = 0
    omega: float = 1.0


def scalar_residual(values: np.ndarray, grid: RadialGrid, q: float, mass: float = 1.0) -> np.ndarray:
    """-Delta u + mass*u - |u|^(2q-2) u at all nodes but the Dirichlet one."""
    op = radial_operator(grid)
    u = np.asarray(values, dtype=float)
    res = -laplacian_values(op, u) + mass * u - np.abs(u) ** (2 * q - 2) * u
    return res[:-1]


def _scalar_energy(values: np.ndarray, grid: RadialGrid, q: float, mass: float) -> float:
    op = radial_operator(grid)
    w = np.asarray(grid.quad_weights)
    Du = op.derivative @ values
    a = float(np.dot(op.face_weights, Du * Du) + mass * np.dot(w, values**2))
    pt = float(np.dot(w, np.abs(values) ** (2 * q)))
    return a / 2 - pt / (2 * q)


def soliton_profile(q: float, r: np.ndarray) -> np.ndarray:
    """q^(1/(2(q-1))) sech^(1/(q-1))((q-1) r)."""
    return q ** (1.0 / (2 * (q - 1))) / np.cosh((q - 1) * np.asarray(r)) ** (1.0 / (q - 1))


def explicit_soliton_1d(q: float, grid: RadialGrid) -> ScalarGroundState:
    if not q > 1:
        raise ValueError("q must exceed 1")
    if grid.n != 1:
        raise ValueError("the closed-form soliton is the n = 1 profile")
    vals = soliton_profile(q, grid.nodes)
    field = RadialField(grid, vals)
    res = float(np.max(np.abs(scalar_residual(vals, grid, q))))
    return ScalarGroundState(field, q, _scalar_energy(vals, grid, q, 1.0), res)


def _solve_scalar(q: float, grid: RadialGrid, omega: float, initial: np.ndarray,
                  max_iter: int, tol: float):
    op = radial_operator(grid)
    # the v slot carries the mass omega^2; u stays identically zero
    params = ProblemParams(grid.n, q, 0.0, omega)
    start = conform(op, np.abs(initial))
    result = descend(np.zeros(grid.num_points), start, op, params,
                     DescentOptions(max_iter=max_iter, tol_residual=tol))
    return result


def solve_scalar_ground_state(p: ProblemParams, grid: RadialGrid, max_iter: int = 20000,
                              tol_residual: float = SCALAR_TOL_RESIDUAL) -> ScalarGroundState:
    """Minimize the scalar quotient from a Gaussian start; raises ConvergenceError on failure."""
    check = validate_params(p)
    if not check:
        raise ValueError("invalid parameters: " + "; ".join(check.reasons))
    if grid.n != p.n:
        raise ValueError("grid dimension differs from params.n")
    r = np.asarray(grid.nodes)
    result = _solve_scalar(p.q, grid, 1.0, np.exp(-r * r), max_iter, tol_residual)
    vals = result.v
    res = float(np.max(np.abs(scalar_residual(vals, grid, p.q))))
    if not result.converged:
        raise ConvergenceError(
            f"scalar solve did not converge: {result.message}",
            {"iterations": result.iterations, "residual": result.residual, "el_residual": res},
        )
    return ScalarGroundState(RadialField(grid, vals), p.q, result.quotient,
                             res, result.iterations)


def omega_rescale(u0: ScalarGroundState, p: ProblemParams, grid: RadialGrid,
                  polish: bool = True, tol_residual: float = SCALAR_TOL_RESIDUAL) -> RadialField:
    """v0(r) = omega^(1/(q-1)) u0(omega r) on `grid`.

    The profile is transferred by monotone cubic (PCHIP) interpolation.  With
    `polish` the interpolant then seeds a short descent for the discrete
    equation -Delta v + omega^2 v = v^(2q-1), removing the interpolation
    error that the discrete Laplacian would otherwise amplify near r = 0.
    """
    q, omega = u0.q, p.omega
    src = u0.profile
    if omega == 1.0 and src.grid == grid:
        return RadialField(grid, np.array(src.values))
    if src.grid.r_max < grid.r_max * (1 - 1e-12):
        raise ValueError("u0 must be solved on a grid reaching at least grid.r_max")
    itp = PchipInterpolator(np.asarray(src.grid.nodes), np.asarray(src.values), extrapolate=False)
    vals = omega ** (1.0 / (q - 1)) * np.nan_to_num(itp(omega * np.asarray(grid.nodes)), nan=0.0)
    vals = np.maximum(vals, 0.0)
    op = radial_operator(grid)
    vals = conform(op, vals)
    if polish:
        result = _solve_scalar(q, grid, omega, vals, 20000, tol_residual)
        if not result.converged:
            raise ConvergenceError(
                f"rescaled profile polish did not converge: {result.message}",
                {"iterations": result.iterations, "residual": result.residual},
            )
        vals = result.v
    return RadialField(grid, vals)
