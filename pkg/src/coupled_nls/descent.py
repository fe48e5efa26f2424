"""Normalized descent on the scale-invariant quotient J.

One iteration from s = (u, v) on the Nehari manifold:

    x      = L^{-1} W N(s),  L = diag(K + W, K + omega^2 W)
    target = (A / P) x
    s(beta) = (1 - beta) s + beta * target

The direction target - s is the negative Sobolev gradient of J up to a
positive factor (J is homogeneous of degree zero, so its gradient is
proportional to L s - (A/P) W N(s)).  beta = 1 is the normalized
fixed-point step.  The candidate is passed through |.|, the monotone
projection and the Nehari scaling, and beta is halved until J does not
increase.  The relative size of target - s in the L-norm is the
stationarity residual used for stopping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .discretization import RadialOperator, ShiftedSolver, origin_value
from .functionals import nonlinear_terms, omega_norm_sq_arrays, p_term_arrays, quotient_from_parts
from .model import ProblemParams
from .symmetrization import monotone_projection_values

# accepted increase of J per step, in units of machine epsilon
_ROUNDOFF_SLACK = 8.0 * np.finfo(float).eps


@dataclass
class DescentOptions:
    max_iter: int = 20000
    step_size: float = 1.0
    step_floor: float = 1e-12
    tol_residual: float = 1e-6
    tol_energy: float = 1e-10
    stall_window: int = 200


@dataclass
class DescentResult:
    u: np.ndarray
    v: np.ndarray
    quotient: float
    iterations: int
    converged: bool
    residual: float
    message: str
    history: List[float] = field(default_factory=list)


class _Problem:
    def __init__(self, op: RadialOperator, p: ProblemParams):
        self.op = op
        self.p = p
        self.w = np.asarray(op.grid.quad_weights)
        self.solve_u = ShiftedSolver(op, 1.0)
        self.solve_v = ShiftedSolver(op, p.omega**2)

    def parts(self, u, v):
        a = omega_norm_sq_arrays(u, v, self.op, self.p.omega)
        pt = p_term_arrays(u, v, self.w, self.p.q, self.p.b)
        return a, pt

    def normalize(self, u, v):
        """Nehari scaling; returns (u, v, A, P, J) or None for a dead state."""
        a, pt = self.parts(u, v)
        if not (a > 0 and pt > 0):
            return None
        t = (a / pt) ** (1.0 / (2 * self.p.q - 2))
        u, v = t * u, t * v
        a, pt = t * t * a, t ** (2 * self.p.q) * pt
        return u, v, a, pt, quotient_from_parts(a, pt, self.p.q)

    def project(self, u, v):
        u = monotone_projection_values(u, self.w)
        v = monotone_projection_values(v, self.w)
        if self.op.reconstructed_origin:
            # the energy ignores the stored origin value; keep it monotone
            u[0] = max(origin_value(u), u[1])
            v[0] = max(origin_value(v), v[1])
        return u, v

    def target(self, u, v, a, pt):
        nu, nv = nonlinear_terms(u, v, self.p.q, self.p.b)
        xu = self.solve_u.solve(self.w * nu)
        xv = self.solve_v.solve(self.w * nv) if np.any(nv) else np.zeros_like(v)
        g = a / pt
        return g * xu, g * xv


def descend(u0: np.ndarray, v0: np.ndarray, op: RadialOperator, p: ProblemParams,
            opts: DescentOptions | None = None) -> DescentResult:
    opts = opts or DescentOptions()
    prob = _Problem(op, p)
    u, v = prob.project(u0, v0)
    state = prob.normalize(u, v)
    if state is None:
        raise ValueError("initial state has no Nehari projection")
    u, v, a, pt, J = state
    history = [J]
    beta = min(1.0, opts.step_size)
    residual = np.inf
    stall = 0
    message = "maximum iterations reached"
    converged = False
    it = 0
    for it in range(1, opts.max_iter + 1):
        tu, tv = prob.target(u, v, a, pt)
        du, dv = tu - u, tv - v
        residual = np.sqrt(max(omega_norm_sq_arrays(du, dv, op, p.omega), 0.0) / a)
        if residual <= opts.tol_residual:
            converged, message = True, "residual tolerance reached"
            it -= 1
            break
        accepted = None
        while beta >= opts.step_floor:
            cu, cv = prob.project(u + beta * du, v + beta * dv)
            cand = prob.normalize(cu, cv)
            if cand is not None and cand[4] <= J * (1.0 + _ROUNDOFF_SLACK):
                accepted = cand
                break
            beta *= 0.5
        if accepted is None:
            message = "line search failed (step below floor)"
            break
        change = abs(J - accepted[4]) / J
        u, v, a, pt, J = accepted
        history.append(J)
        beta = min(1.0, 2.0 * beta)
        stall = stall + 1 if change <= opts.tol_energy else 0
        if stall >= opts.stall_window:
            message = "energy stagnated"
            break
    return DescentResult(u, v, J, it, converged, float(residual), message, history)
