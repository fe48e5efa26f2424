"""Energy, Nehari functional, gradient and projection for the coupled system.

With A = ||(u,v)||_omega^2 = ||u||_2^2 + ||Du||^2 + omega^2 ||v||_2^2 + ||Dv||^2
and P = ||u||_2q^2q + ||v||_2q^2q + 2b ||uv||_q^q the energy is
I = A/2 - P/(2q) and the Nehari functional is tau = A - P.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discretization import laplacian_values, radial_operator
from .model import ProblemParams, RadialField, StatePair

NEHARI_TOL = 1e-8


class ZeroStateError(ValueError):
    """The state (or its nonlinear term) vanishes and cannot be projected."""


class OffManifoldError(ValueError):
    """The state does not satisfy tau = 0 within tolerance."""


@dataclass(frozen=True)
class EnergyBreakdown:
    omega_norm_sq: float
    p_term: float
    energy: float
    tau: float


def signed_power(x: np.ndarray, exponent: float) -> np.ndarray:
    """|x|^exponent * sign(x), with the value 0 at x = 0 for any exponent."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.zeros_like(ax)
    nz = ax > 0
    out[nz] = np.sign(x[nz]) * ax[nz] ** exponent
    return out


def abs_power(x: np.ndarray, exponent: float) -> np.ndarray:
    return np.abs(np.asarray(x, dtype=float)) ** exponent


def _arrays(s: StatePair):
    return np.asarray(s.u.values), np.asarray(s.v.values)


def quadratic_parts(u: np.ndarray, v: np.ndarray, op):
    """Mass and gradient pieces (||u||^2, ||Du||^2, ||v||^2, ||Dv||^2)."""
    w = np.asarray(op.grid.quad_weights)
    Du = op.derivative @ u
    Dv = op.derivative @ v
    s = op.face_weights
    return (
        float(np.dot(w, u * u)),
        float(np.dot(s, Du * Du)),
        float(np.dot(w, v * v)),
        float(np.dot(s, Dv * Dv)),
    )


def omega_norm_sq_arrays(u, v, op, omega: float) -> float:
    mu, gu, mv, gv = quadratic_parts(u, v, op)
    return mu + gu + omega**2 * mv + gv


def p_term_arrays(u, v, w, q: float, b: float) -> float:
    au, av = np.abs(u), np.abs(v)
    total = np.dot(w, au ** (2 * q)) + np.dot(w, av ** (2 * q))
    if b != 0:
        total += 2 * b * np.dot(w, (au * av) ** q)
    return float(total)


def omega_norm_sq(s: StatePair, p: ProblemParams) -> float:
    op = radial_operator(s.grid)
    u, v = _arrays(s)
    return omega_norm_sq_arrays(u, v, op, p.omega)


def p_term(s: StatePair, p: ProblemParams) -> float:
    u, v = _arrays(s)
    return p_term_arrays(u, v, np.asarray(s.grid.quad_weights), p.q, p.b)


def coupling_integral(f: RadialField, g: RadialField, q: float) -> float:
    """||f g||_q^q."""
    return float(np.dot(f.grid.quad_weights, np.abs(f.values * g.values) ** q))


def energy_and_tau(s: StatePair, p: ProblemParams) -> EnergyBreakdown:
    a = omega_norm_sq(s, p)
    pt = p_term(s, p)
    return EnergyBreakdown(a, pt, a / 2 - pt / (2 * p.q), a - pt)


def energy(s: StatePair, p: ProblemParams) -> float:
    return energy_and_tau(s, p).energy


def nonlinear_terms(u, v, q: float, b: float):
    """(|u|^{2q-2}u + b|v|^q|u|^{q-2}u, |v|^{2q-2}v + b|u|^q|v|^{q-2}v)."""
    nu = signed_power(u, 2 * q - 1)
    nv = signed_power(v, 2 * q - 1)
    if b != 0:
        nu = nu + b * abs_power(v, q) * signed_power(u, q - 1)
        nv = nv + b * abs_power(u, q) * signed_power(v, q - 1)
    return nu, nv


def gradient_arrays(u, v, op, p: ProblemParams):
    nu, nv = nonlinear_terms(u, v, p.q, p.b)
    gu = -laplacian_values(op, u) + u - nu
    gv = -laplacian_values(op, v) + p.omega**2 * v - nv
    return gu, gv


def energy_gradient(s: StatePair, p: ProblemParams) -> StatePair:
    """Euler-Lagrange residual, the gradient of I in the weighted inner product."""
    op = radial_operator(s.grid)
    u, v = _arrays(s)
    gu, gv = gradient_arrays(u, v, op, p)
    return StatePair.from_arrays(s.grid, gu, gv)


def tau_gradient(s: StatePair, p: ProblemParams) -> StatePair:
    """Gradient of tau in the weighted inner product."""
    op = radial_operator(s.grid)
    u, v = _arrays(s)
    nu, nv = nonlinear_terms(u, v, p.q, p.b)
    gu = 2 * (-laplacian_values(op, u) + u) - 2 * p.q * nu
    gv = 2 * (-laplacian_values(op, v) + p.omega**2 * v) - 2 * p.q * nv
    return StatePair.from_arrays(s.grid, gu, gv)


def pair_inner(a: StatePair, b: StatePair) -> float:
    w = np.asarray(a.grid.quad_weights)
    return float(np.dot(w, a.u.values * b.u.values) + np.dot(w, a.v.values * b.v.values))


def tau_derivative_along_state(s: StatePair, p: ProblemParams) -> float:
    """<grad tau(s), s>; on the manifold this equals 2(1-q) ||s||_omega^2."""
    return pair_inner(tau_gradient(s, p), s)


def nehari_projection_t(s: StatePair, p: ProblemParams) -> float:
    br = energy_and_tau(s, p)
    if br.omega_norm_sq <= 0:
        raise ZeroStateError("zero state cannot be projected onto the Nehari manifold")
    if br.p_term <= 0:
        raise ZeroStateError("nonlinear term vanishes; no projection exists")
    return (br.omega_norm_sq / br.p_term) ** (1.0 / (2 * p.q - 2))


def project_to_manifold(s: StatePair, p: ProblemParams) -> StatePair:
    return s.scaled(nehari_projection_t(s, p))


def energy_factor(q: float) -> float:
    return 0.5 - 0.5 / q


def on_manifold_energy(s: StatePair, p: ProblemParams, tol: float = NEHARI_TOL) -> float:
    br = energy_and_tau(s, p)
    if abs(br.tau) > tol * br.omega_norm_sq or br.omega_norm_sq == 0:
        raise OffManifoldError(
            f"tau = {br.tau:.3e} exceeds {tol:g} * ||s||^2 = {tol * br.omega_norm_sq:.3e}"
        )
    return energy_factor(p.q) * br.omega_norm_sq


def valori_pair(s: StatePair, p: ProblemParams):
    """Both on-manifold expressions (factor*A, factor*P) of the energy."""
    br = energy_and_tau(s, p)
    c = energy_factor(p.q)
    return c * br.omega_norm_sq, c * br.p_term


def quotient_from_parts(a: float, pt: float, q: float) -> float:
    return energy_factor(q) * a ** (q / (q - 1)) / pt ** (1.0 / (q - 1))


def scale_invariant_quotient(s: StatePair, p: ProblemParams) -> float:
    """J(s) = I(t s) with t the Nehari projection factor."""
    br = energy_and_tau(s, p)
    if br.omega_norm_sq <= 0 or br.p_term <= 0:
        raise ZeroStateError("quotient undefined for the zero state")
    return quotient_from_parts(br.omega_norm_sq, br.p_term, p.q)
