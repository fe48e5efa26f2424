"""Closed-form coupling thresholds and the two-component trial state.

The trial competitor is (x u0, x theta v0) with v0 the omega-rescaled
scalar ground state and x fixed by the Nehari condition.  With
k = 2q/(q-1) - n the semitrivial energies satisfy I(0, v0) = omega^k I(u0, 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .functionals import energy_and_tau, energy_factor
from .model import ProblemParams, RadialField, StatePair
from .scalar import ScalarGroundState, omega_rescale

EPS_RANGE = (1e-3, 10.0)
EPS_XTOL = 1e-8
_SCAN_POINTS = 401


def scaling_exponent(q: float, n: int) -> float:
    """k = 2q/(q-1) - n, the exponent in I(0, v0) = omega^k I(u0, 0)."""
    return 2 * q / (q - 1) - n


def constant_C(p: ProblemParams) -> float:
    n, q, om = p.n, p.q, p.omega
    a = 0.5 * n * (1 - 1 / q)
    bracket = 1 + a + (1 - a) / om**2
    return 0.5 * bracket**q * om ** (2 * q - n * (q - 1)) - 1


def d_in_scope(q: float, omega: float) -> bool:
    return q >= 2 and omega >= 1


def constant_D(q: float, omega: float, strict: bool = True) -> float:
    """((2^q - 1)/2) omega^(1+q/2) - omega^(-q/2)/2, stated for q >= 2, omega >= 1, n = 1."""
    if strict and not d_in_scope(q, omega):
        raise ValueError(f"D is stated for q >= 2 and omega >= 1 (got q={q}, omega={omega})")
    return 0.5 * (2**q - 1) * omega ** (1 + q / 2) - 0.5 * omega ** (-q / 2)


def prefactor(q: float, eps: float) -> float:
    """((1 + eps^2)^q - 1) / (2 eps^q)."""
    return math.expm1(q * math.log1p(eps * eps)) / (2 * eps**q)


def sufficient_bound(q: float, omega: float, n: int, eps: float) -> float:
    if not eps > 0:
        raise ValueError("eps must be positive")
    return (prefactor(q, eps) * omega ** (q - 0.5 * n * (q - 2))
            - 0.5 * eps**q * omega ** ((0.5 * n - 1) * q))


@dataclass(frozen=True)
class EpsilonOptimum:
    eps: float
    value: float
    at_boundary: bool
    note: str = ""


def _minimize_on_log_grid(func, lo: float, hi: float, xtol: float = EPS_XTOL) -> EpsilonOptimum:
    """Log-grid bracketing followed by a bounded golden/Brent refinement."""
    grid = np.geomspace(lo, hi, _SCAN_POINTS)
    vals = np.array([func(e) for e in grid])
    k = int(np.argmin(vals))
    if k == 0 or k == len(grid) - 1:
        edge = "lower" if k == 0 else "upper"
        return EpsilonOptimum(float(grid[k]), float(vals[k]), True,
                              f"infimum at {edge} boundary, not attained")
    res = minimize_scalar(func, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden",
                          options={"xtol": xtol * 1e-3})
    eps = float(res.x)
    return EpsilonOptimum(eps, float(func(eps)), False)


def optimize_prefactor(q: float) -> EpsilonOptimum:
    """Minimizer of ((1+eps^2)^q - 1)/(2 eps^q) over [1e-3, 10]."""
    return _minimize_on_log_grid(lambda e: prefactor(q, e), *EPS_RANGE)


def optimize_epsilon(q: float, omega: float, n: int) -> Tuple[float, float, EpsilonOptimum]:
    """Returns (eps_opt, b_opt, details) for the sufficient bound on [1e-3, 10]."""
    if not q > 1:
        raise ValueError("q must exceed 1")
    opt = _minimize_on_log_grid(lambda e: sufficient_bound(q, omega, n, e), *EPS_RANGE)
    if q < 2:
        note = "any b > 0 suffices for 1 < q < 2 (bound tends to 0 as eps -> 0)"
        return opt.eps, 0.0, EpsilonOptimum(opt.eps, 0.0, opt.at_boundary, note)
    return opt.eps, opt.value, opt


@dataclass(frozen=True)
class ThresholdReport:
    n: int
    q: float
    omega: float
    c_const: float
    d_const: Optional[float]
    eps_opt: float
    b_opt: float
    prefactor_eps: float
    prefactor_min: float
    notes: Tuple[str, ...] = ()

    @property
    def d_below_c(self) -> Optional[bool]:
        return None if self.d_const is None else self.d_const < self.c_const


def threshold_report(q: float, omega: float, n: int) -> ThresholdReport:
    notes = []
    c = constant_C(ProblemParams(n, q, 0.0, omega))
    d = None
    if n == 1 and d_in_scope(q, omega):
        d = constant_D(q, omega)
    else:
        notes.append("D n/a (stated for n = 1, q >= 2)")
    eps, b_opt, opt = optimize_epsilon(q, omega, n)
    if opt.note:
        notes.append(opt.note)
    pre = optimize_prefactor(q)
    if pre.at_boundary:
        notes.append("prefactor " + pre.note)
    return ThresholdReport(n, q, omega, c, d, eps, b_opt, pre.eps, pre.value, tuple(notes))


@dataclass(frozen=True)
class TrialState:
    x: float
    theta: float
    eps: float
    state: StatePair
    x_power: float          # x^(2q-2) from quadrature
    x_lower: float          # bracket endpoints for x^(2q-2)
    x_upper: float
    energy: float
    tau: float
    omega_norm_sq: float = field(default=0.0)

    @property
    def bracket_holds(self) -> bool:
        tol = 1e-6 * self.x_power
        return self.x_lower - tol <= self.x_power <= self.x_upper + tol


def trial_theta(q: float, omega: float, n: int, eps: float) -> float:
    return eps * omega ** (0.5 * (n - 2 * q / (q - 1)))


def _scalar_pair(u0: ScalarGroundState, p: ProblemParams, v0: Optional[RadialField]):
    grid = u0.profile.grid
    if v0 is None:
        v0 = omega_rescale(u0, p, grid)
    return u0.profile, v0


def build_trial_state(p: ProblemParams, eps: float, u0: ScalarGroundState,
                      v0: Optional[RadialField] = None) -> TrialState:
    """Trial competitor (x u0, x theta v0) placed on the Nehari manifold."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    q, n, om, b = p.q, p.n, p.omega, p.b
    u, v = _scalar_pair(u0, p, v0)
    theta = trial_theta(q, om, n, eps)
    k = scaling_exponent(q, n)
    base = StatePair(u, v.scaled(theta))
    br = energy_and_tau(base, p)
    x_power = br.omega_norm_sq / br.p_term
    x = x_power ** (1.0 / (2 * q - 2))
    state = base.scaled(x)
    final = energy_and_tau(state, p)
    # bracket: replace ||u0 v0||_q^q by its bounds omega^(q/(q-1)-n) and omega^(q/(q-1)) times ||u0||_2q^2q
    num = 1 + theta**2 * om**k
    den0 = 1 + theta ** (2 * q) * om**k
    coup_hi = 2 * b * theta**q * om ** (q / (q - 1))
    coup_lo = 2 * b * theta**q * om ** (q / (q - 1) - n)
    u_norm = energy_and_tau(StatePair(u, RadialField.zeros(u.grid)), p)
    scale = u_norm.omega_norm_sq / u_norm.p_term
    x_lower = scale * num / (den0 + coup_hi)
    x_upper = scale * num / (den0 + coup_lo)
    return TrialState(x, theta, eps, state, x_power, x_lower, x_upper,
                      final.energy, final.tau, final.omega_norm_sq)


def trial_energy_ratio(trial: TrialState, u0: ScalarGroundState, p: ProblemParams) -> float:
    """I(trial) / I(u0, 0)."""
    return trial.energy / semitrivial_energy(u0.profile, p)


def semitrivial_energy(u: RadialField, p: ProblemParams) -> float:
    """I(u, 0) for a scalar ground state u (on the manifold)."""
    zero = RadialField.zeros(u.grid)
    br = energy_and_tau(StatePair(u, zero), p)
    return energy_factor(p.q) * br.omega_norm_sq ** (p.q / (p.q - 1)) / br.p_term ** (1 / (p.q - 1))


@dataclass(frozen=True)
class SufficiencyReport:
    eps: float
    beats_semitrivial: bool
    energy_ratio: float          # I(trial)/I(u0,0) = x^2 (1 + theta^2 omega^k) in exact arithmetic
    formula_bound: float         # sufficient_bound(q, omega, n, eps)
    guaranteed: bool             # b >= formula_bound
    trial: TrialState


def check_sufficiency(p: ProblemParams, eps: float, u0: ScalarGroundState,
                      v0: Optional[RadialField] = None) -> SufficiencyReport:
    trial = build_trial_state(p, eps, u0, v0)
    ratio = trial_energy_ratio(trial, u0, p)
    bound = sufficient_bound(p.q, p.omega, p.n, eps)
    return SufficiencyReport(eps, bool(ratio < 1), ratio, bound, p.b >= bound, trial)


def best_trial(p: ProblemParams, u0: ScalarGroundState, v0: Optional[RadialField] = None,
               lo: float = 1e-4, hi: float = 10.0, points: int = 121) -> TrialState:
    """Trial state of lowest energy over a log sweep of eps, refined locally."""
    u, v = _scalar_pair(u0, p, v0)
    eps_grid = np.geomspace(lo, hi, points)
    energies = [build_trial_state(p, e, u0, v).energy for e in eps_grid]
    k = int(np.argmin(energies))
    if 0 < k < points - 1:
        res = minimize_scalar(lambda le: build_trial_state(p, math.exp(le), u0, v).energy,
                              bracket=(math.log(eps_grid[k - 1]), math.log(eps_grid[k]),
                                       math.log(eps_grid[k + 1])),
                              method="golden", options={"xtol": 1e-6})
        eps = math.exp(float(res.x))
        if build_trial_state(p, eps, u0, v).energy <= energies[k]:
            return build_trial_state(p, eps, u0, v)
    return build_trial_state(p, float(eps_grid[k]), u0, v)
