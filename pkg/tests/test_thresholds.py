import math

import numpy as np
import pytest

from coupled_nls.discretization import lp_norm_p
from coupled_nls.functionals import coupling_integral, nehari_projection_t
from coupled_nls.model import ProblemParams, default_grid
from coupled_nls.scalar import omega_rescale, solve_scalar_ground_state
from coupled_nls.thresholds import (
    best_trial,
    build_trial_state,
    check_sufficiency,
    constant_C,
    constant_D,
    optimize_epsilon,
    optimize_prefactor,
    sufficient_bound,
    threshold_report,
    trial_energy_ratio,
)


@pytest.mark.parametrize("n, q, omega, expected", [(1, 2.0, 1.0, 1.0), (1, 2.0, 5.0, 101.4),
                                                   (2, 2.0, 1.0, 1.0)])
def test_constant_C(n, q, omega, expected):
    assert constant_C(ProblemParams(n, q, 0.0, omega)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("q, omega, expected", [(2.0, 1.0, 1.0), (2.0, 5.0, 37.4), (3.0, 1.0, 3.0)])
def test_constant_D(q, omega, expected):
    assert constant_D(q, omega) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("q", [2.0, 3.0, 4.0])
def test_D_at_unit_frequency(q):
    assert constant_D(q, 1.0) == pytest.approx(2 ** (q - 1) - 1, abs=1e-12)


def test_D_out_of_scope():
    with pytest.raises(ValueError):
        constant_D(1.5, 2.0)


@pytest.mark.parametrize("q", [2.0, 2.5, 3.0])
@pytest.mark.parametrize("omega", [3.0, 5.0, 10.0])
def test_D_below_C_for_large_omega(q, omega):
    assert constant_D(q, omega) < constant_C(ProblemParams(1, q, 0.0, omega))


@pytest.mark.parametrize("q, omega", [(2.0, 1.0), (2.0, 5.0), (3.0, 2.0), (2.5, 10.0)])
def test_bound_reduces_to_D_at_unit_eps(q, omega):
    assert sufficient_bound(q, omega, 1, 1.0) == pytest.approx(constant_D(q, omega), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bound_at_unit_frequency(n):
    assert sufficient_bound(2.0, 1.0, n, 1.0) == pytest.approx(1.0, abs=1e-13)


def test_sublinear_bound_vanishes():
    # plug-in at eps = 0.01: prefactor ~ (q/2) eps^(2-q) = 0.075, times omega^(9/4)
    eps = 0.01
    direct = ((1 + eps**2) ** 1.5 - 1) / (2 * eps**1.5) * 2 ** 2.25 - 0.5 * eps**1.5 * 2 ** 0.75
    assert sufficient_bound(1.5, 2.0, 3, eps) == pytest.approx(direct, rel=1e-12)
    assert sufficient_bound(1.5, 2.0, 3, 1e-6) < 0.01
    vals = [sufficient_bound(1.5, 2.0, 3, e) for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_bound_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        sufficient_bound(2.0, 1.0, 1, 0.0)


def test_prefactor_optimum_for_cubic_power():
    opt = optimize_prefactor(3.0)
    assert not opt.at_boundary
    assert opt.eps**2 == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-6)
    assert opt.value == pytest.approx(3.3303, abs=2e-4)
    assert opt.value < 3.5


def test_boundary_flag_for_quadratic_power():
    eps, b_opt, opt = optimize_epsilon(2.0, 5.0, 1)
    assert b_opt < 37.4
    assert opt.at_boundary and "boundary" in opt.note


def test_sublinear_threshold_reported_as_zero():
    eps, b_opt, opt = optimize_epsilon(1.5, 2.0, 2)
    assert b_opt == 0.0 and "any b > 0" in opt.note


def test_threshold_report_scopes_D():
    assert threshold_report(1.5, 2.0, 2).d_const is None
    rep = threshold_report(2.0, 5.0, 1)
    assert rep.d_const == pytest.approx(37.4) and rep.d_below_c


@pytest.fixture(scope="module")
def cubic_u0(grid1):
    return solve_scalar_ground_state(ProblemParams(1, 2.0, 0.0, 1.0), grid1)


def test_symmetric_trial(cubic_u0):
    p = ProblemParams(1, 2.0, 1.0, 1.0)
    t = build_trial_state(p, 1.0, cubic_u0)
    assert t.theta == 1.0
    assert t.x**2 == pytest.approx(0.5, rel=1e-9)
    assert t.energy == pytest.approx(4.0 / 3.0, rel=1e-6)
    assert trial_energy_ratio(t, cubic_u0, p) == pytest.approx(1.0, abs=1e-9)


def test_trial_bracket_large_coupling(cubic_u0):
    p = ProblemParams(1, 2.0, 20.0, 2.0)
    for eps in (0.1, 1.0, 3.0):
        assert build_trial_state(p, eps, cubic_u0).bracket_holds


@pytest.mark.parametrize("p", [ProblemParams(1, 2.0, 1.0, 1.0), ProblemParams(1, 2.0, 3.0, 2.0),
                               ProblemParams(1, 2.0, 0.2, 5.0)])
@pytest.mark.parametrize("eps", [0.01, 0.5, 4.0])
def test_trial_on_manifold(cubic_u0, p, eps):
    t = build_trial_state(p, eps, cubic_u0)
    assert abs(t.tau) <= 1e-8 * t.omega_norm_sq
    assert nehari_projection_t(t.state, p) == pytest.approx(1.0, abs=1e-8)


def test_trial_rejects_bad_eps(cubic_u0):
    with pytest.raises(ValueError):
        build_trial_state(ProblemParams(1, 2.0, 1.0, 1.0), -1.0, cubic_u0)


def test_sufficiency_above_threshold(cubic_u0):
    rep = check_sufficiency(ProblemParams(1, 2.0, 1.2, 1.0), 1.0, cubic_u0)
    assert rep.guaranteed and rep.beats_semitrivial


def test_sufficiency_below_threshold(cubic_u0):
    rep = check_sufficiency(ProblemParams(1, 2.0, 0.5, 1.0), 1.0, cubic_u0)
    assert not rep.guaranteed and not rep.beats_semitrivial


def test_guarantee_implies_success(cubic_u0):
    for b in (1.0, 2.0, 10.0):
        for om in (1.0, 1.5, 3.0):
            p = ProblemParams(1, 2.0, b, om)
            for eps in (0.3, 1.0, 2.0):
                rep = check_sufficiency(p, eps, cubic_u0)
                if rep.guaranteed:
                    assert rep.energy_ratio <= 1 + 1e-9


def test_sublinear_witness_from_sweep():
    p = ProblemParams(2, 1.5, 0.05, 3.0)
    g = default_grid(2)
    u0 = solve_scalar_ground_state(p, g)
    v0 = omega_rescale(u0, p, g)
    wins = [check_sufficiency(p, e, u0, v0).beats_semitrivial for e in np.geomspace(1e-4, 1.0, 25)]
    assert any(wins)
    assert trial_energy_ratio(best_trial(p, u0, v0), u0, p) < 1


@pytest.mark.parametrize("n, q, omega", [(1, 1.5, 2.0), (1, 3.0, 5.0), (2, 2.0, 2.0), (3, 1.5, 5.0),
                                         (3, 2.0, 1.0)])
def test_coupling_bracket(n, q, omega):
    g = default_grid(n)
    p = ProblemParams(n, q, 0.0, omega)
    u0 = solve_scalar_ground_state(p, g)
    v0 = omega_rescale(u0, p, g)
    c = coupling_integral(u0.profile, v0, q)
    base = lp_norm_p(u0.profile, 2 * q) ** (2 * q)
    assert c <= omega ** (q / (q - 1)) * base * (1 + 1e-6)
    assert c >= omega ** (q / (q - 1) - n) * base * (1 - 1e-6)
