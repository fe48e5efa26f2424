import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coupled_nls.functionals import (
    OffManifoldError,
    ZeroStateError,
    coupling_integral,
    energy,
    energy_and_tau,
    energy_gradient,
    nehari_projection_t,
    omega_norm_sq,
    on_manifold_energy,
    p_term,
    project_to_manifold,
    scale_invariant_quotient,
    signed_power,
    tau_derivative_along_state,
    valori_pair,
)
from coupled_nls.model import ProblemParams, RadialField, StatePair
from coupled_nls.verification import check_gradient_fd, check_nehari, random_state

CUBIC = ProblemParams(1, 2.0, 0.0, 1.0)


def soliton(grid, omega=1.0):
    """Exact omega-rescaled cubic soliton sqrt2 omega sech(omega r)."""
    return RadialField.from_function(grid, lambda r: math.sqrt(2) * omega / np.cosh(omega * r))


@pytest.fixture(scope="module")
def zero(grid1):
    return RadialField.zeros(grid1)


def test_zero_state(grid1, zero):
    s = StatePair(zero, zero)
    assert omega_norm_sq(s, CUBIC) == 0.0
    br = energy_and_tau(s, CUBIC)
    assert br.energy == br.tau == br.omega_norm_sq == br.p_term == 0.0
    g = energy_gradient(s, CUBIC)
    assert not np.any(g.u.values) and not np.any(g.v.values)


def test_soliton_norm(grid1, zero):
    assert abs(omega_norm_sq(StatePair(soliton(grid1), zero), CUBIC) - 16.0 / 3.0) <= 1e-6


def test_rescaled_soliton_norm(grid1, zero):
    p = ProblemParams(1, 2.0, 0.0, 2.0)
    assert abs(omega_norm_sq(StatePair(zero, soliton(grid1, 2.0)), p) - 128.0 / 3.0) <= 1e-5


def test_soliton_on_manifold(grid1, zero):
    br = energy_and_tau(StatePair(soliton(grid1), zero), CUBIC)
    assert abs(br.tau) <= 1e-6
    assert abs(br.energy - 4.0 / 3.0) <= 1e-6


def test_symmetric_pair_terms(grid1):
    p = ProblemParams(1, 2.0, 1.0, 1.0)
    u = soliton(grid1)
    br = energy_and_tau(StatePair(u, u), p)
    assert abs(br.p_term - 4 * 16.0 / 3.0) <= 1e-6
    assert abs(br.tau - (2 - 4) * 16.0 / 3.0) <= 1e-6


def test_gradient_at_soliton(grid1, zero):
    g = energy_gradient(StatePair(soliton(grid1), zero), CUBIC)
    assert np.max(np.abs(g.u.values[:-1])) <= 1e-4


def test_gradient_finite_differences():
    (res,) = check_gradient_fd(states=6, directions=3)
    assert res.passed, res


def test_projection_fixed_point(grid1, zero):
    s = StatePair(soliton(grid1), zero)
    assert abs(nehari_projection_t(s, CUBIC) - 1.0) <= 1e-9


def test_projection_of_doubled_soliton(grid1, zero):
    assert abs(nehari_projection_t(StatePair(soliton(grid1).scaled(2.0), zero), CUBIC) - 0.5) <= 1e-9


def test_projection_of_symmetric_pair(grid1):
    p = ProblemParams(1, 2.0, 1.0, 1.0)
    u = soliton(grid1)
    assert abs(nehari_projection_t(StatePair(u, u), p) - 2 ** -0.5) <= 1e-9


def test_projection_of_zero_state_fails(grid1, zero):
    with pytest.raises(ZeroStateError):
        nehari_projection_t(StatePair(zero, zero), CUBIC)


def test_on_manifold_energy(grid1, zero):
    assert abs(on_manifold_energy(StatePair(soliton(grid1), zero), CUBIC) - 4.0 / 3.0) <= 1e-6
    p = ProblemParams(1, 2.0, 0.0, 2.0)
    assert abs(on_manifold_energy(StatePair(zero, soliton(grid1, 2.0)), p) - 32.0 / 3.0) <= 1e-5


def test_on_manifold_energy_rejects_off_manifold(grid1, zero):
    with pytest.raises(OffManifoldError):
        on_manifold_energy(StatePair(soliton(grid1).scaled(1.5), zero), CUBIC)


def test_nehari_suite():
    for res in check_nehari(count=12):
        assert res.passed, res


def test_quotient_of_soliton(grid1, zero):
    assert abs(scale_invariant_quotient(StatePair(soliton(grid1), zero), CUBIC) - 4.0 / 3.0) <= 1e-6


def test_signed_power_at_zero():
    x = np.array([-2.0, 0.0, 3.0])
    assert np.array_equal(signed_power(x, 0.5)[1:2], [0.0])
    assert signed_power(x, 0.5)[0] == -math.sqrt(2.0)


def test_coupling_symmetric(small_grids, rng):
    g = small_grids[2]
    s = random_state(g, rng)
    assert coupling_integral(s.u, s.v, 1.5) == pytest.approx(coupling_integral(s.v, s.u, 1.5), rel=1e-14)


def test_coupling_enters_with_factor_two_b(small_grids, rng):
    g = small_grids[1]
    s = random_state(g, rng)
    p0, p1 = ProblemParams(1, 2.5, 0.0, 1.5), ProblemParams(1, 2.5, 0.7, 1.5)
    diff = p_term(s, p1) - p_term(s, p0)
    assert diff == pytest.approx(2 * 0.7 * coupling_integral(s.u, s.v, 2.5), rel=1e-12)
    assert energy(s, p0) - energy(s, p1) == pytest.approx(diff / (2 * 2.5), rel=1e-9)


fields = st.tuples(st.integers(1, 3), st.integers(0, 10_000), st.sampled_from([1.5, 2.0, 2.5]),
                   st.floats(0.0, 3.0), st.floats(1.0, 4.0))


@settings(max_examples=30, deadline=None)
@given(data=fields, lam=st.floats(0.05, 20.0))
def test_quotient_scale_invariance(data, lam, small_grids):
    n, seed, q, b, om = data
    p = ProblemParams(n, q, b, om)
    s = random_state(small_grids[n], np.random.default_rng(seed))
    j = scale_invariant_quotient(s, p)
    assert scale_invariant_quotient(s.scaled(lam), p) == pytest.approx(j, rel=1e-10)
    assert scale_invariant_quotient(s.scaled(3.7), p) == pytest.approx(j, rel=1e-10)
    projected = project_to_manifold(s, p)
    assert on_manifold_energy(projected, p) == pytest.approx(j, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(data=fields)
def test_manifold_properties(data, small_grids):
    n, seed, q, b, om = data
    p = ProblemParams(n, q, b, om)
    s = random_state(small_grids[n], np.random.default_rng(seed))
    br = energy_and_tau(s, p)
    t = nehari_projection_t(s, p)
    # projection bracket: tau < 0 gives t in (0, 1), tau > 0 gives t > 1
    if br.tau < 0:
        assert 0 < t < 1
    elif br.tau > 0:
        assert t > 1
    on = s.scaled(t)
    a_form, p_form = valori_pair(on, p)
    assert abs(a_form - p_form) <= 1e-8 * abs(a_form)
    norm = omega_norm_sq(on, p)
    assert tau_derivative_along_state(on, p) == pytest.approx(2 * (1 - q) * norm, rel=1e-8)
    assert tau_derivative_along_state(on, p) < 0
