from dataclasses import replace

import numpy as np
import pytest

from coupled_nls.functionals import energy_and_tau, project_to_manifold
from coupled_nls.minimizer import (
    Classification,
    MinimizerConfig,
    classify_components,
    is_in_cone,
    minimize_ground_state,
    verify_ground_state,
)
from coupled_nls.model import ProblemParams, RadialField, StatePair, default_grid
from coupled_nls.scalar import omega_rescale

DECOUPLED = ProblemParams(1, 2.0, 0.0, 2.0)
STRONG = ProblemParams(1, 2.0, 3.0, 1.0)


@pytest.fixture(scope="module")
def decoupled_run(grid1, u0_cubic):
    return minimize_ground_state(DECOUPLED, grid1, u0=u0_cubic)


@pytest.fixture(scope="module")
def strong_run(grid1, u0_cubic):
    return minimize_ground_state(STRONG, grid1, u0=u0_cubic)


def test_decoupled_ground_state(decoupled_run):
    assert decoupled_run.m == pytest.approx(4.0 / 3.0, rel=1e-4)
    assert decoupled_run.classification == Classification.TRIVIAL_V
    assert decoupled_run.converged


def test_strong_coupling_is_nontrivial(strong_run):
    assert strong_run.classification == Classification.NONTRIVIAL
    assert strong_run.m < 4.0 / 3.0 - 1e-3
    assert strong_run.m <= strong_run.trial_energy * (1 + 1e-9)


@pytest.mark.xfail(strict=True, reason="v component stays below the classification floor on the default grid; "
                                       "see the notes on the perturbative energy gap")
def test_sublinear_weak_coupling_nontrivial(grid1):
    rep = minimize_ground_state(ProblemParams(1, 1.5, 0.1, 2.0), grid1)
    assert rep.classification == Classification.NONTRIVIAL


def test_classification_examples(grid1, u0_cubic):
    u0 = u0_cubic.profile
    v0 = omega_rescale(u0_cubic, DECOUPLED, grid1)
    zero = RadialField.zeros(grid1)
    assert classify_components(StatePair(u0, zero), 1e-3) == Classification.TRIVIAL_V
    assert classify_components(StatePair(zero, v0), 1e-3) == Classification.TRIVIAL_U
    assert classify_components(StatePair(u0, u0), 1e-3) == Classification.NONTRIVIAL
    with pytest.raises(ValueError):
        classify_components(StatePair(zero, zero), 1e-3)


def test_verify_decoupled_run(decoupled_run, u0_cubic):
    ver = verify_ground_state(decoupled_run, DECOUPLED, u0_cubic)
    assert ver.passed
    assert {c.name for c in ver.checks} == {"nehari", "stationarity", "semitrivial_profile", "energy_identity"}


def test_verify_flags_non_minimal_state(decoupled_run, u0_cubic):
    u0 = u0_cubic.profile
    s = project_to_manifold(StatePair(u0, u0), DECOUPLED)
    fake = replace(decoupled_run, state=s, classification=Classification.NONTRIVIAL)
    ver = verify_ground_state(fake, DECOUPLED, u0_cubic)
    assert not ver.by_name("stationarity").passed
    assert ver.by_name("nehari").passed


def test_energy_identity_on_converged_runs(decoupled_run, strong_run):
    for rep, p in ((decoupled_run, DECOUPLED), (strong_run, STRONG)):
        assert verify_ground_state(rep, p).by_name("energy_identity").value <= 1e-8


@pytest.mark.parametrize("name", ["decoupled_run", "strong_run"])
def test_report_invariants(name, request):
    rep = request.getfixturevalue(name)
    p = rep.params
    assert rep.m >= 0
    assert is_in_cone(rep.state)
    tol = 1e-9 * rep.m
    assert rep.m <= rep.semitrivial_u + tol and rep.m <= rep.semitrivial_v + tol
    assert rep.m <= rep.trial_energy + tol
    br = energy_and_tau(rep.state, p)
    assert abs(br.tau) <= 1e-8 * br.omega_norm_sq
    assert rep.restarts_used == 3


@pytest.mark.parametrize("name", ["decoupled_run", "strong_run"])
def test_descent_history_nonincreasing(name, request):
    h = np.array(request.getfixturevalue(name).energy_history)
    assert np.all(np.diff(h) <= 8 * np.finfo(float).eps * h[1:])


def test_best_restart_is_lowest(decoupled_run):
    energies = [r.energy for r in decoupled_run.restarts]
    assert decoupled_run.m == pytest.approx(min(energies), rel=1e-12)
    # round-off ties go to the lowest restart index
    lowest = min(energies)
    first = next(i for i, e in enumerate(energies) if e <= lowest * (1 + 1e-14))
    assert decoupled_run.best_restart == first


def test_run_is_deterministic(grid1, u0_cubic, strong_run):
    again = minimize_ground_state(STRONG, grid1, u0=u0_cubic)
    assert np.array_equal(again.state.u.values, strong_run.state.u.values)
    assert again.m == strong_run.m


@pytest.mark.parametrize("kwargs", [dict(component_floor=1.0), dict(tol_energy=0.0), dict(restarts=0),
                                    dict(step_size=2.0), dict(max_iter=0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        MinimizerConfig(**kwargs)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        minimize_ground_state(ProblemParams(3, 3.0, 1.0, 1.0), default_grid(3))


def test_summary_is_plain_data(strong_run):
    import json
    data = json.loads(json.dumps(strong_run.summary()))
    assert data["classification"] == "nontrivial"
    assert len(data["restarts"]) == 3
