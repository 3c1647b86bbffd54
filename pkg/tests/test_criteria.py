import numpy as np
import pytest

from qguess.criteria import check_no_measurement, equal_probability_pairs
from qguess.ensembles import Ensemble, random_ensemble
from qguess.fixtures import identical_states, trine
from qguess.guesswork import guesswork
from qguess.sdp import solve_mgd


def identical_state_ensemble(seed):
    base = random_ensemble(int(1 + seed % 3), 1, seed=seed).states[0]
    n = int(2 + seed % 4)
    probs = np.random.default_rng(seed).dirichlet(np.ones(n))
    return Ensemble(probs, np.array([base] * n))


def test_identical_states_hold():
    v = check_no_measurement(identical_states())
    assert v.holds and v.witness is None
    assert v.prior_guesswork == pytest.approx(1.7)


def test_uniform_distinct_states_fail():
    v = check_no_measurement(random_ensemble(2, 3, seed=1, uniform=True))
    assert not v.holds and v.witness is not None


def test_trine_fails_and_sdp_agrees():
    v = check_no_measurement(trine())
    assert not v.holds
    assert solve_mgd(trine()).objective < v.prior_guesswork - 1e-6


def test_scaled_ordering_holds():
    # p_i rho_i ordered in the Loewner sense: rho_2 is dominated after weighting
    rho1 = np.diag([0.5, 0.5])
    rho2 = np.diag([0.7, 0.3])
    e = Ensemble([0.75, 0.25], [rho1, rho2])
    assert check_no_measurement(e).holds
    assert solve_mgd(e).objective == pytest.approx(guesswork(e.probs), abs=1e-6)


def test_equal_probability_pairs():
    assert equal_probability_pairs(random_ensemble(2, 3, seed=0, uniform=True)) == [(0, 1), (0, 2), (1, 2)]
    assert equal_probability_pairs(Ensemble([0.5, 0.3, 0.2], [np.eye(2) / 2] * 3)) == []
    assert equal_probability_pairs(Ensemble([0.4, 0.4, 0.2], [np.eye(2) / 2] * 3)) == [(0, 1)]


def test_equal_priors_need_equal_weighted_states():
    rho1, rho2 = np.diag([0.6, 0.4]), np.diag([0.4, 0.6])
    v = check_no_measurement(Ensemble([0.5, 0.5], [rho1, rho2]))
    assert not v.holds


@pytest.mark.parametrize("seed", range(30))
def test_soundness_on_conforming_ensembles(seed):
    e = identical_state_ensemble(seed)
    assert check_no_measurement(e).holds
    assert abs(solve_mgd(e).objective - guesswork(e.probs)) <= 1e-6


@pytest.mark.parametrize("seed", range(30))
def test_verdict_matches_solver(seed):
    e = random_ensemble(2, int(2 + seed % 3), seed=seed)
    v = check_no_measurement(e)
    opt = solve_mgd(e).objective
    if v.holds:
        assert abs(opt - guesswork(e.probs)) <= 1e-6
    else:
        assert opt < guesswork(e.probs) - 1e-8


@pytest.mark.parametrize("seed", range(20))
def test_uniform_prior_distinct_states_always_improvable(seed):
    e = random_ensemble(2 + seed % 2, int(2 + seed % 3), seed=seed, uniform=True)
    assert not check_no_measurement(e).holds
    assert solve_mgd(e).objective < guesswork(e.probs) - 1e-8
