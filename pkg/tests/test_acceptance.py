"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import math
import time
from itertools import permutations

import numpy as np

from qguess.bounds import (bound_suite, entropy_lower_bound, entropy_upper_bound,
                           error_lower_bound, error_upper_bound, holevo_chi,
                           posterior_entropy_precondition, shannon_entropy)
from qguess.criteria import check_no_measurement
from qguess.ensembles import Ensemble, random_ensemble, random_povm
from qguess.fixtures import (complement5, computational_povm, geometric_tail, helstrom_pair,
                             identical_states, load_fixture, trine, trine_rotated_povm,
                             trine_sqrt_povm)
from qguess.guesswork import (conditional_entropy, conditional_error, conditional_guesswork,
                              error_probability, guesswork)
from qguess.sdp import certify, solve_med, solve_mgd
from qguess.search import search_qubit

SQRT3 = math.sqrt(3)
LOG3 = math.log2(3)


def trace_norm_error(e):
    diff = e.probs[0] * e.states[0] - e.probs[1] * e.states[1]
    return 0.5 * (1 - np.abs(np.linalg.eigvalsh(diff)).sum())


def enumerated_min_slack(e, a):
    worst = np.inf
    for perm in permutations(range(1, e.n + 1)):
        r = sum(perm[i] * e.probs[i] * e.states[i] for i in range(e.n))
        worst = min(worst, np.linalg.eigvalsh(r - a)[0])
    return worst


def test_criterion_01_trine_minimum_guesswork():
    e = load_fixture("trine").ensemble
    start = time.perf_counter()
    sol = solve_mgd(e)
    elapsed = time.perf_counter() - start
    assert abs(sol.objective - (2 - SQRT3 / 3)) <= 1e-6
    assert elapsed < 5.0


def test_criterion_02_trine_evaluations():
    e = trine()
    assert abs(conditional_guesswork(e, trine_sqrt_povm()).guesswork - 1.5) <= 1e-9
    assert abs(conditional_error(e, trine_sqrt_povm()) - 1 / 3) <= 1e-9
    assert abs(conditional_error(e, trine_rotated_povm()) - (2 / 3 - SQRT3 / 6)) <= 1e-9
    assert abs(conditional_guesswork(e, trine_rotated_povm()).guesswork - (2 - SQRT3 / 3)) <= 1e-9


def test_criterion_03_trine_certificate():
    e = trine()
    assert certify(e, trine_rotated_povm()).passed
    assert not certify(e, trine_sqrt_povm()).passed


def test_criterion_04_two_state_identity():
    rng = np.random.default_rng(4)
    for k in range(100):
        d = int(rng.integers(1, 5))
        e = random_ensemble(d, 2, seed=rng.integers(2**32), rank=int(rng.integers(1, d + 1)))
        mgd, med = solve_mgd(e).objective, solve_med(e).objective
        assert abs(mgd - (med + 1)) <= 1e-6, k
        assert abs(med - trace_norm_error(e)) <= 1e-7, k


def test_criterion_05_error_sandwich():
    rng = np.random.default_rng(5)
    for k in range(200):
        n, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        e = random_ensemble(d, n, seed=rng.integers(2**32), rank=int(rng.integers(1, d + 1)))
        g, pe = solve_mgd(e).objective, solve_med(e).objective
        assert error_lower_bound(pe) - 1e-7 <= g <= error_upper_bound(pe, n) + 1e-7, k


def test_criterion_06_geometric_tail_equality():
    e = geometric_tail()
    h, chi = shannon_entropy(e.probs), holevo_chi(e)
    assert abs(h - (13 / 4 - 0.75 * LOG3)) <= 1e-6
    assert abs(chi - (5 / 4 - 0.75 * LOG3)) <= 1e-6
    g = conditional_guesswork(e, computational_povm(2)).guesswork
    assert abs(g - 2) <= 1e-5
    assert abs(entropy_lower_bound(h - chi) - g) <= 1e-5


def test_criterion_07_posterior_entropy_precondition():
    check = posterior_entropy_precondition(complement5(), samples=2**14, seed=7)
    assert check.min_entropy >= 2 - 1e-9
    assert check.holds


def test_criterion_08_no_measurement_soundness():
    rng = np.random.default_rng(8)
    for k in range(100):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        rho = random_ensemble(d, 1, seed=rng.integers(2**32)).states[0]
        e = Ensemble(rng.dirichlet(np.ones(n)), np.array([rho] * n))
        assert check_no_measurement(e).holds, k
        assert abs(solve_mgd(e).objective - guesswork(e.probs)) <= 1e-6, k
    for k in range(100):
        d, n = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        e = random_ensemble(d, n, seed=rng.integers(2**32), uniform=True)
        assert not check_no_measurement(e).holds, k
        assert solve_mgd(e).objective < guesswork(e.probs) - 1e-6, k


def test_criterion_09_qubit_search_agreement():
    rng = np.random.default_rng(9)
    for k in range(50):
        e = random_ensemble(2, 3, seed=rng.integers(2**32), rank=int(rng.integers(1, 3)))
        found = search_qubit(e, seed=k).best_value
        assert abs(found - solve_mgd(e).objective) <= 1e-3, k


def _random_distribution(rng):
    n = int(rng.integers(1, 17))
    p = rng.dirichlet(np.full(n, rng.choice([0.2, 1.0, 5.0])))
    if rng.random() < 0.2:
        p[rng.integers(n)] = 0.0
        p = p / p.sum() if p.sum() > 0 else np.full(n, 1 / n)
    return p


def test_criterion_10_bound_properties():
    rng = np.random.default_rng(10)
    guarded = 0
    for _ in range(1000):
        p = _random_distribution(rng)
        n, g, pe, h = len(p), guesswork(p), error_probability(p), shannon_entropy(p)
        assert g <= error_upper_bound(pe, n) + 1e-10
        assert g >= error_lower_bound(pe) - 1e-10
        assert g <= entropy_upper_bound(h, n) + 1e-10
        if h >= 2:
            guarded += 1
            assert g >= entropy_lower_bound(h) - 1e-10
    assert guarded >= 50

    cond_guarded = 0
    for _ in range(200):
        n, d = int(rng.integers(2, 9)), int(rng.integers(1, 4))
        e = random_ensemble(d, n, seed=rng.integers(2**32))
        m = random_povm(d, int(rng.integers(1, 5)), seed=rng.integers(2**32))
        g = conditional_guesswork(e, m).guesswork
        pe, h = conditional_error(e, m), conditional_entropy(e, m)
        assert g <= error_upper_bound(pe, n) + 1e-10
        assert g >= error_lower_bound(pe) - 1e-10
        assert g <= entropy_upper_bound(h, n) + 1e-10
        reports = {r.name: r for r in bound_suite(e, p_err_opt=0.0, povm=m)}
        lower = reports["conditional_entropy_lower"]
        if lower.precondition_met:
            cond_guarded += 1
            assert g >= entropy_lower_bound(h) - 1e-10
        assert all(r.holds is not False for r in reports.values() if r.name.startswith("conditional"))
    assert cond_guarded >= 10

    for n in range(1, 12):
        for k in range(1, n + 1):
            p = np.zeros(n)
            p[:k] = 1 / k
            assert abs(error_lower_bound(error_probability(p)) - guesswork(p)) <= 1e-10
        uniform = np.full(n, 1 / n)
        assert abs(entropy_upper_bound(shannon_entropy(uniform), n) - guesswork(uniform)) <= 1e-10
        point = np.eye(n)[0]
        assert abs(entropy_upper_bound(shannon_entropy(point), n) - guesswork(point)) <= 1e-10


def test_criterion_11_full_enumeration_audit():
    rng = np.random.default_rng(11)
    corpus = [trine(), helstrom_pair(), identical_states(), complement5()]
    for _ in range(40):
        n, d = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        corpus.append(random_ensemble(d, n, seed=rng.integers(2**32),
                                      rank=int(rng.integers(1, d + 1))))
    for k, e in enumerate(corpus):
        assert e.n <= 5
        sol = solve_mgd(e)
        assert enumerated_min_slack(e, sol.A) >= -1e-8, k
