import math

import numpy as np
import pytest

from qguess.bounds import (bound_suite, entropy_lower_bound, entropy_pack, entropy_upper_bound,
                           error_lower_bound, error_upper_bound, holevo_chi, lambda_lower,
                           posterior_entropy_precondition, shannon_entropy, subentropy,
                           unambiguous_upper_bound, von_neumann_entropy)
from qguess.ensembles import Ensemble, random_ensemble
from qguess.errors import ValidationError
from qguess.fixtures import (TRINE_GUESSWORK, complement5, geometric_tail, helstrom_pair,
                             identical_states, trine)
from qguess.sdp import solve_med, solve_mgd


def product_formula_subentropy(lam):
    """-sum_k prod_{l != k} l_k / (l_k - l_l) * l_k log2 l_k, for distinct positive eigenvalues."""
    lam = [x for x in lam if x > 0]
    total = 0.0
    for k, lk in enumerate(lam):
        coeff = 1.0
        for j, lj in enumerate(lam):
            if j != k:
                coeff *= lk / (lk - lj)
        total += coeff * lk * math.log2(lk)
    return -total


def test_shannon_entropy_examples():
    assert shannon_entropy([1.0, 0.0]) == 0
    assert shannon_entropy([0.25] * 4) == pytest.approx(2)
    assert shannon_entropy(geometric_tail().probs) == pytest.approx(13 / 4 - 0.75 * math.log2(3), abs=1e-6)


def test_holevo_examples():
    assert holevo_chi(identical_states()) == 0
    assert holevo_chi(Ensemble.from_kets([0.5, 0.5], np.eye(2))) == pytest.approx(1)
    assert holevo_chi(geometric_tail()) == pytest.approx(5 / 4 - 0.75 * math.log2(3), abs=1e-6)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2)


def test_subentropy_examples():
    assert subentropy(np.diag([1.0, 0.0])) == 0
    assert subentropy(np.eye(2) / 2) == pytest.approx(1 - 1 / (2 * math.log(2)), abs=1e-14)
    assert subentropy(np.diag([0.75, 0.25])) == pytest.approx(
        product_formula_subentropy([0.75, 0.25]), abs=1e-14)


def test_subentropy_matches_product_formula(rng):
    for _ in range(50):
        d = int(rng.integers(2, 6))
        lam = rng.dirichlet(np.ones(d))
        if np.min(np.diff(np.sort(lam))) < 1e-2:
            continue
        u = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
        rho = u @ np.diag(lam) @ u.conj().T
        assert subentropy(rho) == pytest.approx(product_formula_subentropy(lam), abs=1e-10)


@pytest.mark.parametrize("spectrum", [[0.5, 0.5], [1 / 3] * 3, [0.4, 0.4, 0.2], [0.25] * 4,
                                      [0.3, 0.3, 0.2, 0.2]])
def test_subentropy_degenerate_continuity(spectrum, rng):
    base = subentropy(np.diag(spectrum))
    d = len(spectrum)
    for _ in range(5):
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        e = (g + g.conj().T) / 2
        e -= np.trace(e) / d * np.eye(d)
        pert = np.diag(spectrum) + 1e-6 * e / np.linalg.norm(e)
        assert subentropy(pert) == pytest.approx(base, abs=1e-4)
    # graded spectrum: distinct eigenvalues, evaluable by the product formula in mpmath-free form
    graded = np.array(spectrum) + 1e-6 * (np.arange(d) - (d - 1) / 2)
    assert subentropy(np.diag(graded)) == pytest.approx(base, abs=1e-4)


def test_lambda_below_chi_and_nonnegative(rng):
    for seed in range(40):
        e = random_ensemble(int(1 + seed % 4), int(1 + seed % 5), seed=seed)
        p = entropy_pack(e)
        assert p.holevo_chi >= 0 and p.subentropy_Q >= 0
        assert p.lambda_lower <= p.holevo_chi + 1e-10
    assert lambda_lower(trine()) == pytest.approx(subentropy(np.eye(2) / 2))


def test_closed_form_bounds():
    assert error_upper_bound(0.5, 4) == 2
    assert error_lower_bound(0.5) == 1.5
    assert entropy_lower_bound(2) == 2
    assert entropy_upper_bound(1, 2) == pytest.approx(1.5)
    assert entropy_upper_bound(0.0, 1) == 1
    assert unambiguous_upper_bound(5, 0) == 1
    assert unambiguous_upper_bound(3, 1) == 2
    assert unambiguous_upper_bound(3, 0.5) == 1.5
    with pytest.raises(ValidationError):
        unambiguous_upper_bound(3, 1.5)


def test_precondition_examples():
    pre = posterior_entropy_precondition(complement5(), samples=2000)
    assert pre.holds and pre.min_entropy >= 2 - 1e-9
    assert not posterior_entropy_precondition(Ensemble.from_kets([0.5, 0.5], np.eye(2))).holds
    e = Ensemble(np.full(5, 0.2), [np.diag([0.6, 0.4])] * 5)
    pre = posterior_entropy_precondition(e, samples=256)
    assert pre.holds and pre.min_entropy == pytest.approx(math.log2(5))


def test_bound_suite_trine():
    reports = {r.name: r for r in bound_suite(trine(), g_opt=TRINE_GUESSWORK)}
    assert reports["subentropy_upper"].value >= TRINE_GUESSWORK
    assert reports["optimal_error_lower"].holds and reports["optimal_error_upper"].holds
    assert reports["subentropy_upper"].holds
    assert not reports["entropy_lower"].precondition_met
    assert reports["entropy_lower"].holds is None


def test_bound_suite_two_states_collapse():
    e = helstrom_pair()
    g = solve_mgd(e).objective
    reports = {r.name: r for r in bound_suite(e, g_opt=g)}
    assert reports["optimal_error_upper"].value == pytest.approx(g, abs=1e-6)
    assert reports["optimal_error_lower"].value <= g + 1e-9


def test_bound_suite_complement5_precondition():
    e = complement5()
    reports = {r.name: r for r in bound_suite(e, p_inc=0.5)}
    assert reports["holevo_lower"].precondition_met
    assert reports["unambiguous_upper"].value == pytest.approx(2.0)


def test_bound_suite_with_measurement():
    from qguess.fixtures import computational_povm
    e = geometric_tail()
    reports = {r.name: r for r in bound_suite(e, povm=computational_povm(), p_err_opt=0.5)}
    for name in ("conditional_error_upper", "conditional_error_lower", "conditional_entropy_upper"):
        assert reports[name].holds
    assert not reports["conditional_entropy_lower"].precondition_met


def test_uniform_k_point_equality():
    for k in range(1, 9):
        p = np.zeros(10)
        p[:k] = 1 / k
        from qguess.guesswork import error_probability, guesswork
        assert error_lower_bound(error_probability(p)) == pytest.approx(guesswork(p), abs=1e-12)
        assert (k + 1) / 2 == pytest.approx(guesswork(p))


def test_holevo_bound_geometric_equality():
    e = geometric_tail()
    p = entropy_pack(e)
    assert entropy_lower_bound(p.shannon_H - p.holevo_chi) == pytest.approx(2, abs=1e-5)


def test_min_error_matches_bound_inputs():
    e = trine()
    assert solve_med(e).objective == pytest.approx(1 / 3, abs=1e-7)
