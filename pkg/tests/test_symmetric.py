import numpy as np
import pytest

from qguess.ensembles import Ensemble, posterior, random_ensemble
from qguess.errors import ValidationError
from qguess.fixtures import (TRINE_GUESSWORK, trine, trine_group, trine_rotated_povm,
                             trine_sqrt_povm)
from qguess.guesswork import guesswork
from qguess.linalg import projector
from qguess.sdp import solve_mgd
from qguess.symmetric import (GeoUniformSpec, UnitaryGroup, check_symmetric_optimality,
                              generate_ensemble, generate_povm, minimize_rank_one, qubit_angles,
                              qubit_ket, rank_one_guesswork, rotation_y)

KET0 = np.array([1.0, 0.0])


def trine_posterior_closed_form(alpha, beta):
    c2, s2 = np.cos(2 * alpha), np.sin(2 * alpha)
    return np.array([(1 + c2) / 3,
                     (2 - c2 - np.sqrt(3) * s2 * np.cos(beta)) / 6,
                     (2 - c2 + np.sqrt(3) * s2 * np.cos(beta)) / 6])


def test_rotation_y_basics():
    assert np.allclose(rotation_y(0), np.eye(2))
    eps = 1e-9
    assert np.allclose(rotation_y(2 * np.pi - eps), -np.eye(2), atol=1e-8)
    rng = np.random.default_rng(0)
    for a, b in rng.uniform(0, 2 * np.pi, size=(50, 2)):
        ab = rotation_y(a) @ rotation_y(b)
        assert np.allclose(ab, rotation_y(b) @ rotation_y(a), atol=1e-12)
        assert np.allclose(ab, rotation_y(a + b), atol=1e-12)
        wrapped = rotation_y((a + b) % (2 * np.pi))
        assert np.allclose(ab, wrapped, atol=1e-12) or np.allclose(ab, -wrapped, atol=1e-12)


def test_trine_generation():
    e = trine()
    kets = [KET0, np.array([-0.5, np.sqrt(3) / 2]), np.array([-0.5, -np.sqrt(3) / 2])]
    for rho, k in zip(e.states, kets):
        assert np.allclose(rho, projector(k), atol=1e-12)
    assert np.allclose(e.probs, 1 / 3)
    assert np.allclose(generate_povm((2 / 3) * projector(KET0), trine_group()).ops,
                       (2 / 3) * e.states)


def test_rotated_measurement_closed_form():
    for k, op in enumerate(trine_rotated_povm().ops, start=1):
        ang = 2 * k * np.pi / 3 - 7 * np.pi / 12
        psi = np.array([np.cos(ang), np.sin(ang)])
        assert np.allclose(op, (2 / 3) * projector(psi), atol=1e-12)


def test_generation_is_deterministic_and_trivial_group():
    spec = GeoUniformSpec(projector(KET0), trine_group())
    assert np.array_equal(generate_ensemble(spec).states, generate_ensemble(spec).states)
    single = generate_ensemble(GeoUniformSpec(np.eye(2) / 2, UnitaryGroup((np.eye(2),))))
    assert single.n == 1


def test_group_validation():
    with pytest.raises(ValidationError, match="unitary"):
        UnitaryGroup((np.eye(2), 2 * np.eye(2)))
    with pytest.raises(ValidationError):
        UnitaryGroup((np.eye(2), rotation_y(1.0)))
    with pytest.raises(ValidationError, match="identity"):
        UnitaryGroup((rotation_y(2 * np.pi),))
    with pytest.raises(ValidationError):
        generate_povm(projector(KET0), trine_group())


def test_trine_posterior_formulas():
    e = trine()
    for alpha in np.linspace(0, np.pi, 100):
        for beta in np.linspace(0, 2 * np.pi, 100):
            v = qubit_ket(alpha, beta)
            try:
                post, _ = posterior(e, projector(v))
            except ValueError:
                continue
            assert np.allclose(post, trine_posterior_closed_form(alpha, beta), atol=1e-10)


def test_minimize_rank_one_trine():
    e = trine()
    res = minimize_rank_one(e)
    assert res.value == pytest.approx(TRINE_GUESSWORK, abs=1e-10)
    assert not res.heuristic and res.beta == pytest.approx(0, abs=1e-5)
    # minimizers are the odd multiples of pi/12
    assert min(abs(res.alpha - k * np.pi / 12) for k in (1, 3, 5, 7, 9, 11)) < 1e-5
    for alpha in (np.pi / 12, np.pi / 4):
        assert rank_one_guesswork(e, qubit_ket(alpha, 0.0))[0] == pytest.approx(TRINE_GUESSWORK, abs=1e-12)


def test_minimize_rank_one_single_state():
    e = random_ensemble(2, 1, seed=0)
    assert minimize_rank_one(e).value == pytest.approx(1)
    assert minimize_rank_one(random_ensemble(1, 3, seed=0)).value == pytest.approx(
        guesswork(random_ensemble(1, 3, seed=0).probs))


def test_minimize_rank_one_higher_dim_is_heuristic():
    e = random_ensemble(3, 3, seed=1)
    res = minimize_rank_one(e)
    assert res.heuristic
    assert res.value == pytest.approx(rank_one_guesswork(e, res.ket)[0])


def test_rank_one_sufficiency(rng):
    e = trine()
    floor = minimize_rank_one(e).value
    for _ in range(300):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        op = g @ g.conj().T
        post, _ = posterior(e, op)
        assert guesswork(post) >= floor - 1e-8


def test_qubit_angles_roundtrip(rng):
    for a, b in rng.uniform(0, [np.pi, 2 * np.pi], size=(50, 2)):
        alpha, beta = qubit_angles(qubit_ket(a, b))
        assert 0 <= alpha < np.pi + 1e-12 and 0 <= beta < np.pi
        assert abs(np.vdot(qubit_ket(alpha, beta), qubit_ket(a, b))) == pytest.approx(1)


def test_symmetric_check_trine():
    e = trine()
    r1 = minimize_rank_one(e)
    c = check_symmetric_optimality(e, trine_group(), (2 / 3) * projector(KET0), rotation_y(np.pi / 6),
                                   rank_one=r1)
    assert c.commutes and c.optimal and not c.heuristic
    assert c.value == pytest.approx(TRINE_GUESSWORK, abs=1e-9)
    assert c.value == pytest.approx(solve_mgd(e).objective, abs=1e-6)
    per = [guesswork(posterior(e, op)[0]) for op in c.povm.ops]
    assert np.ptp(per) <= 1e-10
    plain = check_symmetric_optimality(e, trine_group(), (2 / 3) * projector(KET0), rank_one=r1)
    assert plain.commutes and not plain.optimal
    assert plain.candidate_value == pytest.approx(1.5)
    assert np.allclose(trine_sqrt_povm().ops, generate_povm((2 / 3) * projector(KET0), trine_group()).ops)


def test_symmetric_check_trivial_group():
    e = Ensemble([1.0], [np.diag([0.7, 0.3])])
    c = check_symmetric_optimality(e, UnitaryGroup((np.eye(2),)), np.eye(2))
    assert c.optimal and c.value == pytest.approx(1)


def test_symmetric_check_dimension_mismatch():
    with pytest.raises(ValidationError):
        check_symmetric_optimality(random_ensemble(3, 3, seed=0), trine_group(), np.eye(2))
