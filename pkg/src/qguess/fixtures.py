"""Reference ensembles with known answers, and the bundled JSON copies of them."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .ensembles import Ensemble, Povm
from .io import LoadedInput, dump_input, dump_povm, encode_matrix, load_input, save_json
from .linalg import projector
from .symmetric import GeoUniformSpec, UnitaryGroup, generate_ensemble, generate_povm, rotation_y

TRINE_GUESSWORK = 2 - np.sqrt(3) / 3
TRINE_ERROR = 1 / 3
GEOMETRIC_TERMS = 30


def trine_group() -> UnitaryGroup:
    return UnitaryGroup((rotation_y(0.0), rotation_y(4 * np.pi / 3), rotation_y(8 * np.pi / 3)))


def trine_spec() -> GeoUniformSpec:
    return GeoUniformSpec(projector(np.array([1.0, 0.0])), trine_group(), rotation_y(np.pi / 6))


def trine() -> Ensemble:
    """Three equiprobable qubit states 120 degrees apart on the Bloch x-z circle."""
    return generate_ensemble(trine_spec())


def trine_sqrt_povm() -> Povm:
    """Square-root measurement ``{(2/3) rho_i}``; minimizes the error probability."""
    return generate_povm((2 / 3) * projector(np.array([1.0, 0.0])), trine_group())


def trine_rotated_povm() -> Povm:
    """The square-root measurement rotated by ``R_y(pi/6)``; minimizes guesswork."""
    v = rotation_y(np.pi / 6)
    return Povm(np.array([v @ op @ v.conj().T for op in trine_sqrt_povm().ops]))


def complement5() -> Ensemble:
    """``rho_i = (I - |i><i|) / 4`` in dimension 5 with a uniform prior."""
    eye = np.eye(5)
    return Ensemble(np.full(5, 0.2), np.array([(eye - np.outer(eye[i], eye[i])) / 4 for i in range(5)]))


def geometric_tail(terms: int = GEOMETRIC_TERMS) -> Ensemble:
    """Prior ``3/8, 3/8, 1/2^3, 1/2^4, ...`` truncated to ``terms`` messages.

    The last message absorbs the dropped tail so the prior stays normalized.
    States are ``diag(2/3, 1/3)``, ``diag(1/3, 2/3)`` and ``I/2`` for the rest.
    """
    if terms < 3:
        raise ValueError("need at least 3 terms")
    p = np.array([3 / 8, 3 / 8] + [2.0 ** -i for i in range(3, terms + 1)])
    p[-1] += 1.0 - p.sum()
    states = [np.diag([2 / 3, 1 / 3]), np.diag([1 / 3, 2 / 3])] + [np.eye(2) / 2] * (terms - 2)
    return Ensemble(p, np.array(states))


def computational_povm(dim: int = 2) -> Povm:
    eye = np.eye(dim)
    return Povm(np.array([np.outer(eye[i], eye[i]) for i in range(dim)]))


def helstrom_pair() -> Ensemble:
    """``|0>`` and ``|+>`` with equal priors; optimal error is ``(1 - 1/sqrt 2) / 2``."""
    return Ensemble.from_kets([0.5, 0.5], [[1, 0], [1, 1]])


def identical_states() -> Ensemble:
    """Three copies of one mixed qubit state under a non-uniform prior."""
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    return Ensemble(np.array([0.5, 0.3, 0.2]), np.array([rho] * 3))


def _documents() -> dict:
    spec = trine_spec()
    return {
        "trine.json": dump_input(trine()),
        "trine_sqrt_povm.json": {"povm": dump_povm(trine_sqrt_povm())},
        "trine_rotated_povm.json": {"povm": dump_povm(trine_rotated_povm())},
        "trine_symmetry.json": {
            "group": [encode_matrix(u) for u in spec.group.elements],
            "pi0": encode_matrix((2 / 3) * spec.rho0),
            "V": encode_matrix(spec.v),
        },
        "complement5.json": dump_input(complement5()),
        "geometric_tail.json": dump_input(geometric_tail(), computational_povm()),
        "helstrom_pair.json": dump_input(helstrom_pair()),
        "identical_states.json": dump_input(identical_states()),
    }


FIXTURE_FILES = tuple(_documents())


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture file (``name`` with or without ``.json``)."""
    if not name.endswith(".json"):
        name += ".json"
    if name not in FIXTURE_FILES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_FILES)}")
    return Path(str(resources.files("qguess") / "data" / name))


def load_fixture(name: str) -> LoadedInput:
    return load_input(fixture_path(name))


def write_fixtures(directory) -> list[Path]:
    """Regenerate every bundled fixture file in ``directory``."""
    out = []
    for name, doc in _documents().items():
        path = Path(directory) / name
        save_json(doc, path)
        out.append(path)
    return out
