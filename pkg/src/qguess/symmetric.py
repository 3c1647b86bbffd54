"""Geometrically uniform ensembles and measurements.

A finite unitary group ``{U_i}`` and a seed state ``rho_0`` generate the
equiprobable ensemble ``rho_i = U_i rho_0 U_i^dagger``; a seed operator ``pi_0``
generates a measurement the same way.  If a unitary ``V`` commutes with the
group and ``V pi_0 V^dagger`` attains the smallest posterior guesswork over all
rank-one outcomes, the rotated measurement ``V Pi V^dagger`` is optimal, because
every one of its outcomes then has that same minimal posterior guesswork.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .ensembles import Ensemble, Povm
from .errors import ValidationError
from .guesswork import conditional_guesswork, guesswork
from .linalg import as_hermitian, canonical_phase

UNITARY_TOL = 1e-10
CLOSURE_TOL = 1e-8
COMMUTE_TOL = 1e-10
MATCH_TOL = 1e-6


def rotation_y(theta: float) -> np.ndarray:
    """Bloch-sphere rotation about y: ``[[cos t/2, -sin t/2], [sin t/2, cos t/2]]``.

    Defined for every real angle; ``rotation_y(a) @ rotation_y(b) == rotation_y(a + b)``.
    Angles differing by 2*pi give the same rotation up to an overall sign.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class UnitaryGroup:
    """A finite group of unitaries, checked numerically on construction."""

    elements: tuple

    def __post_init__(self):
        els = tuple(np.array(u, dtype=complex) for u in self.elements)
        if not els:
            raise ValidationError("group must have at least one element")
        d = els[0].shape[0]
        eye = np.eye(d)
        for k, u in enumerate(els):
            if u.shape != (d, d):
                raise ValidationError(f"element has shape {u.shape}", f"group[{k}]")
            if np.abs(u @ u.conj().T - eye).max() > UNITARY_TOL:
                raise ValidationError("element is not unitary", f"group[{k}]")

        def find(x):
            for j, u in enumerate(els):
                if np.linalg.norm(x - u) <= CLOSURE_TOL:
                    return j
            return None

        if find(eye) is None:
            raise ValidationError("group does not contain the identity")
        for k, u in enumerate(els):
            if find(u.conj().T) is None:
                raise ValidationError("inverse missing", f"group[{k}]")
            for j, v in enumerate(els):
                if find(u @ v) is None:
                    raise ValidationError(f"product with group[{j}] is not in the group",
                                          f"group[{k}]")
        for u in els:
            u.setflags(write=False)
        object.__setattr__(self, "elements", els)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def orbit(self, op) -> np.ndarray:
        op = np.asarray(op, dtype=complex)
        return np.array([u @ op @ u.conj().T for u in self.elements])

    def commutes_with(self, v, tol: float = COMMUTE_TOL) -> bool:
        v = np.asarray(v, dtype=complex)
        return all(np.abs(v @ u - u @ v).max() <= tol for u in self.elements)


@dataclass(frozen=True, eq=False)
class GeoUniformSpec:
    """Seed state, generating group and an optional intertwiner ``v``."""

    rho0: np.ndarray
    group: UnitaryGroup
    v: np.ndarray | None = None


def generate_ensemble(spec: GeoUniformSpec) -> Ensemble:
    n = spec.group.order
    return Ensemble(np.full(n, 1.0 / n), spec.group.orbit(as_hermitian(spec.rho0)))


def generate_povm(pi0, group: UnitaryGroup) -> Povm:
    ops = group.orbit(as_hermitian(pi0))
    dev = np.abs(ops.sum(axis=0) - np.eye(group.dim)).max()
    if dev > CLOSURE_TOL:
        raise ValidationError(f"orbit of pi0 sums to identity only within {dev:.2e}")
    return Povm(ops)


def rank_one_guesswork(e: Ensemble, kets: np.ndarray) -> np.ndarray:
    """Posterior guesswork for outcomes ``|v><v|``, one per row of ``kets``.

    Directions that no state can produce get ``inf``.
    """
    kets = np.atleast_2d(kets)
    q = np.clip(np.einsum("ka,iab,kb->ki", kets.conj(), e.weighted, kets).real, 0.0, None)
    w = q.sum(axis=1)
    q = -np.sort(-q, axis=1)
    g = q @ np.arange(1, e.n + 1)
    out = np.full(w.shape, np.inf)
    ok = w > 1e-14
    out[ok] = g[ok] / w[ok]
    return out


def qubit_ket(alpha, beta) -> np.ndarray:
    """``cos(alpha)|0> + exp(i beta) sin(alpha)|1>`` (vectorized over the inputs)."""
    alpha, beta = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float))
    return np.stack([np.cos(alpha), np.exp(1j * beta) * np.sin(alpha)], axis=-1)


def qubit_angles(ket) -> tuple[float, float]:
    """Canonical ``(alpha, beta)`` of a qubit direction with alpha in [0, pi), beta in [0, pi).

    Uses ``(alpha, beta + pi) ~ (pi - alpha, beta)``, so real directions get beta = 0.
    """
    v = np.asarray(ket, dtype=complex) / np.linalg.norm(ket)
    if abs(v[0]) > 1e-12:
        v = v * np.exp(-1j * np.angle(v[0]))
    else:
        return np.pi / 2, 0.0
    alpha = float(np.arctan2(abs(v[1]), v[0].real))
    beta = float(np.angle(v[1]) % (2 * np.pi)) if abs(v[1]) > 1e-12 else 0.0
    if beta >= 2 * np.pi - 1e-9:
        beta = 0.0
    if beta >= np.pi - 1e-9:
        alpha, beta = np.pi - alpha, max(beta - np.pi, 0.0)
    return alpha, beta


@dataclass(frozen=True)
class RankOneMin:
    """Smallest posterior guesswork over rank-one outcomes and where it occurs."""

    value: float
    ket: np.ndarray
    heuristic: bool
    alpha: float | None = None
    beta: float | None = None


def _polish(f, starts, xatol=1e-12):
    best = None
    for x0 in starts:
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-15, "maxiter": 20000})
        if best is None or res.fun < best.fun:
            best = res
    return best


def minimize_rank_one(e: Ensemble, grid: int = 720, restarts: int = 5,
                      samples: int = 1 << 14, seed=0) -> RankOneMin:
    """Minimize posterior guesswork over rank-one outcomes.

    Qubits: exhaustive ``grid x grid`` scan of ``cos a|0> + e^{ib} sin a|1>``
    then Nelder-Mead from the best ``restarts`` points; the result is reliable.
    Higher dimensions: quasi-random sphere sample plus the same polishing; the
    result carries ``heuristic=True`` because no global guarantee exists.
    """
    d = e.dim
    if d == 1:
        return RankOneMin(guesswork(e.probs), np.ones(1, dtype=complex), False)
    if d == 2:
        a, b = np.meshgrid(np.linspace(0, np.pi, grid, endpoint=False),
                           np.linspace(0, 2 * np.pi, grid, endpoint=False), indexing="ij")
        vals = rank_one_guesswork(e, qubit_ket(a.ravel(), b.ravel()))
        best = np.argsort(vals, kind="stable")[:restarts]
        starts = [np.array([a.ravel()[k], b.ravel()[k]]) for k in best]
        res = _polish(lambda x: rank_one_guesswork(e, qubit_ket(x[0], x[1]))[0], starts)
        ket = canonical_phase(qubit_ket(res.x[0], res.x[1]))
        alpha, beta = qubit_angles(ket)
        return RankOneMin(float(res.fun), ket, False, alpha, beta)
    sob = qmc.Sobol(2 * d, scramble=True, seed=seed)
    u = norm.ppf(np.clip(sob.random_base2(int(np.ceil(np.log2(samples)))), 1e-12, 1 - 1e-12))
    kets = u[:, :d] + 1j * u[:, d:]
    kets /= np.linalg.norm(kets, axis=1, keepdims=True)
    vals = rank_one_guesswork(e, kets)
    best = np.argsort(vals, kind="stable")[:restarts]

    def f(x):
        v = x[:d] + 1j * x[d:]
        return rank_one_guesswork(e, v / np.linalg.norm(v))[0]

    res = _polish(f, [np.concatenate([kets[k].real, kets[k].imag]) for k in best], 1e-10)
    v = res.x[:d] + 1j * res.x[d:]
    return RankOneMin(float(res.fun), canonical_phase(v / np.linalg.norm(v)), True)


@dataclass(frozen=True)
class SymmetryCheck:
    """Outcome of the commuting-rotation optimality test.

    ``optimal`` is conclusive only when ``heuristic`` is False.  ``value`` is
    the guesswork of the rotated measurement when ``optimal`` holds.
    """

    commutes: bool
    rank_one_min: float
    candidate_value: float
    optimal: bool
    heuristic: bool
    value: float | None
    povm: Povm | None


def check_symmetric_optimality(e: Ensemble, group: UnitaryGroup, pi0, v=None,
                               rank_one: RankOneMin | None = None) -> SymmetryCheck:
    """Test whether ``V Pi V^dagger`` is optimal for a group-generated ensemble.

    ``Pi`` is the orbit of ``pi0``; ``V`` defaults to the identity.
    """
    if group.dim != e.dim:
        raise ValidationError(f"dimension mismatch: group {group.dim}, ensemble {e.dim}")
    v = np.eye(e.dim, dtype=complex) if v is None else np.asarray(v, dtype=complex)
    if v.shape != (e.dim, e.dim):
        raise ValidationError(f"dimension mismatch: V has shape {v.shape}")
    if np.abs(v @ v.conj().T - np.eye(e.dim)).max() > UNITARY_TOL:
        raise ValidationError("V is not unitary")
    commutes = group.commutes_with(v)
    rotated = v @ as_hermitian(pi0) @ v.conj().T
    cand = _operator_guesswork(e, rotated)
    rank_one = rank_one or minimize_rank_one(e)
    optimal = commutes and abs(cand - rank_one.value) <= MATCH_TOL
    povm = value = None
    if optimal:
        povm = generate_povm(rotated, group)
        value = conditional_guesswork(e, povm).guesswork
    return SymmetryCheck(commutes, rank_one.value, cand, optimal, rank_one.heuristic, value, povm)


def _operator_guesswork(e: Ensemble, op: np.ndarray) -> float:
    q = np.clip(np.einsum("iab,ba->i", e.weighted, op).real, 0.0, None)
    w = q.sum()
    if w <= 1e-14:
        return float("inf")
    return guesswork(q / w)
