"""Direct search over measurements, used as an independent check on the SDP.

For a fixed pool of unit directions ``v_k`` the conditional guesswork of the
rank-one measurement ``{w_k |v_k><v_k|}`` is linear in the weights, so the best
measurement supported on the pool is a linear program with the completeness
constraint ``sum_k w_k |v_k><v_k| = I``.  The searches below build pools (a
grid for qubits, random directions otherwise), solve that LP, and refine the
pool around the directions the LP keeps.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .ensembles import Ensemble, Povm
from .errors import SolverError, ValidationError
from .guesswork import conditional_guesswork, merge_equivalent_outcomes
from .linalg import hermitian_basis, projector
from .symmetric import qubit_ket

WEIGHT_FLOOR = 1e-10


@dataclass(frozen=True)
class SearchResult:
    """Best measurement found; ``best_value`` is its re-evaluated conditional guesswork."""

    best_povm: Povm
    best_value: float
    evaluations: int
    method: str


def direction_costs(e: Ensemble, kets: np.ndarray) -> np.ndarray:
    """Unnormalized posterior guesswork ``sum_r r * q_(r)`` of each ``|v><v|``."""
    q = np.clip(np.einsum("ka,iab,kb->ki", kets.conj(), e.weighted, kets).real, 0.0, None)
    q = -np.sort(-q, axis=1)
    return q @ np.arange(1, e.n + 1)


def _completion_lp(e: Ensemble, kets: np.ndarray):
    """Best weights on a direction pool; returns (weights, value) or None if infeasible."""
    basis = hermitian_basis(e.dim)
    a_eq = np.einsum("sab,ka,kb->sk", basis.conj(), kets, kets.conj()).real
    b_eq = np.einsum("saa->s", basis.conj()).real
    res = linprog(direction_costs(e, kets), A_eq=a_eq, b_eq=b_eq, bounds=(0, None),
                  method="highs")
    if res.status != 0:
        return None
    return res.x, float(res.fun)


def _assemble(e: Ensemble, kets: np.ndarray, weights: np.ndarray) -> Povm:
    keep = weights > WEIGHT_FLOOR
    ops = np.array([w * projector(v) for w, v in zip(weights[keep], kets[keep])])
    return merge_equivalent_outcomes(e, Povm.normalized(ops))


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _trivial(e: Ensemble, method: str) -> SearchResult:
    povm = Povm(np.eye(e.dim, dtype=complex)[None])
    return SearchResult(povm, conditional_guesswork(e, povm).guesswork, 1, method)


def search_qubit(e: Ensemble, resolution: int = 360, seed=0, refine: bool = True,
                 zoom_rounds: int = 12) -> SearchResult:
    """Qubit search on an ``(alpha, beta)`` grid of ``cos a|0> + e^{ib} sin a|1>``.

    The grid has ``resolution`` azimuths (rotated by a seed-dependent offset)
    and ``resolution // 2 + 1`` polar angles, so doubling the resolution
    refines the same lattice.  With ``refine`` the pool is then zoomed around
    the LP's support, halving the radius each round.
    """
    if e.dim != 2:
        raise ValidationError(f"search_qubit needs a qubit ensemble, got dim {e.dim}")
    if resolution < 4:
        raise ValidationError("resolution must be at least 4")
    if e.n == 1:
        return _trivial(e, "grid")
    # The offset ignores the resolution, so doubled grids contain coarser ones.
    offset = np.random.default_rng(seed).uniform(0, 2 * np.pi)
    a, b = np.meshgrid(np.linspace(0, np.pi / 2, resolution // 2 + 1),
                       np.linspace(0, 2 * np.pi, resolution, endpoint=False) + offset,
                       indexing="ij")
    kets = qubit_ket(a.ravel(), b.ravel())
    evaluations = len(kets)
    sol = _completion_lp(e, kets)
    if sol is None:
        raise SolverError("grid pool admits no complete measurement")
    weights, value = sol
    method = "grid"
    if refine:
        method = "refined"
        radius = np.pi / resolution
        steps = (-1, -0.5, 0, 0.5, 1)
        offsets = np.array([(da, db) for da in steps for db in steps])
        for _ in range(zoom_rounds):
            keep = weights > WEIGHT_FLOOR
            centers = np.array([_angles(v) for v in kets[keep]])
            pts = (centers[:, None, :] + radius * offsets[None]).reshape(-1, 2)
            pool = np.concatenate([kets[keep], qubit_ket(pts[:, 0], pts[:, 1])])
            evaluations += len(pool)
            sol = _completion_lp(e, pool)
            if sol is not None and sol[1] <= value:
                kets, (weights, value) = pool, sol
            radius /= 2
    povm = _assemble(e, kets, weights)
    return SearchResult(povm, conditional_guesswork(e, povm).guesswork, evaluations, method)


def _angles(v: np.ndarray) -> tuple[float, float]:
    v = v * np.exp(-1j * np.angle(v[0])) if abs(v[0]) > 1e-12 else v
    return float(np.arctan2(abs(v[1]), v[0].real)), float(np.angle(v[1]))


def _threads() -> int:
    raw = os.environ.get("QGUESS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValidationError(f"QGUESS_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _descent(e: Ensemble, seed_seq: np.random.SeedSequence, pool_size: int, rounds: int):
    rng = np.random.default_rng(seed_seq)
    d = e.dim

    def draw(k):
        return _unit_rows(rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d)))

    # The standard basis keeps the first pool feasible.
    kets = np.concatenate([np.eye(d, dtype=complex), draw(pool_size)])
    sol = _completion_lp(e, kets)
    weights, value = sol
    evaluations = len(kets)
    history = [value]
    scale = 0.5
    for _ in range(rounds):
        keep = weights > WEIGHT_FLOOR
        base = kets[keep]
        jitter = np.repeat(base, 8, axis=0)
        jitter = _unit_rows(jitter + scale * (rng.normal(size=jitter.shape)
                                              + 1j * rng.normal(size=jitter.shape)))
        pool = np.concatenate([base, jitter, draw(pool_size // 4)])
        evaluations += len(pool)
        sol = _completion_lp(e, pool)
        if sol is not None and sol[1] <= value:
            kets, (weights, value) = pool, sol
        history.append(value)
        scale *= 0.7
    return value, kets, weights, evaluations, history


def search_general(e: Ensemble, restarts: int = 4, seed=0, rounds: int = 30,
                   pool_size: int | None = None) -> SearchResult:
    """Random-restart search in any dimension.

    Each restart solves the LP on a random direction pool, then repeatedly
    perturbs the supporting directions and re-solves, accepting only
    improvements, so its objective never increases.  Outcomes of the reported
    measurement are merged by guessing strategy, leaving at most ``n!``.
    Restarts run on ``QGUESS_THREADS`` threads (default: all cores) and are
    combined by (value, restart index), so the result depends only on the seed.
    """
    if restarts < 1:
        raise ValidationError("restarts must be at least 1")
    if e.n == 1 or e.dim == 1:
        return _trivial(e, "random-restart")
    pool = pool_size or max(64, 16 * e.dim * e.dim)
    children = np.random.SeedSequence(seed).spawn(restarts)
    workers = min(_threads(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            runs = list(ex.map(lambda s: _descent(e, s, pool, rounds), children))
    else:
        runs = [_descent(e, s, pool, rounds) for s in children]
    k = min(range(restarts), key=lambda i: (runs[i][0], i))
    _, kets, weights, _, _ = runs[k]
    povm = _assemble(e, kets, weights)
    return SearchResult(povm, conditional_guesswork(e, povm).guesswork,
                        sum(r[3] for r in runs), "random-restart")
