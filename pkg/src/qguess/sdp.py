"""Minimum-guesswork and minimum-error optimization by a log-det barrier method.

Both problems share the shape

    maximize Tr(A)  subject to  A <= R_k  for every constraint target R_k,

with Hermitian ``A``.  For guesswork the targets are ``R_s = sum_i s(i) p_i rho_i``
over query orders ``s``; for error probability they are ``-p_i rho_i`` (so that
``-A`` is the usual ``Y >= p_i rho_i`` variable).  The barrier subproblem

    minimize  -Tr(A) - mu * sum_k log det(R_k - A)

is solved by damped Newton steps in the d*d real coordinates of ``A``.  At a
central point the matrices ``mu (R_k - A)^-1`` sum to the identity and form a
measurement, which gives a dual bound and a warm hint for measurement recovery.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .ensembles import Ensemble, Povm
from .errors import RecoveryError, SolverError, ValidationError
from .guesswork import (
    Strategy,
    conditional_guesswork,
    merge_equivalent_outcomes,
    optimal_strategy,
    outcome_strategies,
)
from .linalg import hermitian_basis, psd_power, to_real_coords

log = logging.getLogger(__name__)

MAX_STATES = 8
ACTIVE_TOL = 1e-6
KERNEL_TOL = 1e-5
FEASIBILITY_TOL = 1e-8
CERTIFICATE_TOL = 1e-7


@dataclass
class SolverOptions:
    tol: float = 1e-7
    max_newton_steps: int = 200
    mu_init: float = 1.0
    mu_factor: float = 0.25
    mu_min: float = 1e-14
    newton_tol: float = 1e-10
    enumeration_cap: int = 5
    audit_cap: int = 6
    max_rounds: int = 60


@dataclass
class SdpSolution:
    """Result of :func:`solve_mgd` or :func:`solve_med`.

    ``objective`` is the optimal guesswork (``kind="mgd"``) or optimal error
    probability (``kind="med"``).  ``A`` is the primal operator: the guesswork
    variable, or ``Y`` for the error problem.  ``labels`` index the constraint
    blocks (query orders, or message indices for the error problem) and
    ``dual`` holds the matching measurement operators from the central path.
    """

    kind: str
    A: np.ndarray
    objective: float
    active_set: list
    iterations: int
    duality_gap_estimate: float
    converged: bool
    labels: list
    dual: np.ndarray
    min_slack: float
    audited: bool
    history: list[float] = field(default_factory=list)


@dataclass
class _PathResult:
    A: np.ndarray
    mu: float
    dual: np.ndarray
    iterations: int
    history: list[float]
    converged: bool


def all_strategies(n: int) -> list[Strategy]:
    """Every query order on n messages, in lexicographic order."""
    return list(itertools.permutations(range(1, n + 1)))


def constraint_targets(e: Ensemble, strategies) -> np.ndarray:
    """``R_s = sum_i s(i) p_i rho_i`` for each strategy, stacked."""
    ranks = np.asarray(strategies, dtype=float).reshape(-1, e.n)
    return np.tensordot(ranks, e.weighted, axes=1)


def _min_eigs(stack: np.ndarray, chunk: int = 4096) -> np.ndarray:
    return np.concatenate([np.linalg.eigvalsh(stack[k:k + chunk])[:, 0]
                           for k in range(0, len(stack), chunk)])


def _central_path(targets: np.ndarray, opts: SolverOptions) -> _PathResult:
    count, d, _ = targets.shape
    basis = hermitian_basis(d)
    bvec = basis.reshape(d * d, d * d).T
    eye = np.eye(d)
    nu = count * d
    a = (_min_eigs(targets).min() - 1.0) * eye
    mu = opts.mu_init
    iterations = 0
    history: list[float] = []

    def barrier(x: np.ndarray) -> float:
        sign, logdet = np.linalg.slogdet(targets - x)
        if np.any(sign.real <= 0):
            return math.inf
        return float(-np.trace(x).real - mu * logdet.sum())

    while True:
        steps = 0
        best_dec, stalled = math.inf, 0
        while True:
            w = np.linalg.inv(targets - a)
            w = (w + w.conj().transpose(0, 2, 1)) / 2
            grad_mat = -eye + mu * w.sum(axis=0)
            g = (bvec.conj().T @ grad_mat.reshape(-1)).real
            kron = np.einsum("sac,seb->abce", w, w).reshape(d * d, d * d)
            hess = mu * (bvec.conj().T @ kron @ bvec).real
            hess = (hess + hess.T) / 2
            try:
                dx = -np.linalg.solve(hess, g)
            except np.linalg.LinAlgError as exc:
                raise SolverError("singular Newton system") from exc
            dec2 = max(0.0, float(-g @ dx))
            if dec2 / mu <= opts.newton_tol or np.linalg.norm(g) <= opts.newton_tol:
                break
            # round-off floor: the decrement stops shrinking once it is this small
            if dec2 / mu < 0.9 * best_dec:
                best_dec, stalled = dec2 / mu, 0
            else:
                stalled += 1
            if best_dec <= 1e-5 and stalled >= 3:
                break
            if steps >= opts.max_newton_steps:
                log.warning("newton step cap reached", extra={"mu": mu, "decrement": dec2 / mu})
                return _PathResult(a, mu, mu * w, iterations, history, False)
            delta = (bvec @ dx).reshape(d, d)
            delta = (delta + delta.conj().T) / 2
            lam = math.sqrt(dec2 / mu)
            t_safe = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            t = 1.0
            f0 = barrier(a)
            while t > t_safe:
                if barrier(a + t * delta) <= f0 - 0.25 * t * dec2:
                    break
                t *= 0.5
            t = max(t, t_safe)
            cand = a + t * delta
            if _min_eigs(targets - cand).min() <= 0:
                t = 0.5 / (1.0 + lam)
                cand = a + t * delta
            a = (cand + cand.conj().T) / 2
            steps += 1
            iterations += 1
        objective = float(np.trace(a).real)
        history.append(objective)
        log.debug("barrier stage", extra={"iteration": iterations, "mu": mu,
                                          "objective": objective,
                                          "min_slack": float(_min_eigs(targets - a).min())})
        if nu * mu <= 0.1 * opts.tol or mu <= opts.mu_min:
            w = np.linalg.inv(targets - a)
            return _PathResult(a, mu, mu * (w + w.conj().transpose(0, 2, 1)) / 2,
                               iterations, history, True)
        mu *= opts.mu_factor


def _normalize_dual(dual: np.ndarray) -> np.ndarray:
    t = psd_power(dual.sum(axis=0), -0.5)
    z = np.einsum("ab,kbc,cd->kad", t, dual, t)
    return (z + z.conj().transpose(0, 2, 1)) / 2


def _dual_value(dual: np.ndarray, targets: np.ndarray) -> float:
    return float(np.einsum("kab,kba->", dual, targets).real)


def _best_strategy_for(weighted: np.ndarray, v: np.ndarray) -> Strategy:
    return optimal_strategy(np.einsum("a,iab,b->i", v.conj(), weighted, v).real)


def _separate(weighted: np.ndarray, a: np.ndarray, starts, tol: float, max_iter: int = 25):
    """Alternating search for query orders whose constraint ``A <= R_s`` is violated.

    From each start direction ``v``, take the order that is most violated along
    ``v`` (messages sorted by ``<v|p_i rho_i|v>``), then move ``v`` to the most
    negative eigenvector of that order's slack.  Returns ``{strategy: min eig}``
    for every violated order met on the way.
    """
    found: dict[Strategy, float] = {}
    for v in starts:
        seen = set()
        for _ in range(max_iter):
            s = _best_strategy_for(weighted, v)
            if s in seen:
                break
            seen.add(s)
            slack = np.tensordot(np.asarray(s, dtype=float), weighted, axes=1) - a
            lam, vecs = np.linalg.eigh(slack)
            if lam[0] < -tol:
                found[s] = min(found.get(s, 0.0), float(lam[0]))
            v = vecs[:, 0]
    return found


def _initial_working_set(e: Ensemble) -> list[Strategy]:
    work = {optimal_strategy(e.probs)}
    w = e.weighted
    for rho in list(e.states) + [e.average_state]:
        _, vecs = np.linalg.eigh(rho)
        for v in vecs.T:
            work.add(_best_strategy_for(w, v))
    return sorted(work)


def _finish(kind, e, targets, labels, path, objective, audited, min_slack) -> SdpSolution:
    dual = _normalize_dual(path.dual)
    gap = max(0.0, _dual_value(dual, targets) - float(np.trace(path.A).real))
    slack_min = _min_eigs(targets - path.A)
    scale = max(1.0, float(np.abs(targets).max()))
    active = [labels[k] for k in np.flatnonzero(slack_min <= ACTIVE_TOL * scale)]
    a = path.A if kind == "mgd" else -path.A
    return SdpSolution(kind, a, objective, active, path.iterations, gap, path.converged,
                       list(labels), dual, min_slack, audited, path.history)


def solve_mgd(e: Ensemble, opts: SolverOptions | None = None) -> SdpSolution:
    """Minimum guesswork over all measurements of ``e``.

    Up to ``opts.enumeration_cap`` messages every query order is a constraint;
    beyond that a working set grows by separation.  The returned objective is
    ``Tr(A)`` for a strictly feasible ``A``, hence a lower bound on the optimum
    that is within ``duality_gap_estimate`` of it.
    """
    opts = opts or SolverOptions()
    n = e.n
    if n > MAX_STATES:
        raise ValidationError(f"at most {MAX_STATES} states are supported, got {n}")
    w = e.weighted
    if n <= opts.enumeration_cap:
        work = all_strategies(n)
    else:
        work = _initial_working_set(e)
    path = None
    for round_no in range(opts.max_rounds):
        targets = constraint_targets(e, work)
        path = _central_path(targets, opts)
        if n <= opts.enumeration_cap:
            break
        scale = max(1.0, float(np.abs(targets).max()))
        starts = list(np.linalg.eigh(targets - path.A)[1][:, :, 0])
        starts += list(np.linalg.eigh(path.A)[1].T)
        found = _separate(w, path.A, starts, FEASIBILITY_TOL * scale)
        if not found and n <= opts.audit_cap:
            everything = all_strategies(n)
            lam = _min_eigs(constraint_targets(e, everything) - path.A)
            worst = np.argsort(lam)[:8]
            found = {everything[k]: float(lam[k]) for k in worst
                     if lam[k] < -FEASIBILITY_TOL * scale}
        new = [s for s in found if s not in set(work)]
        log.debug("lazy round", extra={"round": round_no, "working_set": len(work),
                                       "added": len(new)})
        if not new:
            break
        work = sorted(set(work) | set(new))
    else:
        path.converged = False
    targets = constraint_targets(e, work)
    audited = n <= opts.audit_cap
    if audited:
        min_slack = float(_min_eigs(constraint_targets(e, all_strategies(n)) - path.A).min())
    else:
        min_slack = float(_min_eigs(targets - path.A).min())
    objective = float(np.trace(path.A).real)
    return _finish("mgd", e, targets, work, path, objective, audited, min_slack)


def solve_med(e: Ensemble, opts: SolverOptions | None = None) -> SdpSolution:
    """Minimum error probability over all measurements of ``e``.

    Solves ``min Tr(Y)`` subject to ``Y >= p_i rho_i``; the optimal success
    probability is ``Tr(Y)``.
    """
    opts = opts or SolverOptions()
    targets = -e.weighted
    path = _central_path(targets, opts)
    objective = 1.0 + float(np.trace(path.A).real)
    min_slack = float(_min_eigs(targets - path.A).min())
    return _finish("med", e, targets, list(range(e.n)), path, objective, True, min_slack)


@dataclass
class Certificate:
    """Operator-inequality optimality test for a measurement.

    ``gamma`` is ``sum_j sum_i s_j(i) p_i rho_i pi_j`` with ``s_j`` the optimal
    order for outcome ``j``; the measurement is optimal iff ``gamma`` is
    Hermitian and lies below every ``R_s``.  ``complete`` is False when the
    orders were searched heuristically instead of enumerated.
    """

    gamma: np.ndarray
    hermiticity_residual: float
    worst_violation: float
    worst_strategy: Strategy | None
    value: float
    complete: bool

    @property
    def passed(self) -> bool:
        return (self.hermiticity_residual <= CERTIFICATE_TOL
                and self.worst_violation >= -CERTIFICATE_TOL)


def certify(e: Ensemble, m: Povm, enumeration_cap: int = 6) -> Certificate:
    if m.dim != e.dim:
        raise ValidationError(f"dimension mismatch: ensemble {e.dim}, POVM {m.dim}")
    w = e.weighted
    gamma = np.zeros((e.dim, e.dim), dtype=complex)
    for s, op in zip(outcome_strategies(e, m), m.ops):
        if s is not None:
            gamma += np.tensordot(np.asarray(s, dtype=float), w, axes=1) @ op
    residual = float(np.linalg.norm(gamma - gamma.conj().T) / 2)
    herm = (gamma + gamma.conj().T) / 2
    complete = e.n <= enumeration_cap
    if complete:
        everything = all_strategies(e.n)
        lam = _min_eigs(constraint_targets(e, everything) - herm)
        k = int(np.argmin(lam))
        worst, worst_s = float(lam[k]), everything[k]
    else:
        log.warning("certificate uses heuristic order search (sound-but-incomplete)")
        starts = list(np.linalg.eigh(herm)[1].T)
        for rho in e.states:
            starts += list(np.linalg.eigh(rho)[1].T)
        found = _separate(w, herm, starts, tol=-np.inf)
        worst_s = min(found, key=found.get) if found else None
        worst = found[worst_s] if found else 0.0
    return Certificate(gamma, residual, worst, worst_s, float(np.trace(herm).real), complete)


def recover_povm(e: Ensemble, sol: SdpSolution, kernel_tol: float = KERNEL_TOL) -> Povm:
    """Reconstruct an optimal measurement from a guesswork solution.

    Each active order contributes operators supported on the near-kernel of its
    slack ``R_s - A``; nonnegative least squares picks weights that complete
    the identity.  The result is accepted only if it passes :func:`certify` and
    reproduces the optimal value to 1e-5.
    """
    if sol.kind != "mgd":
        raise ValueError("recover_povm needs a guesswork solution")
    if sol.duality_gap_estimate > 1e-6:
        raise RecoveryError(f"solution gap {sol.duality_gap_estimate:.2e} is too large")
    d = e.dim
    targets = constraint_targets(e, sol.labels)
    gens, owners = [], []
    for k, s in enumerate(sol.labels):
        if s not in sol.active_set:
            continue
        slack = targets[k] - sol.A
        lam, vecs = np.linalg.eigh(slack)
        ker = vecs[:, lam <= kernel_tol * max(1.0, float(np.linalg.norm(slack)))]
        if ker.shape[1] == 0:
            continue
        proj = ker @ ker.conj().T
        hint = proj @ sol.dual[k] @ proj
        cands = [np.outer(v, v.conj()) for v in ker.T]
        hlam, hvec = np.linalg.eigh(hint)
        cands += [np.outer(v, v.conj()) for v, val in zip(hvec.T, hlam) if val > 1e-12]
        if np.trace(hint).real > 1e-12:
            cands.append(hint / np.trace(hint).real)
        gens += cands
        owners += [k] * len(cands)
    if not gens:
        raise RecoveryError("no active constraint has a kernel")
    mat = to_real_coords(np.array(gens)).T
    weights, resid = nnls(mat, to_real_coords(np.eye(d)))
    if resid > 1e-6 * d:
        raise RecoveryError(f"kernel cone cannot complete the identity (residual {resid:.2e})")
    ops: dict[int, np.ndarray] = {}
    for wgt, k, g in zip(weights, owners, gens):
        if wgt > 0:
            ops[k] = ops.get(k, 0) + wgt * g
    kept = [op for op in ops.values() if np.trace(op).real > 1e-12]
    povm = merge_equivalent_outcomes(e, Povm.normalized(np.array(kept)))
    cert = certify(e, povm)
    value = conditional_guesswork(e, povm).guesswork
    if not cert.passed or abs(value - sol.objective) > 1e-5:
        raise RecoveryError(
            f"recovered measurement not optimal (value {value:.8f} vs {sol.objective:.8f}, "
            f"certificate violation {cert.worst_violation:.2e})")
    return povm


def med_povm(e: Ensemble, sol: SdpSolution) -> Povm:
    """The central-path measurement of an error solution (outcome i guesses message i)."""
    if sol.kind != "med":
        raise ValueError("med_povm needs an error-probability solution")
    return Povm.normalized(sol.dual)


def helstrom_error(e: Ensemble) -> float:
    """Closed-form minimum error for two states: ``(1 - ||p1 rho1 - p2 rho2||_1) / 2``."""
    if e.n != 2:
        raise ValidationError("the trace-norm formula needs exactly two states")
    diff = e.weighted[0] - e.weighted[1]
    return float((1.0 - np.abs(np.linalg.eigvalsh(diff)).sum()) / 2)


def dual_guesswork(e: Ensemble, sol: SdpSolution) -> float:
    """Guesswork achieved by the solver's central-path measurement (an upper bound)."""
    return conditional_guesswork(e, Povm.normalized(sol.dual)).guesswork
