"""Classical and measurement-conditioned guesswork and error probability.

A guessing strategy is a tuple of ranks: ``strategy[i]`` is the query number
(1-based) at which message ``i`` is guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import Ensemble, Povm, as_distribution, joint_weights

SKIP_WEIGHT = 1e-12

Strategy = tuple[int, ...]


def optimal_strategy(probs) -> Strategy:
    """Query order by non-increasing probability; ties go to the lower index."""
    p = np.asarray(probs, dtype=float)
    order = np.argsort(-p, kind="stable")
    ranks = np.empty(p.size, dtype=int)
    ranks[order] = np.arange(1, p.size + 1)
    return tuple(int(r) for r in ranks)


def guesswork_of(weights) -> float:
    """``sum_i rank_i * w_i`` for (possibly unnormalized) nonnegative weights."""
    w = np.sort(np.asarray(weights, dtype=float))[::-1]
    return float(np.dot(np.arange(1, w.size + 1), w))


def guesswork(probs) -> float:
    """Expected number of queries under the optimal strategy."""
    return guesswork_of(as_distribution(probs))


def error_probability(probs) -> float:
    return float(1.0 - as_distribution(probs).max())


def strategy_cost(strategy: Strategy, weights) -> float:
    return float(np.dot(np.asarray(strategy, dtype=float), np.asarray(weights, dtype=float)))


@dataclass(frozen=True)
class OutcomeEval:
    weight: float
    guesswork: float
    error: float


@dataclass(frozen=True)
class EvalReport:
    guesswork: float
    error_prob: float
    per_outcome: list[OutcomeEval] = field(default_factory=list)


def conditional_guesswork(e: Ensemble, m: Povm) -> EvalReport:
    """Average posterior guesswork (and error) over the outcomes of ``m``.

    Outcomes with weight below ``1e-12`` are reported with NaN posterior values
    and contribute nothing.
    """
    joint = joint_weights(e, m.ops)
    total_g = 0.0
    rows = []
    for j in range(joint.shape[1]):
        col = joint[:, j]
        w = float(col.sum())
        if w < SKIP_WEIGHT:
            rows.append(OutcomeEval(w, float("nan"), float("nan")))
            continue
        post = col / w
        g = guesswork_of(post)
        total_g += w * g
        rows.append(OutcomeEval(w, g, float(1.0 - post.max())))
    return EvalReport(total_g, conditional_error(e, m), rows)


def conditional_error(e: Ensemble, m: Povm) -> float:
    """``1 - sum_j max_i p_i Tr(rho_i pi_j)``."""
    joint = joint_weights(e, m.ops)
    return float(np.clip(1.0 - joint.max(axis=0).sum(), 0.0, 1.0))


def conditional_entropy(e: Ensemble, m: Povm) -> float:
    """Shannon entropy of the message given the outcome, in bits."""
    joint = joint_weights(e, m.ops)
    total = 0.0
    for col in joint.T:
        w = col.sum()
        if w < SKIP_WEIGHT:
            continue
        q = col[col > 0] / w
        total += w * float(-(q * np.log2(q)).sum())
    return total


def outcome_strategies(e: Ensemble, m: Povm) -> list[Strategy | None]:
    """Optimal strategy for each outcome's posterior (None for zero-weight outcomes)."""
    joint = joint_weights(e, m.ops)
    out = []
    for col in joint.T:
        w = col.sum()
        out.append(None if w < SKIP_WEIGHT else optimal_strategy(col / w))
    return out


def merge_equivalent_outcomes(e: Ensemble, m: Povm) -> Povm:
    """Sum outcomes whose posteriors share an optimal strategy.

    The result has at most ``n!`` elements and the same conditional guesswork.
    Zero-weight outcomes are folded into the first group.
    """
    strategies = outcome_strategies(e, m)
    groups: dict[Strategy, np.ndarray] = {}
    idle = np.zeros((m.dim, m.dim), dtype=complex)
    for s, op in zip(strategies, m.ops):
        if s is None:
            idle = idle + op
        elif s in groups:
            groups[s] = groups[s] + op
        else:
            groups[s] = op.copy()
    ops = list(groups.values())
    ops[0] = ops[0] + idle
    return Povm(np.array(ops))
