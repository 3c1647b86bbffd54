"""Deciding whether any measurement can beat guessing from the prior.

Measurement is useless for guessing exactly when the operator order of the
weighted states follows the prior: ``p_i >= p_j`` implies ``p_i rho_i >= p_j rho_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ensembles import Ensemble
from .guesswork import guesswork
from .linalg import loewner_leq

EQUAL_PROB_TOL = 1e-12


@dataclass(frozen=True)
class NoMeasurementVerdict:
    """``holds`` means the optimal guesswork equals ``prior_guesswork``.

    ``witness`` is the first (0-based) pair ``(i, j)`` with ``p_i >= p_j`` but
    ``p_j rho_j`` not below ``p_i rho_i``; None when the condition holds.
    """

    holds: bool
    witness: tuple[int, int] | None
    prior_guesswork: float


def check_no_measurement(e: Ensemble, tol: float = 1e-9) -> NoMeasurementVerdict:
    """Test ``p_j rho_j <= p_i rho_i`` for every ordered pair with ``p_i >= p_j``.

    Pairs with equal priors (within 1e-12) are tested in both directions.
    """
    p, w = e.probs, e.weighted
    for i in range(e.n):
        for j in range(e.n):
            if i == j or p[i] < p[j] - EQUAL_PROB_TOL:
                continue
            if not loewner_leq(w[j], w[i], tol):
                return NoMeasurementVerdict(False, (i, j), guesswork(p))
    return NoMeasurementVerdict(True, None, guesswork(p))


def equal_probability_pairs(e: Ensemble) -> list[tuple[int, int]]:
    """Pairs ``i < j`` whose priors agree to within 1e-12."""
    p = e.probs
    return [(i, j) for i in range(e.n) for j in range(i + 1, e.n)
            if abs(p[i] - p[j]) <= EQUAL_PROB_TOL]
