"""Entropic quantities and closed-form bounds on guesswork.

All logarithms are base 2.  Bound names describe the quantity they are built
from:

========================  ======  ====================================================
name                      side    value
========================  ======  ====================================================
error_upper               upper   n/2 * P_err + 1
error_lower               lower   1 / (2 (1 - P_err)) + 1/2
entropy_lower             lower   2**H / 4 + 1              (needs H >= 2)
entropy_upper             upper   (n - 1) / (2 log n) * H + 1
optimal_error_lower       lower   error_lower at the optimal error probability
optimal_error_upper       upper   error_upper at the optimal error probability
holevo_lower              lower   2**(H(X) - chi) / 4 + 1   (needs H(X_pi) >= 2 for all pi)
subentropy_upper          upper   (n - 1) / (2 log n) * (H(X) - Lambda) + 1
unambiguous_upper         upper   1 + (n - 1) / 2 * p_inc
========================  ======  ====================================================

The first four apply to the prior guesswork ``G(X)`` and, with a measurement
supplied, to ``G(X|Pi)`` (names prefixed ``conditional_``); the rest bound the
minimum guesswork.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .ensembles import Ensemble, Povm, as_distribution, joint_weights
from .errors import ValidationError
from .guesswork import (
    conditional_entropy,
    conditional_error,
    conditional_guesswork,
    error_probability,
    guesswork,
)

COALESCE_TOL = 1e-9
ZERO_EIG = 1e-14
HOLD_TOL = 1e-9


def shannon_entropy(probs) -> float:
    p = as_distribution(probs)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _eigenvalues(rho) -> np.ndarray:
    a = np.asarray(rho, dtype=complex)
    lam = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return np.clip(lam, 0.0, None)


def von_neumann_entropy(rho) -> float:
    lam = _eigenvalues(rho)
    lam = lam[lam > ZERO_EIG]
    return float(-(lam * np.log2(lam)).sum())


def holevo_chi(e: Ensemble) -> float:
    chi = von_neumann_entropy(e.average_state) - sum(
        p * von_neumann_entropy(r) for p, r in zip(e.probs, e.states))
    return max(0.0, float(chi))


def _coalesce(lam: np.ndarray, tol: float) -> list[float]:
    """Replace runs of eigenvalues closer than ``tol`` by their mean."""
    lam = sorted(float(x) for x in lam)
    out, run = [], [lam[0]]
    for x in lam[1:]:
        if x - run[-1] <= tol:
            run.append(x)
        else:
            out += [sum(run) / len(run)] * len(run)
            run = [x]
    out += [sum(run) / len(run)] * len(run)
    return out


def subentropy(rho, coalesce: float = COALESCE_TOL) -> float:
    """Subentropy of a density operator, in bits.

    With nonzero eigenvalues ``l_1..l_m`` this equals minus the divided
    difference of ``x**m ln x`` over the eigenvalues (divided by ln 2).
    Coincident eigenvalues use the confluent form with derivatives, so
    degenerate spectra are handled exactly; the table is evaluated in extended
    precision to avoid cancellation between nearby eigenvalues.
    """
    lam = _eigenvalues(rho)
    lam = lam[lam > ZERO_EIG]
    m = lam.size
    if m <= 1:
        return 0.0
    nodes = _coalesce(lam, coalesce)
    with mpmath.workdps(30 + 12 * m):
        z = [mpmath.mpf(x) for x in nodes]
        harmonic = [mpmath.mpf(0)]
        for k in range(1, m + 1):
            harmonic.append(harmonic[-1] + mpmath.mpf(1) / k)

        def deriv(x, k):
            # k-th derivative of x**m ln x, divided by k!
            coeff = mpmath.binomial(m, k)
            return coeff * x ** (m - k) * (mpmath.log(x) + harmonic[m] - harmonic[m - k])

        col = [deriv(x, 0) for x in z]
        for j in range(1, m):
            col = [deriv(z[i], j) if z[i + j] == z[i]
                   else (col[i + 1] - col[i]) / (z[i + j] - z[i])
                   for i in range(m - j)]
        return float(-col[0] / mpmath.log(2))


def lambda_lower(e: Ensemble) -> float:
    """Subentropy of the average state minus the average subentropy."""
    return float(subentropy(e.average_state) - sum(
        p * subentropy(r) for p, r in zip(e.probs, e.states)))


@dataclass(frozen=True)
class EntropyPack:
    shannon_H: float
    von_neumann_S: float
    holevo_chi: float
    subentropy_Q: float
    lambda_lower: float


def entropy_pack(e: Ensemble) -> EntropyPack:
    rho = e.average_state
    return EntropyPack(shannon_entropy(e.probs), von_neumann_entropy(rho), holevo_chi(e),
                       subentropy(rho), lambda_lower(e))


def _entropy_coeff(n: int) -> float:
    return 0.0 if n < 2 else (n - 1) / (2 * math.log2(n))


def error_upper_bound(p_err: float, n: int) -> float:
    return n / 2 * p_err + 1


def error_lower_bound(p_err: float) -> float:
    return 1 / (2 * (1 - p_err)) + 0.5


def entropy_lower_bound(h: float) -> float:
    return 2.0 ** h / 4 + 1


def entropy_upper_bound(h: float, n: int) -> float:
    return _entropy_coeff(n) * h + 1


def unambiguous_upper_bound(n: int, p_inc: float) -> float:
    """Guesswork of an unambiguous scheme that falls back to blind guessing."""
    if not 0.0 <= p_inc <= 1.0:
        raise ValidationError(f"inconclusive probability {p_inc!r} is outside [0, 1]")
    return 1 + (n - 1) / 2 * p_inc


@dataclass(frozen=True)
class BoundReport:
    name: str
    target: str
    value: float
    side: str
    precondition_met: bool
    precondition_note: str = ""
    reference: float | None = None

    @property
    def holds(self) -> bool | None:
        """Whether the bound is consistent with ``reference`` (None if unknown)."""
        if self.reference is None or not self.precondition_met:
            return None
        if self.side == "lower":
            return self.reference >= self.value - HOLD_TOL
        return self.reference <= self.value + HOLD_TOL


@dataclass(frozen=True)
class PreconditionCheck:
    holds: bool
    min_entropy: float
    argmin: np.ndarray


def _posterior_entropies(e: Ensemble, kets: np.ndarray) -> np.ndarray:
    q = np.einsum("ka,iab,kb->ki", kets.conj(), e.weighted, kets).real
    q = np.clip(q, 0.0, None)
    w = q.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        post = q / w
        terms = np.where(post > 0, -post * np.log2(np.where(post > 0, post, 1.0)), 0.0)
    h = terms.sum(axis=1)
    h[w[:, 0] <= 1e-14] = np.inf
    return h


def _unpack(x: np.ndarray, d: int) -> np.ndarray:
    v = x[:d] + 1j * x[d:]
    nv = np.linalg.norm(v)
    return v / nv if nv > 0 else v


def posterior_entropy_precondition(e: Ensemble, samples: int = 2000, seed=0,
                                   threshold: float = 2.0, tol: float = 1e-9,
                                   refine: int = 3) -> PreconditionCheck:
    """Sampled check that every rank-one outcome leaves posterior entropy >= threshold.

    Directions come from a scrambled Sobol sequence pushed through the normal
    quantile (a quasi-uniform sphere sample), followed by Nelder-Mead descent
    from the ``refine`` worst samples.  A False answer is conclusive; True is
    only evidence, since the check cannot cover every operator.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    d = e.dim
    sob = qmc.Sobol(2 * d, scramble=True, seed=seed)
    u = sob.random_base2(max(1, math.ceil(math.log2(samples))))[:samples]
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    kets = g[:, :d] + 1j * g[:, d:]
    kets /= np.linalg.norm(kets, axis=1, keepdims=True)
    h = _posterior_entropies(e, kets)
    best_h, best_v = float(h.min()), kets[int(np.argmin(h))]

    def objective(x):
        val = _posterior_entropies(e, _unpack(x, d)[None])[0]
        return val if np.isfinite(val) else 1e6

    for k in np.argsort(h)[:refine]:
        x0 = np.concatenate([kets[k].real, kets[k].imag])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13,
                                "maxiter": 600 * d, "maxfev": 600 * d})
        if res.fun < best_h:
            best_h, best_v = float(res.fun), _unpack(res.x, d)
    return PreconditionCheck(best_h >= threshold - tol, best_h, best_v)


def _posterior_entropy_floor(e: Ensemble, m: Povm) -> float:
    joint = joint_weights(e, m.ops)
    worst = math.inf
    for col in joint.T:
        w = col.sum()
        if w < 1e-12:
            continue
        worst = min(worst, shannon_entropy(col / w))
    return worst


def bound_suite(e: Ensemble, p_err_opt: float | None = None, g_opt: float | None = None,
                povm: Povm | None = None, p_inc: float | None = None,
                samples: int = 2000, seed=0) -> list[BoundReport]:
    """Evaluate every applicable bound for ``e``.

    ``p_err_opt`` defaults to the solver's optimal error probability.  ``g_opt``
    (optional) is attached as the reference for the minimum-guesswork bounds.
    """
    from .sdp import solve_med

    n = e.n
    prior = e.probs
    h = shannon_entropy(prior)
    pe = error_probability(prior)
    g_prior = guesswork(prior)
    reports = [
        BoundReport("error_upper", "G(X)", error_upper_bound(pe, n), "upper", True, "",
                    g_prior),
        BoundReport("error_lower", "G(X)", error_lower_bound(pe), "lower", True, "", g_prior),
        BoundReport("entropy_lower", "G(X)", entropy_lower_bound(h), "lower", h >= 2,
                    f"H(X) = {h:.6g} (needs >= 2)", g_prior),
        BoundReport("entropy_upper", "G(X)", entropy_upper_bound(h, n), "upper", True, "",
                    g_prior),
    ]
    if povm is not None:
        ev = conditional_guesswork(e, povm)
        pe_c = conditional_error(e, povm)
        h_c = conditional_entropy(e, povm)
        floor = _posterior_entropy_floor(e, povm)
        reports += [
            BoundReport("conditional_error_upper", "G(X|Pi)", error_upper_bound(pe_c, n),
                        "upper", True, "", ev.guesswork),
            BoundReport("conditional_error_lower", "G(X|Pi)", error_lower_bound(pe_c),
                        "lower", True, "", ev.guesswork),
            BoundReport("conditional_entropy_lower", "G(X|Pi)", entropy_lower_bound(h_c),
                        "lower", floor >= 2,
                        f"min posterior entropy = {floor:.6g} (needs >= 2)", ev.guesswork),
            BoundReport("conditional_entropy_upper", "G(X|Pi)", entropy_upper_bound(h_c, n),
                        "upper", True, "", ev.guesswork),
        ]
    note = "supplied"
    if p_err_opt is None:
        p_err_opt = solve_med(e).objective
        note = "computed by solve_med"
    reports += [
        BoundReport("optimal_error_lower", "G_opt", error_lower_bound(p_err_opt), "lower",
                    True, f"P_err_opt = {p_err_opt:.9g} ({note})", g_opt),
        BoundReport("optimal_error_upper", "G_opt", error_upper_bound(p_err_opt, n), "upper",
                    True, f"P_err_opt = {p_err_opt:.9g} ({note})", g_opt),
    ]
    chi = holevo_chi(e)
    pre = posterior_entropy_precondition(e, samples=samples, seed=seed)
    reports.append(BoundReport(
        "holevo_lower", "G_opt", entropy_lower_bound(h - chi), "lower", pre.holds,
        f"sampled min H(X_pi) = {pre.min_entropy:.6g} over {samples} directions "
        "(advisory when true)", g_opt))
    lam = lambda_lower(e)
    reports.append(BoundReport("subentropy_upper", "G_opt", entropy_upper_bound(h - lam, n),
                               "upper", True, "", g_opt))
    if p_inc is not None:
        reports.append(BoundReport("unambiguous_upper", "G_opt",
                                   unambiguous_upper_bound(n, p_inc), "upper", True,
                                   f"p_inc = {p_inc:.6g} (supplied)", g_opt))
    return reports
