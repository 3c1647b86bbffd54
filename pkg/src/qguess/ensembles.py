"""Quantum encodings, measurements, and the classical channel they induce."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOutcomeError, ValidationError
from .linalg import as_hermitian, projector, psd_power

PROB_TOL = 1e-9
PSD_TOL = 1e-9
NEG_CLAMP = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


def _min_eigs(ops: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(ops)[:, 0]


def as_distribution(probs, path: str = "probs") -> np.ndarray:
    """Validate a probability vector; tiny negatives (>= -1e-10) are clamped to zero."""
    p = np.array(probs, dtype=float).reshape(-1)
    if p.size == 0:
        raise ValidationError("empty distribution", path)
    if not np.all(np.isfinite(p)):
        raise ValidationError("non-finite probability", path)
    bad = np.flatnonzero(p < -NEG_CLAMP)
    if bad.size:
        raise ValidationError(f"negative probability {p[bad[0]]!r}", f"{path}[{bad[0]}]")
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValidationError(f"probabilities sum to {p.sum()!r}, not 1", path)
    return p


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Prior probabilities ``probs[i]`` and density operators ``states[i]`` on one space."""

    probs: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        p = as_distribution(self.probs)
        states = np.array(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[1] != states.shape[2]:
            raise ValidationError(f"states must have shape (n, d, d), got {states.shape}")
        if states.shape[0] != p.size:
            raise ValidationError(f"{p.size} probabilities but {states.shape[0]} states")
        rho = []
        for i, s in enumerate(states):
            try:
                h = as_hermitian(s)
            except ValidationError as exc:
                raise ValidationError(str(exc), f"states[{i}].rho") from None
            tr = np.trace(h).real
            if abs(tr - 1.0) > PROB_TOL:
                raise ValidationError(f"trace {tr!r} is not 1", f"states[{i}].rho")
            lam = np.linalg.eigvalsh(h)[0]
            if lam < -PSD_TOL * max(1.0, np.linalg.norm(h)):
                raise ValidationError(f"not PSD (min eigenvalue {lam:.3e})", f"states[{i}].rho")
            rho.append(h)
        object.__setattr__(self, "probs", _frozen(p))
        object.__setattr__(self, "states", _frozen(np.array(rho)))

    @classmethod
    def from_kets(cls, probs, kets) -> "Ensemble":
        """Build an ensemble of pure states from amplitude vectors (normalized here)."""
        rhos = []
        for k in kets:
            v = np.asarray(k, dtype=complex).reshape(-1)
            rhos.append(projector(v / np.linalg.norm(v)))
        return cls(probs, np.array(rhos))

    @property
    def n(self) -> int:
        return self.probs.size

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def weighted(self) -> np.ndarray:
        """Stack of ``p_i * rho_i``."""
        return self.probs[:, None, None] * self.states

    @property
    def average_state(self) -> np.ndarray:
        return self.weighted.sum(axis=0)


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement operators ``ops[j]``, PSD and summing to the identity."""

    ops: np.ndarray

    def __post_init__(self):
        ops = np.array(self.ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
            raise ValidationError(f"POVM must have shape (m, d, d), got {ops.shape}")
        ops = (ops + ops.conj().transpose(0, 2, 1)) / 2
        if not np.all(np.isfinite(ops)):
            raise ValidationError("POVM contains non-finite entries")
        lam = _min_eigs(ops)
        for j, val in enumerate(lam):
            if val < -PSD_TOL * max(1.0, np.linalg.norm(ops[j])):
                raise ValidationError(f"not PSD (min eigenvalue {val:.3e})", f"povm[{j}]")
        dev = np.abs(ops.sum(axis=0) - np.eye(ops.shape[1])).max()
        if dev > PROB_TOL:
            raise ValidationError(f"operators sum to identity only within {dev:.3e}", "povm")
        object.__setattr__(self, "ops", _frozen(ops))

    @classmethod
    def normalized(cls, ops) -> "Povm":
        """Rescale a PSD family ``B_k`` to ``T^-1/2 B_k T^-1/2`` with ``T = sum B_k``."""
        ops = np.array(ops, dtype=complex)
        ops = (ops + ops.conj().transpose(0, 2, 1)) / 2
        t = psd_power(ops.sum(axis=0), -0.5)
        return cls(np.einsum("ab,kbc,cd->kad", t, ops, t))

    @property
    def m(self) -> int:
        return self.ops.shape[0]

    @property
    def dim(self) -> int:
        return self.ops.shape[1]


def _check_dims(e: Ensemble, dim: int) -> None:
    if e.dim != dim:
        raise ValidationError(f"dimension mismatch: ensemble is {e.dim}-dimensional, operator is {dim}")


def born_matrix(states: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """``Tr(states[i] ops[j])`` for stacks of Hermitian operators, real (n, m)."""
    return np.einsum("iab,jba->ij", states, ops).real


def channel(e: Ensemble, m: Povm) -> np.ndarray:
    """Conditional probabilities ``p(y_j | x_i) = Tr(rho_i pi_j)`` as an (n, m) array."""
    _check_dims(e, m.dim)
    c = born_matrix(e.states, m.ops)
    c[(c < 0) & (c >= -NEG_CLAMP)] = 0.0
    return c


def joint_weights(e: Ensemble, ops: np.ndarray) -> np.ndarray:
    """``p(x_i) Tr(rho_i pi_j)`` as an (n, m) array (columns are unnormalized posteriors)."""
    _check_dims(e, np.asarray(ops).shape[-1])
    return np.clip(born_matrix(e.weighted, ops), 0.0, None)


def posterior(e: Ensemble, pi) -> tuple[np.ndarray, float]:
    """Posterior distribution over messages after outcome ``pi``, and its weight."""
    op = as_hermitian(pi)
    _check_dims(e, op.shape[0])
    joint = joint_weights(e, op[None])[:, 0]
    weight = float(joint.sum())
    if not weight > 1e-12 * max(1.0, abs(np.trace(op).real)) or weight <= 0:
        raise DegenerateOutcomeError(f"measurement operator has zero weight ({weight:.3e})")
    return joint / weight, weight


def _wishart(rng: np.random.Generator, dim: int, rank: int) -> np.ndarray:
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_ensemble(dim: int, n: int, seed=None, rank: int | None = None,
                    uniform: bool = False) -> Ensemble:
    """Random ensemble of normalized Wishart densities with Dirichlet(1) prior.

    ``rank=1`` gives pure states; ``uniform=True`` fixes the prior to 1/n.
    """
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be positive")
    rng = np.random.default_rng(seed)
    r = dim if rank is None else rank
    states = np.array([_wishart(rng, dim, r) for _ in range(n)])
    probs = np.full(n, 1.0 / n) if uniform else rng.dirichlet(np.ones(n))
    return Ensemble(probs, states)


def random_povm(dim: int, m: int, seed=None, rank: int | None = None) -> Povm:
    """Random m-outcome POVM obtained by normalizing random PSD operators."""
    if dim < 1 or m < 1:
        raise ValueError("dim and m must be positive")
    rng = np.random.default_rng(seed)
    r = dim if rank is None else rank
    raw = np.array([_wishart(rng, dim, r) for _ in range(m)])
    return Povm.normalized(raw)
