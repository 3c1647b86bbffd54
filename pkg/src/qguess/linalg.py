"""Dense linear algebra for small Hermitian operators.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``.  Every
function that accepts an operator symmetrizes it first, so callers never have
to worry about round-off asymmetry in their inputs.

Tolerances are relative: a threshold ``tol`` is scaled by ``max(1, ||M||_F)``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import SolverError, ValidationError

DEFAULT_TOL = 1e-9


class Spectrum(NamedTuple):
    """Eigenvalues (descending) and matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class PsdCheck(NamedTuple):
    ok: bool
    min_eigenvalue: float


def as_hermitian(m) -> np.ndarray:
    """Return ``(M + M^dagger) / 2`` as a fresh complex array.

    Raises ValidationError for non-square, empty, or non-finite input.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix contains NaN or infinite entries")
    return (a + a.conj().T) / 2


def scale_of(m: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(m)))


def projector(ket) -> np.ndarray:
    """Rank-one operator ``|v><v|`` for an (unnormalized) amplitude vector."""
    v = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def canonical_phase(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate each column so its first non-negligible amplitude is real and positive."""
    vecs = np.array(vectors, dtype=complex)
    single = vecs.ndim == 1
    if single:
        vecs = vecs[:, None]
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        big = np.flatnonzero(np.abs(col) > tol * max(1.0, np.abs(col).max()))
        if big.size:
            z = col[big[0]]
            vecs[:, k] = col * (abs(z) / z)
    return vecs[:, 0] if single else vecs


def _off_diagonal(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eig(m, max_sweeps: int = 100, tol: float = 1e-14) -> Spectrum:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Each 2x2 pivot is first made real by a diagonal phase and then annihilated
    by a real plane rotation.  Converges when the off-diagonal Frobenius mass
    drops to ``tol * ||M||_F``.
    """
    a = as_hermitian(m)
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    target = tol * float(np.linalg.norm(a))
    off = 0.0
    for _ in range(max_sweeps):
        off = _off_diagonal(a)
        if off <= target:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ u
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    else:
        off = _off_diagonal(a)
        if off > target:
            raise SolverError(f"Jacobi did not converge in {max_sweeps} sweeps", residual=off)
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], canonical_phase(v[:, order]))


def eig(m, method: str = "jacobi") -> Spectrum:
    """Full spectral decomposition with eigenvalues sorted descending.

    ``method="jacobi"`` uses :func:`jacobi_eig`; ``method="lapack"`` defers to
    ``numpy.linalg.eigh``.  Both return phase-canonical eigenvectors.
    """
    if method == "jacobi":
        return jacobi_eig(m)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    w, v = np.linalg.eigh(as_hermitian(m))
    return Spectrum(w[::-1].copy(), canonical_phase(v[:, ::-1]))


def is_psd(m, tol: float = DEFAULT_TOL) -> PsdCheck:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a = as_hermitian(m)
    lam = float(eig(a).eigenvalues[-1])
    return PsdCheck(lam >= -tol * scale_of(a), lam)


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")


def loewner_leq(lhs, rhs, tol: float = DEFAULT_TOL) -> bool:
    """``lhs <= rhs`` in the Loewner order, i.e. ``rhs - lhs`` is PSD."""
    a, b = as_hermitian(lhs), as_hermitian(rhs)
    _same_dim(a, b)
    return is_psd(b - a, tol).ok


def trace_product(m, n) -> float:
    """Real value of ``Tr(M N)`` for Hermitian ``M`` and ``N``."""
    a, b = as_hermitian(m), as_hermitian(n)
    _same_dim(a, b)
    val = np.einsum("ij,ji->", a, b)
    if abs(val.imag) > 1e-10 * max(1.0, float(np.linalg.norm(a) * np.linalg.norm(b))):
        raise ValidationError(f"Tr(MN) has imaginary part {val.imag:.3e}")
    return float(val.real)


def psd_power(m: np.ndarray, power: float) -> np.ndarray:
    """``M**power`` for PSD ``M``; negative powers need a positive definite input."""
    w, v = np.linalg.eigh(as_hermitian(m))
    if power < 0 and w[0] <= 0:
        raise ValidationError("negative power of a singular operator")
    w = np.clip(w, 0.0, None) ** power
    return (v * w) @ v.conj().T


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    r = 1.0 / np.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = r
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j * r
            e[j, i] = 1j * r
            basis.append(e)
    return np.array(basis)


def to_real_coords(ops: np.ndarray) -> np.ndarray:
    """Coordinates of Hermitian operators in :func:`hermitian_basis`.

    Accepts ``(d, d)`` or a stack ``(k, d, d)``; returns ``(d*d,)`` or ``(k, d*d)``.
    """
    ops = np.asarray(ops)
    basis = hermitian_basis(ops.shape[-1])
    return np.einsum("kab,...ab->...k", basis.conj(), ops).real
