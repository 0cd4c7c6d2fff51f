"""Dense complex matrix substrate: validation, Hermitian eigendata, |A|,
functional calculus and the Cartesian / block constructions.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. :func:`as_matrix`
is the single entry point that enforces the square/finite invariants and
returns a read-only array, so values can be shared between evaluators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, DomainError, InvalidMatrix, NotHermitian

HERMITIAN_RTOL = 1e-12
PSD_CLAMP_RTOL = 1e-12


def as_matrix(data) -> np.ndarray:
    """Validate ``data`` as an n x n finite complex matrix (n >= 1)."""
    try:
        a = np.array(data, dtype=np.complex128)
    except (ValueError, TypeError) as exc:
        raise InvalidMatrix(f"not a rectangular numeric array: {exc}") from None
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    a.setflags(write=False)
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def adjoint(a: np.ndarray) -> np.ndarray:
    return _frozen(np.conj(np.asarray(a)).T.copy())


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value, i.e. sqrt of the top eigenvalue of A*A."""
    a = np.asarray(a)
    if not a.size:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_residual(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - np.conj(h).T))) if h.size else 0.0


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermitian_residual(h) <= rtol * max(1.0, operator_norm(h))


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending
    basis: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ np.conj(self.basis).T


def hermitian_eig(h: np.ndarray) -> HermitianEig:
    h = np.asarray(h, dtype=np.complex128)
    scale = max(1.0, operator_norm(h))
    res = hermitian_residual(h)
    if res > HERMITIAN_RTOL * scale:
        raise NotHermitian(f"symmetry residual {res:.3e} exceeds {HERMITIAN_RTOL:g}*{scale:.3e}")
    vals, vecs = np.linalg.eigh(0.5 * (h + np.conj(h).T))
    return HermitianEig(_frozen(vals), _frozen(vecs))


def func_calc(phi: Callable[[np.ndarray], np.ndarray], h: np.ndarray) -> np.ndarray:
    """phi(H) for Hermitian PSD H via its eigendecomposition.

    ``phi`` must accept an array of nonnegative reals. Eigenvalues in
    [-1e-12*||H||, 0) are clamped to zero first; anything more negative is a
    :class:`DomainError`. Non-finite phi values are returned as-is in the
    eigenvalue array so callers can detect overflow before reconstructing.
    """
    eig = hermitian_eig(h)
    lam = clamp_psd(eig.eigenvalues, scale=float(np.max(np.abs(eig.eigenvalues), initial=0.0)))
    vals = np.asarray(phi(lam), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise OverflowError("phi overflowed on the spectrum")
    return _frozen((eig.basis * vals) @ np.conj(eig.basis).T)


def clamp_psd(lam: np.ndarray, scale: float) -> np.ndarray:
    floor = -PSD_CLAMP_RTOL * max(scale, np.finfo(float).tiny)
    if np.any(lam < floor):
        raise DomainError(f"eigenvalue {float(np.min(lam)):.3e} below PSD clamp floor {floor:.3e}")
    return np.where(lam < 0.0, 0.0, lam)


def psd_power(h: np.ndarray, p: float) -> np.ndarray:
    """H^p for PSD H with the convention t^0 = 1 (so H^0 = I)."""
    return func_calc(lambda t: np.power(t, p), h)


def abs_value(a: np.ndarray) -> np.ndarray:
    """|A| = (A*A)^{1/2}."""
    a = np.asarray(a)
    return func_calc(np.sqrt, np.conj(a).T @ a)


def abs_power(a: np.ndarray, p: float) -> np.ndarray:
    """|A|^p computed from A*A directly, i.e. (A*A)^{p/2}."""
    a = np.asarray(a)
    return func_calc(lambda t: np.power(t, 0.5 * p), np.conj(a).T @ a)


def cartesian_parts(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Re A, Im A) with Re A = (A + A*)/2 and Im A = (A - A*)/(2i)."""
    a = np.asarray(a)
    ah = np.conj(a).T
    return _frozen(0.5 * (a + ah)), _frozen((a - ah) / 2j)


def block_compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """[[0, P], [Q, 0]]."""
    p, q = np.asarray(p), np.asarray(q)
    if p.shape != q.shape or p.ndim != 2:
        raise DimensionMismatch(f"block factors differ in shape: {p.shape} vs {q.shape}")
    n = p.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, n:] = p
    out[n:, :n] = q
    return _frozen(out)


def block_diag(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n, m = x.shape[0], y.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = x
    out[n:, n:] = y
    return _frozen(out)


def is_psd(h: np.ndarray, rtol: float = PSD_CLAMP_RTOL) -> bool:
    if not is_hermitian(h):
        return False
    lam = np.linalg.eigvalsh(0.5 * (h + np.conj(h).T))
    return bool(lam[0] >= -rtol * max(1.0, float(np.max(np.abs(lam)))))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the phase-corrected QR of a Ginibre matrix."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
