"""Dense complex linear algebra on labelled tensor-product spaces.

Matrices are plain ``numpy`` arrays; subsystem dimensions travel alongside
them as a tuple. Basis ordering is big-endian: the first subsystem is the
most significant digit, so ``|abc>`` sits at index ``a*d**2 + b*d + c``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

HERMITIAN_TOL = 1e-10
ZERO_EIGENVALUE = 1e-14


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise ValueError(f"dims {dims} do not match matrix size {size}")
    return dims


def kron(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    """Kronecker product; the result's subsystem list is ``dims(a) + dims(b)``."""
    out = np.kron(a, b)
    for m in more:
        out = np.kron(out, m)
    return out


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original order. An empty ``keep`` returns the
    full trace as a 1x1 matrix.
    """
    m = np.asarray(m)
    dims = _check_dims(dims, m.shape[0])
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"subsystem index {k} out of range for {n} subsystems")

    t = m.reshape(dims + dims)
    # einsum labels: row index i -> letter i, column index -> letter n+i, traced
    # columns reuse the row letter.
    letters = [chr(ord("a") + i) for i in range(2 * n)]
    row = letters[:n]
    col = [letters[n + i] if i in keep else letters[i] for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum("".join(row + col) + "->" + "".join(out), t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(dk, dk)


def hermitian_part(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(m + m^dagger)/2`` after checking ``m`` is Hermitian to ``tol`` (relative)."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m)))
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return (m + m.conj().T) / 2


def eigh(m: np.ndarray) -> Spectrum:
    """Hermitian eigendecomposition with eigenvalues sorted descending."""
    h = hermitian_part(m)
    if np.isrealobj(h) or not np.any(h.imag):
        h = h.real
    w, v = np.linalg.eigh(h)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def trace_norm(m: np.ndarray) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    h = hermitian_part(m)
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def entropy_from_eigenvalues(eigenvalues: np.ndarray, log_base: float = 2.0) -> np.ndarray:
    """Shannon entropy along the last axis, with ``0 log 0 = 0``."""
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, 1.0)
    lam = np.where(lam < ZERO_EIGENVALUE, 0.0, lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return -np.sum(terms, axis=-1) / np.log(log_base)


def vn_entropy(rho: np.ndarray, log_base: float = 2.0) -> float:
    """Von Neumann entropy of a density operator."""
    h = hermitian_part(rho)
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"density operator must have unit trace, got {tr}")
    return float(entropy_from_eigenvalues(np.linalg.eigvalsh(h), log_base))


def block_partition(mats: Sequence[np.ndarray], atol: float = 0.0) -> list[np.ndarray]:
    """Index sets of the common block-diagonal structure of ``mats``.

    Two basis states share a block when any matrix couples them. Any linear
    combination of ``mats`` is block diagonal on the returned index sets, so its
    spectrum is the union of the block spectra.
    """
    pattern = np.zeros(mats[0].shape, dtype=bool)
    for m in mats:
        pattern |= np.abs(m) > atol
    pattern |= pattern.T
    _, labels = connected_components(csr_matrix(pattern), directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    return [np.sort(b) for b in np.split(order, splits)]
