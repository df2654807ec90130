"""
Hermitian eigendecomposition helpers.

Matrices here are tiny (N, L <= 8), so LAPACK's `eigh` through numpy is used
directly; this module adds the input checks and the ordering/normalization
conventions the optimizers rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import InvalidInputError


HERMITIAN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues ascending; column i of `eigenvectors` belongs to `eigenvalues[i]`."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_hermitian(matrix) -> np.ndarray:
    """Validate *matrix* as Hermitian and return its exactly-Hermitian part."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInputError(f"Expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("Matrix has non-finite entries")
    scale = 1.0 + np.max(np.abs(a))
    asymmetry = np.max(np.abs(a - a.conj().T))
    if asymmetry > HERMITIAN_TOLERANCE * scale:
        raise InvalidInputError(f"Matrix is not Hermitian (max |A - A^H| = {asymmetry:.3e})")
    return 0.5 * (a + a.conj().T)


def eig_hermitian(matrix) -> EigenPair:
    a = as_hermitian(matrix)
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return EigenPair(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def principal_component(matrix) -> Tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector for it."""
    pair = eig_hermitian(matrix)
    return float(pair.eigenvalues[-1]), pair.eigenvectors[:, -1]


def min_eigenvalue(matrix) -> float:
    return float(eig_hermitian(matrix).eigenvalues[0])


def psd_part(matrix) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to zero)."""
    pair = eig_hermitian(matrix)
    clipped = np.clip(pair.eigenvalues, 0.0, None)
    u = pair.eigenvectors
    result = (u * clipped) @ u.conj().T
    return 0.5 * (result + result.conj().T)


def outer_hermitian(row: np.ndarray) -> np.ndarray:
    """H = h h^H for a channel given as its row h^H."""
    row = np.asarray(row, dtype=complex)
    return np.outer(row.conj(), row)
