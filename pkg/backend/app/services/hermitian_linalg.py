"""
Dense complex Hermitian eigen-engine, trace norm and exponential action
"""
import logging
from typing import Tuple

import numpy as np

from backend.app.core.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

HERMITICITY_TOLERANCE = 1e-12


def as_hermitian(m: np.ndarray, tolerance: float = HERMITICITY_TOLERANCE) -> np.ndarray:
    """
    Validate a square complex matrix as Hermitian and symmetrize it

    The deviation max|M - M^dagger| is measured relative to max|M|; the
    returned matrix is (M + M^dagger)/2 so roundoff from block assembly is absorbed.

    Raises:
        InvalidInputError: if the matrix is not square or not Hermitian within tolerance
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"Expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if deviation > tolerance * scale:
        raise InvalidInputError(
            f"Matrix is not Hermitian: max|M - M^dagger| = {deviation:.3e} (scale {scale:.3e})"
        )
    return 0.5 * (m + m.conj().T)


def eigenvalues_hermitian(m: np.ndarray) -> np.ndarray:
    """All real eigenvalues of a Hermitian matrix, ascending"""
    return np.linalg.eigvalsh(as_hermitian(m))


def eigh_hermitian(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and the matching orthonormal eigenvectors (as columns)"""
    return np.linalg.eigh(as_hermitian(m))


def trace_norm(m: np.ndarray) -> float:
    """||M||_1 = Tr sqrt(M^dagger M), i.e. the sum of |eigenvalues| for Hermitian M"""
    return float(np.sum(np.abs(eigenvalues_hermitian(m))))


def matrix_exponential_action(h: np.ndarray, t: float, v: np.ndarray) -> np.ndarray:
    """
    Apply exp(-i H t) to a vector through the spectral decomposition of H

    Args:
        h: Hermitian generator
        t: Evolution time
        v: Complex vector of matching dimension

    Returns:
        exp(-i H t) v
    """
    v = np.asarray(v, dtype=np.complex128)
    h = np.asarray(h)
    if v.ndim != 1 or h.ndim != 2 or h.shape[0] != v.shape[0]:
        raise InvalidInputError(
            f"Dimension mismatch: generator {h.shape} cannot act on vector {v.shape}"
        )
    energies, vectors = eigh_hermitian(h)
    return vectors @ (np.exp(-1j * energies * t) * (vectors.conj().T @ v))
