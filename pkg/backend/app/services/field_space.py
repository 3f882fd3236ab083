"""
Truncated Fock-space field states: coherent-state coefficients and truncation
"""
import cmath
import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from backend.app.core.exceptions import InvalidParameterError
from backend.app.schemas.schemas import TruncationPolicy

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FieldVector:
    """Complex amplitudes b_n over the photon-number basis |0>..|n_max>"""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.shape[0] < 2:
            raise InvalidParameterError("FieldVector needs at least two Fock levels (n_max >= 1)")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n_max(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def photon_distribution(self) -> np.ndarray:
        """P(n) = |b_n|^2"""
        return np.abs(self.coeffs) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.photon_distribution()))

    def mean_photon_number(self) -> float:
        return float(np.dot(np.arange(self.dim), self.photon_distribution()))

    def truncation_mass_lost(self) -> float:
        """Probability mass missing from the truncated vector (never renormalized)"""
        return max(0.0, 1.0 - self.norm_squared())

    def is_normalized(self, tolerance: float = NORMALIZATION_TOLERANCE) -> bool:
        return abs(self.norm_squared() - 1.0) <= tolerance


def _check_alpha(alpha: complex) -> complex:
    alpha = complex(alpha)
    if not cmath.isfinite(alpha):
        raise InvalidParameterError(f"Coherent amplitude must be finite, got {alpha!r}")
    return alpha


def coherent_coefficients(alpha: complex, n_max: int) -> FieldVector:
    """
    Coherent-state amplitudes b_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!)

    Computed by the forward recurrence b_{n+1} = b_n * alpha / sqrt(n+1), so no
    factorial is ever evaluated.

    Args:
        alpha: Complex coherent amplitude
        n_max: Highest photon number kept (>= 1)

    Returns:
        FieldVector of length n_max + 1, not renormalized
    """
    alpha = _check_alpha(alpha)
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be >= 1, got {n_max}")

    coeffs = np.empty(n_max + 1, dtype=np.complex128)
    coeffs[0] = np.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(n_max):
        coeffs[n + 1] = coeffs[n] * alpha / np.sqrt(n + 1)
    return FieldVector(coeffs)


def tail_mass(alpha: complex, n: int) -> float:
    """Exact Poisson tail sum_{k>n} |b_k|^2 of the untruncated coherent state"""
    mean = abs(_check_alpha(alpha)) ** 2
    if mean == 0.0:
        return 0.0
    return float(poisson.sf(n, mean))


def choose_truncation(alpha: complex, policy: TruncationPolicy) -> int:
    """
    Smallest cutoff N whose Poisson tail is below policy.tail_tolerance, plus
    policy.buffer levels for the |n+1> shift of the dynamics.
    """
    mean = abs(_check_alpha(alpha)) ** 2
    cutoff = int(np.floor(mean))
    # The tail beyond the mean decreases monotonically, so the scan terminates.
    while tail_mass(alpha, cutoff) >= policy.tail_tolerance:
        cutoff += 1
    # Loose tolerances can already be met below the mean.
    while cutoff > 0 and tail_mass(alpha, cutoff - 1) < policy.tail_tolerance:
        cutoff -= 1

    n_max = cutoff + policy.buffer
    logger.debug(
        f"Truncation for |alpha|^2={mean:.6g}: cutoff={cutoff}, buffer={policy.buffer}, n_max={n_max}"
    )
    return n_max
