"""
Brute-force reference propagator

Builds the truncated Hamiltonian as a dense matrix and evolves the initial
mixture through its eigen-decomposition, without any closed-form shortcut.
"""
import logging

import numpy as np

from backend.app.core.exceptions import InvalidParameterError
from backend.app.schemas.schemas import SystemParams
from backend.app.services.dynamics import JointDensity
from backend.app.services.field_space import FieldVector
from backend.app.services.hermitian_linalg import matrix_exponential_action

logger = logging.getLogger(__name__)


def _check_n_max(n_max: int) -> None:
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be >= 1, got {n_max}")


def build_hamiltonian(params: SystemParams, n_max: int) -> np.ndarray:
    """
    H = omega_A sigma_z / 2 + omega_F a^dagger a + g (sigma_+ a + sigma_- a^dagger)

    Basis ordering is {|e>, |g>} x {|0>..|n_max>}. The a^dagger coupling out of
    the top level is dropped, so |e, n_max> is left uncoupled.
    """
    _check_n_max(n_max)
    d = n_max + 1
    n = np.arange(d)
    h = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    h[n, n] = 0.5 * params.omega_A + params.omega_F * n
    h[d + n, d + n] = -0.5 * params.omega_A + params.omega_F * n

    # <e, m| sigma_+ a |g, m+1> = sqrt(m+1)
    m = np.arange(n_max)
    coupling = params.g * np.sqrt(m + 1)
    h[m, d + m + 1] = coupling
    h[d + m + 1, m] = coupling
    return h


def excitation_operator(n_max: int) -> np.ndarray:
    """K = a^dagger a + sigma_z / 2 in the same basis as build_hamiltonian"""
    _check_n_max(n_max)
    n = np.arange(n_max + 1, dtype=float)
    return np.diag(np.concatenate([n + 0.5, n - 0.5])).astype(np.complex128)


def brute_force_state(params: SystemParams, field0: FieldVector, t: float) -> JointDensity:
    """rho(t) = w_g |psi_g(t)><psi_g(t)| + w_e |psi_e(t)><psi_e(t)| by dense propagation"""
    h = build_hamiltonian(params, field0.n_max)
    zeros = np.zeros(field0.dim, dtype=np.complex128)
    ground = np.concatenate([zeros, field0.coeffs])
    excited = np.concatenate([field0.coeffs, zeros])

    psi_g = matrix_exponential_action(h, t, ground)
    psi_e = matrix_exponential_action(h, t, excited)
    rho = (
        params.atom_ground_weight * np.outer(psi_g, psi_g.conj())
        + params.atom_excited_weight * np.outer(psi_e, psi_e.conj())
    )
    return JointDensity.from_matrix(rho)


def max_entry_distance(first: JointDensity, second: JointDensity) -> float:
    """Largest entrywise modulus of the difference of two joint densities"""
    return float(np.max(np.abs(first.matrix() - second.matrix())))
