"""
Closed-form Jaynes-Cummings evolution in the product basis {|e>, |g>} x {|n>}

Every time point is evaluated independently from the dressed-state solution;
there is no stepping integrator. The Fock space is hard-truncated at n_max:
the top level |e, n_max> has no partner |g, n_max + 1> and only picks up its
bare phase, which is exactly the evolution generated by the truncated
Hamiltonian of the reference oracle.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from backend.app.core.exceptions import InvalidParameterError
from backend.app.schemas.schemas import MAX_TAIL_TOLERANCE, SystemParams
from backend.app.services.field_space import FieldVector

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
MAX_FIELD_DEFICIT = MAX_TAIL_TOLERANCE


def _check_level(n: int) -> None:
    if n < 0:
        raise InvalidParameterError(f"Photon number must be >= 0, got {n}")


def rabi_frequency(params: SystemParams, n: int) -> float:
    """Omega_n = sqrt((Delta/2)^2 + g^2 (n+1))"""
    _check_level(n)
    return math.sqrt((params.delta / 2.0) ** 2 + params.g ** 2 * (n + 1))


def _angle_denominator(delta: float, coupling_sq, omega):
    # 2*Omega - Delta cancels catastrophically for large positive Delta.
    if delta > 0:
        return 4.0 * coupling_sq / (2.0 * omega + delta)
    return 2.0 * omega - delta


def mixing_angle(params: SystemParams, n: int) -> float:
    """theta_n in (0, pi/2) with tan(theta_n) = 2 g sqrt(n+1) / (-Delta + 2 Omega_n)"""
    omega = rabi_frequency(params, n)
    coupling_sq = params.g ** 2 * (n + 1)
    return math.atan2(
        2.0 * math.sqrt(coupling_sq),
        _angle_denominator(params.delta, coupling_sq, omega),
    )


def dressed_energies(params: SystemParams, n: int) -> Tuple[float, float]:
    """(E_+, E_-) = omega_F (n + 1/2) +- Omega_n for the sector {|e,n>, |g,n+1>}"""
    omega = rabi_frequency(params, n)
    centre = params.omega_F * (n + 0.5)
    return centre + omega, centre - omega


def _sector_tables(params: SystemParams, n_max: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Omega_n, sin(2 theta_n), cos(2 theta_n) for n = 0..n_max"""
    n = np.arange(n_max + 1)
    coupling_sq = params.g ** 2 * (n + 1)
    omega = np.sqrt((params.delta / 2.0) ** 2 + coupling_sq)
    theta = np.arctan2(
        2.0 * np.sqrt(coupling_sq), _angle_denominator(params.delta, coupling_sq, omega)
    )
    return omega, np.sin(2.0 * theta), np.cos(2.0 * theta)


@dataclass(frozen=True)
class ChiQuad:
    """
    The four unnormalized field vectors of the evolved state

    U(t)|g, eta> = |g> chi1 + |e> chi2 and U(t)|e, eta> = |g> chi3 + |e> chi4.
    """

    chi1: np.ndarray
    chi2: np.ndarray
    chi3: np.ndarray
    chi4: np.ndarray
    t: float

    def psi_g(self) -> np.ndarray:
        """U(t)|g, eta> in the joint basis, excited block first"""
        return np.concatenate([self.chi2, self.chi1])

    def psi_e(self) -> np.ndarray:
        """U(t)|e, eta> in the joint basis, excited block first"""
        return np.concatenate([self.chi4, self.chi3])

    def branch_norms(self) -> Tuple[float, float]:
        """(<chi1|chi1> + <chi2|chi2>, <chi3|chi3> + <chi4|chi4>)"""
        return (
            float(np.vdot(self.chi1, self.chi1).real + np.vdot(self.chi2, self.chi2).real),
            float(np.vdot(self.chi3, self.chi3).real + np.vdot(self.chi4, self.chi4).real),
        )


@dataclass(frozen=True)
class JointDensity:
    """
    Joint density matrix in 2x2 block form [[A, C], [C^dagger, B]]

    The outer index is the atom ({e, g}), the inner index the photon number.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "JointDensity":
        m = np.asarray(m, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidParameterError(f"Joint density must be square of even size, got {m.shape}")
        d = m.shape[0] // 2
        return cls(a=m[:d, :d].copy(), b=m[d:, d:].copy(), c=m[:d, d:].copy())

    @property
    def n_levels(self) -> int:
        return self.a.shape[0]

    def matrix(self) -> np.ndarray:
        return np.block([[self.a, self.c], [self.c.conj().T, self.b]])

    def trace(self) -> float:
        return float(np.trace(self.a).real + np.trace(self.b).real)

    def atom_marginal(self) -> np.ndarray:
        """Partial trace over the field"""
        off_diagonal = np.trace(self.c)
        return np.array(
            [[np.trace(self.a), off_diagonal], [np.conj(off_diagonal), np.trace(self.b)]],
            dtype=np.complex128,
        )

    def field_marginal(self) -> np.ndarray:
        """Partial trace over the atom"""
        return self.a + self.b


def chi_vectors(params: SystemParams, field0: FieldVector, t: float) -> ChiQuad:
    """
    Evaluate chi1..chi4 at time t from the dressed-state solution

    chi3 carries its amplitudes on |n+1>; the n = 0 entry of chi1 is the vacuum
    phase exp(i omega_A t / 2) of U(t)|g, 0>.

    Raises:
        InvalidParameterError: for t < 0 or a field vector that is not normalized
    """
    if not math.isfinite(t) or t < 0:
        raise InvalidParameterError(f"Evolution time must be finite and >= 0, got {t!r}")
    if not field0.is_normalized(MAX_FIELD_DEFICIT):
        raise InvalidParameterError(
            f"Initial field state is not normalized: <eta|eta> = {field0.norm_squared()!r}"
        )

    b = field0.coeffs
    n_max = field0.n_max
    omega, sin2, cos2 = _sector_tables(params, n_max)
    n = np.arange(n_max + 1)

    phase = np.exp(-1j * params.omega_F * (n + 0.5) * t)
    cos_t = np.cos(omega * t)
    sin_t = np.sin(omega * t)
    flip = -1j * phase * sin2 * sin_t
    # Sectors 0..n_max-1 are complete; the top one has no |g, n_max+1> partner.
    stay_e = phase * (cos_t + 1j * cos2 * sin_t)
    stay_g = phase * (cos_t - 1j * cos2 * sin_t)

    chi1 = np.empty(n_max + 1, dtype=np.complex128)
    chi1[0] = b[0] * np.exp(0.5j * params.omega_A * t)
    chi1[1:] = b[1:] * stay_g[:-1]

    chi2 = np.zeros(n_max + 1, dtype=np.complex128)
    chi2[:-1] = b[1:] * flip[:-1]

    chi3 = np.zeros(n_max + 1, dtype=np.complex128)
    chi3[1:] = b[:-1] * flip[:-1]

    chi4 = np.empty(n_max + 1, dtype=np.complex128)
    chi4[:-1] = b[:-1] * stay_e[:-1]
    chi4[-1] = b[-1] * np.exp(-1j * (0.5 * params.omega_A + params.omega_F * n_max) * t)

    return ChiQuad(chi1=chi1, chi2=chi2, chi3=chi3, chi4=chi4, t=float(t))


def assemble_joint_density(params: SystemParams, chi: ChiQuad) -> JointDensity:
    """Build A, B, C from weighted outer products of the chi-vectors"""
    w_g = params.atom_ground_weight
    w_e = params.atom_excited_weight
    a = w_g * np.outer(chi.chi2, chi.chi2.conj()) + w_e * np.outer(chi.chi4, chi.chi4.conj())
    b = w_g * np.outer(chi.chi1, chi.chi1.conj()) + w_e * np.outer(chi.chi3, chi.chi3.conj())
    c = w_g * np.outer(chi.chi2, chi.chi1.conj()) + w_e * np.outer(chi.chi4, chi.chi3.conj())
    return JointDensity(a=a, b=b, c=c)


def reduced_atom(params: SystemParams, chi: ChiQuad) -> np.ndarray:
    """Atomic density matrix in the basis {|e>, |g>}"""
    w_g = params.atom_ground_weight
    w_e = params.atom_excited_weight
    excited = w_g * np.vdot(chi.chi2, chi.chi2).real + w_e * np.vdot(chi.chi4, chi.chi4).real
    coherence = w_g * np.vdot(chi.chi1, chi.chi2) + w_e * np.vdot(chi.chi3, chi.chi4)
    return np.array(
        [[excited, coherence], [np.conj(coherence), 1.0 - excited]],
        dtype=np.complex128,
    )


def reduced_field(chi: ChiQuad, params: SystemParams) -> np.ndarray:
    """Field density matrix A(t) + B(t)"""
    w_g = params.atom_ground_weight
    w_e = params.atom_excited_weight
    return (
        w_g * (np.outer(chi.chi1, chi.chi1.conj()) + np.outer(chi.chi2, chi.chi2.conj()))
        + w_e * (np.outer(chi.chi3, chi.chi3.conj()) + np.outer(chi.chi4, chi.chi4.conj()))
    )


def chi_rank(chi: ChiQuad, tolerance: float = RANK_TOLERANCE) -> int:
    """Number of linearly independent chi-vectors; the state lives on C^2 x C^rank"""
    return int(np.linalg.matrix_rank(
        np.column_stack([chi.chi1, chi.chi2, chi.chi3, chi.chi4]), tol=tolerance
    ))


def atomic_inversion(rho_a: np.ndarray) -> float:
    """W = rho_ee - rho_gg"""
    return float((rho_a[0, 0] - rho_a[1, 1]).real)


def mean_photon_number(rho_f: np.ndarray) -> float:
    return float(np.dot(np.arange(rho_f.shape[0]), np.diagonal(rho_f).real))
