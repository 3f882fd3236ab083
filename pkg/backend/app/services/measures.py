"""
Entanglement and correlation measures: partial transpose, negativity,
von Neumann entropies and the quantum mutual entropy (natural log, nats)
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import entr

from backend.app.core.config import settings
from backend.app.core.exceptions import InvalidInputError, InvariantViolationError
from backend.app.schemas.schemas import MAX_TAIL_TOLERANCE, MeasureRecord, SystemParams
from backend.app.services.dynamics import (
    JointDensity,
    assemble_joint_density,
    atomic_inversion,
    chi_rank,
    chi_vectors,
    mean_photon_number,
    reduced_atom,
    reduced_field,
)
from backend.app.services.field_space import FieldVector
from backend.app.services.hermitian_linalg import as_hermitian, eigenvalues_hermitian

logger = logging.getLogger(__name__)

ENTROPY_CUTOFF = 1e-15
PSD_TOLERANCE = 1e-10
TRACE_TOLERANCE = MAX_TAIL_TOLERANCE
MARGINAL_TOLERANCE = 1e-8
MUTUAL_ENTROPY_DUST = 1e-9
NEGATIVITY_DUST = 1e-10


def partial_transpose_atom(rho: JointDensity) -> np.ndarray:
    """rho^{T_1} = [[A, C^dagger], [C, B]]"""
    return np.block([[rho.a, rho.c.conj().T], [rho.c, rho.b]])


def _clamp_dust(spectrum: np.ndarray) -> np.ndarray:
    return np.where((spectrum < 0.0) & (spectrum >= -NEGATIVITY_DUST), 0.0, spectrum)


def partial_transpose_spectrum(rho: JointDensity) -> np.ndarray:
    """Ascending eigenvalues of rho^{T_1}; negatives within 1e-10 of zero are set to zero"""
    return _clamp_dust(eigenvalues_hermitian(partial_transpose_atom(rho)))


def _negativity_from_spectrum(spectrum: np.ndarray) -> float:
    return max(0.0, float(-np.sum(spectrum[spectrum < 0.0])))


def negativity(rho: JointDensity) -> float:
    """
    N(rho) = -sum of the negative eigenvalues of rho^{T_1}

    The raw value is reported; deciding separability from it is left to the caller.
    """
    return _negativity_from_spectrum(partial_transpose_spectrum(rho))


def negativity_from_trace_norm(rho: JointDensity) -> float:
    """N(rho) = (||rho^{T_1}||_1 - 1) / 2, clamped at zero"""
    spectrum = partial_transpose_spectrum(rho)
    return max(0.0, (float(np.sum(np.abs(spectrum))) - 1.0) / 2.0)


def von_neumann_entropy(m: np.ndarray) -> float:
    """
    S = -Tr m ln m over the eigenvalues of m, with 0 ln 0 = 0

    Eigenvalues below 1e-15 count as exact zeros.

    Raises:
        InvalidInputError: if the trace is off by more than 1e-6 or m is not PSD
    """
    m = as_hermitian(m)
    trace = float(np.trace(m).real)
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise InvalidInputError(f"Density matrix trace is {trace!r}, expected 1")
    spectrum = eigenvalues_hermitian(m)
    if spectrum[0] < -PSD_TOLERANCE:
        raise InvalidInputError(f"Density matrix is not positive: min eigenvalue {spectrum[0]:.3e}")
    spectrum = np.where(spectrum < ENTROPY_CUTOFF, 0.0, spectrum)
    return float(np.sum(entr(spectrum)))


@dataclass(frozen=True)
class EntropyProfile:
    """Marginal and joint entropies of a bipartite state, in nats"""

    s_atom: float
    s_field: float
    s_joint: float

    @property
    def raw_mutual_entropy(self) -> float:
        return self.s_atom + self.s_field - self.s_joint

    @property
    def mutual_entropy(self) -> float:
        return max(0.0, self.raw_mutual_entropy)

    @property
    def classical_bound(self) -> float:
        """min(S^A, S^F), saturated by classically maximally correlated states"""
        return min(self.s_atom, self.s_field)

    @property
    def quantum_bound(self) -> float:
        return 2.0 * self.classical_bound


def _check_marginals(rho: JointDensity, rho_a: np.ndarray, rho_f: np.ndarray) -> None:
    rho_a = np.asarray(rho_a)
    rho_f = np.asarray(rho_f)
    if rho_a.shape != (2, 2) or rho_f.shape != rho.a.shape:
        raise InvalidInputError(
            f"Marginal shapes {rho_a.shape}, {rho_f.shape} do not match joint blocks {rho.a.shape}"
        )
    atom_gap = float(np.max(np.abs(rho.atom_marginal() - rho_a)))
    field_gap = float(np.max(np.abs(rho.field_marginal() - rho_f)))
    # rho^A_gg = 1 - rho^A_ee, so a truncated joint trace shows up in the atom gap.
    tolerance = MARGINAL_TOLERANCE + abs(1.0 - rho.trace())
    if atom_gap > tolerance or field_gap > tolerance:
        raise InvalidInputError(
            f"Marginals are not partial traces of the joint state "
            f"(atom gap {atom_gap:.3e}, field gap {field_gap:.3e})"
        )


def entropy_profile(rho: JointDensity, rho_a: np.ndarray, rho_f: np.ndarray) -> EntropyProfile:
    """Entropies of the joint state and of its two marginals"""
    _check_marginals(rho, rho_a, rho_f)
    profile = EntropyProfile(
        s_atom=von_neumann_entropy(rho_a),
        s_field=von_neumann_entropy(rho_f),
        s_joint=von_neumann_entropy(rho.matrix()),
    )
    if profile.raw_mutual_entropy < -MUTUAL_ENTROPY_DUST:
        logger.warning(f"Mutual entropy below zero beyond roundoff: {profile.raw_mutual_entropy:.3e}")
    elif profile.raw_mutual_entropy < 0.0:
        logger.debug(f"Clamping mutual entropy dust {profile.raw_mutual_entropy:.3e} to zero")
    return profile


def mutual_entropy(rho: JointDensity, rho_a: np.ndarray, rho_f: np.ndarray) -> float:
    """I = S(rho^A) + S(rho^F) - S(rho), clamped at zero"""
    return entropy_profile(rho, rho_a, rho_f).mutual_entropy


def _check_record(
    record: MeasureRecord,
    trace_norm_value: float,
    joint_trace: float,
    branch_norms: Sequence[float] = (),
    field_norm: float = 1.0,
) -> None:
    violations = []
    # U(t) preserves <eta|eta> in each atomic branch.
    if any(abs(norm - field_norm) > 1e-10 for norm in branch_norms):
        violations.append(f"branch norms {tuple(branch_norms)!r} differ from <eta|eta> = {field_norm!r}")
    if abs(record.mutual_entropy - (record.s_atom + record.s_field - record.s_joint)) > MUTUAL_ENTROPY_DUST:
        violations.append("I != S_A + S_F - S")
    if record.mutual_entropy > record.quantum_bound + 1e-8:
        violations.append("I exceeds 2 min(S_A, S_F)")
    # The truncated state carries trace 1 - mass_lost.
    slack = 1e-10 + record.truncation_mass_lost
    if abs(record.negativity - (trace_norm_value - joint_trace) / 2.0) > slack:
        violations.append("eigenvalue and trace-norm negativities disagree")
    if abs(joint_trace - 1.0) > slack:
        violations.append(f"joint trace is {joint_trace!r}")
    if violations:
        raise InvariantViolationError(f"t={record.t!r}: " + "; ".join(violations))


def measure_sweep_point(
    params: SystemParams,
    field0: FieldVector,
    t: float,
    check_invariants: Optional[bool] = None,
) -> MeasureRecord:
    """
    Evolve to time t in closed form and evaluate every measure

    Args:
        params: System parameters
        field0: Initial field state
        t: Time
        check_invariants: Verify record invariants; defaults to settings.DEBUG

    Returns:
        MeasureRecord for this grid point
    """
    chi = chi_vectors(params, field0, t)
    rho = assemble_joint_density(params, chi)
    rho_a = reduced_atom(params, chi)
    rho_f = reduced_field(chi, params)

    profile = entropy_profile(rho, rho_a, rho_f)
    spectrum = partial_transpose_spectrum(rho)

    record = MeasureRecord(
        t=float(t),
        negativity=_negativity_from_spectrum(spectrum),
        mutual_entropy=profile.mutual_entropy,
        s_atom=profile.s_atom,
        s_field=profile.s_field,
        s_joint=profile.s_joint,
        classical_bound=profile.classical_bound,
        truncation_mass_lost=field0.truncation_mass_lost(),
        quantum_bound=profile.quantum_bound,
        atomic_inversion=atomic_inversion(rho_a),
        mean_photon_number=mean_photon_number(rho_f),
        chi_rank=chi_rank(chi),
    )

    if check_invariants is None:
        check_invariants = settings.DEBUG
    if check_invariants:
        _check_record(
            record,
            float(np.sum(np.abs(spectrum))),
            rho.trace(),
            branch_norms=chi.branch_norms(),
            field_norm=field0.norm_squared(),
        )
    return record
