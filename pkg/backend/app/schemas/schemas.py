"""
Pydantic schemas for simulation parameters, sweep configuration and results
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator

from backend.app.core.config import settings

# Entropies reject density matrices whose trace is off by more than this, so the
# truncated tail may not carry more.
MAX_TAIL_TOLERANCE = 1e-6


class SystemParams(BaseModel):
    """Physical constants of the atom-field system, with hbar = 1.

    Either ``omega_F`` or ``delta`` may be omitted; the missing one is derived
    from ``delta = omega_A - omega_F``. With neither given the system is resonant.
    """
    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {"g": 1.0, "omega_A": 1.0, "delta": 0.0, "atom_ground_weight": 0.5}
        },
    )

    g: FiniteFloat = Field(..., gt=0, description="Atom-field coupling constant")
    omega_A: FiniteFloat = Field(1.0, description="Atomic transition frequency")
    omega_F: FiniteFloat = Field(..., description="Field mode frequency")
    delta: FiniteFloat = Field(..., description="Detuning omega_A - omega_F")
    atom_ground_weight: float = Field(..., ge=0.0, le=1.0, description="cos^2(varrho/2)")

    @model_validator(mode="before")
    @classmethod
    def derive_detuning(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        omega_A = float(data.get("omega_A", 1.0))
        omega_F = data.get("omega_F")
        delta = data.get("delta")

        if omega_F is None and delta is None:
            delta = 0.0
        if omega_F is None:
            delta = float(delta)
            omega_F = omega_A - delta
        elif delta is None:
            omega_F = float(omega_F)
            delta = omega_A - omega_F
        else:
            omega_F, delta = float(omega_F), float(delta)
            if not math.isclose(delta, omega_A - omega_F, rel_tol=1e-12, abs_tol=1e-12):
                raise ValueError("delta must equal omega_A - omega_F")

        data.update(omega_A=omega_A, omega_F=omega_F, delta=delta)
        return data

    @property
    def atom_excited_weight(self) -> float:
        """sin^2(varrho/2), the weight on |e><e| in the initial atomic state"""
        return 1.0 - self.atom_ground_weight


class TruncationPolicy(BaseModel):
    """How far the Fock space is kept for a given coherent amplitude"""
    model_config = ConfigDict(frozen=True)

    tail_tolerance: float = Field(
        default_factory=lambda: settings.DEFAULT_TAIL_TOLERANCE, gt=0.0, le=MAX_TAIL_TOLERANCE,
        description="Largest photon-number probability mass allowed above the cutoff"
    )
    buffer: int = Field(
        default_factory=lambda: settings.DEFAULT_BUFFER, ge=1,
        description="Extra levels kept above the cutoff"
    )


class MeasureRecord(BaseModel):
    """Entanglement and entropy measures at one time sample (entropies in nats)"""
    model_config = ConfigDict(frozen=True)

    t: float
    negativity: float = Field(..., ge=0.0)
    mutual_entropy: float = Field(..., ge=0.0)
    s_atom: float = Field(..., ge=0.0)
    s_field: float = Field(..., ge=0.0)
    s_joint: float = Field(..., ge=0.0)
    classical_bound: float
    truncation_mass_lost: float

    # Extended diagnostics
    quantum_bound: float = 0.0
    atomic_inversion: float = 0.0
    mean_photon_number: float = 0.0
    chi_rank: int = Field(1, ge=0, le=4)


class ColumnSet(str, Enum):
    """Column layouts for CSV output"""
    STANDARD = "standard"
    BOUND_PAIR = "bound_pair"
    EXTENDED = "extended"


class SweepConfig(BaseModel):
    """Time-grid sweep configuration.

    The coherent amplitude is given either as ``alpha_modulus`` or as
    ``alpha_squared`` (the mean photon number), with an optional phase.
    """
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "alpha_modulus": 2.2360679774997896,
                "g": 1.0,
                "omega_A": 1.0,
                "delta": 0.0,
                "atom_ground_weight": 0.5,
                "t_start": 0.0,
                "t_end": 25.0,
                "n_points": 1001,
            }
        },
    )

    preset: Optional[str] = None
    alpha_modulus: FiniteFloat = Field(math.sqrt(5.0), ge=0.0)
    alpha_phase: FiniteFloat = 0.0
    g: FiniteFloat = Field(1.0, gt=0.0)
    omega_A: FiniteFloat = 1.0
    delta: FiniteFloat = 0.0
    atom_ground_weight: float = Field(0.5, ge=0.0, le=1.0)
    t_start: FiniteFloat = Field(default_factory=lambda: settings.DEFAULT_T_START, ge=0.0)
    t_end: FiniteFloat = Field(default_factory=lambda: settings.DEFAULT_T_END)
    n_points: int = Field(default_factory=lambda: settings.DEFAULT_N_POINTS, ge=2)
    tail_tolerance: float = Field(
        default_factory=lambda: settings.DEFAULT_TAIL_TOLERANCE, gt=0.0, le=MAX_TAIL_TOLERANCE
    )
    buffer: int = Field(default_factory=lambda: settings.DEFAULT_BUFFER, ge=1)
    oracle_check: bool = False
    oracle_stride: int = Field(default_factory=lambda: settings.ORACLE_CHECK_STRIDE, ge=1)
    workers: int = Field(default_factory=lambda: settings.SWEEP_WORKERS, ge=1)
    columns: ColumnSet = ColumnSet.STANDARD
    output_path: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def resolve_alpha_squared(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("alpha_squared") is None:
            return data
        data = dict(data)
        alpha_squared = float(data.pop("alpha_squared"))
        if alpha_squared < 0 or not math.isfinite(alpha_squared):
            raise ValueError("alpha_squared must be a finite non-negative number")
        modulus = math.sqrt(alpha_squared)
        if data.get("alpha_modulus") is not None and not math.isclose(
            float(data["alpha_modulus"]), modulus, rel_tol=1e-12
        ):
            raise ValueError("alpha_modulus and alpha_squared disagree")
        data["alpha_modulus"] = modulus
        return data

    @model_validator(mode="after")
    def check_time_window(self) -> "SweepConfig":
        if not self.t_end > self.t_start:
            raise ValueError("t_end must be greater than t_start")
        return self

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_modulus * math.cos(self.alpha_phase),
                       self.alpha_modulus * math.sin(self.alpha_phase))

    def system_params(self) -> SystemParams:
        return SystemParams(
            g=self.g,
            omega_A=self.omega_A,
            delta=self.delta,
            atom_ground_weight=self.atom_ground_weight,
        )

    def truncation_policy(self) -> TruncationPolicy:
        return TruncationPolicy(tail_tolerance=self.tail_tolerance, buffer=self.buffer)


class SweepRequest(BaseModel):
    """HTTP sweep request: an optional preset plus SweepConfig field overrides"""
    preset: Optional[str] = None
    overrides: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {"preset": "fig3", "overrides": {"n_points": 201, "oracle_check": True}}
        }
    )


class SweepResponse(BaseModel):
    """HTTP sweep response"""
    config: SweepConfig
    n_max: int
    truncation_mass_lost: float
    records: List[MeasureRecord]


class PresetInfo(BaseModel):
    """A named parameter set for one of the reference figures"""
    name: str
    description: str
    parameters: Dict[str, Any]
