"""
Sweep orchestration: presets, configuration loading, the time-grid run with
optional oracle cross-validation, and CSV emission
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from backend.app.core.config import settings
from backend.app.core.exceptions import (
    ConfigError,
    InvalidInputError,
    OracleMismatchError,
    OutputError,
)
from backend.app.schemas.schemas import ColumnSet, MeasureRecord, SweepConfig
from backend.app.services.dynamics import assemble_joint_density, chi_vectors
from backend.app.services.field_space import FieldVector, choose_truncation, coherent_coefficients
from backend.app.services.measures import (
    entropy_profile,
    measure_sweep_point,
    negativity,
)
from backend.app.services.reference_oracle import brute_force_state, max_entry_distance

logger = logging.getLogger(__name__)

STANDARD_COLUMNS = [
    "t", "negativity", "mutual_entropy", "s_atom", "s_field", "s_joint",
    "classical_bound", "truncation_mass_lost",
]
BOUND_PAIR_COLUMNS = ["t", "mutual_entropy", "classical_bound"]
EXTENDED_COLUMNS = STANDARD_COLUMNS + [
    "quantum_bound", "atomic_inversion", "mean_photon_number", "chi_rank",
]
COLUMN_LAYOUTS = {
    ColumnSet.STANDARD: STANDARD_COLUMNS,
    ColumnSet.BOUND_PAIR: BOUND_PAIR_COLUMNS,
    ColumnSet.EXTENDED: EXTENDED_COLUMNS,
}

# Shared by every figure: alpha = sqrt(5), g = 1, omega_A = 1.
_FIGURE_BASE = {"alpha_modulus": math.sqrt(5.0), "g": 1.0, "omega_A": 1.0}
PRESETS: Dict[str, Dict[str, Any]] = {
    "fig1": {**_FIGURE_BASE, "delta": 0.0, "atom_ground_weight": 0.0},
    "fig2": {**_FIGURE_BASE, "delta": 0.0, "atom_ground_weight": 0.5},
    "fig3": {**_FIGURE_BASE, "delta": 5.0, "atom_ground_weight": 0.5},
    "fig4": {**_FIGURE_BASE, "delta": 10.0, "atom_ground_weight": 0.5},
    "fig5": {**_FIGURE_BASE, "delta": 10.0, "atom_ground_weight": 0.5,
             "columns": ColumnSet.BOUND_PAIR},
}
PRESET_DESCRIPTIONS = {
    "fig1": "Resonant, atom initially excited: pure joint state",
    "fig2": "Resonant, maximally mixed atom",
    "fig3": "Detuning 5, maximally mixed atom",
    "fig4": "Detuning 10, maximally mixed atom",
    "fig5": "Detuning 10: mutual entropy against the classical upper bound",
}


def _normalize_keys(values: Dict[str, Any]) -> Dict[str, Any]:
    return {key.strip().replace("-", "_"): value for key, value in values.items()}


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a flat ``key = value`` file with ``#`` comments

    Keys are SweepConfig field names, snake_case or kebab-case.
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"Config file not found: {path}", fields=["config"])
    values = dotenv_values(config_path)
    return {key: value for key, value in _normalize_keys(values).items() if value is not None}


def build_config(
    preset: Optional[str] = None,
    file_values: Optional[Dict[str, Any]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> SweepConfig:
    """
    Merge preset < config file < explicit overrides into a validated SweepConfig

    Raises:
        ConfigError: unknown preset or invalid fields (the message names them)
    """
    merged: Dict[str, Any] = {}
    file_values = _normalize_keys(file_values or {})
    overrides = _normalize_keys(overrides or {})

    preset = overrides.get("preset") or preset or file_values.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"Unknown preset {preset!r}; choose one of {', '.join(PRESETS)}", fields=["preset"]
            )
        merged.update(PRESETS[preset])
        merged["preset"] = preset

    # The preset was resolved above; a lower layer naming another one must not replace it.
    for layer in (file_values, overrides):
        layer = {key: value for key, value in layer.items() if key != "preset"}
        # A modulus given at a higher layer replaces a squared amplitude from a lower one.
        if "alpha_modulus" in layer:
            merged.pop("alpha_squared", None)
        if "alpha_squared" in layer:
            merged.pop("alpha_modulus", None)
        merged.update({key: value for key, value in layer.items() if value is not None})

    try:
        return SweepConfig(**merged)
    except ValidationError as e:
        fields = sorted({".".join(str(part) for part in err["loc"]) or "config" for err in e.errors()})
        details = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
                            for err in e.errors())
        raise ConfigError(f"Invalid sweep configuration ({details})", fields=fields) from e


def time_grid(config: SweepConfig) -> np.ndarray:
    return np.linspace(config.t_start, config.t_end, config.n_points)


def initial_field(config: SweepConfig) -> FieldVector:
    """Coherent initial field truncated per the config's policy"""
    n_max = choose_truncation(config.alpha, config.truncation_policy())
    return coherent_coefficients(config.alpha, n_max)


def _oracle_check(config: SweepConfig, field0: FieldVector, record: MeasureRecord) -> None:
    params = config.system_params()
    tolerance = settings.ORACLE_TOLERANCE
    closed = assemble_joint_density(params, chi_vectors(params, field0, record.t))
    oracle = brute_force_state(params, field0, record.t)

    if max_entry_distance(closed, oracle) > tolerance:
        gap = np.abs(closed.matrix() - oracle.matrix())
        i, j = np.unravel_index(int(np.argmax(gap)), gap.shape)
        raise OracleMismatchError(
            record.t, f"rho[{i},{j}]", complex(closed.matrix()[i, j]), complex(oracle.matrix()[i, j])
        )

    oracle_negativity = negativity(oracle)
    if abs(oracle_negativity - record.negativity) > tolerance:
        raise OracleMismatchError(record.t, "negativity", record.negativity, oracle_negativity)

    profile = entropy_profile(oracle, oracle.atom_marginal(), oracle.field_marginal())
    for name, oracle_value in (
        ("s_atom", profile.s_atom),
        ("s_field", profile.s_field),
        ("s_joint", profile.s_joint),
        ("mutual_entropy", profile.mutual_entropy),
    ):
        closed_value = getattr(record, name)
        if abs(closed_value - oracle_value) > tolerance:
            raise OracleMismatchError(record.t, name, closed_value, oracle_value)


def run_sweep(config: SweepConfig) -> List[MeasureRecord]:
    """
    Evaluate every grid point of the config's time window

    Points are independent, so they are computed on a thread pool of
    ``config.workers`` threads and sorted by t afterwards. With
    ``oracle_check`` every ``oracle_stride``-th point is recomputed by dense
    propagation.

    Raises:
        OracleMismatchError: when the two paths disagree beyond ORACLE_TOLERANCE
    """
    started = time.perf_counter()
    params = config.system_params()
    field0 = initial_field(config)
    grid = time_grid(config)
    logger.info(
        f"Sweep: {len(grid)} points on [{config.t_start}, {config.t_end}], "
        f"n_max={field0.n_max}, mass lost={field0.truncation_mass_lost():.3e}, workers={config.workers}"
    )

    def evaluate(t: float) -> MeasureRecord:
        return measure_sweep_point(params, field0, float(t))

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(evaluate, grid))
    else:
        records = [evaluate(t) for t in grid]
    records.sort(key=lambda record: record.t)

    if config.oracle_check:
        checkpoints = records[::config.oracle_stride]
        logger.info(f"Oracle cross-check on {len(checkpoints)} points")
        for record in checkpoints:
            _oracle_check(config, field0, record)

    logger.info(f"Sweep finished in {time.perf_counter() - started:.2f}s")
    return records


def time_average(records: Sequence[MeasureRecord], field: str,
                 t_min: Optional[float] = None, t_max: Optional[float] = None) -> float:
    """Trapezoidal time average of one record field over [t_min, t_max]"""
    frame = records_frame(records, EXTENDED_COLUMNS)
    if t_min is not None:
        frame = frame[frame["t"] >= t_min]
    if t_max is not None:
        frame = frame[frame["t"] <= t_max]
    if len(frame) < 2:
        raise InvalidInputError("Time average needs at least two samples in the window")
    t = frame["t"].to_numpy()
    return float(np.trapezoid(frame[field].to_numpy(), t) / (t[-1] - t[0]))


def records_frame(records: Iterable[MeasureRecord], columns: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame([record.model_dump() for record in records], columns=list(columns))


def emit_csv(records: Sequence[MeasureRecord], path: str,
             columns: ColumnSet = ColumnSet.STANDARD) -> None:
    """
    Write one row per record with round-trip double precision

    Raises:
        InvalidInputError: for an empty record list
        OutputError: when the file cannot be written
    """
    if not records:
        raise InvalidInputError("No records to write")
    frame = records_frame(records, COLUMN_LAYOUTS[ColumnSet(columns)])
    try:
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise OutputError(path, str(e)) from e
    logger.info(f"Wrote {len(frame)} records to {path}")
