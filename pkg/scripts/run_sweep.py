#!/usr/bin/env python3
"""
Run a negativity / mutual-entropy sweep and write it as CSV

Exit codes: 0 success, 1 configuration error, 2 oracle mismatch, 3 I/O error,
4 record invariant violation (checked when DEBUG=true).
"""
import sys
import os
import argparse
import logging
from typing import List, Optional

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.app.core.config import settings
from backend.app.core.exceptions import ConfigError, SimulationError
from backend.app.schemas.schemas import ColumnSet
from backend.app.services.sweep import PRESETS, build_config, emit_csv, load_config_file, run_sweep

logger = logging.getLogger("run_sweep")

# (flag, SweepConfig field, type, help)
CONFIG_FLAGS = [
    ("--alpha-modulus", "alpha_modulus", float, "Coherent amplitude |alpha|"),
    ("--alpha-squared", "alpha_squared", float, "Mean photon number |alpha|^2 (instead of --alpha-modulus)"),
    ("--alpha-phase", "alpha_phase", float, "Phase of alpha in radians"),
    ("--g", "g", float, "Atom-field coupling"),
    ("--omega-a", "omega_A", float, "Atomic transition frequency"),
    ("--delta", "delta", float, "Detuning omega_A - omega_F"),
    ("--atom-ground-weight", "atom_ground_weight", float, "Initial weight of |g><g|, cos^2(varrho/2)"),
    ("--t-start", "t_start", float, "First grid time"),
    ("--t-end", "t_end", float, "Last grid time"),
    ("--n-points", "n_points", int, "Number of grid points"),
    ("--tail-tolerance", "tail_tolerance", float, "Photon-number tail mass allowed above the cutoff"),
    ("--buffer", "buffer", int, "Extra Fock levels above the cutoff"),
    ("--oracle-stride", "oracle_stride", int, "Cross-check every k-th point against the oracle"),
    ("--workers", "workers", int, "Threads used to evaluate grid points"),
]


def parse_cli_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Jaynes-Cummings entanglement sweep: negativity, entropies and mutual entropy"
    )
    parser.add_argument("--preset", choices=sorted(PRESETS), help="Figure parameter set")
    parser.add_argument("--config", help="Config file with 'key = value' lines")
    for flag, field, kind, help_text in CONFIG_FLAGS:
        parser.add_argument(flag, dest=field, type=kind, default=None, help=help_text)
    parser.add_argument("--oracle-check", action="store_true", default=None,
                        help="Cross-validate against the brute-force propagator")
    parser.add_argument("--columns", choices=[c.value for c in ColumnSet], default=None,
                        help="CSV column layout")
    parser.add_argument("-o", "--output", dest="output_path", default=None, help="CSV output path")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")
    return parser.parse_args(argv)


def cli_overrides(args: argparse.Namespace) -> dict:
    overrides = {field: getattr(args, field) for _, field, _, _ in CONFIG_FLAGS}
    overrides["oracle_check"] = args.oracle_check
    overrides["columns"] = args.columns
    overrides["output_path"] = args.output_path
    return {key: value for key, value in overrides.items() if value is not None}


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    args = parse_cli_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = build_config(preset=args.preset, file_values=file_values, overrides=cli_overrides(args))
        if not config.output_path:
            raise ConfigError("An output path is required (--output or output_path)", fields=["output_path"])

        records = run_sweep(config)
        emit_csv(records, config.output_path, columns=config.columns)
    except SimulationError as e:
        logger.error(str(e))
        return e.exit_code

    return 0


if __name__ == "__main__":
    sys.exit(main())
