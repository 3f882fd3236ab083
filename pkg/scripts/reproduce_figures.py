#!/usr/bin/env python3
"""
Run every figure preset and write one CSV per preset into a directory
"""
import sys
import os
import logging
from pathlib import Path

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from backend.app.core.exceptions import SimulationError
from backend.app.services.sweep import PRESETS, build_config, emit_csv, run_sweep, time_average

logger = logging.getLogger("reproduce_figures")


def reproduce_all(output_dir: Path, oracle_check: bool = True) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    for name in PRESETS:
        config = build_config(preset=name, overrides={"oracle_check": oracle_check})
        records = run_sweep(config)
        path = output_dir / f"{name}.csv"
        emit_csv(records, str(path), columns=config.columns)
        logger.info(
            f"{name}: <N> = {time_average(records, 'negativity'):.4f}, "
            f"<I> = {time_average(records, 'mutual_entropy'):.4f} -> {path}"
        )


def main():
    """Main function"""
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    if len(sys.argv) != 2:
        print("Usage: python scripts/reproduce_figures.py <output_dir>", file=sys.stderr)
        sys.exit(1)

    try:
        reproduce_all(Path(sys.argv[1]).resolve())
    except SimulationError as e:
        logger.error(str(e))
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()
