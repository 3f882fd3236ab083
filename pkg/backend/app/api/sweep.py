"""
Sweep API endpoints
"""
from fastapi import APIRouter, HTTPException
from typing import List
import logging

from backend.app.core.config import settings
from backend.app.core.exceptions import (
    ConfigError,
    InvalidParameterError,
    OracleMismatchError,
    SimulationError,
)
from backend.app.schemas.schemas import PresetInfo, SweepRequest, SweepResponse
from backend.app.services.sweep import PRESETS, PRESET_DESCRIPTIONS, build_config, initial_field, run_sweep

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/presets", response_model=List[PresetInfo])
async def list_presets():
    """List the figure-reproduction presets"""
    return [
        PresetInfo(name=name, description=PRESET_DESCRIPTIONS[name], parameters=parameters)
        for name, parameters in PRESETS.items()
    ]


@router.post("/", response_model=SweepResponse)
def sweep(request: SweepRequest):
    """
    Run a sweep and return its records.
    Output paths are ignored here; results travel in the response body.
    """
    try:
        overrides = {**request.overrides, "output_path": None}
        config = build_config(preset=request.preset, overrides=overrides)
        if config.n_points > settings.MAX_API_POINTS:
            raise ConfigError(
                f"n_points={config.n_points} exceeds the API limit of {settings.MAX_API_POINTS}",
                fields=["n_points"],
            )

        logger.info(f"Processing sweep request: preset={config.preset}, n_points={config.n_points}")
        field0 = initial_field(config)
        records = run_sweep(config)

        return SweepResponse(
            config=config,
            n_max=field0.n_max,
            truncation_mass_lost=field0.truncation_mass_lost(),
            records=records,
        )

    except ConfigError as e:
        logger.warning(f"Rejected sweep request: {e}")
        raise HTTPException(status_code=422, detail={"error": str(e), "fields": e.fields})
    except InvalidParameterError as e:
        logger.warning(f"Rejected sweep parameters: {e}")
        raise HTTPException(status_code=422, detail={"error": str(e), "fields": []})
    except OracleMismatchError as e:
        logger.error(f"Oracle mismatch during sweep: {e}")
        raise HTTPException(status_code=409, detail=str(e))
    except SimulationError as e:
        logger.error(f"Error running sweep: {e}")
        raise HTTPException(status_code=500, detail=str(e))
