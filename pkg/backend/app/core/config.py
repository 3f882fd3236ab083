"""
Configuration settings for the simulator
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "JCM Entanglement Simulator"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Truncation policy defaults
    DEFAULT_TAIL_TOLERANCE: float = 1e-12
    DEFAULT_BUFFER: int = 5

    # Time grid defaults (units of 1/g when g = 1)
    DEFAULT_T_START: float = 0.0
    DEFAULT_T_END: float = 25.0
    DEFAULT_N_POINTS: int = 1001

    # Oracle cross-validation
    ORACLE_CHECK_STRIDE: int = 10
    ORACLE_TOLERANCE: float = 1e-7

    # Sweep execution
    SWEEP_WORKERS: int = 1
    MAX_API_POINTS: int = 5001

    # CORS
    CORS_ORIGINS: list = ["http://localhost:5173", "http://localhost:3000", "http://localhost"]

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")


settings = Settings()
