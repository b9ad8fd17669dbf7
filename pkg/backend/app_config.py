"""
Application configuration for the command line.
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="MSD_", env_file=".env", extra="ignore")

    APP_TITLE: str = "msdiagrams"
    VERSION: str = "1.0.0"

    # Audit trail
    LOG_DIR: str = "logs"
    AUDIT_ENABLED: bool = True

    # Outputs
    OUTPUT_DIR: str = "generated_diagrams"
    SVG_HASHSALT: str = "msdiagrams"


settings = AppSettings()
