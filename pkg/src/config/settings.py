"""
Pydantic Settings configuration
"""

from typing import Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# .env values become plain environment variables before Settings reads them
load_dotenv()


class Settings(BaseSettings):
    """Main configuration"""

    # Core
    log_level: str = "INFO"
    log_dir: Optional[str] = None

    # Per-slice work
    max_workers: int = Field(default=1, ge=1)
    tprod_fft_crossover: int = Field(default=4, ge=1)

    # Numerical thresholds
    rank_tol: float = Field(default=1e-10, ge=0.0)
    tubal_rank_tol: float = Field(default=1e-10, ge=0.0)
    singular_rcond: float = Field(default=1e-12, ge=0.0)
    defective_rcond: float = Field(default=1e-10, ge=0.0)
    real_residue_tol: float = Field(default=1e-9, ge=0.0)

    # Output
    output_dir: str = "./output"
    report_digits: int = Field(default=15, ge=1, le=17)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="MLTI_",
        extra="ignore",
    )

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()


_settings: Optional[Settings] = None


def get_settings(reload: bool = False) -> Settings:
    """Get the global Settings instance"""
    global _settings
    if reload or _settings is None:
        _settings = Settings()
    return _settings


def override_settings(**changes) -> Settings:
    """Replace the global Settings with a copy carrying ``changes``"""
    global _settings
    _settings = get_settings().model_copy(update=changes)
    return _settings
