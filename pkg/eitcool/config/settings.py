"""Application settings and configuration"""

import math
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_TOLERANCES_PATH = Path(__file__).parent / "tolerances.yaml"


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EITCOOL_",
        case_sensitive=False,
        extra="ignore"
    )

    # Physical reference scale
    gamma_mhz: float = Field(default=19.6, gt=0.0, description="Natural linewidth Gamma/2pi in MHz")

    # Spectrum defaults
    spectrum_points: int = Field(default=2001, ge=2, description="Default probe-detuning grid size")
    spectrum_half_width: float = Field(default=2.0, gt=0.0, description="Half width of the default grid around Delta_1, units of Gamma")

    # Analytic dressed states require Delta_0 == Delta_1 within this tolerance
    two_photon_tolerance: float = Field(default=1e-6, ge=0.0, description="Units of Gamma")

    # Worker pool
    # PARALLEL=false forces sequential evaluation regardless of JOBS
    jobs: Optional[int] = Field(default=None, description="Worker count; defaults to available CPUs")
    parallel: bool = Field(default=True, description="Fan out grid evaluations to a process pool")

    # Logging
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="console")

    @model_validator(mode="after")
    def apply_default_jobs(self) -> "Settings":
        """Resolve the worker count once so every consumer sees the same value"""
        if self.jobs is None:
            object.__setattr__(self, "jobs", os.cpu_count() or 1)
        return self

    @property
    def gamma(self) -> float:
        """Linewidth as an angular frequency (rad/s)"""
        return 2.0 * math.pi * self.gamma_mhz * 1e6


@lru_cache(maxsize=1)
def load_tolerances() -> Dict[str, Any]:
    """Load numeric tolerances and advisory thresholds from YAML"""
    with open(_TOLERANCES_PATH, "r") as f:
        return yaml.safe_load(f)


def tolerance(section: str, key: str) -> Any:
    """Look up a single tolerance, e.g. tolerance('steady_state', 'residual')"""
    return load_tolerances()[section][key]


# Global settings instance
settings = Settings()
