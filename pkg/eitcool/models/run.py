"""CLI run configuration models"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field


class Command(str, Enum):
    """CLI subcommands"""
    SPECTRUM = "spectrum"
    COOLING_LIMIT = "cooling-limit"
    DYNAMICS = "dynamics"
    SCAN = "scan"
    OPTIMIZE = "optimize"
    CHAIN_MODES = "chain-modes"
    THERMOMETRY = "thermometry"
    RABI_FIT = "rabi-fit"


class OutputFormat(str, Enum):
    """Data file format"""
    CSV = "csv"
    JSON = "json"


class GridSpec(BaseModel):
    """Evenly spaced axis, endpoints included"""
    start: float
    stop: float
    count: int = Field(ge=0)
    unit: str = Field(default="gamma", description="Unit suffix of start/stop as given")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


class RunConfig(BaseModel):
    """Fully parsed CLI invocation (file values overridden by flags)"""
    command: Command
    values: Dict[str, Any] = Field(default_factory=dict, description="Typed scalar and frequency keys")
    grids: Dict[str, GridSpec] = Field(default_factory=dict, description="Axis name -> grid")
    output: Path
    format: OutputFormat = OutputFormat.CSV
    jobs: Optional[int] = Field(default=None, ge=1)


class CommandOutput(BaseModel):
    """Tabular result of one command plus summary values for the manifest"""
    columns: List[str]
    rows: List[List[Any]]
    summary: Dict[str, Any] = Field(default_factory=dict)
    resolved_params: Dict[str, Any] = Field(default_factory=dict)
