"""eitcool data models"""

from .tripod import IDX_0, IDX_1, IDX_E, IDX_M1, BASIS_LABELS, TripodParams
from .chain import YB171_MASS, BeamKind, Branch, TrapConfig
from .cooling import CoolingDynamics, CoolingResult, ScanGrid, SpectatorScheme
from .thermometry import CoolingCurveFit, RabiFit, SidebandPair
from .run import Command, CommandOutput, GridSpec, OutputFormat, RunConfig

__all__ = [
    "IDX_M1",
    "IDX_0",
    "IDX_1",
    "IDX_E",
    "BASIS_LABELS",
    "TripodParams",
    "YB171_MASS",
    "BeamKind",
    "Branch",
    "TrapConfig",
    "CoolingDynamics",
    "CoolingResult",
    "ScanGrid",
    "SpectatorScheme",
    "CoolingCurveFit",
    "RabiFit",
    "SidebandPair",
    "Command",
    "CommandOutput",
    "GridSpec",
    "OutputFormat",
    "RunConfig",
]
