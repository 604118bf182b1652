"""Cooling limit, dynamics and scan result models"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class SpectatorScheme(str, Enum):
    """How the sigma+ leg follows the pump in a Rabi-frequency scan"""
    BASE = "base"                          # Delta_-1 = 3.69, Omega_-1 = 0.35 Omega_1
    STRONG_SIGMA_PLUS = "strong_sigma_plus"  # Delta_-1 = -4.47, Omega_-1 = Omega_1
    FIXED = "fixed"                        # keep Delta_-1, Omega_-1 of the base params

    def spectator(self, omega_1: float, delta_m1: float, omega_m1: float) -> Tuple[float, float]:
        """(Delta_-1, Omega_-1) for a given pump Rabi frequency"""
        if self == SpectatorScheme.BASE:
            return 3.69, 0.35 * omega_1
        if self == SpectatorScheme.STRONG_SIGMA_PLUS:
            return -4.47, omega_1
        return delta_m1, omega_m1


class CoolingResult(BaseModel):
    """Steady-state phonon limit of one motional mode"""
    mode_freq: float = Field(gt=0.0, description="Mode frequency, units of Gamma")
    delta0: float = Field(description="Probe detuning used for the carrier, units of Gamma")
    nbar_ss: Optional[float] = Field(default=None, description="Steady-state mean phonon number; None when not cooling")
    cooling: bool = Field(description="False when the upper sideband does not dominate (NotCooling)")
    rate: Optional[float] = Field(default=None, description="Cooling rate W = eta^2 Gamma (rho_blue - rho_red), 1/s; set when eta is given")
    rho_ee_carrier: float = Field(description="rho_ee(Delta_0)")
    rho_ee_red: float = Field(description="rho_ee(Delta_0 - omega)")
    rho_ee_blue: float = Field(description="rho_ee(Delta_0 + omega)")

    @property
    def sideband_difference(self) -> float:
        """Denominator of the phonon limit"""
        return self.rho_ee_blue - self.rho_ee_red


class CoolingDynamics(BaseModel):
    """Rate-equation approach to the steady state"""
    times: List[float] = Field(description="Time grid, s")
    nbar: List[float] = Field(description="Mean phonon number at each time")
    rate: float = Field(gt=0.0, description="W, 1/s")
    nbar_ss: float = Field(ge=0.0)
    nbar0: float = Field(ge=0.0)

    @property
    def e_folding_time(self) -> float:
        """1/W, s"""
        return 1.0 / self.rate

    @property
    def initial_rate(self) -> float:
        """Quanta removed per second at t = 0"""
        return (self.nbar0 - self.nbar_ss) * self.rate


class ScanGrid(BaseModel):
    """
    Phonon limit over (pump Rabi frequency, mode frequency).

    values[i][j] belongs to rabi_axis[i], omega_axis[j]. A cell that fails to
    cool (or whose solve failed) is None so consumers can tell "heating" from
    "hot".
    """
    omega_axis: List[float] = Field(description="Mode frequencies, units of Gamma")
    rabi_axis: List[float] = Field(description="Pump Rabi frequencies Omega_1, units of Gamma")
    values: List[List[Optional[float]]] = Field(description="nbar_ss per cell")
    optimal_delta0: List[Optional[float]] = Field(description="Probe detuning used for each row")
    optimal_nbar: List[Optional[float]] = Field(default_factory=list, description="COM phonon limit at the optimum")
    scheme: SpectatorScheme = Field(default=SpectatorScheme.BASE)

    def row_minimum(self) -> List[Optional[float]]:
        """Lowest phonon number of each Omega_1 row"""
        minima = []
        for row in self.values:
            finite = [v for v in row if v is not None]
            minima.append(min(finite) if finite else None)
        return minima

    def low_window_width(self, factor: float = 2.0) -> List[Optional[float]]:
        """
        Width of the contiguous frequency window around each row's minimum
        where nbar < factor * minimum. The window is clipped at the axis ends,
        so an axis running past the band being cooled narrows it artificially.
        """
        widths: List[Optional[float]] = []
        for row in self.values:
            finite = [(j, v) for j, v in enumerate(row) if v is not None]
            if not finite:
                widths.append(None)
                continue
            j_min, v_min = min(finite, key=lambda item: item[1])
            limit = factor * v_min
            lo = j_min
            while lo > 0 and row[lo - 1] is not None and row[lo - 1] < limit:
                lo -= 1
            hi = j_min
            while hi < len(row) - 1 and row[hi + 1] is not None and row[hi + 1] < limit:
                hi += 1
            widths.append(self.omega_axis[hi] - self.omega_axis[lo])
        return widths
