"""Laser/atom configuration of the tripod system.

Basis order everywhere in the package is (|-1>, |0>, |1>, |e>). Rabi
frequencies and detunings are in units of the natural linewidth Gamma;
gamma and delta_B are angular frequencies (rad/s) that fix the absolute scale.
"""

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

# Basis indices
IDX_M1 = 0
IDX_0 = 1
IDX_1 = 2
IDX_E = 3
BASIS_LABELS = ("-1", "0", "1", "e")

DEFAULT_GAMMA = 2.0 * math.pi * 19.6e6
DEFAULT_DELTA_B = 2.0 * math.pi * 7.7e6


class TripodParams(BaseModel):
    """
    Rabi frequencies, detunings, linewidth and Zeeman splitting.

    Detuning sign convention: positive = blue of the transition. The ground
    state detunings sit on the Hamiltonian diagonal as in the rotating frame
    of the cooling lasers.
    """

    model_config = ConfigDict(frozen=True)

    omega_1: float = Field(ge=0.0, description="sigma- pump Rabi frequency |1>-|e>, units of Gamma")
    omega_0: float = Field(ge=0.0, description="pi probe Rabi frequency |0>-|e>, units of Gamma")
    omega_m1: float = Field(ge=0.0, description="sigma+ Rabi frequency |-1>-|e>, units of Gamma")
    delta_1: float = Field(description="Detuning of the |1> leg, units of Gamma")
    delta_0: float = Field(description="Detuning of the |0> leg, units of Gamma")
    delta_m1: float = Field(description="Detuning of the |-1> leg, units of Gamma")
    gamma: float = Field(default=DEFAULT_GAMMA, gt=0.0, description="Natural linewidth, rad/s")
    delta_B: float = Field(default=DEFAULT_DELTA_B, description="Zeeman half-splitting, rad/s")

    @classmethod
    def fig1(cls, **overrides: Any) -> "TripodParams":
        """Level-scheme parameter set (dark resonance at Delta_0 = Delta_1 = 4.47)"""
        values = dict(
            omega_1=2.0, omega_0=0.35, omega_m1=0.7,
            delta_1=4.47, delta_0=4.47, delta_m1=3.69,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def fig2(cls, **overrides: Any) -> "TripodParams":
        """Single-ion cooling experiment parameter set"""
        values = dict(
            omega_1=2.0, omega_0=0.76, omega_m1=0.8,
            delta_1=4.5, delta_0=4.54, delta_m1=3.69,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def from_mhz(
        cls,
        gamma_mhz: float = 19.6,
        delta_B_mhz: float = 7.7,
        **frequencies_mhz: float
    ) -> "TripodParams":
        """
        Build from frequencies given as f = omega/2pi in MHz.

        Args:
            gamma_mhz: Linewidth Gamma/2pi in MHz
            delta_B_mhz: Zeeman half-splitting Delta_B/2pi in MHz
            **frequencies_mhz: omega_1, omega_0, ..., delta_m1 in MHz

        Returns:
            TripodParams with the laser parameters in units of Gamma
        """
        scaled = {name: value / gamma_mhz for name, value in frequencies_mhz.items()}
        return cls(
            gamma=2.0 * math.pi * gamma_mhz * 1e6,
            delta_B=2.0 * math.pi * delta_B_mhz * 1e6,
            **scaled
        )

    @property
    def two_photon_detuning(self) -> float:
        """Delta_0 - Delta_1 (the Delta of the analytic rho_ee formulas)"""
        return self.delta_0 - self.delta_1

    @property
    def spectator_driven(self) -> bool:
        """Whether the sigma+ leg repumps |-1>; if not, the system closes to a Lambda"""
        return self.omega_m1 > 0.0

    @property
    def zeeman_splitting(self) -> float:
        """Delta_B in units of Gamma"""
        return self.delta_B / self.gamma

    def zeeman_consistency(self) -> float:
        """|Delta_-1 - (Delta_1 - 2 Delta_B)|, units of Gamma"""
        return abs(self.delta_m1 - (self.delta_1 - 2.0 * self.zeeman_splitting))

    def with_probe_detuning(self, delta_0: float) -> "TripodParams":
        """Copy with only the probe detuning replaced"""
        return self.model_copy(update={"delta_0": delta_0})

    def updated(self, **changes: Any) -> "TripodParams":
        """Validated copy with arbitrary fields replaced"""
        return TripodParams(**{**self.model_dump(), **changes})

    def to_mhz(self) -> dict:
        """Laser parameters as f = omega/2pi in MHz"""
        gamma_mhz = self.gamma / (2.0 * math.pi * 1e6)
        names = ("omega_1", "omega_0", "omega_m1", "delta_1", "delta_0", "delta_m1")
        return {name: getattr(self, name) * gamma_mhz for name in names}
