"""Trap and beam geometry for a linear ion chain"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants as cons

YB171_MASS = 171.0 * cons.atomic_mass


class Branch(str, Enum):
    """Transverse principal axis"""
    ALPHA = "alpha"
    BETA = "beta"


class BeamKind(str, Enum):
    """Beam geometry that sets the effective wavevector"""
    EIT = "eit"      # single-photon k at 369.5 nm
    RAMAN = "raman"  # counter-propagating 355 nm pair, |dk| = 2k


class TrapConfig(BaseModel):
    """Linear Paul trap with N ions; all frequencies are angular (rad/s)"""

    model_config = ConfigDict(frozen=True)

    n_ions: int = Field(ge=1, description="Number of ions")
    omega_ax: float = Field(gt=0.0, description="Axial COM frequency, rad/s")
    omega_alpha: float = Field(gt=0.0, description="Transverse COM frequency along alpha, rad/s")
    omega_beta: float = Field(gt=0.0, description="Transverse COM frequency along beta, rad/s")
    ion_mass: float = Field(default=YB171_MASS, gt=0.0, description="Ion mass, kg (171 u)")
    beam_angle_theta: float = Field(default=math.radians(40.0), description="Angle between dk and axis beta, rad")
    wavelength_eit: float = Field(default=369.5e-9, gt=0.0, description="EIT wavelength, m")
    wavelength_raman: float = Field(default=355e-9, gt=0.0, description="Raman wavelength, m")

    @model_validator(mode="after")
    def check_linear_regime(self) -> "TrapConfig":
        """Transverse confinement must dominate: omega_alpha > omega_beta > omega_ax"""
        if not self.omega_alpha > self.omega_beta > self.omega_ax:
            raise ValueError(
                "linear-chain regime requires omega_alpha > omega_beta > omega_ax "
                f"(got {self.omega_alpha:.6g}, {self.omega_beta:.6g}, {self.omega_ax:.6g})"
            )
        return self

    @classmethod
    def from_mhz(
        cls,
        n_ions: int,
        ax_mhz: float,
        alpha_mhz: float = 4.45,
        beta_mhz: float = 4.30,
        **extra
    ) -> "TrapConfig":
        """Build from trap frequencies f = omega/2pi in MHz"""
        to_angular = 2.0 * math.pi * 1e6
        return cls(
            n_ions=n_ions,
            omega_ax=ax_mhz * to_angular,
            omega_alpha=alpha_mhz * to_angular,
            omega_beta=beta_mhz * to_angular,
            **extra
        )

    @property
    def length_scale(self) -> float:
        """l = (e^2 / (4 pi eps0 M omega_ax^2))^(1/3), metres"""
        coulomb = cons.e ** 2 / (4.0 * math.pi * cons.epsilon_0)
        return (coulomb / (self.ion_mass * self.omega_ax ** 2)) ** (1.0 / 3.0)

    def transverse_frequency(self, branch: Branch) -> float:
        """COM frequency of a transverse branch"""
        return self.omega_alpha if branch == Branch.ALPHA else self.omega_beta

    def projection(self, branch: Branch) -> float:
        """Projection of the beam wavevector onto a branch axis"""
        if branch == Branch.ALPHA:
            return math.sin(self.beam_angle_theta)
        return math.cos(self.beam_angle_theta)

    def wavevector(self, beam: BeamKind) -> float:
        """Effective wavevector magnitude of a beam geometry, 1/m"""
        if beam == BeamKind.EIT:
            return 2.0 * math.pi / self.wavelength_eit
        return 2.0 * (2.0 * math.pi / self.wavelength_raman)
