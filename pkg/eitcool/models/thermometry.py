"""Thermometry result models"""

from pydantic import BaseModel, Field


class SidebandPair(BaseModel):
    """Lower/upper sideband peak heights of one mode and the implied nbar"""
    mode_freq: float = Field(description="Mode frequency, rad/s")
    p_lower: float = Field(ge=0.0, le=1.0)
    p_upper: float = Field(ge=0.0, le=1.0)
    nbar: float = Field(ge=0.0)
    nbar_err: float = Field(default=0.0, ge=0.0, description="Standard error")

    @property
    def ratio(self) -> float:
        """R = p_lower / p_upper"""
        return self.p_lower / self.p_upper


class RabiFit(BaseModel):
    """
    Fit of P(t) = [1 - (1 - A (B t)^2) cos(B t)] / 2 + P0.
    """
    a: float = Field(description="Quadratic contrast decay coefficient")
    b: float = Field(description="Rabi frequency, rad per time unit of the data")
    p0: float = Field(ge=-0.5, le=0.5, description="Detection offset")
    residual: float = Field(ge=0.0, description="RMS residual")


class CoolingCurveFit(BaseModel):
    """Fit of nbar(t) = nbar_ss + (nbar0 - nbar_ss) exp(-t / tau)"""
    tau: float = Field(description="1/e time (time unit of the data); NaN when degenerate")
    nbar_ss: float
    nbar0: float
    residual: float = Field(ge=0.0, description="RMS residual")
    degenerate: bool = Field(default=False, description="Constant data: tau is unidentifiable")

    @property
    def rate(self) -> float:
        """Initial cooling rate (nbar0 - nbar_ss) / tau, quanta per time unit"""
        if self.degenerate:
            return 0.0
        return (self.nbar0 - self.nbar_ss) / self.tau
