"""Exception hierarchy.

ConfigError maps to CLI exit status 1, NumericError (and subclasses) to 2.
I/O failures are left as OSError and map to 3.
"""


class EitCoolError(Exception):
    """Base class for all eitcool errors"""


class ConfigError(EitCoolError):
    """Invalid, missing or unknown configuration"""


class NumericError(EitCoolError):
    """A computation could not produce a valid result"""


class DegenerateSystem(NumericError):
    """Omega_0^2 + Omega_1^2 = 0: the Lambda system has no bright state"""


class TwoPhotonMismatch(NumericError):
    """Analytic dressed states need Delta_0 == Delta_1"""


class NonUniqueSteadyState(NumericError):
    """The Liouvillian null space has dimension greater than one"""

    def __init__(self, dimension: int):
        super().__init__(f"steady state is not unique: null space dimension {dimension}")
        self.dimension = dimension

    def __reduce__(self):
        return (type(self), (self.dimension,))


class NoConvergence(NumericError):
    """An iterative method did not reach its tolerance"""


class StepTooLarge(NumericError):
    """Integration step outside the RK4 stability region"""


class NotCooling(NumericError):
    """Heating dominates: upper sideband absorption does not exceed lower"""


class NoMinimumInWindow(NumericError):
    """Every point of the search window fails to cool"""


class UnstableChain(NumericError):
    """A transverse mode has non-positive squared frequency (zigzag)"""


class RatioOutOfRange(NumericError):
    """Sideband ratio outside [0, 1)"""


class InconsistentSigns(NumericError):
    """AC Stark shift and detuning must share a sign"""


class FitDiverged(NumericError):
    """Least squares did not converge to a finite solution"""


class InsufficientData(NumericError):
    """Too few samples to determine the fit parameters"""
