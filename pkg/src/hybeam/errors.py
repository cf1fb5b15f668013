"""Exception types shared across the package."""


class HybeamError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(HybeamError):
    pass


class SingularGram(HybeamError):
    """Gram matrix of the RF factor is numerically singular."""


class NotHermitian(HybeamError):
    pass


class SingularFim(HybeamError):
    """Fisher matrix not invertible (unidentifiable configuration)."""


class DegenerateBound(HybeamError):
    """Precoder carries no angle information; the error bound diverges."""


class TooFewPilots(HybeamError):
    pass


class InfeasibleGrid(HybeamError):
    """A grid point is unidentifiable even under uniform power allocation."""


class ZeroBb(HybeamError):
    pass


class ConfigError(HybeamError):
    pass


class BoundViolation(HybeamError):
    """Analytic quantization bound violated; signals a bug, must never fire."""
