"""Exception types shared across the toolkit."""


class PorogaugeError(Exception):
    """Base class for all toolkit errors."""


class GaugeDomainError(PorogaugeError):
    """Argument outside the validity range of a gauge function."""


class DerivativeError(PorogaugeError):
    """Tabulated breakpoints too sparse for a reliable derivative."""


class QuadratureError(PorogaugeError):
    """Integrand non-finite at a quadrature node."""


class UnderflowError(PorogaugeError):
    """A required dyadic value fell below the resolution cap."""


class ResolutionError(PorogaugeError):
    """Grid resolution too coarse for the requested geometry."""


class ResolutionGuardError(ResolutionError):
    """Voxel level exceeds the memory guard."""


class UnreachableError(PorogaugeError):
    """Two points lie in different connected components."""


class PrecisionError(PorogaugeError):
    """A path is forced through cells too close to the boundary."""


class ConfigError(PorogaugeError):
    """Invalid experiment configuration."""
