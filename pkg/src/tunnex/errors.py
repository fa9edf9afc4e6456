"""Exception types shared across the package."""


class TunnexError(Exception):
    """Base class for all package-specific failures."""


class MaxItersExceeded(TunnexError):
    """Newton iteration did not reach the requested tolerance."""


class SingularJacobian(TunnexError):
    """Linearized system is (numerically) singular; usually bifurcation proximity."""


class StepCollapse(TunnexError):
    """Continuation step shrank below the minimum without converging."""


class MinimizationFailed(TunnexError):
    """Euclidean-segment solve for a periodic orbit stalled."""


class AsymptoticsNotFree(TunnexError):
    """Free-motion fit on the initial segment is poor; enlarge |t_left|."""


class Unclassifiable(TunnexError):
    """Trajectory endpoint matches no topology class; grow t_right."""


class BracketError(TunnexError):
    """Root bracketing failed in a scalar search."""


class ClosedChannelOnly(TunnexError):
    """No open scattering channels at the requested energy."""


class UnitarityViolation(TunnexError):
    """Flux conservation violated beyond tolerance; refine the grid."""
