"""Exception types shared across the package."""


class BergmanLabError(Exception):
    """Base class for every error raised by bergman_lab."""


class ConfigError(BergmanLabError):
    """Invalid domain/weight/model configuration or unparseable run config."""


class OutsideDomain(BergmanLabError):
    """Point is not strictly interior to the domain."""


class RegionGuard(BergmanLabError):
    """Point is interior but too close to the boundary for reliable series
    evaluation; pass ``allow_near_boundary=True`` to override."""


class ZeroVector(BergmanLabError):
    """A direction vector required to be nonzero was (numerically) zero."""


class DependentDirections(BergmanLabError):
    """Two direction vectors were linearly dependent where independence is
    required."""


class NonConvergent(BergmanLabError):
    """Adaptive quadrature failed to reach the requested tolerance within its
    refinement budget."""


class TruncationInsufficient(BergmanLabError):
    """Raising the basis truncation degree up to the configured cap did not
    stabilise the requested quantities."""


class NotPositiveDefinite(BergmanLabError):
    """The metric matrix failed its Cholesky factorisation; usually a symptom
    of insufficient truncation or evaluation too close to the boundary."""


class IllConditioned(BergmanLabError):
    """Constraint Gram matrix condition number exceeded the supported range."""


class MomentUnderflow(BergmanLabError):
    """A moment fell below the smallest magnitude we accept (1e-300)."""
