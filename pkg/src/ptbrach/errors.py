"""Exception types raised across the package.

Every numeric failure is a subclass of :class:`PTError` so the CLI can map
it to a single exit code while still reporting the specific class name.
"""


class PTError(Exception):
    pass


class NotHermitian(PTError, ValueError):
    pass


class SingularMatrix(PTError, ValueError):
    pass


class ZeroCoupling(PTError, ValueError):
    pass


class NegativeCoupling(PTError, ValueError):
    pass


class NotExactPhase(PTError, ValueError):
    pass


class InconsistentRadius(PTError, ValueError):
    pass


class MetricOverflow(NotExactPhase):
    pass


class ZeroState(PTError, ValueError):
    pass


class AlphaOutOfRange(PTError, ValueError):
    pass


class FrameMismatch(PTError, ValueError):
    pass


class NonrealProbability(PTError, ValueError):
    pass


class RouteDisagreement(PTError):
    pass


class ZeroProbabilityOutcome(PTError, ValueError):
    pass


class SingularB(SingularMatrix):
    pass


class NotOrthogonalInput(PTError, ValueError):
    pass


class DegenerateIdentity(PTError, ValueError):
    pass


class DegenerateDenominator(PTError, ValueError):
    pass


class CertificateFailure(PTError):
    """A numerical identity that must hold by construction did not."""
