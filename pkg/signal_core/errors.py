"""
Exception hierarchy shared by every transportlab package.

Library code raises these; only the CLI catches them and maps them to exit codes.
"""


class TransportLabError(ValueError):
    """Base class for all transportlab errors."""


# signal-core

class AllZero(TransportLabError):
    """Raw samples carry no mass."""


class NegativeMass(TransportLabError):
    """A density sample is negative."""


class OutOfRange(TransportLabError):
    """A probability level lies outside [0, 1]."""


class EmptySupport(TransportLabError):
    """No sample exceeds the support threshold."""


class NotNormalized(TransportLabError):
    """A density does not carry unit mass."""


class GridError(TransportLabError):
    """Grid parameters are invalid (non-uniform, too small, reversed)."""


class SignalFormatError(TransportLabError):
    """A signal or map file does not follow the documented CSV format."""


# diffeomorphisms

class OutOfDomain(TransportLabError):
    """A point lies outside the validity interval of a map."""


class NotInvertible(TransportLabError):
    """A map failed its monotonicity (or Jacobian) check."""


class DomainMismatch(TransportLabError):
    """Two maps or a map and a signal do not share a usable domain."""


class SamplingExhausted(TransportLabError):
    """Rejection sampling accepted too few candidates."""


# transforms

class BadReference(TransportLabError):
    """The reference density is not strictly positive on its support interval."""


class DegenerateMap(TransportLabError):
    """A transport map collapses all reference mass onto a single point."""


class MassLoss(TransportLabError):
    """Too much mass left the output grid."""


class CertificateError(TransportLabError):
    """A generated member fails its pushforward residual check."""


class PreconditionError(TransportLabError):
    """Inputs violate the documented preconditions of a routine."""


class SupportEscape(TransportLabError):
    """A projection of the image support falls outside the offset grid."""


# oracle

class OracleInfeasible(TransportLabError):
    """The LP solver did not return a certified optimal plan."""


Infeasible = OracleInfeasible


class TooLarge(TransportLabError):
    """A discrete problem exceeds the oracle's point budget."""


# convexity lab / experiments

class DimensionMismatch(TransportLabError):
    """Feature matrices disagree on dimension."""


class ConfigError(TransportLabError):
    """An experiment configuration is invalid."""
