"""Exception hierarchy shared across the package."""


class HomsumError(Exception):
    """Base class for all package-specific errors."""


class GroundCapExceeded(HomsumError):
    """Partition ground set larger than the enumeration engine supports."""


class KernelFormatError(HomsumError):
    """Malformed kernel data (bad tuples, bad JSON fields, out-of-range indices)."""


class NotNormalizable(HomsumError):
    """Kernel has no off-diagonal mass, so no admissible rescaling exists."""


class AssumptionViolation(HomsumError):
    """A law does not meet the moment assumptions required by a formula path."""


class MissingCumulant(HomsumError):
    """A law does not provide cumulants up to the required order."""


class UnknownSampler(HomsumError):
    """Sampler id not recognised by the Monte Carlo module."""
