"""Exception types shared across the package."""


class UwitError(Exception):
    """Base class for all errors raised by this package."""


class NotADistribution(UwitError):
    """A sequence fails the probability-distribution contract."""


class BadParameter(UwitError):
    """A parameter is outside its admissible domain."""


class DimensionMismatch(UwitError):
    """Operands live on incompatible spaces."""


class NotHermitian(UwitError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class Degenerate(UwitError):
    """An observable has a repeated eigenvalue where a nondegenerate spectrum is required."""


class UnsoundQuantifier(UwitError):
    """The quantifier lacks the properties the detection criterion relies on."""


class FingerprintMismatch(UwitError):
    """A precomputed bound was generated from a different measurement set."""


class NoConvergence(UwitError):
    """An iterative optimization exhausted its iteration budget."""


class NonMonotoneScan(UwitError):
    """A family scan saw the verdict flip more than once; signals a bug upstream."""


class ConfigParse(UwitError):
    """A scenario configuration file is malformed or inconsistent."""
