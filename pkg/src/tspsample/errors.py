"""Exception types raised by the public API.

Every error carries a human-readable message; the CLI maps them onto a
machine-readable JSON envelope on stderr.
"""


class TspSampleError(Exception):
    """Base class for all package-specific errors."""


# --- density grids ---------------------------------------------------------

class AllZeroDensity(TspSampleError):
    """Raised when a grid with zero total mass is normalized."""


class NonFiniteValue(TspSampleError):
    """Raised when grid values contain NaN or infinities."""


class NegativeValue(TspSampleError):
    """Raised when grid values contain negative entries."""


class InvalidDecay(TspSampleError):
    """Raised for a non-positive decay exponent."""


class IndexOutOfRange(TspSampleError):
    """Raised when a cell index does not fit the grid resolution."""


class ResolutionMismatch(TspSampleError):
    """Raised when two gridded objects cannot be compared or coarsened."""


# --- tours -----------------------------------------------------------------

class InvalidPermutation(TspSampleError):
    """Raised when a visiting order is not a permutation of the points."""


class TooManyPointsForExact(TspSampleError):
    """Raised when the exact solver is asked for more points than it supports."""


# --- trajectories ----------------------------------------------------------

class DegeneratePath(TspSampleError):
    """Raised when a path has zero total length."""


class InvalidStep(TspSampleError):
    """Raised for a non-positive resampling step."""


# --- calibration -----------------------------------------------------------

class UnreachableTarget(TspSampleError):
    """Raised when no point count can meet a requested sample budget."""


# --- reconstruction --------------------------------------------------------

class InvalidSide(TspSampleError):
    """Raised for image sides that are not powers of two or are too small."""


class DimensionMismatch(TspSampleError):
    """Raised when an object of the wrong dimension is supplied."""


class SideMismatch(TspSampleError):
    """Raised when image and mask sides differ."""


class ConfigError(TspSampleError):
    """Raised for inconsistent reconstruction settings."""


class ZeroReference(TspSampleError):
    """Raised when a signal-to-noise ratio is requested against a zero image."""
