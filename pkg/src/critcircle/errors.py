"""Exception types raised across the package."""


class CircleMapError(Exception):
    """Base class for every error raised by critcircle."""


class CodeLimitError(CircleMapError, ValueError):
    """A Farey code or harmonic pick exceeds the configured limits."""


class ResolutionError(CircleMapError):
    """A sign or ordering could not be certified at the working tolerance."""


class DegenerateDerivativeError(CircleMapError):
    """An intermediate derivative along an orbit vanished (critical orbit hit)."""


class DegenerateIntervalError(CircleMapError):
    """An orbit gap is too small to be used as a denominator."""


class MissingCenterError(CircleMapError, KeyError):
    """The atlas has no tongue for a rational that the computation needs."""


class CorruptAtlasError(CircleMapError):
    """An atlas file failed validation (structure, invariants or fingerprint)."""


class VersionMismatchError(CircleMapError):
    """An atlas file declares a format version this library cannot read."""


class OverflowGuardError(CircleMapError):
    """An iteration would exceed its hard length cap."""


class InsufficientDepthError(CircleMapError):
    """Successive depth estimates did not stabilize."""


class ScaleTooFineError(CircleMapError):
    """A box size is below the scale resolved by the atlas."""


class CutoffTooSmallError(CircleMapError):
    """The symbol cutoff is too small for the mass inequality at some cell."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell
