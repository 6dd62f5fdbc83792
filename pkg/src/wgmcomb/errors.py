"""Exception types shared across the package."""


class WgmcombError(Exception):
    """Base class for all package-specific errors."""


class MaterialRangeError(WgmcombError, ValueError):
    """Wavelength falls outside the validity range of a dispersion model."""


class NoResonanceError(WgmcombError, ValueError):
    """No cavity resonance exists in the searched bracket."""


class UnsupportedModeError(WgmcombError, ValueError):
    """Mode indices outside the modeled family (m = l, q = 1)."""


class DegenerateCavityError(WgmcombError, ValueError):
    """Quality factor too low for the reflectivity model (r would be <= 0)."""


class GridError(WgmcombError, ValueError):
    """Sampling grid violates a resolution, span or uniformity contract."""


class FitError(WgmcombError, RuntimeError):
    """Lineshape fit could not be performed (no dip found or no convergence)."""


class FileFormatError(WgmcombError, ValueError):
    """Malformed on-disk data (scan, spectrogram, config or material file)."""


class ConfigError(WgmcombError, ValueError):
    """Invalid run configuration; message names the offending field."""
