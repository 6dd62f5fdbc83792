"""Biphoton frequency-comb and time-of-emission toolkit for
whispering-gallery microsphere photon-pair sources."""

from . import analysis, cavity, channels, config, material, resonator, sfwm, temporal

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "cavity",
    "channels",
    "config",
    "material",
    "resonator",
    "sfwm",
    "temporal",
    "__version__",
]
