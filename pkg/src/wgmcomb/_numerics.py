"""Small numerical utilities: compensated float arithmetic and peak metrics."""

from __future__ import annotations

import numpy as np

# Dekker/Veltkamp splitter for 53-bit doubles
_SPLIT = 134217729.0  # 2**27 + 1


def two_prod(a, b):
    """Exact product: returns (p, e) with p + e == a*b (no fma required)."""
    p = a * b
    ca = _SPLIT * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLIT * b
    bhi = cb - (cb - b)
    blo = b - bhi
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def two_sum(a, b):
    """Exact sum: returns (s, e) with s + e == a + b."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def fwhm_about_peak(x, y):
    """Full width at half maximum of a single sampled peak.

    Linear interpolation of the half-maximum crossings on either side of
    the sample argmax.  Raises ValueError when a crossing is missing
    (peak not fully contained in the window).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    half = y[i] / 2.0
    left = np.nonzero(y[: i + 1] < half)[0]
    right = np.nonzero(y[i:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("half-maximum crossing outside the sampled window")
    a = left[-1]
    b = i + right[0]
    xl = x[a] + (x[a + 1] - x[a]) * (half - y[a]) / (y[a + 1] - y[a])
    xr = x[b - 1] + (x[b] - x[b - 1]) * (half - y[b - 1]) / (y[b] - y[b - 1])
    return xr - xl


def width_at_level(x, y, level):
    """Full width of a single sampled peak at an absolute level."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    left = np.nonzero(y[: i + 1] < level)[0]
    right = np.nonzero(y[i:] < level)[0]
    if left.size == 0 or right.size == 0:
        raise ValueError("level crossing outside the sampled window")
    a = left[-1]
    b = i + right[0]
    xl = x[a] + (x[a + 1] - x[a]) * (level - y[a]) / (y[a + 1] - y[a])
    xr = x[b - 1] + (x[b] - x[b - 1]) * (level - y[b - 1]) / (y[b] - y[b - 1])
    return xr - xl
