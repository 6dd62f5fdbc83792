"""Bulk chromatic dispersion of the resonator glass.

Three-term Sellmeier model: refractive index, analytic group index /
group velocity, and the slowly varying field normalization factor
sqrt(omega)/(n * v_g) used by the pair-generation model.  The default
coefficient set (fused silica) ships as a versioned JSON data file; the
``source`` key of that file records its provenance.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import FileFormatError, MaterialRangeError

ENV_MATERIAL_DIR = "WGMCOMB_MATERIAL_DIR"


@dataclass(frozen=True)
class SellmeierModel:
    """Three-term Sellmeier fit n^2 = 1 + sum_i b_i lam^2/(lam^2 - l_i^2).

    ``resonance_strengths`` are dimensionless, ``resonance_wavelengths``
    are in micrometres, and ``valid_range`` (micrometres) bounds where the
    fit may be evaluated; queries outside it raise rather than extrapolate.
    """

    resonance_strengths: tuple[float, float, float]
    resonance_wavelengths: tuple[float, float, float]
    valid_range: tuple[float, float]
    source: str = ""

    def __post_init__(self):
        if any(b <= 0 for b in self.resonance_strengths):
            raise ValueError("Sellmeier strengths must be strictly positive")
        if any(l <= 0 for l in self.resonance_wavelengths):
            raise ValueError("Sellmeier resonance wavelengths must be strictly positive")
        lo, hi = self.valid_range
        if not (0 < lo < hi):
            raise ValueError("valid_range must satisfy 0 < min < max")


def load_material(path) -> SellmeierModel:
    """Read a Sellmeier coefficient file (JSON with b1..b3, l1..l3 in um)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return SellmeierModel(
            resonance_strengths=(float(raw["b1"]), float(raw["b2"]), float(raw["b3"])),
            resonance_wavelengths=(float(raw["l1"]), float(raw["l2"]), float(raw["l3"])),
            valid_range=(float(raw["valid_min_um"]), float(raw["valid_max_um"])),
            source=str(raw.get("source", "")),
        )
    except KeyError as exc:
        raise FileFormatError(f"{path}: missing key {exc}") from exc


def fused_silica() -> SellmeierModel:
    """Default fused-silica model.

    Looks for ``fused_silica.json`` in $WGMCOMB_MATERIAL_DIR first, then
    falls back to the packaged data file.
    """
    env_dir = os.environ.get(ENV_MATERIAL_DIR)
    if env_dir:
        candidate = os.path.join(env_dir, "fused_silica.json")
        if os.path.exists(candidate):
            return load_material(candidate)
    with resources.as_file(resources.files("wgmcomb.data") / "fused_silica.json") as p:
        return load_material(p)


def _check_range(model: SellmeierModel, wavelength_m):
    lam_um = np.asarray(wavelength_m) * 1e6
    lo, hi = model.valid_range
    if np.any(lam_um < lo) or np.any(lam_um > hi):
        bad = np.asarray(lam_um)[(lam_um < lo) | (lam_um > hi)]
        raise MaterialRangeError(
            f"wavelength {np.min(bad):.6g} um outside Sellmeier validity "
            f"range [{lo:g}, {hi:g}] um"
        )
    return lam_um


def refractive_index(model: SellmeierModel, wavelength_m):
    """Phase refractive index n(lambda). Wavelength in metres."""
    lam_um = _check_range(model, wavelength_m)
    b = np.asarray(model.resonance_strengths)
    l2 = np.asarray(model.resonance_wavelengths) ** 2
    lam2 = np.asarray(lam_um, dtype=float) ** 2
    n2 = 1.0 + np.sum(b * lam2[..., None] / (lam2[..., None] - l2), axis=-1)
    return np.sqrt(n2)


def dn_dlambda(model: SellmeierModel, wavelength_m):
    """Analytic dn/dlambda in 1/m (closed form from the Sellmeier expression)."""
    lam_um = _check_range(model, wavelength_m)
    b = np.asarray(model.resonance_strengths)
    l2 = np.asarray(model.resonance_wavelengths) ** 2
    lam = np.asarray(lam_um, dtype=float)
    lam2 = lam**2
    n = refractive_index(model, wavelength_m)
    # d(n^2)/dlam = sum_i -2 b_i lam l_i^2 / (lam^2 - l_i^2)^2
    dn2 = np.sum(-2.0 * b * lam[..., None] * l2 / (lam2[..., None] - l2) ** 2, axis=-1)
    return dn2 / (2.0 * n) * 1e6  # per metre


def group_index(model: SellmeierModel, wavelength_m):
    """Group index n_g = n - lambda dn/dlambda."""
    return refractive_index(model, wavelength_m) - np.asarray(wavelength_m) * dn_dlambda(
        model, wavelength_m
    )


def group_velocity(model: SellmeierModel, wavelength_m):
    """Group velocity c/n_g in m/s."""
    return C_LIGHT / group_index(model, wavelength_m)


def field_normalization(model: SellmeierModel, angular_frequency):
    """Slowly varying field normalization sqrt(omega)/(n(omega) v_g(omega)).

    Kept for completeness: the pair-state construction treats this factor
    as constant over the generation band (it varies by well under 1% across
    a few THz near 193 THz), so it cancels into the overall arbitrary
    brightness scale.
    """
    w = np.asarray(angular_frequency, dtype=float)
    if np.any(w <= 0):
        raise MaterialRangeError("angular frequency must be positive")
    lam = 2.0 * np.pi * C_LIGHT / w
    n = refractive_index(model, lam)
    vg = group_velocity(model, lam)
    return np.sqrt(w) / (n * vg)
