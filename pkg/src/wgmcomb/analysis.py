"""Measured-data pipeline: 2-D coincidence spectrograms over (idler
wavelength, detection time difference), their marginals, binned TED
envelopes with error bars, and the end-to-end linewidth / quality-factor
inference.

All spectral bookkeeping converts wavelength to frequency exactly
(nu = c / lambda) at the boundary and works in frequency internally.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT

from .errors import FileFormatError, GridError
from .temporal import TedTrace


@dataclass(frozen=True)
class Spectrogram2D:
    """Coincidence counts over an (idler wavelength, time difference) grid.

    ``counts[i, j]`` is the bin at time ``t_s[i]``, wavelength
    ``lambda_nm[j]``.  Axes are strictly increasing; counts non-negative.
    """

    lambda_nm: np.ndarray
    t_s: np.ndarray
    counts: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lambda_nm, dtype=float)
        t = np.asarray(self.t_s, dtype=float)
        cts = np.asarray(self.counts, dtype=float)
        if lam.ndim != 1 or t.ndim != 1:
            raise FileFormatError("axes must be 1-D")
        if np.any(np.diff(lam) <= 0):
            raise FileFormatError("wavelength axis must be strictly increasing")
        if np.any(np.diff(t) <= 0):
            raise FileFormatError("time axis must be strictly increasing")
        if cts.shape != (t.size, lam.size):
            raise FileFormatError(
                f"counts shape {cts.shape} does not match (len(T), len(lambda)) "
                f"= ({t.size}, {lam.size})"
            )
        if np.any(cts < 0):
            raise FileFormatError("counts must be non-negative")
        object.__setattr__(self, "lambda_nm", lam)
        object.__setattr__(self, "t_s", t)
        object.__setattr__(self, "counts", cts)


def write_spectrogram(path, sg: Spectrogram2D):
    """Spectrogram file: axis header lines, then one CSV row of counts per T."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# lambda_nm: " + ",".join(f"{v:.17g}" for v in sg.lambda_nm) + "\n")
        fh.write("# T_us: " + ",".join(f"{v*1e6:.17g}" for v in sg.t_s) + "\n")
        if sg.meta:
            fh.write("# meta: " + json.dumps(sg.meta, sort_keys=True) + "\n")
        for row in sg.counts:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def ingest_spectrogram(path) -> Spectrogram2D:
    """Read and validate a spectrogram file (see ``write_spectrogram``)."""
    lam = t = None
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("lambda_nm:"):
                    lam = np.array([float(v) for v in body.split(":", 1)[1].split(",")])
                elif body.startswith("T_us:"):
                    t = np.array([float(v) for v in body.split(":", 1)[1].split(",")]) * 1e-6
                elif body.startswith("meta:"):
                    meta = json.loads(body.split(":", 1)[1])
                continue
            rows.append([float(v) for v in line.split(",")])
    if lam is None or t is None:
        raise FileFormatError(f"{path}: missing lambda_nm / T_us header rows")
    counts = np.array(rows, dtype=float)
    if counts.ndim != 2:
        raise FileFormatError(f"{path}: ragged counts matrix")
    return Spectrogram2D(lambda_nm=lam, t_s=t, counts=counts, meta=meta)


@dataclass(frozen=True)
class Marginals:
    lambda_nm: np.ndarray
    spectral: np.ndarray
    t_s: np.ndarray
    temporal: np.ndarray


def marginals(sg: Spectrogram2D, lambda_window=None, t_window=None) -> Marginals:
    """Marginal distributions of a windowed region of the spectrogram.

    The spectral marginal sums counts over the T window for each
    wavelength in the lambda window and vice versa, so both marginals sum
    to the windowed total (counts conserved).
    """
    if lambda_window is None:
        lambda_window = (sg.lambda_nm[0], sg.lambda_nm[-1])
    if t_window is None:
        t_window = (sg.t_s[0], sg.t_s[-1])
    lsel = (sg.lambda_nm >= lambda_window[0]) & (sg.lambda_nm <= lambda_window[1])
    tsel = (sg.t_s >= t_window[0]) & (sg.t_s <= t_window[1])
    if not np.any(lsel) or not np.any(tsel):
        raise GridError("empty marginal window")
    block = sg.counts[np.ix_(tsel, lsel)]
    return Marginals(lambda_nm=sg.lambda_nm[lsel], spectral=block.sum(axis=0),
                     t_s=sg.t_s[tsel], temporal=block.sum(axis=1))


def ted_envelope(sg: Spectrogram2D, lambda_i0_nm: float, group_size: int) -> TedTrace:
    """Binned TED envelope at the wavelength column nearest lambda_i0.

    Groups the column's T samples into blocks of ``group_size``; each
    block contributes its mean value and standard deviation (error bar).
    A remainder that does not fill a block is dropped with a warning.
    """
    if not (sg.lambda_nm[0] <= lambda_i0_nm <= sg.lambda_nm[-1]):
        raise GridError(f"lambda_i0 = {lambda_i0_nm} nm outside the spectrogram axis")
    if group_size < 1:
        raise GridError("group_size must be >= 1")
    col_idx = int(np.argmin(np.abs(sg.lambda_nm - lambda_i0_nm)))
    col = sg.counts[:, col_idx]
    n_blocks = col.size // group_size
    if n_blocks < 2:
        raise GridError("fewer than two complete blocks; reduce group_size")
    used = n_blocks * group_size
    if used != col.size:
        warnings.warn(f"dropping {col.size - used} trailing samples not filling a block",
                      stacklevel=2)
    blocks = col[:used].reshape(n_blocks, group_size)
    tblocks = sg.t_s[:used].reshape(n_blocks, group_size)
    return TedTrace(time=tblocks.mean(axis=1), values=blocks.mean(axis=1),
                    sigma=blocks.std(axis=1),
                    meta=dict(lambda_i0_nm=float(sg.lambda_nm[col_idx]),
                              group_size=int(group_size)))


def q_from_linewidth(nu_hz: float, delta_nu_hz: float) -> float:
    """Quality factor nu / dnu (identical in ordinary or angular frequency)."""
    if nu_hz <= 0 or delta_nu_hz <= 0:
        raise ValueError("frequency and linewidth must be positive")
    if delta_nu_hz > nu_hz:
        raise ValueError("linewidth larger than the carrier frequency")
    return nu_hz / delta_nu_hz


def energy_conserving_idler(lambda_pump_m: float, lambda_signal_m: float) -> float:
    """Idler wavelength with 2 nu_p = nu_s + nu_i, exact in frequency."""
    nu_p = C_LIGHT / lambda_pump_m
    nu_s = C_LIGHT / lambda_signal_m
    nu_i = 2.0 * nu_p - nu_s
    if nu_i <= 0:
        raise ValueError("energy conservation gives a non-positive idler frequency")
    return C_LIGHT / nu_i


def simulate_heralded_spectrogram(envelope: TedTrace, lambda_i0_nm: float,
                                  lambda_span_nm: float = 4.0, n_lambda: int = 41,
                                  resolution_nm: float = 0.5, n_t: int = 10_000,
                                  peak_counts: float = 400.0, background: float = 1.0,
                                  rng=None, meta=None) -> Spectrogram2D:
    """Forward model of a heralded-idler measurement with Poisson noise.

    The mean count rate factorizes into the TED envelope along T and a
    Gaussian spectral response (the setup resolution) along lambda,
    centered on the energy-conserving idler wavelength.
    """
    rng = np.random.default_rng(rng)
    lam = lambda_i0_nm + np.linspace(-lambda_span_nm / 2, lambda_span_nm / 2, n_lambda)
    t = np.linspace(envelope.time[0], envelope.time[-1], n_t)
    env = np.interp(t, envelope.time, envelope.values)
    env = env / np.max(env)
    spec_resp = np.exp(-0.5 * ((lam - lambda_i0_nm) / (resolution_nm / 2.355)) ** 2)
    mean = peak_counts * env[:, None] * spec_resp[None, :] + background
    counts = rng.poisson(mean).astype(float)
    return Spectrogram2D(lambda_nm=lam, t_s=t, counts=counts,
                         meta=meta or {})
