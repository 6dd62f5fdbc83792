"""Fourier duality between the spectral comb and the time-of-emission
distribution (TED), comb/envelope decomposition, and single-peak linewidth
inference from a measured TED envelope.

Conventions (angular frequency Omega, time difference T = t_s - t_i):

    ted(T)      = (1/2pi) integral R(Omega) exp(-i T Omega) dOmega
    spectrum(O) =         integral ted(T)   exp(+i O T)     dT

so the T = 0 value times 2 pi equals the spectral sum (Parseval check),
and a Lorentzian line of FWHM dnu maps to |ted| ~ exp(-pi dnu |T|).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.signal import find_peaks

from ._numerics import fwhm_about_peak, width_at_level
from .errors import FileFormatError, FitError, GridError

_NEG_TOL = 1e-5  # tolerated negative undershoot, relative to the trace maximum


@dataclass(frozen=True)
class TedTrace:
    """Sampled time-of-emission-difference distribution.

    ``values`` is the physical (real) trace; when the trace came from a
    spectral transform the discarded imaginary residual is kept in
    ``imag_values`` so the inverse transform can round-trip exactly.
    ``sigma`` holds optional per-bin standard deviations (measured data).
    """

    time: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None
    imag_values: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.time, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 3:
            raise GridError("time and values must be matching 1-D arrays")
        d = np.diff(t)
        if np.any(d <= 0) or (np.max(d) - np.min(d)) > 1e-6 * np.median(d):
            raise GridError("TED time grid must be uniform and ascending")
        vmax = np.max(np.abs(v)) if v.size else 0.0
        if vmax > 0 and np.min(v) < -_NEG_TOL * vmax:
            raise GridError("TED values are significantly negative")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != v.shape:
                raise GridError("sigma must match values length")
            object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "time", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.time[1] - self.time[0])

    def magnitude(self):
        """|trace|, using the retained imaginary part when present."""
        if self.imag_values is not None:
            return np.hypot(self.values, self.imag_values)
        return np.abs(self.values)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("T_us,value,sigma\n")
            sig = self.sigma if self.sigma is not None else np.full(self.values.size, np.nan)
            for t, v, s in zip(self.time, self.values, sig):
                stxt = "" if np.isnan(s) else f"{s:.17g}"
                fh.write(f"{t*1e6:.17g},{v:.17g},{stxt}\n")

    @classmethod
    def read_csv(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("T_us,value"):
                raise FileFormatError(f"{path}: missing TED header")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        t = np.array([float(r[0]) for r in rows]) * 1e-6
        v = np.array([float(r[1]) for r in rows])
        sig = None
        if rows and len(rows[0]) > 2 and any(r[2] for r in rows):
            sig = np.array([float(r[2]) if r[2] else np.nan for r in rows])
        return cls(time=t, values=v, sigma=sig)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def ted_from_spectrum(spectrum, pad_factor: int = 4) -> TedTrace:
    """TED as the Fourier transform of a sampled spectral intensity.

    Accepts a BiphotonSpectrum or an (omega, values) pair on a uniform
    grid.  The grid is zero-padded to a power of two (``pad_factor`` times
    the input length) purely for rendering resolution; integrals are
    padding-independent.  Raises when the spectrum has not decayed below
    1e-6 of its maximum at the grid edges (aliasing) and asserts the
    imaginary residual stays below 1e-6 of the trace peak before
    discarding it into ``imag_values``.
    """
    if hasattr(spectrum, "omega"):
        om, vals = spectrum.omega, spectrum.values
    else:
        om, vals = spectrum
    om = np.asarray(om, dtype=float)
    vals = np.asarray(vals, dtype=float)
    d = np.diff(om)
    if np.any(d <= 0) or (np.max(d) - np.min(d)) > 1e-9 * np.median(d):
        raise GridError("spectrum grid must be uniform and ascending")
    dom = float(om[1] - om[0])
    vmax = float(np.max(np.abs(vals)))
    if vmax > 0 and max(abs(vals[0]), abs(vals[-1])) > 1e-6 * vmax:
        raise GridError("spectrum not decayed below 1e-6 of max at grid edges "
                        "(transform would alias); widen the span")
    # peak narrowness precondition: span should cover >= 20 linewidths
    try:
        fw = fwhm_about_peak(om, vals)
        if (om[-1] - om[0]) < 20.0 * fw:
            raise GridError("spectral span below 20x the comb peak FWHM")
    except ValueError:
        pass  # peak wider than window already caught by the edge check

    n = om.size
    npad = _next_pow2(max(1, int(pad_factor)) * n)
    F = np.fft.fft(vals, npad)
    ks = np.arange(-(npad // 2), npad - npad // 2)
    dt = 2.0 * np.pi / (npad * dom)
    t_axis = ks * dt
    shifted = np.fft.fftshift(F)
    full = (dom / (2.0 * np.pi)) * np.exp(-1j * t_axis * om[0]) * shifted
    re, im = np.real(full), np.imag(full)
    peak = np.max(np.abs(full))
    resid = float(np.max(np.abs(im)) / peak) if peak > 0 else 0.0
    if resid > 1e-6:
        raise GridError(f"imaginary TED residual {resid:.2e} above 1e-6 of peak; "
                        "the spectrum is too asymmetric for a real TED")
    meta = dict(omega0=float(om[0]), domega=dom, n_orig=n, npad=npad,
                imag_residual=resid, from_spectrum=True)
    return TedTrace(time=t_axis, values=re, imag_values=im, meta=meta)


def spectrum_from_ted(ted: TedTrace, pad_factor: int = 1):
    """Inverse transform: sampled spectrum from a TED trace.

    For traces produced by ``ted_from_spectrum`` this inverts the exact
    discrete map (round trip at machine precision).  For arbitrary traces
    (e.g. measured envelopes) a plain discrete transform of the real
    values is used.  Returns (omega, values) with values the real part.
    """
    if ted.meta.get("from_spectrum"):
        om0 = ted.meta["omega0"]
        dom = ted.meta["domega"]
        n = ted.meta["n_orig"]
        npad = ted.meta["npad"]
        full = ted.values + (1j * ted.imag_values if ted.imag_values is not None else 0.0)
        shifted = full / ((dom / (2.0 * np.pi)) * np.exp(-1j * ted.time * om0))
        F = np.fft.ifftshift(shifted)
        vals = np.fft.ifft(F)[:n]
        om = om0 + dom * np.arange(n)
        return om, np.real(vals)
    dt = ted.dt
    n = ted.time.size
    npad = _next_pow2(max(1, int(pad_factor)) * n)
    ks = np.arange(-(npad // 2), npad - npad // 2)
    dom = 2.0 * np.pi / (npad * dt)
    om = ks * dom
    # sum_j v_j exp(+i om t_j) = exp(i om t0) * npad * ifft(v)[k]
    S = dt * np.fft.fftshift(np.fft.ifft(ted.values, npad)) * npad
    S = S * np.exp(1j * om * ted.time[0])
    return om, np.real(S)


def envelope_of(ted: TedTrace, min_peaks: int = 5) -> TedTrace:
    """Envelope of an oscillatory TED via tooth-peak picking.

    Picks local maxima of the trace magnitude and interpolates through
    them with a shape-preserving (monotone cubic) interpolant; outside the
    first/last tooth the envelope holds the end-tooth value.  Falls back
    to the magnitude itself when there are too few teeth (already an
    envelope-only trace).
    """
    mag = ted.magnitude()
    floor = 0.02 * float(np.max(mag))
    pk, _ = find_peaks(mag, height=floor)
    if pk.size < min_peaks:
        return TedTrace(time=ted.time, values=mag, meta=dict(ted.meta, envelope="identity"))
    spacing = float(np.median(np.diff(ted.time[pk])))
    dist = max(1, int(0.6 * spacing / ted.dt))
    pk, _ = find_peaks(mag, height=floor, distance=dist)
    if pk.size < min_peaks:
        return TedTrace(time=ted.time, values=mag, meta=dict(ted.meta, envelope="identity"))
    interp = PchipInterpolator(ted.time[pk], mag[pk], extrapolate=False)
    env = interp(ted.time)
    env[ted.time < ted.time[pk[0]]] = mag[pk[0]]
    env[ted.time > ted.time[pk[-1]]] = mag[pk[-1]]
    env = np.maximum(env, 0.0)
    return TedTrace(time=ted.time, values=env,
                    meta=dict(ted.meta, envelope="tooth-peaks", n_teeth=int(pk.size),
                              tooth_spacing_s=spacing))


def tooth_period(ted: TedTrace) -> float:
    """Median spacing of the TED oscillation maxima (the round-trip period)."""
    mag = ted.magnitude()
    pk, _ = find_peaks(mag, height=0.02 * np.max(mag))
    if pk.size < 3:
        raise FitError("fewer than 3 teeth resolved in the TED")
    spacing = float(np.median(np.diff(ted.time[pk])))
    dist = max(1, int(0.6 * spacing / ted.dt))
    pk, _ = find_peaks(mag, height=0.02 * np.max(mag), distance=dist)
    return float(np.median(np.diff(ted.time[pk])))


@dataclass(frozen=True)
class CombDecomposition:
    """Fixed-spacing comb model R(Omega) = H(Omega) * (h conv comb_spacing)."""

    envelope_omega: np.ndarray
    envelope: np.ndarray
    peak_offsets: np.ndarray
    peak_shape: np.ndarray      # unit maximum
    spacing: float              # rad/s
    anchor: float               # Omega of the reference tooth
    window: tuple               # (omega_lo, omega_hi) where the model holds
    reconstruction_error: float  # sup-norm, relative to the comb maximum


def comb_decompose(spectrum, min_peaks: int = 5,
                   spacing_tolerance: float = 0.05,
                   height_floor: float = 0.1) -> CombDecomposition:
    """Split a sampled comb into envelope, single-peak shape and spacing.

    The spacing is the median peak distance; peaks must be regular to
    ``spacing_tolerance`` (the largest contiguous regular window is used,
    and reported).  The single-peak shape is the height-normalized average
    of background-subtracted teeth above ``height_floor`` of the comb
    maximum, rescaled to unit maximum.
    """
    if hasattr(spectrum, "omega"):
        om, vals = spectrum.omega, spectrum.values
    else:
        om, vals = spectrum
    om = np.asarray(om, dtype=float)
    vals = np.asarray(vals, dtype=float)
    step = float(om[1] - om[0])
    vmax = float(np.max(vals))
    pk, _ = find_peaks(vals, height=0.02 * vmax, prominence=0.01 * vmax)
    if pk.size < min_peaks:
        raise FitError(f"only {pk.size} comb peaks resolved; need >= {min_peaks}")

    gaps = np.diff(om[pk])
    spacing = float(np.median(gaps))
    ok = np.abs(gaps - spacing) <= spacing_tolerance * spacing
    if not np.all(ok):
        # longest contiguous run of regular gaps
        best_start, best_len, start, run = 0, 0, 0, 0
        for i, flag in enumerate(ok):
            if flag:
                run += 1
                if run > best_len:
                    best_len, best_start = run, start
            else:
                start, run = i + 1, 0
        if best_len + 1 < min_peaks:
            raise FitError("comb spacing irregular beyond tolerance; no usable window")
        pk = pk[best_start:best_start + best_len + 2]
        spacing = float(np.median(np.diff(om[pk])))
        warnings.warn("comb spacing irregular; fixed-spacing model restricted to "
                      f"[{om[pk[0]]:.4g}, {om[pk[-1]]:.4g}] rad/s", stacklevel=2)

    heights = vals[pk]
    env_interp = PchipInterpolator(om[pk], heights, extrapolate=False)
    window = (float(om[pk[0]]), float(om[pk[-1]]))
    in_win = (om >= window[0]) & (om <= window[1])
    envelope = np.where(in_win, env_interp(om), 0.0)
    envelope = np.nan_to_num(envelope)

    halfw = int(spacing / 2.0 / step)
    offsets = (np.arange(2 * halfw + 1) - halfw) * step
    rows = []
    for p, hgt in zip(pk, heights):
        if hgt < height_floor * vmax:
            continue
        if p - halfw < 0 or p + halfw >= vals.size:
            continue
        seg = vals[p - halfw: p + halfw + 1].astype(float)
        edge = np.concatenate([seg[: max(1, halfw // 5)], seg[-max(1, halfw // 5):]])
        seg = seg - np.median(edge)
        rows.append(seg / seg.max())
    if not rows:
        raise FitError("no teeth tall enough for shape averaging")
    shape = np.mean(rows, axis=0)
    shape = shape / np.max(shape)

    recon = np.zeros_like(vals)
    anchor = float(om[pk[0]])
    n_teeth = int(np.round((window[1] - window[0]) / spacing)) + 1
    for mth in range(n_teeth):
        center = anchor + mth * spacing
        recon += np.interp(om - center, offsets, shape, left=0.0, right=0.0)
    recon *= envelope
    err = float(np.max(np.abs(vals[in_win] - recon[in_win])) / vmax)
    if err > 0.05:
        warnings.warn(f"fixed-spacing comb reconstruction error {err:.3f} above 5%",
                      stacklevel=2)
    return CombDecomposition(envelope_omega=om[in_win], envelope=envelope[in_win],
                             peak_offsets=offsets, peak_shape=shape, spacing=spacing,
                             anchor=anchor, window=window, reconstruction_error=err)


@dataclass(frozen=True)
class PeakLineshape:
    """Result of single-peak inference from a TED envelope."""

    omega: np.ndarray
    values: np.ndarray        # unit maximum, real part of the transform
    fwhm_hz: float
    windowed: bool
    time_fwhm_s: float
    time_inv_e_full_width_s: float


def infer_peak_lineshape(ted_envelope: TedTrace, pad_factor: int = 8) -> PeakLineshape:
    """Single comb-peak lineshape from its TED envelope.

    The envelope must represent an isolated spectral peak (heralding
    filter narrower than the comb spacing); its Fourier transform, real
    part, unit-max normalized, is the peak shape h and the numeric FWHM
    its linewidth.  When the envelope has not decayed at the window edges
    a Tukey taper is applied first and the result flagged ``windowed``.
    The time-domain width is reported in both FWHM and full-1/e
    conventions since width conventions of measured traces vary.
    """
    env = ted_envelope
    vmax = float(np.max(env.values))
    if vmax <= 0:
        raise FitError("empty TED envelope")
    windowed = False
    vals = env.values
    if max(vals[0], vals[-1]) > 1e-2 * vmax:
        from scipy.signal.windows import tukey
        vals = vals * tukey(vals.size, alpha=0.5)
        windowed = True
        warnings.warn("TED envelope not decayed at window edges; Tukey taper applied",
                      stacklevel=2)
    work = TedTrace(time=env.time, values=np.maximum(vals, 0.0))
    om, spec = spectrum_from_ted(work, pad_factor=pad_factor)
    spec = np.real(spec)
    m = float(np.max(spec))
    if m <= 0:
        raise FitError("degenerate lineshape")
    spec = spec / m
    fwhm_hz = fwhm_about_peak(om, spec) / (2.0 * np.pi)

    time_fwhm = fwhm_about_peak(env.time, env.values)
    time_inv_e = width_at_level(env.time, env.values, vmax / np.e)
    return PeakLineshape(omega=om, values=spec, fwhm_hz=float(fwhm_hz),
                         windowed=windowed, time_fwhm_s=float(time_fwhm),
                         time_inv_e_full_width_s=float(time_inv_e))


def ted_comb_model(peak_transform: TedTrace, envelope_transform: TedTrace,
                   spacing: float) -> TedTrace:
    """Comb-model TED: peak_transform(T) * sum_m envelope_transform(T - m T0).

    ``peak_transform`` is the (wide) transform of a single spectral peak,
    ``envelope_transform`` the (narrow) transform of the spectral envelope
    and T0 = 2 pi / spacing the tooth period.  Requires the width ratio
    >= 10, matching the separation-of-scales the factorization assumes.
    """
    if spacing <= 0:
        raise ValueError("comb spacing must be positive")
    t0 = 2.0 * np.pi / spacing
    wide = width_at_level(peak_transform.time, peak_transform.magnitude(),
                          np.max(peak_transform.magnitude()) / np.e)
    narrow = width_at_level(envelope_transform.time, envelope_transform.magnitude(),
                            np.max(envelope_transform.magnitude()) / np.e)
    if wide < 10.0 * narrow:
        raise GridError(
            f"tooth width {narrow:.3g}s not an order of magnitude below the decay "
            f"envelope width {wide:.3g}s; the factorized comb model does not apply"
        )
    t = peak_transform.time
    tooth_t = envelope_transform.time
    tooth_v = envelope_transform.magnitude()
    out = np.zeros_like(t)
    m_lo = int(np.floor((t[0] - tooth_t[-1]) / t0))
    m_hi = int(np.ceil((t[-1] - tooth_t[0]) / t0))
    for mth in range(m_lo, m_hi + 1):
        out += np.interp(t - mth * t0, tooth_t, tooth_v, left=0.0, right=0.0)
    out *= peak_transform.magnitude()
    return TedTrace(time=t, values=out, meta=dict(model="factorized-comb", tooth_period=t0))
