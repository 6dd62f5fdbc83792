"""Cavity field-enhancement spectra and transmission-dip fitting.

Per-wave coupling follows the lossless taper-sphere model: reflectivity
r = 1 - l pi / Q, transmissivity t' = sqrt(1 - r^2).  The resonant
transfer function ("Airy function" in the cavity sense) is

    A(omega)   = t' / (1 - r exp(i k(omega) L))          (signal, idler)
    A_p(omega) = t_p / (1 - r_p^2 exp(i k(omega) L))     (pump: two photons
                                                          per round trip)

Intensities are evaluated in the cancellation-free form
t'^2 / ((1-r)^2 + 4 r sin^2(kL/2)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from ._numerics import fwhm_about_peak
from .errors import DegenerateCavityError, FileFormatError, FitError


def reflectivity_from_q(l: int, q_factor: float) -> tuple[float, float]:
    """(r, t') from a quality factor: r = 1 - l pi / Q, |r|^2 + |t'|^2 = 1."""
    if q_factor <= 0:
        raise DegenerateCavityError("Q must be positive")
    r = 1.0 - l * np.pi / q_factor
    if r <= 0.0:
        raise DegenerateCavityError(
            f"Q={q_factor:g} <= l*pi={l*np.pi:.4g}: reflectivity would be non-positive"
        )
    return r, float(np.sqrt(1.0 - r * r))


@dataclass(frozen=True)
class CouplingSpec:
    """Per-wave quality factors and the derived taper-coupling amplitudes."""

    l_ref: int
    q_pump: float
    q_signal: float
    q_idler: float

    def __post_init__(self):
        for name in ("q_pump", "q_signal", "q_idler"):
            reflectivity_from_q(self.l_ref, getattr(self, name))  # validates

    @property
    def r_pump(self) -> float:
        return reflectivity_from_q(self.l_ref, self.q_pump)[0]

    @property
    def r_signal(self) -> float:
        return reflectivity_from_q(self.l_ref, self.q_signal)[0]

    @property
    def r_idler(self) -> float:
        return reflectivity_from_q(self.l_ref, self.q_idler)[0]

    @property
    def t_signal(self) -> float:
        return reflectivity_from_q(self.l_ref, self.q_signal)[1]

    @property
    def t_idler(self) -> float:
        return reflectivity_from_q(self.l_ref, self.q_idler)[1]


@dataclass(frozen=True)
class PumpSweepSpec:
    """Pump laser/resonance bandwidth hierarchy.

    linewidth_hz is the laser's own linewidth, resonance_fwhm_hz the FWHM
    of the pump intensity transfer |A_p|^2 (what actually weights the
    emitted mixture), and sweep_span_hz the triangular rastering span that
    keeps the thermally drifting cavity periodically on resonance.  The
    model requires linewidth << resonance << sweep span; a separation
    below 10x warns.
    """

    center_frequency: float  # rad/s
    linewidth_hz: float = 200e3
    resonance_fwhm_hz: float = 20.4e6
    sweep_span_hz: float = 25e9
    sweep_waveform: str = "triangular"
    sweep_rate_hz: float = 100.0

    def __post_init__(self):
        if min(self.linewidth_hz, self.resonance_fwhm_hz, self.sweep_span_hz) <= 0:
            raise ValueError("pump bandwidths must be positive")
        if self.sweep_waveform != "triangular":
            raise ValueError("only the triangular sweep waveform is modeled")
        if (self.resonance_fwhm_hz < 10.0 * self.linewidth_hz
                or self.sweep_span_hz < 10.0 * self.resonance_fwhm_hz):
            warnings.warn(
                "pump bandwidth hierarchy linewidth << resonance << sweep span "
                "is separated by less than a factor of 10; the mixed-state "
                "model may be inaccurate",
                stacklevel=2,
            )


# ---------------------------------------------------------------------------
# transfer functions (detuning-based: dw = omega - dispersion.w_ref)
# ---------------------------------------------------------------------------


def airy_amplitude(dispersion, detune, r: float, t: float):
    """Complex mode transfer A = t / (1 - r e^{i k L}) at a detuning."""
    return t / (1.0 - r * dispersion.exp_i_phase(detune))


def airy_intensity(dispersion, detune, r: float, t2: float):
    """|A|^2 = t^2 / ((1-r)^2 + 4 r sin^2(kL/2)), cancellation-free."""
    s2 = dispersion.sin_sq_half_phase(detune)
    return t2 / ((1.0 - r) ** 2 + 4.0 * r * s2)


def pump_airy_amplitude(dispersion, detune, r_p: float, t_p: float):
    """Pump transfer A_p = t_p / (1 - r_p^2 e^{i k L}) (squared reflectivity)."""
    return airy_amplitude(dispersion, detune, r_p * r_p, t_p)


def pump_airy_intensity(dispersion, detune, r_p: float, t_p2: float):
    return airy_intensity(dispersion, detune, r_p * r_p, t_p2)


def phase_fwhm(r_round: float) -> float:
    """FWHM of t^2/((1-r)^2 + 4 r sin^2(phi/2)) in round-trip phase phi."""
    cosv = (1.0 + r_round * r_round - 2.0 * (1.0 - r_round) ** 2) / (2.0 * r_round)
    return 2.0 * float(np.arccos(np.clip(cosv, -1.0, 1.0)))


def intensity_fwhm(dispersion, l: int, r_round: float) -> float:
    """Numeric FWHM (Hz, ordinary frequency) of the intensity Airy peak at mode l.

    Brackets the half-maximum crossings of the evaluated lineshape on
    either side of the resonance; no small-linewidth approximation.
    """
    d0 = dispersion.resonance_detune(l)
    peak = 1.0 / (1.0 - r_round) ** 2
    half = peak / 2.0

    def f(dw):
        s2 = dispersion.sin_sq_half_phase(np.asarray(dw))
        return float(1.0 / ((1.0 - r_round) ** 2 + 4.0 * r_round * s2) - half)

    # expanding bracket seeded by the phase-domain width
    guess = phase_fwhm(r_round) / dispersion.round_trip_time(d0) / 2.0
    step = guess
    hi = d0 + step
    while f(hi) > 0:
        step *= 2.0
        hi = d0 + step
    right = brentq(f, d0, hi, rtol=8.9e-16)
    step = guess
    lo = d0 - step
    while f(lo) > 0:
        step *= 2.0
        lo = d0 - step
    left = brentq(f, lo, d0, rtol=8.9e-16)
    return (right - left) / (2.0 * np.pi)


def reflectivity_for_fwhm(dispersion, l: int, fwhm_hz: float, pump: bool = False) -> float:
    """Round-trip reflectivity reproducing a target intensity FWHM at mode l.

    With ``pump=True`` the returned value is r_p (the per-pass amplitude),
    i.e. the solved round-trip reflectivity is r_p^2.
    """
    if fwhm_hz <= 0:
        raise ValueError("target FWHM must be positive")
    trt = dispersion.round_trip_time(dispersion.resonance_detune(l))
    target_phase = 2.0 * np.pi * fwhm_hz * trt
    if target_phase >= np.pi:
        raise DegenerateCavityError("target FWHM exceeds half the free spectral range")
    r_round = brentq(lambda r: phase_fwhm(r) - target_phase, 1e-9, 1.0 - 1e-15, rtol=8.9e-16)
    return float(np.sqrt(r_round)) if pump else float(r_round)


# ---------------------------------------------------------------------------
# transmission-scan fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransmissionScan:
    """Taper-transmission scan across one cavity resonance."""

    freq_offset_hz: np.ndarray
    transmittance: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq_offset_hz, dtype=float)
        t = np.asarray(self.transmittance, dtype=float)
        if f.ndim != 1 or f.shape != t.shape or f.size < 3:
            raise FileFormatError("scan needs matching 1-D frequency/transmittance columns")
        if np.any(np.diff(f) <= 0):
            raise FileFormatError("scan frequency axis must be strictly increasing")
        object.__setattr__(self, "freq_offset_hz", f)
        object.__setattr__(self, "transmittance", t)

    @classmethod
    def read_csv(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if "freq_offset_Hz" not in header:
                raise FileFormatError(f"{path}: missing required header line")
            data = np.loadtxt(fh, delimiter=",")
        if data.ndim != 2 or data.shape[1] != 2:
            raise FileFormatError(f"{path}: expected two columns")
        return cls(freq_offset_hz=data[:, 0], transmittance=data[:, 1])

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("freq_offset_Hz,transmittance_normalized\n")
            for f, t in zip(self.freq_offset_hz, self.transmittance):
                fh.write(f"{f:.17g},{t:.17g}\n")


@dataclass(frozen=True)
class AiryFitResult:
    center_hz: float
    fwhm_hz: float
    fwhm_sigma_hz: float
    depth: float
    residual_rms: float
    baseline: float


def fit_airy(scan: TransmissionScan) -> AiryFitResult:
    """Least-squares fit of a single resonance dip in a transmission scan.

    Works on the transmittance *reduction* (baseline minus transmittance,
    baseline = median of the top decile of samples) and fits the
    near-resonance form of the intensity Airy function, a Lorentzian
    d (G/2)^2 / ((f-f0)^2 + (G/2)^2).  The initial guess is fixed by rule
    (argmax sample -> center, half-maximum crossing distance -> width), so
    the fit is deterministic.
    """
    f = scan.freq_offset_hz
    t = scan.transmittance
    n_top = max(1, t.size // 10)
    top = np.sort(t)[-n_top:]
    baseline = float(np.median(top))
    red = baseline - t
    # robust noise floor: scaled median absolute deviation of the reduction
    noise = 1.4826 * float(np.median(np.abs(red - np.median(red))))

    peak = float(np.max(red))
    if peak <= 3.0 * noise or peak <= 0:
        raise FitError("no dip found: maximum transmittance reduction below 3x noise floor")

    i0 = int(np.argmax(red))
    f0 = float(f[i0])
    try:
        g0 = float(fwhm_about_peak(f, red))
    except ValueError:
        g0 = (f[-1] - f[0]) / 10.0

    def model(p):
        d, fc, g = p
        return d * (g / 2.0) ** 2 / ((f - fc) ** 2 + (g / 2.0) ** 2)

    def resid(p):
        return model(p) - red

    x0 = np.array([peak, f0, g0])
    res = least_squares(resid, x0, max_nfev=400, method="trf",
                        bounds=([0, f[0], 0], [np.inf, f[-1], np.inf]))
    if not res.success:
        raise FitError(f"Airy dip fit did not converge: {res.message}")
    d, fc, g = res.x
    dof = max(1, f.size - 3)
    chi2 = 2.0 * res.cost / dof
    try:
        cov = np.linalg.inv(res.jac.T @ res.jac) * chi2
        sigma_g = float(np.sqrt(abs(cov[2, 2])))
    except np.linalg.LinAlgError:
        sigma_g = float("nan")
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return AiryFitResult(center_hz=float(fc), fwhm_hz=float(g), fwhm_sigma_hz=sigma_g,
                         depth=float(d), residual_rms=rms, baseline=baseline)
