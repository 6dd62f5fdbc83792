"""Whispering-gallery mode spectrum of a dielectric sphere.

Resonance wavelengths come from the standard asymptotic (Mie-derived)
relation for equatorial modes,

    1/lam = (1/(2 pi R n_s)) * [ nu + 2^(-1/3) a_q nu^(1/3)
            - P/sqrt(n_s^2-1) + (3/10) 2^(-2/3) a_q^2 nu^(-1/3)
            - 2^(-1/3) P (n_s^2 - (2/3)P^2)/(n_s^2-1)^(3/2) a_q nu^(-2/3) ],

with nu = l + 1/2, a_q the q-th zero of Ai(-z), and P = n_s (TE) or
1/n_s (TM).  The same relation, inverted for a continuous nu at a query
wavelength, provides the smooth dispersion relation k(omega) =
n_eff(omega) omega / c, the free spectral range, and its drift.

``ContinuousDispersion`` stores the continuous mode number in a
compensated (detrended) form so that distances to resonance are accurate
to ~1e-15 of a mode spacing; naive evaluation of k(omega) L ~ 1e4 rad in
doubles would limit high-Q lineshapes to ~1e-8.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import airy as _airy_fn

from . import material as mat
from ._numerics import two_prod, two_sum
from .errors import MaterialRangeError, NoResonanceError, UnsupportedModeError

_LD = np.longdouble

POLARIZATIONS = ("TE", "TM")


@dataclass(frozen=True)
class ModeIndex:
    """Equatorial whispering-gallery mode label (l, m, q, polarization).

    Only the fundamental family m = l, q = 1 is modeled; anything else is
    rejected at construction.
    """

    l: int
    m: int | None = None
    q: int = 1
    polarization: str = "TE"

    def __post_init__(self):
        if self.m is None:
            object.__setattr__(self, "m", self.l)
        if self.l < 1 or self.q < 1:
            raise UnsupportedModeError(f"l and q must be >= 1, got l={self.l}, q={self.q}")
        if self.m != self.l:
            raise UnsupportedModeError(
                f"m={self.m} != l={self.l}: only equatorial m = l modes are in modeled scope"
            )
        if self.q != 1:
            raise UnsupportedModeError(f"q={self.q}: only the fundamental radial mode q = 1 is in modeled scope")
        if self.polarization not in POLARIZATIONS:
            raise UnsupportedModeError(f"polarization must be one of {POLARIZATIONS}")


@dataclass(frozen=True)
class SphereSpec:
    """Sphere geometry plus its bulk dispersion model."""

    radius: float
    material: mat.SellmeierModel

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def perimeter(self) -> float:
        """Equatorial perimeter 2 pi R (derived, never stored)."""
        return 2.0 * np.pi * self.radius


def airy_zero(q: int) -> float:
    """q-th zero a_q of Ai(-z), by bracketed root finding (1 <= q <= 10)."""
    if not 1 <= int(q) <= 10:
        raise ValueError(f"airy zero index q={q} outside supported range 1..10")
    q = int(q)
    # asymptotic location t^(2/3)(1 + 5/(48 t^2)), t = 3 pi (4q-1)/8
    t = 3.0 * np.pi * (4 * q - 1) / 8.0
    guess = t ** (2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t))
    f = lambda z: _airy_fn(-z)[0]
    lo, hi = guess - 0.3, guess + 0.3
    return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)


def _mie_coeffs(n: float, alpha_q: float, polarization: str):
    """Coefficients of the asymptotic relation at a fixed refractive index."""
    P = n if polarization == "TE" else 1.0 / n
    c1 = 2.0 ** (-1.0 / 3.0) * alpha_q
    c3 = 0.3 * 2.0 ** (-2.0 / 3.0) * alpha_q**2
    c4 = 2.0 ** (-1.0 / 3.0) * P * (n * n - (2.0 / 3.0) * P * P) / (n * n - 1.0) ** 1.5 * alpha_q
    pfac = P / np.sqrt(n * n - 1.0)
    return c1, c3, c4, pfac


def _rhs_inv_lambda(sphere: SphereSpec, lam: float, nu: float, alpha_q: float, polarization: str) -> float:
    """Right-hand side of the resonance relation, i.e. the model for 1/lambda."""
    n = float(mat.refractive_index(sphere.material, lam))
    c1, c3, c4, pfac = _mie_coeffs(n, alpha_q, polarization)
    series = nu + c1 * nu ** (1.0 / 3.0) - pfac + c3 * nu ** (-1.0 / 3.0) - c4 * nu ** (-2.0 / 3.0)
    return series / (sphere.perimeter * n)


def resonance_wavelength(sphere: SphereSpec, mode: ModeIndex) -> float:
    """Resonance wavelength of a mode, in metres.

    Deterministic: a short fixed-point pass seeds a bracket around the
    zeroth-order guess 2 pi R n / nu, then bisection/secant (Brent) closes
    to machine precision.  Relative residual of the defining relation is
    below 1e-12 on return.
    """
    nu = mode.l + 0.5
    aq = airy_zero(mode.q)
    lo_um, hi_um = sphere.material.valid_range
    lam = sphere.perimeter * 1.45 / nu  # generic glass seed
    lam = min(max(lam, lo_um * 1e-6 * 1.0001), hi_um * 1e-6 * 0.9999)
    for _ in range(4):
        lam_new = 1.0 / _rhs_inv_lambda(sphere, lam, nu, aq, mode.polarization)
        if not (lo_um * 1e-6 <= lam_new <= hi_um * 1e-6):
            raise NoResonanceError(
                f"mode l={mode.l} q={mode.q} {mode.polarization}: resonance near "
                f"{lam_new*1e9:.1f} nm falls outside the material validity range"
            )
        lam = lam_new

    def f(x):
        return 1.0 / x - _rhs_inv_lambda(sphere, x, nu, aq, mode.polarization)

    width = max(20.0 / nu, 1e-6)
    lo = max(lam * (1.0 - width), lo_um * 1e-6)
    hi = min(lam * (1.0 + width), hi_um * 1e-6)
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoResonanceError(
            f"mode l={mode.l}: no sign change in bracket [{lo*1e9:.2f}, {hi*1e9:.2f}] nm"
        )
    root = brentq(f, lo, hi, xtol=1e-22, rtol=8.9e-16)
    if abs(f(root)) * root > 1e-12:
        raise NoResonanceError(f"resonance solver residual too large for l={mode.l}")
    return root


def effective_index(sphere: SphereSpec, mode: ModeIndex, resonance_lambda_m: float) -> float:
    """Effective index n_eff = l lambda / (2 pi R) at a mode's resonance."""
    return mode.l * resonance_lambda_m / sphere.perimeter


@dataclass(frozen=True)
class ResonanceTable:
    """Solved resonances for a contiguous range of azimuthal indices."""

    sphere: SphereSpec
    entries: tuple  # of (ModeIndex, lambda_m, omega_rad_s)

    def __post_init__(self):
        lams = [e[1] for e in self.entries]
        ls = [e[0].l for e in self.entries]
        if any(l2 <= l1 for l1, l2 in zip(ls, ls[1:])):
            raise ValueError("entries must be in strictly increasing l order")
        if any(b >= a for a, b in zip(lams, lams[1:])):
            raise ValueError("resonance wavelengths must decrease strictly with l")

    def wavelengths(self):
        return np.array([e[1] for e in self.entries])

    def frequencies(self):
        return np.array([e[2] for e in self.entries])


def build_resonance_table(sphere: SphereSpec, l_values, q: int = 1, polarization: str = "TE") -> ResonanceTable:
    entries = []
    for l in l_values:
        mode = ModeIndex(l=int(l), q=q, polarization=polarization)
        lam = resonance_wavelength(sphere, mode)
        entries.append((mode, lam, 2.0 * np.pi * C_LIGHT / lam))
    return ResonanceTable(sphere=sphere, entries=tuple(entries))


# ---------------------------------------------------------------------------
# continuous dispersion
# ---------------------------------------------------------------------------


def _nu_continuous_ld(sphere: SphereSpec, omega, alpha_q, polarization: str):
    """Continuous mode number nu(omega) via the inverted resonance relation.

    Solved in extended precision (long double) so the fractional part of
    nu ~ 1e3..1e7 survives; the double-precision Brent root only seeds a
    Newton polish.
    """
    w = _LD(omega)
    lam_ld = 2 * _LD(np.pi) * _LD(C_LIGHT) / w
    lam = float(lam_ld)
    lo_um, hi_um = sphere.material.valid_range
    if not (lo_um * 1e-6 <= lam <= hi_um * 1e-6):
        raise MaterialRangeError(
            f"frequency {float(omega)/2/np.pi/1e12:.2f} THz maps to {lam*1e6:.3f} um, "
            f"outside material validity range"
        )
    b = np.asarray(sphere.material.resonance_strengths, dtype=_LD)
    l2 = np.asarray(sphere.material.resonance_wavelengths, dtype=_LD) ** 2
    lam_um2 = (lam_ld * _LD(1e6)) ** 2
    n = np.sqrt(_LD(1) + np.sum(b * lam_um2 / (lam_um2 - l2)))
    P = n if polarization == "TE" else 1 / n
    aq = _LD(alpha_q)
    third = _LD(1) / 3
    c1 = _LD(2) ** (-third) * aq
    c3 = _LD(0.3) * _LD(2) ** (-2 * third) * aq**2
    c4 = _LD(2) ** (-third) * P * (n * n - 2 * third * P * P) / (n * n - 1) ** _LD(1.5) * aq
    target = 2 * _LD(np.pi) * _LD(sphere.radius) * n / lam_ld + P / np.sqrt(n * n - 1)

    tf, c1f, c3f, c4f = float(target), float(c1), float(c3), float(c4)

    def g(v):
        return v + c1f * v ** (1.0 / 3.0) + c3f * v ** (-1.0 / 3.0) - c4f * v ** (-2.0 / 3.0) - tf

    lo = max(0.5, tf - 2.0 * c1f * tf ** (1.0 / 3.0) - 5.0)
    v = _LD(brentq(g, lo, tf, rtol=8.9e-16))
    for _ in range(3):
        fv = v + c1 * v**third + c3 * v ** (-third) - c4 * v ** (-2 * third) - target
        fp = 1 + c1 * third * v ** (third - 1) - c3 * third * v ** (-third - 1) + 2 * third * c4 * v ** (-2 * third - 1)
        v = v - fv / fp
    return v


class ContinuousDispersion:
    """Smooth dispersion relation k(omega) for one mode family of a sphere.

    The continuous mode number (minus 1/2) is stored detrended,

        y(dw) = K1 dw + K2 dw^2 + D(dw),      dw = omega - omega_ref,

    with D a small spline residual built from extended-precision solves of
    the inverted resonance relation.  ``reduced`` returns y split into the
    nearest integer and a remainder accurate to ~1e-15, which is what the
    cavity transfer functions need at quality factors up to 1e8+.
    """

    def __init__(self, sphere: SphereSpec, polarization: str = "TE", q: int = 1,
                 center_frequency_hz: float = 193.4e12, halfspan_hz: float = 5.0e12,
                 nodes_per_thz: float = 32.0):
        if polarization not in POLARIZATIONS:
            raise UnsupportedModeError(f"polarization must be one of {POLARIZATIONS}")
        self.sphere = sphere
        self.polarization = polarization
        self.q = int(q)
        self.alpha_q = airy_zero(self.q)
        self.w_ref = 2.0 * np.pi * center_frequency_hz
        self.halfspan = 2.0 * np.pi * halfspan_hz
        self.perimeter = sphere.perimeter

        nu_ref = _nu_continuous_ld(sphere, self.w_ref, self.alpha_q, polarization)
        self.l_ref = int(np.rint(float(nu_ref - _LD(0.5))))
        h = 2.0 * np.pi * 1.0e9
        nup = _nu_continuous_ld(sphere, self.w_ref + h, self.alpha_q, polarization)
        num = _nu_continuous_ld(sphere, self.w_ref - h, self.alpha_q, polarization)
        self.K1 = float((nup - num) / (2 * _LD(h)))
        self.K2 = float((nup - 2 * nu_ref + num) / (2 * _LD(h) ** 2))

        n_nodes = int(max(64, np.ceil(2 * halfspan_hz / 1e12 * nodes_per_thz))) + 1
        dws = np.linspace(-self.halfspan, self.halfspan, n_nodes)
        k1_ld, k2_ld = _LD(self.K1), _LD(self.K2)
        dvals = np.empty(n_nodes)
        for i, dw in enumerate(dws):
            nu_i = _nu_continuous_ld(sphere, self.w_ref + dw, self.alpha_q, polarization)
            dvals[i] = float(nu_i - _LD(0.5) - _LD(self.l_ref) - k1_ld * _LD(dw) - k2_ld * _LD(dw) ** 2)
        spl = CubicSpline(dws, dvals)
        # coefficient arrays for fast local evaluation (uniform knots)
        self._dc = np.ascontiguousarray(spl.c)
        self._dx0 = dws[0]
        self._dh = dws[1] - dws[0]
        self._n_int = n_nodes - 1

    # -- core evaluations ---------------------------------------------------

    def _residual(self, dw):
        idx = np.clip(((dw - self._dx0) / self._dh).astype(np.int64), 0, self._n_int - 1)
        t = dw - (self._dx0 + idx * self._dh)
        c = self._dc
        return ((c[0, idx] * t + c[1, idx]) * t + c[2, idx]) * t + c[3, idx]

    def _check_band(self, dw):
        if np.any(np.abs(dw) > self.halfspan * (1 + 1e-12)):
            raise MaterialRangeError(
                "frequency outside the built dispersion band; rebuild "
                "ContinuousDispersion with a larger halfspan"
            )

    def reduced(self, detune):
        """Split y(dw) into (nearest integer m, remainder x), compensated.

        ``l_ref + m`` is the azimuthal index of the nearest resonance and
        ``x`` the continuous mode-number distance to it, |x| <= ~0.5.
        """
        dw = np.asarray(detune, dtype=float)
        self._check_band(dw)
        p1, e1 = two_prod(self.K1, dw)
        p2, e2 = two_prod(self.K2, dw * dw)
        D = self._residual(dw)
        m = np.rint(p1 + p2 + D)
        s1 = p1 - m  # exact: |p1 - m| << p1 (Sterbenz)
        s2, err = two_sum(s1, p2)
        x = s2 + (err + e1 + e2 + D)
        return m, x

    def mode_number_offset(self, detune):
        """y(dw) = nu(omega) - 1/2 - l_ref as a plain float."""
        m, x = self.reduced(detune)
        return m + x

    def sin_sq_half_phase(self, detune):
        """sin^2(k(omega) L / 2), evaluated without large-angle loss."""
        m, x = self.reduced(detune)
        s = np.sin(np.pi * x)
        return s * s

    def exp_i_phase(self, detune):
        """exp(i k(omega) L) via the reduced phase."""
        m, x = self.reduced(detune)
        return np.exp(2j * np.pi * x)

    def k(self, omega):
        """Dispersion relation k(omega) = n_eff(omega) omega / c, rad/m."""
        dw = np.asarray(omega, dtype=float) - self.w_ref
        y = self.mode_number_offset(dw)
        return 2.0 * np.pi * (self.l_ref + y) / self.perimeter

    def n_eff(self, omega):
        """Continuous effective index k c / omega."""
        return self.k(omega) * C_LIGHT / np.asarray(omega, dtype=float)

    def slope(self, detune):
        """dy/domega (inverse of the local angular FSR)."""
        dw = np.asarray(detune, dtype=float)
        self._check_band(dw)
        idx = np.clip(((dw - self._dx0) / self._dh).astype(np.int64), 0, self._n_int - 1)
        t = dw - (self._dx0 + idx * self._dh)
        c = self._dc
        dD = (3.0 * c[0, idx] * t + 2.0 * c[1, idx]) * t + c[2, idx]
        return self.K1 + 2.0 * self.K2 * dw + dD

    def round_trip_time(self, detune=0.0):
        """Cavity round-trip time d(kL)/domega = 2 pi dy/domega, seconds."""
        return 2.0 * np.pi * float(self.slope(detune))

    def group_index_eff(self, omega):
        """Effective group index c dk/domega."""
        dw = np.asarray(omega, dtype=float) - self.w_ref
        return C_LIGHT * 2.0 * np.pi * self.slope(dw) / self.perimeter

    # -- resonances ---------------------------------------------------------

    def resonance_detune(self, l: int) -> float:
        """Detuning (omega_l - omega_ref) of the l-th resonance, rad/s."""
        targ = float(l - self.l_ref)
        guess = targ / self.K1
        if abs(guess) > self.halfspan:
            raise NoResonanceError(f"resonance l={l} outside the built dispersion band")
        w = 0.45 / self.K1

        def f(dw):
            m, x = self.reduced(dw)
            return (m - targ) + x

        lo, hi = guess - w, guess + w
        lo = max(lo, -self.halfspan)
        hi = min(hi, self.halfspan)
        if f(lo) * f(hi) > 0:
            raise NoResonanceError(f"resonance l={l}: bracket failed")
        return brentq(f, lo, hi, xtol=1e-6, rtol=8.9e-16)

    def resonance_frequency(self, l: int) -> float:
        """Absolute angular resonance frequency omega_l."""
        return self.w_ref + self.resonance_detune(l)

    def nearest_resonance(self, omega) -> tuple[int, float]:
        """(l, omega_l) of the resonance closest to omega."""
        dw = float(omega) - self.w_ref
        m, x = self.reduced(dw)
        l = self.l_ref + int(m) + (1 if x > 0.5 else (-1 if x < -0.5 else 0))
        return l, self.resonance_frequency(l)

    def fsr(self, omega) -> float:
        """Local free spectral range omega_{l+1} - omega_l (angular, rad/s)."""
        dw = float(omega) - self.w_ref
        m, x = self.reduced(dw)
        l = self.l_ref + int(m) if x >= 0 else self.l_ref + int(m) - 1
        return self.resonance_detune(l + 1) - self.resonance_detune(l)

    def fsr_drift_curve(self, omega_grid):
        """Sampled FSR(omega) over a grid (angular in, angular out)."""
        return np.array([self.fsr(w) for w in np.atleast_1d(omega_grid)])


class LinearDispersion:
    """Constant-effective-index dispersion k = n omega / c.

    Shares the reduced-phase interface of ``ContinuousDispersion`` so the
    cavity and pair-generation machinery can run with dispersion
    artificially linearized (resonances exactly evenly spaced, nu_l equal
    to l times the FSR).
    """

    def __init__(self, n_const: float, perimeter: float, anchor_l: int):
        self.K1 = n_const * perimeter / (2.0 * np.pi * C_LIGHT)
        self.K2 = 0.0
        self.l_ref = int(anchor_l)
        self.w_ref = self.l_ref / self.K1  # an exact resonance
        self.perimeter = perimeter
        self.halfspan = np.inf

    def reduced(self, detune):
        dw = np.asarray(detune, dtype=float)
        p1, e1 = two_prod(self.K1, dw)
        m = np.rint(p1)
        x = (p1 - m) + e1
        return m, x

    def mode_number_offset(self, detune):
        m, x = self.reduced(detune)
        return m + x

    def sin_sq_half_phase(self, detune):
        m, x = self.reduced(detune)
        s = np.sin(np.pi * x)
        return s * s

    def exp_i_phase(self, detune):
        m, x = self.reduced(detune)
        return np.exp(2j * np.pi * x)

    def k(self, omega):
        dw = np.asarray(omega, dtype=float) - self.w_ref
        return 2.0 * np.pi * (self.l_ref + self.mode_number_offset(dw)) / self.perimeter

    def slope(self, detune):
        return np.full_like(np.asarray(detune, dtype=float), self.K1)

    def round_trip_time(self, detune=0.0):
        return 2.0 * np.pi * self.K1

    def resonance_detune(self, l: int) -> float:
        return (l - self.l_ref) / self.K1

    def resonance_frequency(self, l: int) -> float:
        return self.w_ref + self.resonance_detune(l)

    def fsr(self, omega) -> float:
        return 1.0 / self.K1


@functools.lru_cache(maxsize=16)
def _cached_dispersion(sphere: SphereSpec, polarization: str, q: int,
                       center_frequency_hz: float, halfspan_hz: float) -> ContinuousDispersion:
    return ContinuousDispersion(sphere, polarization, q,
                                center_frequency_hz=center_frequency_hz,
                                halfspan_hz=halfspan_hz)


def dispersion_for(sphere: SphereSpec, polarization: str = "TE", q: int = 1,
                   center_frequency_hz: float = 193.4e12, halfspan_hz: float = 5.0e12) -> ContinuousDispersion:
    """Memoized ContinuousDispersion builder (construction costs ~0.1 s)."""
    return _cached_dispersion(sphere, polarization, q, center_frequency_hz, halfspan_hz)


def dispersion_k(sphere: SphereSpec, polarization: str, omega):
    """Convenience wrapper: k(omega) for a sphere's fundamental mode family."""
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    ctr = float(np.mean(w)) / (2 * np.pi)
    span = max(5.0e12, 1.2 * (np.max(w) - np.min(w)) / (2 * np.pi))
    disp = dispersion_for(sphere, polarization, 1, round(ctr / 1e11) * 1e11, span)
    out = disp.k(w)
    return out if np.ndim(omega) else float(out[0])


def fsr(sphere: SphereSpec, polarization: str, omega) -> float:
    """Local angular FSR at omega for the fundamental mode family."""
    disp = dispersion_for(sphere, polarization, 1,
                          float(omega) / (2 * np.pi) // 1e11 * 1e11, 5.0e12)
    return disp.fsr(omega)


def fsr_drift_curve(sphere: SphereSpec, polarization: str, omega_grid):
    grid = np.atleast_1d(omega_grid)
    ctr = float(np.mean(grid)) / (2 * np.pi)
    span = max(5.0e12, 1.2 * (np.max(grid) - np.min(grid)) / (2 * np.pi))
    disp = dispersion_for(sphere, polarization, 1, round(ctr / 1e11) * 1e11, span)
    return disp.fsr_drift_curve(grid)


def find_mode_near(sphere: SphereSpec, wavelength_m: float, polarization: str = "TE",
                   q: int = 1) -> tuple[ModeIndex, float]:
    """Mode whose resonance is closest to a target wavelength.

    Returns (mode, resonance wavelength).  The search uses the continuous
    mode number as a seed and checks the neighbouring integers, so it is a
    handful of solver calls regardless of l.
    """
    omega = 2.0 * np.pi * C_LIGHT / wavelength_m
    nu = float(_nu_continuous_ld(sphere, omega, airy_zero(q), polarization))
    l0 = int(np.rint(nu - 0.5))
    best = None
    for l in (l0 - 1, l0, l0 + 1):
        if l < 1:
            continue
        mode = ModeIndex(l=l, q=q, polarization=polarization)
        lam = resonance_wavelength(sphere, mode)
        err = abs(lam - wavelength_m)
        if best is None or err < best[2]:
            best = (mode, lam, err)
    return best[0], best[1]
