"""Biphoton spectral model: phase mismatch, phasematching strength,
generation-mode matrix, two-dimensional JSI, and the swept-pump mixed-state
idler spectral intensity.

The idler spectral intensity is

    R_i(Omega) = integral dw_p  Ap(w_p) As(w_p + Omega) Ai(w_p - Omega)

with Ap/As/Ai the intensity Airy functions of pump, signal and idler and
the pump integral restricted to a +-N-FWHM window around the pump
resonance (the mixture weight decays quadratically).  The integrand is a
product of high-finesse resonant lineshapes, so the quadrature uses
panels graded geometrically around the three feature positions (known
analytically per sample) with fixed-order Gauss-Legendre nodes in each
panel; a refinement pass (``nsub`` doubling) verifies convergence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange
from scipy.constants import c as C_LIGHT

from . import cavity
from .cavity import CouplingSpec, PumpSweepSpec
from .errors import GridError

# panel grading rings, in units of each feature's FWHM
_RINGS = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0])
_GL_NODES = 12


def _leggauss():
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    return np.ascontiguousarray(x), np.ascontiguousarray(w)


_GLX, _GLW = _leggauss()


@dataclass(frozen=True)
class NonlinearParams:
    """Kerr inputs for the self/cross-phase-modulation phase shift."""

    pump_power_w: float = 7e-3
    n2_m2_per_w: float = 2.7e-20  # fused silica nonlinear index (Agrawal, Nonlinear Fiber Optics)
    a_eff_m2: float = 20e-12     # effective mode area, typical for ~100 um silica spheres

    def __post_init__(self):
        if min(self.pump_power_w, self.n2_m2_per_w, self.a_eff_m2) < 0:
            raise ValueError("nonlinear parameters must be non-negative")

    def kerr_mismatch(self, q_factor: float, n: float, radius: float) -> float:
        """2 gamma P = P_in Q n2 / (pi n R A_eff), rad/m (recomputed, never cached)."""
        return self.pump_power_w * q_factor * self.n2_m2_per_w / (
            np.pi * n * radius * self.a_eff_m2
        )


def kerr_mismatch(params: NonlinearParams, q_factor: float, n: float, radius: float) -> float:
    return params.kerr_mismatch(q_factor, n, radius)


def phase_mismatch(dispersion, omega_p, big_omega, kerr_rad_per_m: float = 0.0):
    """Reduced phase mismatch 2 k(w_p) - k(w_p+O) - k(w_p-O) - 2 gamma P, rad/m.

    Evaluated through the reduced mode number, so the large common phase
    cancels exactly and the curvature survives to machine precision.
    """
    u = np.asarray(omega_p, dtype=float) - dispersion.w_ref
    O = np.asarray(big_omega, dtype=float)
    y_p = dispersion.mode_number_offset(u)
    y_s = dispersion.mode_number_offset(u + O)
    y_i = dispersion.mode_number_offset(u - O)
    return 2.0 * np.pi * (2.0 * y_p - y_s - y_i) / dispersion.perimeter - kerr_rad_per_m


def phasematch_strength(dispersion, omega_p, big_omega, kerr_rad_per_m: float = 0.0):
    """(g, |g|^2) with g = sinc(L dk/2) exp(i L dk/2); |g|^2 = 1 iff dk = 0."""
    dk = phase_mismatch(dispersion, omega_p, big_omega, kerr_rad_per_m)
    x = 0.5 * dispersion.perimeter * dk
    s = np.sinc(x / np.pi)  # np.sinc is sin(pi a)/(pi a)
    g = s * np.exp(1j * x)
    return g, s * s


@dataclass(frozen=True)
class GenerationMode:
    j: int
    l_signal: int
    l_idler: int
    omega_signal: float
    omega_idler: float
    big_omega: float       # (w_s - w_i)/2
    energy_defect: float   # w_s + w_i - 2 w_p


@dataclass(frozen=True)
class GenerationModeMatrix:
    l_pump: int
    omega_pump: float
    pairs: tuple  # of GenerationMode, sorted by big_omega

    def defects(self):
        return np.array([p.energy_defect for p in self.pairs])

    def big_omegas(self):
        return np.array([p.big_omega for p in self.pairs])


def generation_modes(dispersion, l_pump: int, n_pairs: int, omega_pump=None) -> GenerationModeMatrix:
    """Signal/idler index pairs (l_p + j, l_p - j), j = 0..n_pairs.

    ``omega_pump`` defaults to the pump-mode resonance, making the j = 0
    energy defect exactly zero.
    """
    if n_pairs < 0:
        raise ValueError("n_pairs must be >= 0")
    d_pump = (dispersion.resonance_detune(l_pump) if omega_pump is None
              else float(omega_pump) - dispersion.w_ref)
    w_pump = dispersion.w_ref + d_pump
    pairs = []
    for j in range(n_pairs + 1):
        ds = dispersion.resonance_detune(l_pump + j)
        di = dispersion.resonance_detune(l_pump - j)
        pairs.append(GenerationMode(
            j=j, l_signal=l_pump + j, l_idler=l_pump - j,
            omega_signal=dispersion.w_ref + ds, omega_idler=dispersion.w_ref + di,
            big_omega=(ds - di) / 2.0,
            energy_defect=(ds + di) - 2.0 * d_pump,
        ))
    pairs.sort(key=lambda p: p.big_omega)
    return GenerationModeMatrix(l_pump=l_pump, omega_pump=w_pump, pairs=tuple(pairs))


# ---------------------------------------------------------------------------
# numba kernel
# ---------------------------------------------------------------------------


@njit(cache=True)
def _reduced_x(dw, K1, K2, dc, dx0, dh, n_int):
    """Distance of the continuous mode number to the nearest integer.

    Compensated: two exact products plus error recovery keep the remainder
    accurate to ~1e-15 even though the mode number itself is O(1e3..1e7).
    Returns (m, x) with y = m + x and |x| <= ~0.5.
    """
    split = 134217729.0
    p1 = K1 * dw
    ca = split * K1
    ahi = ca - (ca - K1)
    alo = K1 - ahi
    cb = split * dw
    bhi = cb - (cb - dw)
    blo = dw - bhi
    e1 = ((ahi * bhi - p1) + ahi * blo + alo * bhi) + alo * blo

    dw2 = dw * dw
    p2 = K2 * dw2
    ca = split * K2
    ahi = ca - (ca - K2)
    alo = K2 - ahi
    cb = split * dw2
    bhi = cb - (cb - dw2)
    blo = dw2 - bhi
    e2 = ((ahi * bhi - p2) + ahi * blo + alo * bhi) + alo * blo

    idx = int((dw - dx0) / dh)
    if idx < 0:
        idx = 0
    elif idx > n_int - 1:
        idx = n_int - 1
    t = dw - (dx0 + idx * dh)
    D = ((dc[0, idx] * t + dc[1, idx]) * t + dc[2, idx]) * t + dc[3, idx]

    m = np.rint(p1 + p2 + D)
    s1 = p1 - m
    s2 = s1 + p2
    bb = s2 - s1
    err = (s1 - (s2 - bb)) + (p2 - bb)
    x = s2 + (err + e1 + e2 + D)
    return m, x


@njit(cache=True)
def _airy_int(dw, K1, K2, dc, dx0, dh, n_int, one_minus_r, four_r, t2):
    m, x = _reduced_x(dw, K1, K2, dc, dx0, dh, n_int)
    s = np.sin(np.pi * x)
    return t2 / (one_minus_r * one_minus_r + four_r * s * s)


@njit(cache=True, parallel=True)
def _ri_kernel(om, cs, ci, lo, hi, pump_center, wp, wsig, wid,
               omr_p, fr_p, t2p, omr_s, fr_s, t2s, omr_i, fr_i, t2i,
               rings, glx, glw, nsub,
               K1, K2, dc, dx0, dh, n_int,
               apply_g, half_kerr_phase, out):
    n = om.size
    n_rings = rings.size
    n_edges = 2 + 3 * (2 * n_rings + 1)
    n_gl = glx.size
    for i in prange(n):
        o = om[i]
        edges = np.empty(n_edges)
        edges[0] = lo
        edges[1] = hi
        k = 2
        for (cen, wd) in ((pump_center, wp), (cs[i], wsig), (ci[i], wid)):
            e = cen
            if e < lo:
                e = lo
            elif e > hi:
                e = hi
            edges[k] = e
            k += 1
            for rr in rings:
                for sgn in (-1.0, 1.0):
                    e = cen + sgn * rr * wd
                    if e < lo:
                        e = lo
                    elif e > hi:
                        e = hi
                    edges[k] = e
                    k += 1
        edges = np.sort(edges)
        acc = 0.0
        for p in range(n_edges - 1):
            a = edges[p]
            b = edges[p + 1]
            if b <= a:
                continue
            hsub = (b - a) / nsub
            for s_i in range(nsub):
                aa = a + s_i * hsub
                mid = aa + 0.5 * hsub
                half = 0.5 * hsub
                for g_i in range(n_gl):
                    x = mid + half * glx[g_i]
                    w = half * glw[g_i]
                    val = (_airy_int(x, K1, K2, dc, dx0, dh, n_int, omr_p, fr_p, t2p)
                           * _airy_int(x + o, K1, K2, dc, dx0, dh, n_int, omr_s, fr_s, t2s)
                           * _airy_int(x - o, K1, K2, dc, dx0, dh, n_int, omr_i, fr_i, t2i))
                    if apply_g:
                        mp, xp = _reduced_x(x, K1, K2, dc, dx0, dh, n_int)
                        ms, xs = _reduced_x(x + o, K1, K2, dc, dx0, dh, n_int)
                        mi, xi = _reduced_x(x - o, K1, K2, dc, dx0, dh, n_int)
                        arg = np.pi * ((2.0 * mp - ms - mi) + (2.0 * xp - xs - xi)) - half_kerr_phase
                        if abs(arg) < 1e-9:
                            sc = 1.0
                        else:
                            sc = np.sin(arg) / arg
                        val *= sc * sc
                    acc += w * val
        out[i] = acc


# ---------------------------------------------------------------------------
# spectrum container and engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiphotonSpectrum:
    """Sampled idler spectral intensity R_i on a uniform Omega grid.

    ``omega`` holds signal-minus-pump angular detunings (rad/s), strictly
    uniform; values are arbitrary units, non-negative.
    """

    omega: np.ndarray
    values: np.ndarray
    pump: PumpSweepSpec
    q_factors: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if om.ndim != 1 or om.shape != v.shape or om.size < 3:
            raise GridError("omega and values must be matching 1-D arrays")
        d = np.diff(om)
        if np.any(d <= 0) or (np.max(d) - np.min(d)) > 1e-9 * np.median(d):
            raise GridError("omega grid must be uniform and ascending")
        if np.any(v < 0):
            raise GridError("spectral intensity must be non-negative")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "values", v)

    @property
    def step(self) -> float:
        return float(self.omega[1] - self.omega[0])


def _resolution_floor_hz(pump_center_hz: float, q_signal: float, q_idler: float) -> float:
    """Narrowest expected comb-peak FWHM: (f/Qs + f/Qi)/4."""
    return (pump_center_hz / q_signal + pump_center_hz / q_idler) / 4.0


def omega_grid(span_hz: float, step_hz: float):
    """Symmetric uniform angular detuning grid containing exactly zero."""
    if span_hz <= 0 or step_hz <= 0:
        raise GridError("span and step must be positive")
    n = int(np.floor(span_hz / 2.0 / step_hz))
    if n < 1:
        raise GridError("span shorter than one step")
    return 2.0 * np.pi * step_hz * np.arange(-n, n + 1)


def normalize_values(values, mode: str, step: float):
    if mode == "none":
        return values
    if mode == "unit-max":
        m = np.max(values)
        return values / m if m > 0 else values
    if mode == "unit-area":
        a = np.sum(values) * step
        return values / a if a > 0 else values
    raise ValueError(f"unknown normalization mode {mode!r}")


def spectral_intensity(dispersion, l_pump: int, couplings: CouplingSpec,
                       pump: PumpSweepSpec | None = None,
                       span_hz: float = 1.25e12, step_hz: float | None = None,
                       window_fwhm_multiples: float = 6.0,
                       include_phasematching: bool = False,
                       kerr_rad_per_m: float = 0.0,
                       tail_mult: float = 1000.0,
                       sparse_windows: bool = True,
                       pump_delta: bool = False,
                       nsub: int = 1,
                       normalization: str = "none",
                       n_threads: int = 1) -> BiphotonSpectrum:
    """Swept-pump mixed-state idler spectral intensity on a uniform grid.

    The pump transfer |A_p|^2 is anchored on its cavity resonance with a
    round-trip reflectivity reproducing ``pump.resonance_fwhm_hz`` (or
    derived from ``couplings.q_pump`` when no pump spec is given);
    ``pump_delta`` replaces it by a monochromatic pump on resonance.
    Samples farther than ``tail_mult`` combined linewidths from every
    generation mode are exactly zero when ``sparse_windows`` is set (their
    true value is below 1e-6 of the comb maximum there).
    """
    d_pump = dispersion.resonance_detune(l_pump)
    f_pump_hz = (dispersion.w_ref + d_pump) / (2.0 * np.pi)
    if pump is None:
        pump = PumpSweepSpec(center_frequency=dispersion.w_ref + d_pump,
                             resonance_fwhm_hz=f_pump_hz / couplings.q_pump)

    floor_hz = _resolution_floor_hz(f_pump_hz, couplings.q_signal, couplings.q_idler)
    if step_hz is None:
        step_hz = floor_hz / 12.0
    if step_hz > floor_hz / 10.0:
        raise GridError(
            f"step {step_hz:.3g} Hz exceeds a tenth of the narrowest expected "
            f"comb FWHM ({floor_hz:.3g} Hz)"
        )
    om = omega_grid(span_hz, step_hz)

    trt = dispersion.round_trip_time(d_pump)
    r_p = cavity.reflectivity_for_fwhm(dispersion, l_pump, pump.resonance_fwhm_hz, pump=True)
    rr_p = r_p * r_p
    t2_p = 1.0 - rr_p
    gam_p = cavity.phase_fwhm(rr_p) / trt
    r_s, t_s = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_signal)
    r_i, t_i = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_idler)
    gam_s = cavity.phase_fwhm(r_s) / trt
    gam_i = cavity.phase_fwhm(r_i) / trt

    fsr = dispersion.resonance_detune(l_pump + 1) - d_pump
    j_max = int(np.ceil((om[-1] + fsr) / fsr)) + 1
    modes = {}
    for j in range(-j_max, j_max + 1):
        ds = dispersion.resonance_detune(l_pump + j)
        di = dispersion.resonance_detune(l_pump - j)
        modes[j] = (ds, di, (ds - di) / 2.0)
    centers = np.array([modes[j][2] for j in range(-j_max, j_max + 1)])

    # window half-width per peak, capped halfway to the neighbours
    w_half = min(tail_mult * (gam_s + gam_i) / 4.0, 0.5 * fsr)
    if not sparse_windows:
        w_half = 0.5 * fsr * 1.0001

    # guard: evaluations reach om +- (window + pump window); band must cover
    reach = np.abs(om[-1]) + abs(d_pump) + (window_fwhm_multiples + 1) * gam_p + fsr
    if np.isfinite(dispersion.halfspan) and reach > dispersion.halfspan:
        raise GridError("dispersion model band too narrow for the requested span; "
                        "rebuild with a larger halfspan")

    assign = np.searchsorted(centers + 0.5 * np.diff(centers, append=centers[-1] + fsr), om)
    assign = np.clip(assign, 0, centers.size - 1)
    dist = np.abs(om - centers[assign])
    in_window = dist <= w_half

    values = np.zeros_like(om)
    idx = np.nonzero(in_window)[0]
    if idx.size:
        js = assign[idx] - j_max
        ds = np.array([modes[j][0] for j in js])
        di = np.array([modes[j][1] for j in js])
        om_sel = om[idx]
        cs = ds - om_sel
        ci = di + om_sel
        lo = d_pump - window_fwhm_multiples * gam_p
        hi = d_pump + window_fwhm_multiples * gam_p
        if pump_delta:
            s2s = dispersion.sin_sq_half_phase(d_pump + om_sel)
            s2i = dispersion.sin_sq_half_phase(d_pump - om_sel)
            vals = ((t_s * t_s) / ((1 - r_s) ** 2 + 4 * r_s * s2s)
                    * (t_i * t_i) / ((1 - r_i) ** 2 + 4 * r_i * s2i))
            if include_phasematching:
                _, g2 = phasematch_strength(dispersion, dispersion.w_ref + d_pump,
                                            om_sel, kerr_rad_per_m)
                vals = vals * g2
            values[idx] = vals
        else:
            out = np.empty(om_sel.size)
            half_kerr = 0.5 * dispersion.perimeter * kerr_rad_per_m
            import numba
            old_threads = numba.get_num_threads()
            numba.set_num_threads(max(1, int(n_threads)))
            try:
                _ri_kernel(om_sel, cs, ci, lo, hi, d_pump, gam_p, gam_s, gam_i,
                           1.0 - rr_p, 4.0 * rr_p, t2_p,
                           1.0 - r_s, 4.0 * r_s, t_s * t_s,
                           1.0 - r_i, 4.0 * r_i, t_i * t_i,
                           _RINGS, _GLX, _GLW, int(nsub),
                           dispersion.K1, dispersion.K2, _dc_of(dispersion),
                           _dx0_of(dispersion), _dh_of(dispersion), _nint_of(dispersion),
                           bool(include_phasematching), half_kerr, out)
            finally:
                numba.set_num_threads(old_threads)
            values[idx] = out

    if sparse_windows and idx.size:
        vmax = values.max()
        if vmax > 0:
            edge_vals = []
            for j in np.unique(assign[idx]):
                sel = idx[assign[idx] == j]
                edge_vals.append(values[sel[0]])
                edge_vals.append(values[sel[-1]])
            if max(edge_vals) > 1e-6 * vmax:
                warnings.warn("window-edge intensity above 1e-6 of the comb maximum; "
                              "increase tail_mult", stacklevel=2)

    values = normalize_values(values, normalization, float(om[1] - om[0]))
    meta = dict(span_hz=span_hz, step_hz=step_hz,
                window_fwhm_multiples=window_fwhm_multiples,
                include_phasematching=include_phasematching,
                kerr_rad_per_m=kerr_rad_per_m, tail_mult=tail_mult,
                sparse_windows=sparse_windows, pump_delta=pump_delta,
                nsub=nsub, normalization=normalization,
                l_pump=l_pump, pump_detune=d_pump, fsr=fsr)
    q_pump_equiv = f_pump_hz / pump.resonance_fwhm_hz
    return BiphotonSpectrum(omega=om, values=values, pump=pump,
                            q_factors=(q_pump_equiv, couplings.q_signal, couplings.q_idler),
                            meta=meta)


def _dc_of(d):
    return d._dc if hasattr(d, "_dc") else np.zeros((4, 1))


def _dx0_of(d):
    return d._dx0 if hasattr(d, "_dx0") else -1.0


def _dh_of(d):
    return d._dh if hasattr(d, "_dh") else 2.0


def _nint_of(d):
    return d._n_int if hasattr(d, "_n_int") else 1


def comb_peak_heights(dispersion, l_pump: int, couplings: CouplingSpec,
                      pump: PumpSweepSpec | None = None, j_values=range(0, 30),
                      include_phasematching: bool = False, kerr_rad_per_m: float = 0.0,
                      window_fwhm_multiples: float = 6.0) -> np.ndarray:
    """Maximum of R_i near each generation mode j (local fine scan).

    Cheap way to trace the comb envelope without sampling the full dense
    grid; used for peak-count and envelope-decay comparisons.
    """
    d_pump = dispersion.resonance_detune(l_pump)
    f_pump_hz = (dispersion.w_ref + d_pump) / (2.0 * np.pi)
    if pump is None:
        pump = PumpSweepSpec(center_frequency=dispersion.w_ref + d_pump,
                             resonance_fwhm_hz=f_pump_hz / couplings.q_pump)
    trt = dispersion.round_trip_time(d_pump)
    r_p = cavity.reflectivity_for_fwhm(dispersion, l_pump, pump.resonance_fwhm_hz, pump=True)
    rr_p = r_p * r_p
    gam_p = cavity.phase_fwhm(rr_p) / trt
    r_s, t_s = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_signal)
    r_i, t_i = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_idler)
    gam_s = cavity.phase_fwhm(r_s) / trt
    gam_i = cavity.phase_fwhm(r_i) / trt

    heights = np.empty(len(list(j_values)))
    lo = d_pump - window_fwhm_multiples * gam_p
    hi = d_pump + window_fwhm_multiples * gam_p
    half_kerr = 0.5 * dispersion.perimeter * kerr_rad_per_m
    for k, j in enumerate(j_values):
        ds = dispersion.resonance_detune(l_pump + j)
        di = dispersion.resonance_detune(l_pump - j)
        center = (ds - di) / 2.0
        local = center + np.linspace(-1.0, 1.0, 41) * (gam_s + gam_i)
        cs = ds - local
        ci = di + local
        out = np.empty(local.size)
        _ri_kernel(local, cs, ci, lo, hi, d_pump, gam_p, gam_s, gam_i,
                   1.0 - rr_p, 4.0 * rr_p, 1.0 - rr_p,
                   1.0 - r_s, 4.0 * r_s, t_s * t_s,
                   1.0 - r_i, 4.0 * r_i, t_i * t_i,
                   _RINGS, _GLX, _GLW, 1,
                   dispersion.K1, dispersion.K2, _dc_of(dispersion),
                   _dx0_of(dispersion), _dh_of(dispersion), _nint_of(dispersion),
                   bool(include_phasematching), half_kerr, out)
        heights[k] = out.max()
    return heights


def jsi_2d(dispersion, omega_s_grid, omega_i_grid, l_pump: int,
           couplings: CouplingSpec, pump: PumpSweepSpec | None = None,
           include_phasematching: bool = True, kerr_rad_per_m: float = 0.0,
           omega_pump=None):
    """Two-dimensional joint spectral intensity on (omega_s, omega_i) grids.

    The energy-conservation constraint is exact: the mixture member that
    contributes at a grid point is the pump frequency (w_s + w_i)/2, so the
    value is Ap((w_s+w_i)/2) |g|^2 As(w_s) Ai(w_i).  Returns a matrix with
    rows indexed by omega_s and columns by omega_i.
    """
    ws = np.asarray(omega_s_grid, dtype=float)
    wi = np.asarray(omega_i_grid, dtype=float)
    d_pump = (dispersion.resonance_detune(l_pump) if omega_pump is None
              else float(omega_pump) - dispersion.w_ref)
    f_pump_hz = (dispersion.w_ref + d_pump) / (2.0 * np.pi)
    if pump is None:
        pump = PumpSweepSpec(center_frequency=dispersion.w_ref + d_pump,
                             resonance_fwhm_hz=f_pump_hz / couplings.q_pump)
    r_p = cavity.reflectivity_for_fwhm(dispersion, l_pump, pump.resonance_fwhm_hz, pump=True)
    rr_p = r_p * r_p
    r_s, t_s = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_signal)
    r_i, t_i = cavity.reflectivity_from_q(couplings.l_ref, couplings.q_idler)

    d_s = ws[:, None] - dispersion.w_ref
    d_i = wi[None, :] - dispersion.w_ref
    d_plus = 0.5 * (d_s + d_i)
    big_om = 0.5 * (d_s - d_i)

    a_p = cavity.airy_intensity(dispersion, d_plus, rr_p, 1.0 - rr_p)
    a_s = cavity.airy_intensity(dispersion, d_s, r_s, t_s * t_s)
    a_i = cavity.airy_intensity(dispersion, d_i, r_i, t_i * t_i)
    out = a_p * a_s * a_i
    if include_phasematching:
        _, g2 = phasematch_strength(dispersion, dispersion.w_ref + d_plus,
                                    big_om, kerr_rad_per_m)
        out = out * g2
    if np.max(out) <= 1e-12 * (1.0 - rr_p) / (1.0 - r_s) ** 2 / (1.0 - r_i) ** 2:
        warnings.warn("JSI support empty: grids do not bracket a generation mode",
                      stacklevel=2)
    return out


def jsi_marginals(matrix):
    """(signal marginal, idler marginal) of a JSI matrix (sums over the other axis)."""
    m = np.asarray(matrix, dtype=float)
    return m.sum(axis=1), m.sum(axis=0)
