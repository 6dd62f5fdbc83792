import numpy as np
import pytest
from scipy.constants import c as C_LIGHT
from scipy.optimize import minimize_scalar

from wgmcomb import cavity as cav
from wgmcomb import resonator as res
from wgmcomb.errors import DegenerateCavityError, FileFormatError, FitError


# -- reflectivity ------------------------------------------------------------

def test_reflectivity_arithmetic():
    r, t = cav.reflectivity_from_q(774, 1e8)
    assert r == pytest.approx(1 - 774 * np.pi / 1e8, rel=1e-15)
    assert r == pytest.approx(0.99997568, abs=1e-8)


def test_reflectivity_limits():
    r, t = cav.reflectivity_from_q(774, 1e15)
    assert r == pytest.approx(1.0, abs=1e-11)
    assert t == pytest.approx(0.0, abs=1e-5)


def test_energy_conservation_random(rng):
    for _ in range(50):
        l = int(rng.integers(10, 1_000_000))
        q = float(10 ** rng.uniform(4, 10))
        if q <= l * np.pi:
            continue
        r, t = cav.reflectivity_from_q(l, q)
        assert abs(r * r + t * t - 1.0) < 1e-12


def test_degenerate_cavity():
    with pytest.raises(DegenerateCavityError):
        cav.reflectivity_from_q(774, 774 * np.pi)
    with pytest.raises(DegenerateCavityError):
        cav.CouplingSpec(l_ref=774, q_pump=1.0, q_signal=1e8, q_idler=1e8)


# -- airy transfer functions --------------------------------------------------

@pytest.fixture(scope="module")
def lin():
    # anchored so an exact resonance sits near 193.4 THz
    n_eff = 1.4151
    per = 2 * np.pi * 135e-6
    k1 = n_eff * per / (2 * np.pi * C_LIGHT)
    l_anchor = int(round(k1 * 2 * np.pi * 193.4e12))
    return res.LinearDispersion(n_eff, per, l_anchor)


def test_on_resonance_value(lin):
    r, t = cav.reflectivity_from_q(lin.l_ref, 1e8)
    d0 = lin.resonance_detune(lin.l_ref)
    peak = float(cav.airy_intensity(lin, d0, r, t * t))
    assert peak == pytest.approx(t * t / (1 - r) ** 2, rel=1e-9)


def test_anti_resonance_value(lin):
    r, t = cav.reflectivity_from_q(lin.l_ref, 1e6)
    d_half = 0.5 * (lin.resonance_detune(lin.l_ref) + lin.resonance_detune(lin.l_ref + 1))
    v = float(cav.airy_intensity(lin, d_half, r, t * t))
    assert v == pytest.approx(t * t / (1 + r) ** 2, rel=1e-9)


def test_energy_bound(lin, rng):
    r, t = cav.reflectivity_from_q(lin.l_ref, 1e7)
    d = rng.uniform(-1e12, 1e12, 500)
    vals = cav.airy_intensity(lin, d, r, t * t)
    assert np.all(vals > 0)
    assert np.all(vals <= t * t / (1 - r) ** 2 * (1 + 1e-12))


@pytest.mark.parametrize("q", [1e6, 1e7, 1e8])
def test_fwhm_equals_nu_over_q(lin, q):
    # linewidth-Q identity under linearized dispersion (nu_l = l x FSR)
    r, _ = cav.reflectivity_from_q(lin.l_ref, q)
    fwhm = cav.intensity_fwhm(lin, lin.l_ref, r)
    nu = lin.resonance_frequency(lin.l_ref) / (2 * np.pi)
    assert abs(fwhm - nu / q) / (nu / q) < 0.02


def test_pump_airy_fwhm_calibration(disp135):
    r_p = cav.reflectivity_for_fwhm(disp135, 774, 20.4e6, pump=True)
    fwhm = cav.intensity_fwhm(disp135, 774, r_p * r_p)
    assert abs(fwhm - 20.4e6) / 20.4e6 < 0.01


def test_pump_substitution_equivalence(disp135):
    # pump transfer with r_p^2 = r has exactly the mode-transfer lineshape
    r, t = cav.reflectivity_from_q(774, 5e7)
    d = disp135.resonance_detune(774) + np.linspace(-1, 1, 101) * 2e8
    a_mode = cav.airy_intensity(disp135, d, r, t * t)
    a_pump = cav.pump_airy_intensity(disp135, d, np.sqrt(r), t * t)
    # identical up to the half-ulp of sqrt(r)**2, amplified by the finesse
    assert np.allclose(a_mode, a_pump, rtol=1e-9)


def test_amplitude_matches_intensity(disp135):
    r, t = cav.reflectivity_from_q(774, 1e7)
    d = disp135.resonance_detune(774) + np.linspace(-3e9, 3e9, 25)
    amp = cav.airy_amplitude(disp135, d, r, t)
    assert np.allclose(np.abs(amp) ** 2, cav.airy_intensity(disp135, d, r, t * t), rtol=1e-12)


def test_maxima_match_resonance_table(sphere135, disp135):
    r, t = cav.reflectivity_from_q(774, 1e8)
    for l in (773, 774, 776):
        w_l = disp135.resonance_frequency(l)
        gam = 2 * np.pi * w_l / (2 * np.pi) / 1e8
        opt = minimize_scalar(
            lambda d: -float(cav.airy_intensity(disp135, d, r, t * t)),
            bracket=(w_l - disp135.w_ref - gam, w_l - disp135.w_ref + gam),
            method="brent", options=dict(xtol=1e-12))
        w_peak = disp135.w_ref + opt.x
        assert abs(w_peak - w_l) / w_l < 1e-9


def test_pump_sweep_hierarchy_warns():
    with pytest.warns(UserWarning):
        cav.PumpSweepSpec(center_frequency=1.2e15, linewidth_hz=5e6,
                          resonance_fwhm_hz=20e6, sweep_span_hz=25e9)
    with pytest.warns(UserWarning):
        cav.PumpSweepSpec(center_frequency=1.2e15, resonance_fwhm_hz=20e6,
                          sweep_span_hz=30e6)


# -- transmission scan fitting -------------------------------------------------

def _synthetic_scan(disp, fwhm_hz, noise, rng, depth=0.6, n=481):
    r_p = cav.reflectivity_for_fwhm(disp, 774, fwhm_hz, pump=True)
    d0 = disp.resonance_detune(774)
    off = np.linspace(-6 * fwhm_hz, 6 * fwhm_hz, n)
    a = cav.pump_airy_intensity(disp, d0 + 2 * np.pi * off, r_p, 1 - r_p ** 2)
    a = a / a.max()
    t = 1.0 - depth * a + noise * rng.standard_normal(n)
    return cav.TransmissionScan(freq_offset_hz=off, transmittance=t)


def test_fit_airy_roundtrip_with_noise(disp135, rng):
    scan = _synthetic_scan(disp135, 20.4e6, 0.01, rng)
    fit = cav.fit_airy(scan)
    assert abs(fit.fwhm_hz - 20.4e6) / 20.4e6 < 0.05
    assert fit.fwhm_sigma_hz < 0.05 * fit.fwhm_hz


def test_fit_airy_center_on_symmetric_scan(disp135, rng):
    scan = _synthetic_scan(disp135, 20.4e6, 0.0, rng)
    fit = cav.fit_airy(scan)
    red = fit.baseline - scan.transmittance
    argmax = scan.freq_offset_hz[int(np.argmax(red))]
    step = scan.freq_offset_hz[1] - scan.freq_offset_hz[0]
    assert abs(fit.center_hz - argmax) <= step


def test_fit_airy_rejects_flat_scan(rng):
    f = np.linspace(-1e8, 1e8, 200)
    t = 1.0 + 0.01 * rng.standard_normal(200)
    with pytest.raises(FitError):
        cav.fit_airy(cav.TransmissionScan(freq_offset_hz=f, transmittance=t))


def test_scan_csv_round_trip(tmp_path, disp135, rng):
    scan = _synthetic_scan(disp135, 20.4e6, 0.01, rng, n=101)
    p = tmp_path / "scan.csv"
    scan.write_csv(p)
    again = cav.TransmissionScan.read_csv(p)
    assert np.array_equal(again.freq_offset_hz, scan.freq_offset_hz)
    assert np.array_equal(again.transmittance, scan.transmittance)


def test_scan_requires_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,4\n")
    with pytest.raises(FileFormatError):
        cav.TransmissionScan.read_csv(p)
