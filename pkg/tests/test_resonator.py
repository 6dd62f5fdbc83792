import numpy as np
import pytest
from scipy.constants import c as C_LIGHT
from scipy.special import ai_zeros, airy

from wgmcomb import material as mat
from wgmcomb import resonator as res
from wgmcomb.errors import NoResonanceError, UnsupportedModeError


# -- airy zeros --------------------------------------------------------------

def test_airy_zeros_against_tabulated():
    # independent route: scipy's dedicated zero tabulation
    ref = -ai_zeros(10)[0]
    for q in range(1, 11):
        assert res.airy_zero(q) == pytest.approx(ref[q - 1], abs=1e-10)


@pytest.mark.parametrize("q,expected", [(1, 2.338107), (2, 4.087949)])
def test_airy_zero_values(q, expected):
    assert res.airy_zero(q) == pytest.approx(expected, abs=1e-6)


def test_airy_zero_residual_and_sign_change():
    for q in range(1, 11):
        z = res.airy_zero(q)
        assert abs(airy(-z)[0]) < 1e-12
        assert airy(-(z - 1e-4))[0] * airy(-(z + 1e-4))[0] < 0


def test_airy_zero_range():
    with pytest.raises(ValueError):
        res.airy_zero(0)
    with pytest.raises(ValueError):
        res.airy_zero(11)


# -- mode index / sphere -----------------------------------------------------

def test_mode_index_scope():
    m = res.ModeIndex(l=774)
    assert m.m == 774 and m.q == 1
    with pytest.raises(UnsupportedModeError):
        res.ModeIndex(l=10, m=9)
    with pytest.raises(UnsupportedModeError):
        res.ModeIndex(l=10, q=2)
    with pytest.raises(UnsupportedModeError):
        res.ModeIndex(l=0)
    with pytest.raises(UnsupportedModeError):
        res.ModeIndex(l=10, polarization="TEM")


def test_perimeter_derived(sphere135):
    assert sphere135.perimeter == 2 * np.pi * 135e-6


# -- discrete resonances -----------------------------------------------------

def _rhs_oracle(sphere, lam, l, pol):
    # direct transcription of the asymptotic relation, independent of the
    # solver's internal helper
    n = float(mat.refractive_index(sphere.material, lam))
    P = n if pol == "TE" else 1 / n
    nu = l + 0.5
    aq = res.airy_zero(1)
    t = (nu + 2 ** (-1 / 3) * aq * nu ** (1 / 3)
         - P / np.sqrt(n * n - 1)
         + 0.3 * 2 ** (-2 / 3) * aq ** 2 * nu ** (-1 / 3)
         - 2 ** (-1 / 3) * P * (n * n - (2 / 3) * P * P) / (n * n - 1) ** 1.5 * aq * nu ** (-2 / 3))
    return t / (2 * np.pi * sphere.radius * n)


def test_mode_identification_135um(sphere135):
    mode, lam = res.find_mode_near(sphere135, 1550.92e-9)
    assert abs(mode.l - 774) <= 2
    fsr_lam = lam - res.resonance_wavelength(
        sphere135, res.ModeIndex(l=mode.l + 1, polarization="TE"))
    assert abs(lam - 1550.92e-9) < fsr_lam


def test_resonance_residual_below_tolerance(sphere135):
    for l in (700, 774, 850):
        lam = res.resonance_wavelength(sphere135, res.ModeIndex(l=l))
        resid = abs(1 / lam - _rhs_oracle(sphere135, lam, l, "TE")) * lam
        assert resid < 1e-12


def test_fsr_wavelength_spacing_near_1550(sphere135):
    l774 = res.resonance_wavelength(sphere135, res.ModeIndex(l=774))
    l775 = res.resonance_wavelength(sphere135, res.ModeIndex(l=775))
    spacing_nm = (l774 - l775) * 1e9
    assert 1.9 < spacing_nm < 2.0


def test_radius_scaling_with_frozen_dispersion(silica):
    # nearly wavelength-independent index: doubling R doubles lambda at fixed l
    flat = mat.SellmeierModel((1.2, 1e-12, 1e-12), (1e-3, 1e-3, 1e-3), (0.2, 3.7))
    m = res.ModeIndex(l=2000)
    s1 = res.SphereSpec(radius=300e-6, material=flat)
    s2 = res.SphereSpec(radius=600e-6, material=flat)
    r = res.resonance_wavelength(s2, m) / res.resonance_wavelength(s1, m)
    assert r == pytest.approx(2.0, rel=1e-4)


def test_no_resonance_outside_material_band(silica):
    tiny = res.SphereSpec(radius=1.0e-6, material=silica)
    with pytest.raises(NoResonanceError):
        res.resonance_wavelength(tiny, res.ModeIndex(l=1))


def test_resonance_table_invariants(sphere135):
    tab = res.build_resonance_table(sphere135, range(770, 781))
    lams = tab.wavelengths()
    assert np.all(np.diff(lams) < 0)
    with pytest.raises(ValueError):
        res.ResonanceTable(sphere=sphere135, entries=tuple(reversed(tab.entries)))


def test_tm_polarization_distinct(sphere135):
    lam_te = res.resonance_wavelength(sphere135, res.ModeIndex(l=774, polarization="TE"))
    lam_tm = res.resonance_wavelength(sphere135, res.ModeIndex(l=774, polarization="TM"))
    assert lam_tm != lam_te
    assert abs(lam_tm - lam_te) / lam_te < 1e-3


# -- effective index ---------------------------------------------------------

def test_effective_index_arithmetic(sphere135):
    n_eff = res.effective_index(sphere135, res.ModeIndex(l=774), 1550.92e-9)
    assert n_eff == pytest.approx(774 * 1550.92e-9 / (2 * np.pi * 135e-6), rel=1e-12)
    assert n_eff == pytest.approx(1.4151, abs=2e-4)
    assert n_eff < 1.444


def test_effective_index_scale_invariance(sphere135):
    lam = 1550.92e-9
    v1 = 774 * lam / sphere135.perimeter
    v2 = 774 * (2 * lam) / (2 * sphere135.perimeter)
    assert v1 == pytest.approx(v2, rel=1e-15)


def test_effective_index_below_bulk_across_band(sphere135, silica):
    for l in range(765, 790, 4):
        m = res.ModeIndex(l=l)
        lam = res.resonance_wavelength(sphere135, m)
        if not 1.5e-6 <= lam <= 1.6e-6:
            continue
        assert 1.0 < res.effective_index(sphere135, m, lam) < float(
            mat.refractive_index(silica, lam))


# -- continuous dispersion ---------------------------------------------------

def test_dispersion_consistent_with_discrete_solver(sphere135, disp135):
    for l in (770, 774, 779):
        lam = res.resonance_wavelength(sphere135, res.ModeIndex(l=l))
        w = 2 * np.pi * C_LIGHT / lam
        y = disp135.mode_number_offset(w - disp135.w_ref)
        assert abs((disp135.l_ref + y) - l) < 1e-9


def test_phase_at_resonance_is_integer_turns(sphere135, disp135):
    for l in (772, 774, 777):
        wl = disp135.resonance_frequency(l)
        kL = disp135.k(wl) * sphere135.perimeter
        assert abs(kL - 2 * np.pi * l) / (2 * np.pi * l) < 1e-9


def test_k_monotonic_on_1ghz_grid(disp135):
    w = disp135.w_ref + np.arange(-500, 501) * 2 * np.pi * 1e9
    k = disp135.k(w)
    assert np.all(np.diff(k) > 0)


def test_group_index_effective(disp135, silica):
    wl = disp135.resonance_frequency(774)
    ng = disp135.group_index_eff(wl)
    assert 1.40 < ng < 1.50
    assert ng == pytest.approx(1.46, abs=0.02)
    # finite-difference oracle on k(omega)
    h = 2 * np.pi * 1e9
    fd = C_LIGHT * (disp135.k(wl + h) - disp135.k(wl - h)) / (2 * h)
    assert fd == pytest.approx(ng, rel=1e-6)


def test_fsr_value_and_crosscheck(sphere135, disp135):
    wl = disp135.resonance_frequency(774)
    fsr = disp135.fsr(wl)
    assert fsr == pytest.approx(2 * np.pi * 242e9, rel=0.02)
    ng = disp135.group_index_eff(wl)
    assert fsr / (2 * np.pi) == pytest.approx(C_LIGHT / (ng * sphere135.perimeter), rel=0.02)


def test_fsr_180um_in_wavelength(sphere180):
    disp = res.dispersion_for(sphere180, "TE", 1, 193.4e12, 4.5e12)
    _, wl = disp.nearest_resonance(2 * np.pi * C_LIGHT / 1550e-9)
    fsr = disp.fsr(wl)
    lam = 2 * np.pi * C_LIGHT / wl
    fsr_nm = lam ** 2 * (fsr / (2 * np.pi)) / C_LIGHT * 1e9
    assert abs(fsr_nm - 1.4) / 1.4 < 0.15


def test_fsr_inverse_radius_scaling(silica, sphere135, disp135):
    s270 = res.SphereSpec(radius=270e-6, material=silica)
    d270 = res.dispersion_for(s270, "TE", 1, 193.4e12, 4.5e12)
    w = 2 * np.pi * 193.4e12
    ratio = disp135.fsr(w) / d270.fsr(w)
    assert ratio == pytest.approx(2.0, rel=0.02)


def test_fsr_drift_monotone(disp135):
    grid = disp135.w_ref + np.linspace(-1, 1, 9) * 2 * np.pi * 2e12
    drift = disp135.fsr_drift_curve(grid)
    diffs = np.diff(drift)
    assert np.all(diffs > 0) or np.all(diffs < 0)  # smooth one-signed drift
    assert drift.max() - drift.min() > 0  # nonzero drift shapes the comb envelope


def test_dispersion_band_guard(disp135):
    with pytest.raises(Exception):
        disp135.k(disp135.w_ref + 2 * np.pi * 20e12)


def test_linear_dispersion_reference():
    lin = res.LinearDispersion(1.4151, 2 * np.pi * 135e-6, 774)
    w0 = lin.resonance_frequency(774)
    assert lin.k(w0) * lin.perimeter == pytest.approx(2 * np.pi * 774, rel=1e-12)
    # evenly spaced resonances: nu_l = l * FSR
    f5 = lin.resonance_frequency(779) - lin.resonance_frequency(774)
    assert f5 == pytest.approx(5 * lin.fsr(w0), rel=1e-12)
