import numpy as np
import pytest
from scipy.constants import c as C_LIGHT

from wgmcomb import material as mat
from wgmcomb.errors import MaterialRangeError


def test_index_at_1550_matches_published_value(silica):
    # published tabulated fused-silica index at 1.55 um is 1.4440
    n = float(mat.refractive_index(silica, 1.55e-6))
    assert abs(n - 1.4440) < 2.5e-4


def test_index_is_deterministic(silica):
    lam = 1.31e-6
    assert float(mat.refractive_index(silica, lam)) == float(mat.refractive_index(silica, lam))


def test_normal_dispersion_band(silica):
    assert float(mat.refractive_index(silica, 1.50e-6)) > float(mat.refractive_index(silica, 1.60e-6))
    lam = np.linspace(1.2e-6, 1.7e-6, 200)
    assert np.all(mat.dn_dlambda(silica, lam) < 0)


def test_group_index_value_and_fd_oracle(silica):
    ng = float(mat.group_index(silica, 1.55e-6))
    assert abs(ng - 1.462) < 2e-3
    # central finite difference as independent derivative oracle
    h = 1e-12
    for lam in (1.30e-6, 1.55e-6, 1.62e-6):
        fd = (float(mat.refractive_index(silica, lam + h))
              - float(mat.refractive_index(silica, lam - h))) / (2 * h)
        an = float(mat.dn_dlambda(silica, lam))
        assert abs(fd - an) / abs(an) < 1e-8


def test_group_velocity_definition(silica):
    lam = 1.55e-6
    assert float(mat.group_velocity(silica, lam)) * float(mat.group_index(silica, lam)) == pytest.approx(
        C_LIGHT, rel=1e-15
    )


def test_out_of_range_raises(silica):
    with pytest.raises(MaterialRangeError):
        mat.refractive_index(silica, 0.1e-6)
    with pytest.raises(MaterialRangeError):
        mat.refractive_index(silica, 4.0e-6)


def test_positive_coefficients_enforced():
    with pytest.raises(ValueError):
        mat.SellmeierModel((0.0, 0.4, 0.9), (0.07, 0.12, 9.9), (0.21, 3.7))
    with pytest.raises(ValueError):
        mat.SellmeierModel((0.7, 0.4, 0.9), (0.07, -0.12, 9.9), (0.21, 3.7))


def test_field_normalization_slowly_varying(silica):
    # varies by < 1% across +-2 THz around 193.4 THz: justifies treating it
    # as constant in the pair-generation model
    w0 = 2 * np.pi * 193.4e12
    w = w0 + np.linspace(-1, 1, 51) * 2 * np.pi * 2e12
    ell = mat.field_normalization(silica, w)
    assert (ell.max() - ell.min()) / ell.mean() < 0.01


def test_field_normalization_sqrt_scaling_with_frozen_dispersion():
    # nearly-constant index model: ell(4w)/ell(w) -> 2 when n, v_g are flat
    flat = mat.SellmeierModel((1e-12, 1e-12, 1e-12), (1e-3, 1e-3, 1e-3), (0.2, 3.7))
    w1 = 2 * np.pi * C_LIGHT / 2.4e-6
    ratio = float(mat.field_normalization(flat, 4 * w1) / mat.field_normalization(flat, w1))
    assert ratio == pytest.approx(2.0, rel=1e-6)


def test_field_normalization_continuity(silica):
    w = 2 * np.pi * 193.4e12
    assert float(mat.field_normalization(silica, w * (1 + 1e-9))
                 / mat.field_normalization(silica, w)) == pytest.approx(1.0, abs=1e-6)


def test_material_file_round_trip(tmp_path, silica):
    import json
    p = tmp_path / "mat.json"
    p.write_text(json.dumps({
        "b1": silica.resonance_strengths[0], "b2": silica.resonance_strengths[1],
        "b3": silica.resonance_strengths[2], "l1": silica.resonance_wavelengths[0],
        "l2": silica.resonance_wavelengths[1], "l3": silica.resonance_wavelengths[2],
        "valid_min_um": silica.valid_range[0], "valid_max_um": silica.valid_range[1],
        "source": "round trip",
    }))
    again = mat.load_material(p)
    assert again.resonance_strengths == silica.resonance_strengths
    assert again.resonance_wavelengths == silica.resonance_wavelengths
    assert again.valid_range == silica.valid_range
