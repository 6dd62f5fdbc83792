import numpy as np
import pytest

from wgmcomb import cavity, material, resonator


@pytest.fixture(scope="session")
def silica():
    return material.fused_silica()


@pytest.fixture(scope="session")
def sphere135(silica):
    return resonator.SphereSpec(radius=135e-6, material=silica)


@pytest.fixture(scope="session")
def sphere180(silica):
    return resonator.SphereSpec(radius=180e-6, material=silica)


@pytest.fixture(scope="session")
def disp135(sphere135):
    return resonator.dispersion_for(sphere135, "TE", 1, 193.4e12, 4.5e12)


@pytest.fixture(scope="session")
def pump_20p4(disp135):
    return cavity.PumpSweepSpec(center_frequency=disp135.resonance_frequency(774),
                                resonance_fwhm_hz=20.4e6)


def couplings(q, l_ref=774):
    return cavity.CouplingSpec(l_ref=l_ref, q_pump=q, q_signal=q, q_idler=q)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
