import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdcmodes.materials import ktp_source
from spdcmodes.phase_match import MatchingTypeError
from spdcmodes.purity import (JSAGrid, PumpSpectrum, build_jsa, golden_section_max,
                              matched_bandwidth, optimize_pump_bandwidth, schmidt_purity)


def double_gaussian(sig_plus, sig_minus, n=256, half=12.0):
    x = np.linspace(-half, half, n)
    XS, XI = np.meshgrid(x, x, indexing="ij")
    return np.exp(-(XS + XI) ** 2 / (2 * sig_plus ** 2) - (XS - XI) ** 2 / (2 * sig_minus ** 2))


def analytic_purity(a, b):
    return 2 * a * b / (a ** 2 + b ** 2)


@pytest.fixture(scope="module")
def sgvm():
    return ktp_source("sgvm", 0.04, xi=(0.006,) * 3, poling="gaussian")


def test_separable_is_pure():
    x = np.linspace(-5, 5, 64)
    amp = np.outer(np.exp(-x ** 2), np.cos(x) * np.exp(-x ** 2 / 3))
    assert schmidt_purity(amp).purity == pytest.approx(1.0, abs=1e-12)


def test_double_gaussian_analytic():
    assert schmidt_purity(double_gaussian(1.0, 3.0)).purity == pytest.approx(0.6, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.5, 3.0), b=st.floats(0.5, 3.0), c=st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
def test_purity_invariances(a, b, c):
    amp = double_gaussian(a, b, n=128)
    p = schmidt_purity(amp).purity
    assert p == pytest.approx(analytic_purity(a, b), abs=1e-6)
    assert schmidt_purity(amp.T).purity == pytest.approx(p, rel=1e-12)
    assert schmidt_purity(c * amp).purity == pytest.approx(p, rel=1e-12)


def test_golden_section_on_double_gaussian_family():
    b = 1.7
    best, val, _ = golden_section_max(lambda lw: schmidt_purity(double_gaussian(np.exp(lw), b, 128)).purity,
                                      np.log(0.2), np.log(20), np.log(1.01))
    assert np.exp(best) == pytest.approx(b, rel=0.02)
    assert val == pytest.approx(1.0, abs=1e-4)


def test_golden_section_records_endpoints():
    _, _, samples = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 1e-3)
    assert 0.0 in samples and 1.0 in samples


def test_rotation_matches_direct(sgvm):
    pump = PumpSpectrum.from_dimensionless(matched_bandwidth(sgvm), sgvm)
    rot = build_jsa(sgvm, pump, 64)
    direct = build_jsa(sgvm, pump, 64, method="direct")
    peak = np.abs(direct.amplitude).max()
    assert np.abs(rot.amplitude - direct.amplitude).max() / peak < 1e-5


def test_narrow_pump_concentrates_on_antidiagonal(sgvm):
    pump = PumpSpectrum.from_dimensionless(0.02, sgvm)
    jsa = build_jsa(sgvm, pump, 101, window=(0.0, 20.0))
    XS, XI = np.meshgrid(jsa.omega_s_grid, jsa.omega_i_grid, indexing="ij")
    dens = np.abs(jsa.amplitude) ** 2
    off = dens[np.abs(XS + XI) > 1.0].sum() / dens.sum()
    assert off < 1e-6
    assert schmidt_purity(jsa).purity < 0.1


def test_non_sgvm_rejected():
    cfg = ktp_source("type2", 0.04, xi=(1, 1, 1))
    with pytest.raises(MatchingTypeError):
        optimize_pump_bandwidth(cfg)
    with pytest.raises(MatchingTypeError):
        build_jsa(cfg, PumpSpectrum.gaussian(1e12))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        PumpSpectrum.gaussian(0.0)
    with pytest.raises(ValueError):
        JSAGrid(np.zeros(2), np.zeros(2), np.zeros((2, 2)))
    with pytest.raises(ArithmeticError):
        JSAGrid(np.zeros(2), np.zeros(2), np.full((2, 2), np.nan))


def test_grid_convergence_and_rank_cap(sgvm):
    r128 = optimize_pump_bandwidth(sgvm, n_grid=128)
    pump = PumpSpectrum.gaussian(r128.sigma_p_used)
    p256 = schmidt_purity(build_jsa(sgvm, pump, 256)).purity
    assert abs(p256 - r128.purity) < 1e-3
    full = schmidt_purity(build_jsa(sgvm, pump, 128), rank_cap=128)
    assert 1 - sum(full.schmidt_coefficients[:64]) < 1e-8


def test_near_plane_wave_high_purity(sgvm):
    res = optimize_pump_bandwidth(sgvm)
    assert res.purity > 0.99
    assert res.warning is None
    w = res.extra["dimensionless_width"]
    assert 0.3 < w / matched_bandwidth(sgvm) < 3


def test_tight_focus_lowers_purity():
    cfg = ktp_source("sgvm", 0.04, xi=(2.8,) * 3, poling="gaussian")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert optimize_pump_bandwidth(cfg).purity < 0.99


def test_uniform_poling_limited_purity():
    cfg = ktp_source("sgvm", 0.04, xi=(0.006,) * 3)
    assert optimize_pump_bandwidth(cfg).purity < 0.9
