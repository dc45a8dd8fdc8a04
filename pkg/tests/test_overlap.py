import numpy as np
import pytest

from spdcmodes.materials import ktp_source
from spdcmodes.overlap import (DegenerateInputError, _SliceEngine, build_table,
                               default_z_nodes, longitudinal_phase, normalized_overlap,
                               spectral_amplitude, uniform_grid)
from spdcmodes.phase_match import longitudinal_amplitude, sinc

PAIRS = [(0, 0), (0, 1), (2, 0), (1, 3), (4, 4), (4, 1)]


def _mode_peaks(cfg):
    table = build_table(cfg)
    return np.max(np.abs(table.amplitudes), axis=-1), table


@pytest.mark.parametrize("poling", ["uniform", "gaussian"])
@pytest.mark.parametrize("xi", [0.02, 0.3, 2.8, 10.0])
def test_slice_matches_direct_quadrature(poling, xi):
    cfg = ktp_source("type2", 0.04, xi=(xi, xi, xi), poling=poling)
    peaks, table = _mode_peaks(cfg)
    for ps, pi_ in PAIRS:
        # evaluate where this mode is strong, slightly off a grid node
        k = int(np.argmax(np.abs(table.amplitudes[ps, pi_])))
        omega = float(table.omega[k]) + 0.37
        s = spectral_amplitude(cfg, ps, pi_, omega)
        d = spectral_amplitude(cfg, ps, pi_, omega, method="direct")
        assert abs(s - d) / peaks[ps, pi_] < 1e-4, (ps, pi_, s, d)


def test_slice_matches_direct_at_random_points():
    cfg = ktp_source("type2", 0.04, xi=(2.8, 2.8, 2.8))
    peaks, _ = _mode_peaks(cfg)
    rng = np.random.default_rng(20240611)
    for _ in range(10):
        ps = int(rng.integers(0, 5))
        omega = float(rng.uniform(-80, 20))
        s = spectral_amplitude(cfg, ps, 0, omega)
        d = spectral_amplitude(cfg, ps, 0, omega, method="direct")
        assert abs(s - d) / peaks[ps, 0] < 1e-4


def test_type0_slice_matches_direct():
    cfg = ktp_source("type0", 0.005, xi=(3.98, 3.55, 3.55), phi_tilde=0.875)
    peaks, _ = _mode_peaks(cfg)
    for ps, pi_, y in ((0, 0, 1.0), (0, 2, 9.0), (3, 0, -9.5)):
        s = spectral_amplitude(cfg, ps, pi_, y)
        d = spectral_amplitude(cfg, ps, pi_, y, method="direct")
        assert abs(s - d) / peaks[ps, pi_] < 1e-4


@pytest.mark.parametrize("poling", ["uniform", "gaussian"])
def test_plane_wave_limit(poling):
    cfg = ktp_source("type2", 0.04, xi=(1e-3, 1e-3, 1e-3), poling=poling)
    psi = np.linspace(-25, 25, 501)
    amp = _SliceEngine(cfg).at_phase(psi)[0, 0]
    ref = longitudinal_amplitude(cfg.poling, 2 * psi / cfg.L)
    dens = np.abs(amp) ** 2 / np.max(np.abs(amp) ** 2)
    ref = ref ** 2 / np.max(ref ** 2)
    assert np.max(np.abs(dens - ref)) < 0.01
    if poling == "uniform":
        assert np.max(np.abs(ref - sinc(psi) ** 2)) < 1e-12


def test_amplitudes_real_for_real_poling():
    table = build_table(ktp_source("type2", 0.04, xi=(2.8, 2.8, 2.8)))
    scale = np.max(np.abs(table.amplitudes))
    assert np.max(np.abs(table.amplitudes.imag)) < 1e-10 * scale


def test_focusing_shifts_type2_spectrum_negative():
    loose = build_table(ktp_source("type2", 0.04, xi=(0.02,) * 3))
    tight = build_table(ktp_source("type2", 0.04, xi=(2.8,) * 3))
    mean = lambda t: np.sum(t.grid_weights * t.omega * t.density(0, 0)) / np.sum(
        t.grid_weights * t.density(0, 0))
    assert mean(tight) < mean(loose) - 1.0


def test_grid_refinement_leaves_integrals_unchanged():
    cfg = ktp_source("type2", 0.04, xi=(2.8,) * 3)
    fine = cfg.with_(omega_grid=uniform_grid(-406.12, 59.14, 0.4))
    a = build_table(cfg)
    b = build_table(fine)
    sa = np.sum(a.grid_weights * a.density(0, 2))
    sb = np.sum(b.grid_weights * b.density(0, 2))
    assert sa == pytest.approx(sb, rel=1e-3)


def test_normalized_overlap_properties():
    table = build_table(ktp_source("type2", 0.04, xi=(2.8,) * 3))
    assert normalized_overlap(table, (0, 1), (0, 1)) == pytest.approx(1.0, rel=1e-12)
    v = normalized_overlap(table, (0, 0), (0, 3))
    assert 0 <= v <= 1
    assert v == pytest.approx(normalized_overlap(table, (0, 3), (0, 0)), rel=1e-12)
    zero = build_table(ktp_source("type2", 0.04, xi=(2.8,) * 3))
    zero.amplitudes[1, 1] = 0
    with pytest.raises(DegenerateInputError):
        normalized_overlap(zero, (1, 1), (0, 0))


def test_mode_index_validation():
    cfg = ktp_source("type2", 0.04)
    with pytest.raises(ValueError):
        spectral_amplitude(cfg, 5, 0, 0.0)
    with pytest.raises(ValueError):
        spectral_amplitude(cfg, 0, 0, 0.0, method="simpson")


def test_config_hash_is_stable_and_sensitive():
    a = ktp_source("type2", 0.04, xi=(1, 2, 2))
    b = ktp_source("type2", 0.04, xi=(1, 2, 2))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != a.with_(phi_tilde=0.1).config_hash()


def test_table_csv_has_hash_header(tmp_path):
    cfg = ktp_source("type2", 0.04, xi=(1, 1, 1), p_max=1)
    build_table(cfg).to_csv(tmp_path / "t.csv")
    text = (tmp_path / "t.csv").read_text()
    assert f"# config_hash={cfg.config_hash()}" in text
    assert "p_s,p_i,omega_dimensionless,re_C,im_C" in text


def test_node_rule_grows_with_focusing_and_phase():
    assert default_z_nodes(10, 200) > default_z_nodes(1, 200) > default_z_nodes(1, 10)


def test_type0_phase_is_even():
    cfg = ktp_source("type0", 0.005, phi_tilde=0.5)
    y = np.array([-3.0, 3.0])
    a, b = longitudinal_phase(cfg, y)
    assert a == b
