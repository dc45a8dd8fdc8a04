import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdcmodes.materials import ktp_source
from spdcmodes.metrics import (EmptySupportError, FilterWindow, efficiency_rows, filter_weights,
                               heralding, pair_collection, relative_brightness, singles)
from spdcmodes.overlap import (DegenerateInputError, ModeAmplitudeTable, build_table,
                               spectral_amplitude, trapezoid_weights, uniform_grid)


def synthetic(densities, omega=None, p_max=1):
    """Table whose |C_{ps,pi}|^2 equal the given arrays (all others zero)."""
    omega = np.linspace(-5, 5, 101) if omega is None else omega
    amps = np.zeros((p_max + 1, p_max + 1, omega.size), dtype=complex)
    for (ps, pi_), d in densities.items():
        amps[ps, pi_] = np.sqrt(np.broadcast_to(d, omega.shape))
    return ModeAmplitudeTable(None, amps, omega, trapezoid_weights(omega))


def test_constant_density_rectangle_rule():
    omega = np.arange(11) * 0.5
    t = synthetic({(0, 0): 2.0}, omega)
    assert pair_collection(t) == pytest.approx(2.0 * 10 * 0.5)


def test_half_support_filter():
    omega = np.linspace(-4, 4, 81)
    t = synthetic({(0, 0): np.exp(-omega ** 2)}, omega)
    half = FilterWindow.rect(4.0, center=2.0)
    assert pair_collection(t, half) == pytest.approx(0.5 * pair_collection(t), rel=1e-12)


def test_only_fundamental_gives_unit_heralding():
    t = synthetic({(0, 0): 1.0})
    rep = heralding(t)
    assert singles(t, "signal") == pair_collection(t) == singles(t, "idler")
    assert rep.H_s == rep.H_i == rep.H == 1.0


def test_singles_partner_sums():
    t = synthetic({(0, 0): 1.0, (0, 1): 1.0})
    S2 = pair_collection(t)
    assert singles(t, "signal") == pytest.approx(2 * S2)
    assert singles(t, "idler") == pytest.approx(S2)


def test_three_equal_modes():
    rep = heralding(synthetic({(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0}))
    assert rep.H_s == pytest.approx(0.5)
    assert rep.H_i == pytest.approx(0.5)
    assert rep.H == pytest.approx(0.5)


def test_degenerate_and_empty_errors():
    with pytest.raises(DegenerateInputError):
        heralding(synthetic({(1, 1): 1.0}))
    with pytest.raises(EmptySupportError):
        pair_collection(synthetic({(0, 0): 1.0}), FilterWindow.rect(1.0, center=50.0))
    with pytest.raises(ValueError):
        FilterWindow.rect(0.0)
    with pytest.raises(ValueError):
        singles(synthetic({(0, 0): 1.0}), "pump")


def test_relative_brightness():
    assert relative_brightness(3.0, 3.0) == 1.0
    assert relative_brightness(1.5, 3.0) == 0.5
    with pytest.raises(ValueError):
        relative_brightness(3.1, 3.0)


def test_fractional_edge_weights_integrate_linear_interpolant():
    grid = np.linspace(0, 1, 11)
    w = filter_weights(grid, FilterWindow.rect(0.33, center=0.5))
    # integral of f(x) = x over [0.335, 0.665] is exact for the linear interpolant
    assert w @ grid == pytest.approx(0.5 * (0.665 ** 2 - 0.335 ** 2), rel=1e-12)
    assert w.sum() == pytest.approx(0.33, rel=1e-12)
    assert np.allclose(filter_weights(grid, FilterWindow.rect(10.0)), trapezoid_weights(grid))


@settings(max_examples=40, deadline=None)
@given(w1=st.floats(0.05, 12.0), extra=st.floats(0.0, 5.0), c=st.floats(-3.0, 3.0))
def test_widening_never_decreases(w1, extra, c):
    omega = np.linspace(-5, 5, 41)
    t = synthetic({(0, 0): np.exp(-omega ** 2), (0, 1): omega ** 2 * np.exp(-omega ** 2 / 2),
                   (1, 0): 0.3 + 0 * omega}, omega)
    small, large = FilterWindow.rect(w1, c), FilterWindow.rect(w1 + extra, c)
    try:
        a = heralding(t, small)
    except (EmptySupportError, DegenerateInputError):
        return
    b = heralding(t, large)
    assert b.S2 >= a.S2 - 1e-15
    assert b.S1_s >= a.S1_s - 1e-15
    assert b.S1_i >= a.S1_i - 1e-15


@pytest.fixture(scope="module")
def focused_table():
    return build_table(ktp_source("type2", 0.04, xi=(2.0, 3.0, 3.0)))


@settings(max_examples=20, deadline=None)
@given(scale=st.floats(1e-6, 1e6))
def test_heralding_scale_invariant(focused_table, scale):
    t = focused_table
    scaled = ModeAmplitudeTable(t.config, t.amplitudes * scale, t.omega, t.grid_weights)
    assert heralding(scaled).H == pytest.approx(heralding(t).H, rel=1e-12)


@pytest.mark.parametrize("xi", [(0.02, 0.02, 0.02), (0.5, 2.0, 2.0), (10, 1, 1), (3.0, 3.0, 3.0)])
@pytest.mark.parametrize("width", [None, 6.4, 40.0])
def test_report_invariants(xi, width):
    t = build_table(ktp_source("type2", 0.04, xi=xi))
    k = int(np.argmax(t.density(0, 0)))
    window = None if width is None else FilterWindow.rect(width, t.omega[k])
    rep = heralding(t, window)
    assert 0 < rep.H_s <= 1 and 0 < rep.H_i <= 1 and 0 < rep.H <= 1
    assert rep.H == np.sqrt(rep.H_s * rep.H_i)
    assert rep.S2 <= min(rep.S1_s, rep.S1_i)


def test_narrowband_limit_type2():
    t = build_table(ktp_source("type2", 0.04, xi=(2.8, 2.8, 2.8)))
    k = int(np.argmax(t.density(0, 0)))
    h = t.omega[1] - t.omega[0]
    narrow = heralding(t, FilterWindow.rect(h, t.omega[k]))
    assert narrow.H > 0.95
    assert narrow.H > heralding(t).H


def test_asymmetric_arms_differ():
    t = build_table(ktp_source("type2", 0.04, xi=(2.8, 2.8, 2.8)))
    s, i = singles(t, "signal"), singles(t, "idler")
    assert abs(s - i) / max(s, i) > 1e-3


def test_pair_collection_ratio_against_direct_quadrature():
    # both integrals on one coarse grid, amplitudes from the two independent methods
    grid = uniform_grid(-120.0, 40.0, 4.0)
    ratios = []
    for method in ("slice", "direct"):
        vals = []
        for xi in (2.82, 0.02):
            cfg = ktp_source("type2", 0.04, xi=(xi,) * 3, omega_grid=grid)
            dens = np.array([abs(spectral_amplitude(cfg, 0, 0, w, method)) ** 2 for w in grid])
            vals.append(trapezoid_weights(grid) @ dens)
        ratios.append(vals[0] / vals[1])
    assert ratios[0] == pytest.approx(ratios[1], rel=0.01)


def test_csv_rows():
    cfg = ktp_source("type2", 0.04, xi=(1, 1, 1), p_max=1)
    rep = heralding(build_table(cfg))
    rows = efficiency_rows([(cfg, None, rep)])
    assert len(rows[0]) == 11
    assert rows[0][3] == "" and rows[0][-1] == ""
