from dataclasses import replace

import numpy as np
import pytest

from eomdet.detector import DetectorModel, eta_eff
from eomdet.errors import NonPositiveParameter, TargetUnreachable
from eomdet.params import from_cooperativities, from_couplings, implied_pump_powers, with_cooperativities
from eomdet.pulse import GaussianPulse, converted_photons
from eomdet.sweep import (
    THREADS_ENV,
    GridSpec,
    efficiency_surface,
    find_min_cooperativity,
    ratio_surface,
    thread_count,
)

BASE = from_cooperativities(1.0, 1.0, gamma_M=100.0, kappa_w=1e6, kappa_o=3e6)
SMALL = GridSpec((1e-2, 1e3), (1e-2, 1e3), points=11)


def test_grid_axes():
    g = GridSpec(points=101)
    assert g.gamma_w[0] == pytest.approx(1e-2) and g.gamma_w[-1] == pytest.approx(1e3)
    assert g.gamma_w[50] == pytest.approx(10**0.5, rel=1e-12)
    lin = GridSpec((0.0, 10.0), (0.0, 10.0), points=11, scale="linear")
    assert np.array_equal(lin.gamma_o, np.arange(11.0))


@pytest.mark.parametrize(
    "kw", [dict(scale="cubic"), dict(points=1), dict(points=2.5), dict(gamma_w_range=(0.0, 1.0))]
)
def test_grid_validation(kw):
    with pytest.raises((ValueError, NonPositiveParameter)):
        GridSpec(**kw)


def test_efficiency_surface_zero_row_and_closed_form():
    grid = GridSpec((0.0, 100.0), (0.0, 100.0), points=21, scale="linear")
    surf = efficiency_surface(BASE, DetectorModel(0.9), grid, workers=1)
    assert surf.values.shape == (21, 21)
    assert np.all(surf.values[0] == 0) and np.all(surf.values[:, 0] == 0)
    g = grid.gamma_w
    diag = np.diag(surf.values)
    assert np.allclose(diag, 0.9 * 4 * g**2 / (1 + 2 * g) ** 2, rtol=1e-14, atol=0)


def test_efficiency_argmax_is_impedance_match():
    grid = GridSpec((0.0, 200.0), (0.0, 200.0), points=401, scale="linear")
    surf = efficiency_surface(BASE, DetectorModel(), grid, workers=4)
    for j in (20, 100, 300):
        go = grid.gamma_o[j]
        best = grid.gamma_w[np.argmax(surf.values[:, j])]
        assert abs(best - (1 + go)) <= 0.5


def test_ratio_tracks_efficiency_in_narrowband_limit():
    pulse = GaussianPulse(4.0, 1.0)
    ratio = ratio_surface(BASE, pulse, SMALL, W_over_Wc=1e-3, workers=2).values
    eff = efficiency_surface(BASE, DetectorModel(), SMALL, workers=2).values
    assert np.max(np.abs(ratio - eff)) < 1e-5


def test_ratio_zero_photons():
    surf = ratio_surface(BASE, GaussianPulse(0.0, 1.0), SMALL, noise=True, W_over_Wc=0.1)
    assert np.all(surf.values == 0)
    assert surf.kind == "ratio"


def test_ratio_pointwise_recomputation():
    pulse = GaussianPulse(2.0, 1.0)
    surf = ratio_surface(BASE, pulse, SMALL, W_over_Wc=0.1, workers=3)
    rng = np.random.default_rng(5)
    for i, j in rng.integers(0, 11, size=(6, 2)):
        sys = with_cooperativities(BASE, SMALL.gamma_w[i], SMALL.gamma_o[j])
        single = converted_photons(sys, GaussianPulse(2.0, 0.1 * sys.W_c), noise=False).signal / 2.0
        assert surf.values[i, j] == pytest.approx(single, rel=1e-9, abs=1e-15)


def test_ratio_fixed_width_meta():
    surf = ratio_surface(BASE, GaussianPulse(1.0, 5e3), SMALL)
    assert surf.metadata["W"] == 5e3 and surf.metadata["W_over_Wc"] is None


def test_ratio_symmetric_for_equal_linewidths():
    base = from_cooperativities(1.0, 1.0, gamma_M=100.0, kappa_w=2e6, kappa_o=2e6)
    surf = ratio_surface(base, GaussianPulse(4.0, 1.0), SMALL, W_over_Wc=0.05).values
    assert np.max(np.abs(surf - surf.T)) < 1e-10


def test_noise_raises_ratio():
    hot = replace(BASE, n_b_T=100.0, n_w_T=1.0)
    pulse = GaussianPulse(4.0, 1.0)
    off = ratio_surface(hot, pulse, SMALL, noise=False, W_over_Wc=0.1).values
    on = ratio_surface(hot, pulse, SMALL, noise=True, W_over_Wc=0.1).values
    assert np.all(on > off)


def test_thread_count_independence(monkeypatch):
    pulse = GaussianPulse(4.0, 1.0)
    one = ratio_surface(BASE, pulse, SMALL, W_over_Wc=0.1, workers=1).values
    many = ratio_surface(BASE, pulse, SMALL, W_over_Wc=0.1, workers=8).values
    assert np.array_equal(one, many)
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_count() == 3
    assert np.array_equal(ratio_surface(BASE, pulse, SMALL, W_over_Wc=0.1).values, one)
    monkeypatch.setenv(THREADS_ENV, "0")
    with pytest.raises(ValueError):
        thread_count()


@pytest.mark.parametrize("target,expected", [(4.0 / 9.0, 1.0), (10000.0 / 10201.0, 50.0)])
def test_find_min_cooperativity(target, expected):
    assert find_min_cooperativity(target, DetectorModel(), BASE) == pytest.approx(expected, rel=1e-10)


def test_find_min_cooperativity_reaches_target():
    det = DetectorModel(0.9)
    g = find_min_cooperativity(0.8, det, BASE)
    assert eta_eff(with_cooperativities(BASE, g, g), det) >= 0.8
    assert eta_eff(with_cooperativities(BASE, g * (1 - 1e-9), g * (1 - 1e-9)), det) < 0.8


@pytest.mark.parametrize("target", [1.0, 0.95])
def test_unreachable_targets(target):
    with pytest.raises(TargetUnreachable):
        find_min_cooperativity(target, DetectorModel(0.95), BASE)


def test_pump_report(ref):
    surf = efficiency_surface(ref, DetectorModel(), SMALL, workers=1)
    P_w, P_o = implied_pump_powers(ref, ref.G_w, ref.G_o)
    assert P_w == pytest.approx(35e-3, rel=1e-10)
    scale = 1e3 / ref.Gamma_w
    assert surf.metadata["max_implied_P_w"] == pytest.approx(35e-3 * scale, rel=1e-10)
    sys = from_couplings(1e4, 1e4, 100.0, 1e6, 3e6, omega_M=6.3e7, omega_w=6.3e10, omega_o=1.77e15)
    assert efficiency_surface(sys, DetectorModel(), SMALL, workers=1).metadata["max_implied_P_w"] is None
