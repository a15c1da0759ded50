from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eomdet.detector import (
    NARROWBAND_LIMIT,
    DetectorModel,
    detected_photons,
    eta_eff,
    thermal_counts,
    thermal_counts_band,
)
from eomdet.errors import ApproximationOutOfRange, NonPositiveParameter
from eomdet.params import derive, from_cooperativities
from eomdet.pulse import GaussianPulse

from helpers import ref_params, log_uniform


def _matched(Gamma, eta_w=1.0, eta_o=1.0, n_b=0.0, n_w=0.0):
    sys = from_cooperativities(Gamma, Gamma, eta_w, eta_o, gamma_M=100.0, kappa_w=1e6, kappa_o=3e6)
    return replace(sys, n_b_T=n_b, n_w_T=n_w)


@pytest.mark.parametrize(
    "Gamma,eta,expected",
    [(50.0, 1.0, 10000.0 / 10201.0), (50.0, 0.5, 5000.0 / 10201.0), (1.0, 0.9, 0.4), (1.0, 0.0, 0.0)],
)
def test_eta_eff_values(Gamma, eta, expected):
    assert eta_eff(_matched(Gamma), DetectorModel(eta=eta)) == pytest.approx(expected, rel=1e-15, abs=0)


def test_eta_eff_includes_coupling_fractions():
    assert eta_eff(_matched(50.0, 0.9, 0.8), DetectorModel(0.5)) == pytest.approx(
        0.5 * 0.9 * 0.8 * 10000.0 / 10201.0, rel=1e-15
    )


def test_detector_validation():
    with pytest.raises(NonPositiveParameter):
        DetectorModel(eta=1.2)
    with pytest.raises(NonPositiveParameter):
        DetectorModel(bandwidth=0.0)


@pytest.mark.parametrize("Gamma", [0.5, 1.0, 7.0, 300.0])
def test_thermal_counts_mechanical_closed_form(Gamma):
    sys = _matched(Gamma, n_b=1.0)
    assert thermal_counts(sys) == pytest.approx(4 * Gamma / (1 + 2 * Gamma) ** 2, rel=1e-14)


def test_thermal_counts_vanish_at_large_cooperativity():
    values = [thermal_counts(_matched(g, n_b=1e4, n_w=10.0)) for g in np.geomspace(1, 1e8, 9)]
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-3


def test_thermal_counts_reference(ref):
    assert thermal_counts(ref) == pytest.approx(0.00166865, rel=1e-5)
    assert thermal_counts_band(ref) == pytest.approx(0.012892, rel=1e-4)


def test_approximation_guard(ref):
    wide = GaussianPulse(4.0, 0.31 * ref.W_c)
    with pytest.raises(ApproximationOutOfRange):
        detected_photons(ref, wide, DetectorModel())
    exact = detected_photons(ref, wide, DetectorModel(), approx=False)
    assert exact.approx is None and exact.exact > 0
    assert exact.discrepancy is None
    ok = detected_photons(ref, GaussianPulse(4.0, NARROWBAND_LIMIT * ref.W_c), DetectorModel(), exact=False)
    assert ok.approx > 0


@pytest.mark.parametrize("n_p", [1.0, 2.0, 4.0, 8.0])
def test_signal_linear_in_photon_number(n_p):
    sys = _matched(50.0)
    det = DetectorModel(0.7)
    one = detected_photons(sys, GaussianPulse(1.0, 1e-3 * sys.W_c), det, noise=False)
    many = detected_photons(sys, GaussianPulse(n_p, 1e-3 * sys.W_c), det, noise=False)
    assert many.approx == pytest.approx(n_p * one.approx, rel=1e-15)
    assert many.exact == pytest.approx(n_p * one.exact, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(log_uniform(0.1, 1e3), st.floats(0.05, 1.0), st.floats(1.0, 20.0), st.floats(1.01, 2.0))
def test_monotone_in_inputs(Gamma, eta, n_p, factor):
    sys = _matched(Gamma, n_b=50.0, n_w=1.0)
    pulse = GaussianPulse(n_p, 1e-2 * sys.W_c)
    base = detected_photons(sys, pulse, DetectorModel(eta))
    more_light = detected_photons(sys, GaussianPulse(n_p * factor, pulse.W), DetectorModel(eta))
    better = detected_photons(sys, pulse, DetectorModel(min(1.0, eta * factor)))
    hotter = detected_photons(replace(sys, n_b_T=50.0 * factor, n_w_T=factor), pulse, DetectorModel(eta))
    for other in (more_light, hotter):
        assert other.approx > base.approx and other.exact > base.exact
    assert better.approx >= base.approx and better.exact >= base.exact


def test_temperature_raises_counts():
    cold = derive(ref_params(T=0.1))
    warm = derive(ref_params(T=4.0))
    pulse = GaussianPulse(4.0, 1e-2 * warm.W_c)
    assert detected_photons(warm, pulse, DetectorModel()).approx > detected_photons(cold, pulse, DetectorModel()).approx


def test_dark_counts(ref):
    dark = detected_photons(ref, GaussianPulse(0.0, 0.01 * ref.W_c), DetectorModel(0.5))
    assert dark.approx == pytest.approx(0.5 * thermal_counts(ref), rel=1e-15)
    assert dark.exact == pytest.approx(0.5 * thermal_counts_band(ref), rel=1e-10)


def test_narrowband_agreement():
    sys = _matched(50.0, n_b=10.0)
    pulse = GaussianPulse(4.0, 1e-4 * sys.W_c)
    out = detected_photons(sys, pulse, DetectorModel(0.8), noise=False)
    assert abs(out.discrepancy) < 1e-6 * out.approx


def test_bandwidth_warning():
    sys = _matched(50.0)
    with pytest.warns(UserWarning):
        detected_photons(sys, GaussianPulse(1.0, 1e-2 * sys.W_c), DetectorModel(bandwidth=sys.W_c), exact=False)
