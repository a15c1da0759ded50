import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eomdet.errors import MissingParameter, NonPositiveFrequency, NonPositiveParameter, ResolvedSidebandViolation
from eomdet.params import (
    HBAR,
    K_B,
    coherence_margin,
    derive,
    from_cooperativities,
    from_couplings,
    implied_pump_powers,
    thermal_occupation,
    with_cooperativities,
    zero_point_fluctuation,
)

from helpers import OMEGA_M, ref_params, log_uniform

# high-precision (mpmath, 40 digits, exact SI hbar and k_B) reference values
GAMMA_M_REF = 174.53292519943295769
X_ZPF_REF = 2.8968976304297555027e-16
G_O_REF = 512.85204529063084242
N_10GHZ_4K = 7.8446436743576658292
N_10MHZ_4K = 8334.1476593294522594
N_1GHZ_50MK = 0.62061645763779076275


def test_mechanical_damping_from_quality_factor():
    sys = derive(ref_params())
    assert sys.gamma_M == pytest.approx(GAMMA_M_REF, rel=1e-14)
    assert sys.gamma_M / (2 * math.pi) == pytest.approx(27.78, abs=5e-3)


def test_zero_point_fluctuation():
    assert zero_point_fluctuation(10e-12, OMEGA_M) == pytest.approx(X_ZPF_REF, rel=1e-12)


def test_optomechanical_coupling_from_cavity_length():
    assert derive(ref_params()).g_o == pytest.approx(G_O_REF, rel=1e-12)


@pytest.mark.parametrize(
    "omega,T,expected",
    [
        (2 * math.pi * 10e9, 4.0, N_10GHZ_4K),
        (OMEGA_M, 4.0, N_10MHZ_4K),
        (2 * math.pi * 1e9, 0.05, N_1GHZ_50MK),
    ],
)
def test_thermal_occupation_values(omega, T, expected):
    assert thermal_occupation(omega, T) == pytest.approx(expected, rel=1e-12)


def test_thermal_occupation_rayleigh_jeans_limit():
    n = thermal_occupation(OMEGA_M, 4.0)
    rj = K_B * 4.0 / (HBAR * OMEGA_M)
    assert abs(n / rj - 1) < 1e-4


@pytest.mark.parametrize("omega", [1.0, OMEGA_M, 2 * math.pi * 1e15])
def test_thermal_occupation_zero_temperature(omega):
    assert thermal_occupation(omega, 0.0) == 0.0


def test_thermal_occupation_rejects_bad_frequency():
    with pytest.raises(NonPositiveFrequency):
        thermal_occupation(0.0, 1.0)
    with pytest.raises(NonPositiveFrequency):
        thermal_occupation(-1.0, 1.0)


@settings(max_examples=200)
@given(log_uniform(1e3, 1e15), log_uniform(1e-3, 1e3), st.floats(1.001, 10.0))
def test_thermal_occupation_monotone(omega, T, factor):
    n = thermal_occupation(omega, T)
    if n == 0.0:
        return
    assert thermal_occupation(omega * factor, T) < n
    assert thermal_occupation(omega, T * factor) > n


def test_thermal_occupation_grid_monotone():
    rng = np.random.default_rng(7)
    omegas = np.sort(10 ** rng.uniform(6, 12, 200))
    temps = np.sort(10 ** rng.uniform(-2, 2, 200))
    assert np.all(np.diff(thermal_occupation(omegas, 4.0)) < 0)
    assert np.all(np.diff(thermal_occupation(2 * math.pi * 1e9, temps)) > 0)


def test_derive_reference_operating_point():
    sys = derive(ref_params())
    assert sys.kappa_w_ext + sys.kappa_w_int == sys.kappa_w
    assert sys.kappa_o_int == 0.0
    assert sys.G_w == pytest.approx(sys.g_w * math.sqrt(sys.N_w), rel=1e-15)
    assert sys.n_b_T >= sys.n_w_T >= sys.n_o_T >= 0
    # one-decade check of the quoted bandwidth relation: 0.1 W_c = 2 pi 1.7 MHz
    assert 0.1 * sys.W_c == pytest.approx(2 * math.pi * 1.7e6, rel=1e-4)


def test_derive_zero_pump_is_bare_mechanics():
    sys = derive(ref_params(P_w=0.0, P_o=0.0))
    assert sys.N_w == sys.N_o == 0
    assert sys.G_w == sys.G_o == 0
    assert sys.Gamma_w == sys.Gamma_o == 0
    assert sys.W_c == sys.gamma_M


@settings(max_examples=300)
@given(
    m=log_uniform(1e-15, 1e-6),
    Q=log_uniform(1.0, 1e8),
    kw_frac=st.floats(1e-3, 0.99),
    ko_frac=st.floats(1e-3, 0.99),
    P_w=log_uniform(1e-9, 1.0),
    P_o=log_uniform(1e-9, 1.0),
    g_w=log_uniform(1e-3, 1e3),
    eta_w=st.floats(0, 1),
    eta_o=st.floats(0, 1),
)
def test_derive_definition_round_trips(m, Q, kw_frac, ko_frac, P_w, P_o, g_w, eta_w, eta_o):
    p = ref_params(m=m, Q=Q, kappa_w=kw_frac * OMEGA_M, kappa_o=ko_frac * OMEGA_M, P_w=P_w, P_o=P_o,
                    g_w=g_w, eta_cpl_w=eta_w, eta_cpl_o=eta_o)
    sys = derive(p)
    for G, Gam, kappa in ((sys.G_w, sys.Gamma_w, sys.kappa_w), (sys.G_o, sys.Gamma_o, sys.kappa_o)):
        if G > 0:
            assert Gam * kappa * sys.gamma_M == pytest.approx(G**2, rel=1e-12)
    assert sys.W_c / sys.gamma_M - 1 == pytest.approx(sys.Gamma_w + sys.Gamma_o, rel=1e-12, abs=1e-15)
    assert sys.kappa_w_ext + sys.kappa_w_int == pytest.approx(sys.kappa_w, rel=1e-15)
    assert derive(p) == sys


@pytest.mark.parametrize(
    "field,value",
    [("m", 0.0), ("omega_M", -1.0), ("kappa_o", 0.0), ("L", float("nan")), ("P_w", -1e-3), ("Q", 0.5)],
)
def test_invalid_physical_params_name_the_field(field, value):
    with pytest.raises(NonPositiveParameter) as exc:
        ref_params(**{field: value})
    assert exc.value.field == field


def test_coupling_fraction_range():
    with pytest.raises(NonPositiveParameter):
        ref_params(eta_cpl_w=1.5)


def test_resolved_sideband_is_a_warning():
    with pytest.warns(ResolvedSidebandViolation):
        sys = derive(ref_params(kappa_o=2 * OMEGA_M))
    assert sys.G_o > 0


def test_coherence_margin_reference():
    ratio_w, ratio_o = coherence_margin(derive(ref_params()), 4.0)
    assert ratio_w == pytest.approx(0.014049098940872, rel=1e-9)
    assert ratio_o == pytest.approx(0.44457101647076, rel=1e-9)
    assert ratio_w < 1 and ratio_o < 1


def test_coherence_margin_limits():
    sys = derive(ref_params(P_w=0.0))
    assert coherence_margin(sys, 4.0)[0] == math.inf
    assert coherence_margin(derive(ref_params()), 0.0) == (0.0, 0.0)


def test_lower_tiers_leave_fields_empty():
    sys = from_cooperativities(1.0, 2.0)
    assert sys.G_w is None and sys.W_c is None
    with pytest.raises(MissingParameter):
        coherence_margin(sys, 1.0)
    full = from_cooperativities(1.0, 2.0, gamma_M=10.0, kappa_w=1e5, kappa_o=2e5)
    assert full.G_w == pytest.approx(math.sqrt(1e6), rel=1e-15)
    assert full.W_c == pytest.approx(40.0)


def test_tiers_agree():
    phys = derive(ref_params())
    mid = from_couplings(phys.G_w, phys.G_o, phys.gamma_M, phys.kappa_w, phys.kappa_o)
    low = from_cooperativities(phys.Gamma_w, phys.Gamma_o, gamma_M=phys.gamma_M,
                               kappa_w=phys.kappa_w, kappa_o=phys.kappa_o)
    for name in ("Gamma_w", "Gamma_o", "W_c", "G_w", "G_o"):
        assert getattr(mid, name) == pytest.approx(getattr(phys, name), rel=1e-13)
        assert getattr(low, name) == pytest.approx(getattr(phys, name), rel=1e-13)


def test_with_cooperativities_and_implied_power():
    phys = derive(ref_params())
    same = with_cooperativities(phys, phys.Gamma_w, phys.Gamma_o)
    P_w, P_o = implied_pump_powers(phys, same.G_w, same.G_o)
    assert P_w == pytest.approx(35e-3, rel=1e-10)
    assert P_o == pytest.approx(5e-3, rel=1e-10)
    moved = with_cooperativities(phys, 1.0, 4.0)
    assert moved.W_c == pytest.approx(6 * phys.gamma_M)
    assert moved.N_w is None
