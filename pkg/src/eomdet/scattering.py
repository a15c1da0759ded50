"""Frequency-domain scattering of the three-mode beam-splitter network.

With modes ordered (b, c_w, c_o) the Langevin equations read, in the
frame of the linearized Hamiltonian,

    (gamma_M - i w) b   + i G_w c_w + i G_o c_o = sqrt(2 gamma_M) b_in
    (kappa_w - i w) c_w + i G_w b               = sqrt(2 kw_ext) c_w,ext + sqrt(2 kw_int) c_w,int
    (kappa_o - i w) c_o + i G_o b               = sqrt(2 ko_ext) c_o,ext + sqrt(2 ko_int) c_o,int

and the optical output is ``c_o,out = sqrt(2 ko_ext) c_o - c_o,ext``,
written as ``-(A c_o,ext + B c_w,ext + C b_in + D c_w,int + E c_o,int)``.

The drift matrix is arrow shaped (the cavities only talk through the
mechanics), so the solve below eliminates the cavities and divides by the
dressed mechanical response. ``omega`` may be an array; everything
broadcasts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import MissingParameter, SingularSystem
from .params import DerivedSystem, require

ArrayLike = Union[float, np.ndarray]

__all__ = [
    "ScatteringRow",
    "Susceptibilities",
    "susceptibilities",
    "scattering_row",
    "microwave_output_row",
    "b_coeff_dc",
    "dc_power_coefficients",
    "sum_rule_defect",
    "optical_row_arrays",
    "transmission_power",
]

_DYNAMICS = ("gamma_M", "kappa_w", "kappa_o", "G_w", "G_o")


@dataclass(frozen=True)
class ScatteringRow:
    omega: ArrayLike
    A: ArrayLike
    B: ArrayLike
    C: ArrayLike
    D: ArrayLike
    E: ArrayLike

    def powers(self):
        return tuple(np.abs(x) ** 2 for x in (self.A, self.B, self.C, self.D, self.E))


@dataclass(frozen=True)
class Susceptibilities:
    chi_M: ArrayLike
    chi_w: ArrayLike
    chi_o: ArrayLike


def susceptibilities(sys: DerivedSystem, omega: ArrayLike) -> Susceptibilities:
    require(sys, "gamma_M", "kappa_w", "kappa_o", context="susceptibilities")
    w = np.asarray(omega, dtype=float)
    return Susceptibilities(
        chi_M=1.0 / (sys.gamma_M - 1j * w),
        chi_w=1.0 / (sys.kappa_w - 1j * w),
        chi_o=1.0 / (sys.kappa_o - 1j * w),
    )


def optical_row_arrays(gamma_M, kw_ext, kw_int, ko_ext, ko_int, G_w, G_o, omega):
    """Optical-output coefficients (A, B, C, D, E) from raw rates, broadcasting.

    This is the hot path shared by spectra and surface sweeps.
    """
    w = np.asarray(omega, dtype=float)
    chi_w = 1.0 / (kw_ext + kw_int - 1j * w)
    chi_o = 1.0 / (ko_ext + ko_int - 1j * w)
    dressed = (gamma_M - 1j * w) + G_w**2 * chi_w + G_o**2 * chi_o
    if np.any(dressed == 0):
        raise SingularSystem("dressed mechanical response vanishes")
    # b = (in_b - i G_w chi_w in_w - i G_o chi_o in_o) / dressed
    # c_o = chi_o (in_o - i G_o b)
    to_co_from_b = -1j * G_o * chi_o
    b_from_in_w = -1j * G_w * chi_w / dressed
    b_from_in_o = -1j * G_o * chi_o / dressed
    co_from_in_o = chi_o + to_co_from_b * b_from_in_o
    co_from_in_w = to_co_from_b * b_from_in_w
    co_from_in_b = to_co_from_b / dressed
    r = np.sqrt(2 * ko_ext)
    A = 1.0 - r * co_from_in_o * np.sqrt(2 * ko_ext)
    B = -r * co_from_in_w * np.sqrt(2 * kw_ext)
    C = -r * co_from_in_b * np.sqrt(2 * gamma_M)
    D = -r * co_from_in_w * np.sqrt(2 * kw_int)
    E = -r * co_from_in_o * np.sqrt(2 * ko_int)
    return A, B, C, D, E


def transmission_power(sys: DerivedSystem, omega: ArrayLike) -> np.ndarray:
    """``|B(omega)|**2``."""
    return np.abs(scattering_row(sys, omega).B) ** 2


def scattering_row(sys: DerivedSystem, omega: ArrayLike) -> ScatteringRow:
    """Optical-output scattering coefficients at detuning ``omega`` (rad/s)."""
    require(sys, *_DYNAMICS, "kappa_w_ext", "kappa_o_ext", context="scattering_row")
    A, B, C, D, E = optical_row_arrays(
        sys.gamma_M,
        sys.kappa_w_ext,
        sys.kappa_w_int,
        sys.kappa_o_ext,
        sys.kappa_o_int,
        sys.G_w,
        sys.G_o,
        omega,
    )
    return ScatteringRow(omega, A, B, C, D, E)


def microwave_output_row(sys: DerivedSystem, omega: ArrayLike) -> ScatteringRow:
    """Microwave-output row ``c_w,out = sqrt(2 kw_ext) c_w - c_w,ext``.

    Fields are relabelled by channel role: ``A`` is the microwave reflection,
    ``B`` the coefficient of the optical external input, ``C`` the
    mechanical bath, ``D`` the optical internal loss and ``E`` the
    microwave internal loss. Same overall minus convention as the optical row.
    """
    require(sys, *_DYNAMICS, "kappa_w_ext", "kappa_o_ext", context="microwave_output_row")
    # mirror image of the optical solve with the two cavities swapped
    A, B, C, D, E = optical_row_arrays(
        sys.gamma_M,
        sys.kappa_o_ext,
        sys.kappa_o_int,
        sys.kappa_w_ext,
        sys.kappa_w_int,
        sys.G_o,
        sys.G_w,
        omega,
    )
    return ScatteringRow(omega, A, B, C, D, E)


def dc_power_coefficients(sys: DerivedSystem) -> dict:
    """Closed forms of ``|A(0)|**2 ... |E(0)|**2`` in terms of cooperativities.

    With ``S = 1 + Gamma_w + Gamma_o`` and coupling fractions ``eta_j``::

        A(0) = 1 - 2 eta_o (1 + Gamma_w) / S
        B(0) = 2 sqrt(eta_o eta_w Gamma_o Gamma_w) / S
        C(0) = 2 sqrt(eta_o Gamma_o) / S
        D(0) = 2 sqrt(eta_o (1 - eta_w) Gamma_o Gamma_w) / S
        E(0) = 2 sqrt(eta_o (1 - eta_o)) (1 + Gamma_w) / S
    """
    require(sys, "Gamma_w", "Gamma_o", context="dc_power_coefficients")
    Gw, Go = sys.Gamma_w, sys.Gamma_o
    eo, ew = sys.eta_cpl_o, sys.eta_cpl_w
    S = 1.0 + Gw + Go
    return {
        "A": (1.0 - 2.0 * eo * (1.0 + Gw) / S) ** 2,
        "B": 4.0 * eo * ew * Go * Gw / S**2,
        "C": 4.0 * eo * Go / S**2,
        "D": 4.0 * eo * (1.0 - ew) * Go * Gw / S**2,
        "E": 4.0 * eo * (1.0 - eo) * (1.0 + Gw) ** 2 / S**2,
    }


def b_coeff_dc(sys: DerivedSystem) -> float:
    """``|B(0)|**2 = 4 eta_o eta_w Gamma_w Gamma_o / (1 + Gamma_w + Gamma_o)**2``."""
    if sys.Gamma_w is None or sys.Gamma_o is None:
        raise MissingParameter([n for n in ("Gamma_w", "Gamma_o") if getattr(sys, n) is None], "b_coeff_dc")
    return dc_power_coefficients(sys)["B"]


def sum_rule_defect(row: ScatteringRow):
    total = sum(row.powers())
    return np.abs(total - 1.0)
