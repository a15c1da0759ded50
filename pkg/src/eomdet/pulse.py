"""Gaussian microwave pulses and their converted optical spectra.

Spectral densities are in photons per rad/s so that photon numbers are
plain integrals over angular detuning. The thermal contribution is a
stationary flux density, ``sum_X |X(w)|**2 n_X / (2 pi)``; its integral
over a detection band is the band-limited noise flux in photons/s (the
correlation matrix oracle fixes the ``1/(2 pi)``).

Photon counts combine the two through a detection window holding one
temporal mode of the band ``|w| <= band``, ``tau = pi / band``. The noise
count is then the band average of ``sum_X |X(w)|**2 n_X`` and tends to the
point value at ``w = 0`` for a narrow band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import NonPositiveParameter, QuadratureNonConvergence
from .params import DerivedSystem, require
from .scattering import scattering_row

__all__ = [
    "GaussianPulse",
    "SpectrumSamples",
    "Conversion",
    "input_spectrum",
    "output_spectrum",
    "noise_density",
    "integrate_noise",
    "converted_photons",
    "sample_spectra",
    "detection_window",
    "noise_photons",
    "DEFAULT_EPSREL",
]

DEFAULT_EPSREL = 1e-12
# pulse support in units of W; exp(-2 * 8**2) is below double precision
_SUPPORT = 8.0
_PEAK_NORM = 2.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianPulse:
    """Coherent pulse with flux ``|alpha(w)|**2``, a Gaussian of standard deviation W/2."""

    n_p: float
    W: float
    delta_p: float = 0.0

    def __post_init__(self):
        if not (self.n_p >= 0):
            raise NonPositiveParameter("n_p", self.n_p, "non-negative")
        if not (self.W > 0 and math.isfinite(self.W)):
            raise NonPositiveParameter("W", self.W)
        if not math.isfinite(self.delta_p):
            raise NonPositiveParameter("delta_p", self.delta_p, "finite")


@dataclass(frozen=True)
class SpectrumSamples:
    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.shape(self.omegas) != np.shape(self.values):
            raise ValueError("frequency grid and values differ in shape")
        if np.any(np.diff(self.omegas) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(self.values < 0):
            raise ValueError("spectral density must be non-negative")

    def integral(self) -> float:
        return float(integrate.trapezoid(self.values, self.omegas))


@dataclass(frozen=True)
class Conversion:
    """Output photon budget of one pulse: converted signal plus band noise."""

    signal: float
    noise: float
    abserr: float

    @property
    def total(self) -> float:
        return self.signal + self.noise


def input_spectrum(pulse: GaussianPulse, omega):
    w = np.asarray(omega, dtype=float)
    u = (w - pulse.delta_p) / pulse.W
    return pulse.n_p * _PEAK_NORM / pulse.W * np.exp(-2.0 * u**2)


def noise_density(sys: DerivedSystem, omega, line_thermal: bool = False):
    """Thermal output flux density at detuning ``omega``.

    ``line_thermal`` additionally feeds the microwave input line with
    ``n_w_T`` (the signal port at bath temperature), adding ``|B|**2 n_w_T``.
    """
    row = scattering_row(sys, omega)
    A2, B2, C2, D2, E2 = row.powers()
    dens = C2 * sys.n_b_T + D2 * sys.n_w_T + (A2 + E2) * sys.n_o_T
    if line_thermal:
        dens = dens + B2 * sys.n_w_T
    return dens / (2.0 * math.pi)


def detection_window(band: float) -> float:
    """Duration (s) of one temporal mode of the band ``|w| <= band``."""
    if not band > 0:
        raise NonPositiveParameter("band", band)
    return math.pi / band


def output_spectrum(sys: DerivedSystem, pulse: GaussianPulse, omega, noise: bool = True,
                    band: Optional[float] = None, line_thermal: bool = False):
    """Converted signal density plus the noise counted in one detection window."""
    B2 = np.abs(scattering_row(sys, omega).B) ** 2
    out = B2 * input_spectrum(pulse, omega)
    if noise:
        tau = detection_window(sys.W_c if band is None else band)
        out = out + noise_density(sys, omega, line_thermal) * tau
    return out


def sample_spectra(sys: DerivedSystem, pulse: GaussianPulse, omegas, noise: bool = True):
    """Input and output spectra on a grid, as :class:`SpectrumSamples`."""
    omegas = np.asarray(omegas, dtype=float)
    return (
        SpectrumSamples(omegas, input_spectrum(pulse, omegas)),
        SpectrumSamples(omegas, output_spectrum(sys, pulse, omegas, noise=noise)),
    )


def _breakpoints(candidates, lo, hi):
    return sorted({float(x) for x in candidates if lo < x < hi})


def _quad(f, lo, hi, points, epsrel):
    val, err = integrate.quad(
        f, lo, hi, points=points or None, epsabs=0.0, epsrel=epsrel, limit=500, full_output=1
    )[:2]
    return val, err


def _signal(sys: DerivedSystem, pulse: GaussianPulse, epsrel: float):
    if pulse.n_p == 0:
        return 0.0, 0.0
    W, d = pulse.W, pulse.delta_p

    def f(u):
        w = d + u * W
        return _PEAK_NORM * math.exp(-2.0 * u * u) * abs(scattering_row(sys, w).B) ** 2

    scales = [sys.W_c, sys.kappa_w, sys.kappa_o]
    marks = [-d / W] + [(s * k - d) / W for s in scales for k in (-1.0, 1.0)]
    val, err = _quad(f, -_SUPPORT, _SUPPORT, _breakpoints(marks, -_SUPPORT, _SUPPORT), epsrel)
    return pulse.n_p * val, pulse.n_p * err


def integrate_noise(sys: DerivedSystem, band: float = math.inf, line_thermal: bool = False,
                    epsrel: float = DEFAULT_EPSREL):
    """``(value, abserr)`` of the noise density integrated over ``|w| <= band``."""
    require(sys, "W_c", context="integrate_noise")
    if sys.n_b_T == 0 and sys.n_w_T == 0 and sys.n_o_T == 0:
        return 0.0, 0.0
    f = lambda w: float(noise_density(sys, w, line_thermal))  # noqa: E731
    scales = [sys.W_c, sys.kappa_w, sys.kappa_o, sys.G_w, sys.G_o]
    inner = 20.0 * max(scales)
    if band <= inner:
        pts = _breakpoints([0.0] + [k * s for s in scales for k in (-1, 1)], -band, band)
        return _quad(f, -band, band, pts, epsrel)
    pts = _breakpoints([0.0] + [k * s for s in scales for k in (-1, 1)], -inner, inner)
    v0, e0 = _quad(f, -inner, inner, pts, epsrel)
    v1, e1 = _quad(f, inner, band, None, epsrel)
    v2, e2 = _quad(f, -band, -inner, None, epsrel)
    return v0 + v1 + v2, e0 + e1 + e2


def noise_photons(sys: DerivedSystem, band: Optional[float] = None, line_thermal: bool = False,
                  epsrel: float = DEFAULT_EPSREL):
    """``(value, abserr)`` of thermal photons in one detection window of the band."""
    band = sys.W_c if band is None else band
    tau = detection_window(band)
    value, err = integrate_noise(sys, band, line_thermal, epsrel)
    return value * tau, err * tau


def converted_photons(
    sys: DerivedSystem,
    pulse: GaussianPulse,
    noise: bool = True,
    band: Optional[float] = None,
    line_thermal: bool = False,
    epsrel: float = DEFAULT_EPSREL,
    tolerance: float = 1e-9,
) -> Conversion:
    """Mean optical photon number produced by one pulse.

    The signal is integrated over ``|w - delta_p| <= 8 W``; the thermal
    noise is counted in one detection window of the band ``|w| <= band``
    (default one converter bandwidth W_c). Raises :class:`QuadratureNonConvergence` when the
    estimated relative error exceeds ``tolerance``.
    """
    require(sys, "gamma_M", "kappa_w", "kappa_o", "G_w", "G_o", "W_c", context="converted_photons")
    sig, sig_err = _signal(sys, pulse, epsrel)
    nz, nz_err = 0.0, 0.0
    if noise:
        nz, nz_err = noise_photons(sys, band, line_thermal, epsrel)
    err = sig_err + nz_err
    total = sig + nz
    if err > tolerance * max(abs(total), 1e-300) and err > 0:
        raise QuadratureNonConvergence(
            f"quadrature error estimate {err:.3g} exceeds {tolerance:g} relative to {total:.6g}"
        )
    return Conversion(signal=sig, noise=nz, abserr=err)
