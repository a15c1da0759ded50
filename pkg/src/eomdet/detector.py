"""End-to-end figure of merit of the microwave photodetector."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .errors import ApproximationOutOfRange, NonPositiveParameter
from .params import DerivedSystem
from .pulse import GaussianPulse, converted_photons, noise_photons
from .scattering import b_coeff_dc, dc_power_coefficients

__all__ = [
    "DetectorModel",
    "Detection",
    "eta_eff",
    "thermal_counts",
    "thermal_counts_band",
    "detected_photons",
    "NARROWBAND_LIMIT",
]

# largest W / W_c for which the delta-function pulse approximation is offered
NARROWBAND_LIMIT = 0.3


@dataclass(frozen=True)
class DetectorModel:
    """Optical photodetector: efficiency ``eta`` and bandwidth in rad/s."""

    eta: float = 1.0
    bandwidth: float = 2 * math.pi * 10e9

    def __post_init__(self):
        if not (0.0 <= self.eta <= 1.0):
            raise NonPositiveParameter("eta", self.eta, "in [0, 1]")
        if not (self.bandwidth > 0):
            raise NonPositiveParameter("bandwidth", self.bandwidth)


@dataclass(frozen=True)
class Detection:
    approx: Optional[float]
    exact: Optional[float]

    @property
    def discrepancy(self) -> Optional[float]:
        if self.approx is None or self.exact is None:
            return None
        return self.exact - self.approx


def eta_eff(sys: DerivedSystem, det: DetectorModel) -> float:
    return det.eta * b_coeff_dc(sys)


def thermal_counts(sys: DerivedSystem) -> float:
    """Point-value thermal floor ``|C(0)|**2 n_b + |D(0)|**2 n_w``."""
    dc = dc_power_coefficients(sys)
    return dc["C"] * sys.n_b_T + dc["D"] * sys.n_w_T


def thermal_counts_band(sys: DerivedSystem, band: Optional[float] = None) -> float:
    """Thermal photons in one detection window of ``|w| <= band`` (default W_c)."""
    value, _ = noise_photons(sys, band)
    return value


def _check_bandwidth(sys: DerivedSystem, det: DetectorModel):
    if sys.W_c is not None and not sys.W_c < 0.1 * det.bandwidth:
        warnings.warn(
            f"converter bandwidth {sys.W_c:.3g} rad/s is not small against the detector "
            f"bandwidth {det.bandwidth:.3g} rad/s",
            stacklevel=3,
        )


def detected_photons(
    sys: DerivedSystem,
    pulse: GaussianPulse,
    det: DetectorModel,
    approx: bool = True,
    exact: bool = True,
    noise: bool = True,
    band: Optional[float] = None,
) -> Detection:
    """Mean detected photons per pulse by the narrowband formula and by quadrature.

    ``approx`` is ``eta_eff n_p + eta N_thermal``; ``exact`` is ``eta`` times
    the integrated converted signal plus the band-averaged noise count. Requesting the
    approximation for a pulse wider than ``0.3 W_c`` raises
    :class:`ApproximationOutOfRange`.
    """
    _check_bandwidth(sys, det)
    a = e = None
    if approx:
        if sys.W_c is not None and pulse.W > NARROWBAND_LIMIT * sys.W_c:
            raise ApproximationOutOfRange(
                f"W/W_c = {pulse.W / sys.W_c:.3g} exceeds {NARROWBAND_LIMIT}; use the exact path"
            )
        a = eta_eff(sys, det) * pulse.n_p
        if noise:
            a += det.eta * thermal_counts(sys)
    if exact:
        e = det.eta * converted_photons(sys, pulse, noise=noise, band=band).total
    return Detection(approx=a, exact=e)
