"""Operating point of the electro-opto-mechanical converter.

Conventions used throughout the package: every frequency and rate is an
angular quantity in rad/s. Cavity amplitudes decay as ``-kappa_j * c_j``
and the mechanical amplitude as ``-gamma_M * b``; input fields enter with
weights ``sqrt(2 kappa_j)`` and ``sqrt(2 gamma_M)``. Under this convention
the cooperativity ``Gamma_j = G_j**2 / (kappa_j * gamma_M)`` and the
converter bandwidth ``W_c = gamma_M * (1 + Gamma_w + Gamma_o)``.

Three input tiers build a :class:`DerivedSystem`:

* :func:`from_cooperativities` -- only Gamma_w, Gamma_o (plus optional rates),
* :func:`from_couplings` -- G_w, G_o and the decay rates,
* :func:`derive` -- full hardware description in :class:`PhysicalParams`.

Lower tiers leave fields they cannot determine as ``None``; operations that
need them raise :class:`~eomdet.errors.MissingParameter`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B

from .errors import (
    MissingParameter,
    NonPositiveFrequency,
    NonPositiveParameter,
    ResolvedSidebandViolation,
)

__all__ = [
    "PhysicalParams",
    "DerivedSystem",
    "derive",
    "from_couplings",
    "from_cooperativities",
    "with_cooperativities",
    "thermal_occupation",
    "coherence_margin",
    "zero_point_fluctuation",
    "implied_pump_powers",
    "require",
]


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise NonPositiveParameter(name, value)


def _nonnegative(name, value):
    if not (math.isfinite(value) and value >= 0):
        raise NonPositiveParameter(name, value, "non-negative")


def _fraction(name, value):
    if not (0.0 <= value <= 1.0):
        raise NonPositiveParameter(name, value, "in [0, 1]")


@dataclass(frozen=True)
class PhysicalParams:
    """Raw hardware description, SI units with angular frequencies."""

    m: float
    omega_M: float
    Q: float
    omega_w: float
    lambda_o: float
    L: float
    kappa_w: float
    kappa_o: float
    P_w: float
    P_o: float
    g_w: float
    T: float
    eta_cpl_w: float = 1.0
    eta_cpl_o: float = 1.0

    def __post_init__(self):
        for name in ("m", "omega_M", "omega_w", "lambda_o", "L", "kappa_w", "kappa_o"):
            _positive(name, getattr(self, name))
        # zero pump power is the "bare mechanics" limit
        for name in ("P_w", "P_o", "g_w", "T"):
            _nonnegative(name, getattr(self, name))
        if not (math.isfinite(self.Q) and self.Q >= 1):
            raise NonPositiveParameter("Q", self.Q, ">= 1")
        _fraction("eta_cpl_w", self.eta_cpl_w)
        _fraction("eta_cpl_o", self.eta_cpl_o)

    @property
    def omega_o(self) -> float:
        return 2 * math.pi * SPEED_OF_LIGHT / self.lambda_o


@dataclass(frozen=True)
class DerivedSystem:
    """Linearized operating point. Fields a builder cannot fix stay ``None``."""

    Gamma_w: Optional[float] = None
    Gamma_o: Optional[float] = None
    eta_cpl_w: float = 1.0
    eta_cpl_o: float = 1.0
    gamma_M: Optional[float] = None
    kappa_w: Optional[float] = None
    kappa_o: Optional[float] = None
    kappa_w_ext: Optional[float] = None
    kappa_w_int: Optional[float] = None
    kappa_o_ext: Optional[float] = None
    kappa_o_int: Optional[float] = None
    G_w: Optional[float] = None
    G_o: Optional[float] = None
    W_c: Optional[float] = None
    omega_M: Optional[float] = None
    omega_w: Optional[float] = None
    omega_o: Optional[float] = None
    g_w: Optional[float] = None
    g_o: Optional[float] = None
    N_w: Optional[float] = None
    N_o: Optional[float] = None
    T: Optional[float] = None
    n_b_T: float = 0.0
    n_w_T: float = 0.0
    n_o_T: float = 0.0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def has_dynamics(self) -> bool:
        """True when the full three-mode response can be solved."""
        return all(
            getattr(self, n) is not None
            for n in ("gamma_M", "kappa_w", "kappa_o", "G_w", "G_o")
        )


def require(sys: DerivedSystem, *names: str, context: str = "") -> None:
    missing = [n for n in names if getattr(sys, n) is None]
    if missing:
        raise MissingParameter(missing, context)


def thermal_occupation(omega, T):
    """Bose-Einstein occupation ``1 / (exp(hbar omega / k_B T) - 1)``.

    Accepts scalars or arrays; returns 0 at ``T = 0``.
    """
    omega_a = np.asarray(omega, dtype=float)
    T_a = np.asarray(T, dtype=float)
    if np.any(~(omega_a > 0)):
        raise NonPositiveFrequency(omega)
    if np.any(T_a < 0):
        raise NonPositiveParameter("T", T, "non-negative")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(T_a > 0, HBAR * omega_a / (K_B * np.where(T_a > 0, T_a, 1.0)), np.inf)
        n = 1.0 / np.expm1(x)
    if n.ndim == 0:
        return float(n)
    return n


def zero_point_fluctuation(m: float, omega_M: float) -> float:
    return math.sqrt(HBAR / (2 * m * omega_M))


def _thermal_triplet(T, omega_M, omega_w, omega_o, optical_thermal):
    if T is None:
        return 0.0, 0.0, 0.0
    n_b = thermal_occupation(omega_M, T) if omega_M is not None else 0.0
    n_w = thermal_occupation(omega_w, T) if omega_w is not None else 0.0
    n_o = thermal_occupation(omega_o, T) if (optical_thermal and omega_o is not None) else 0.0
    return n_b, n_w, n_o


def _split(kappa, eta):
    if kappa is None:
        return None, None
    ext = eta * kappa
    return ext, kappa - ext


def _check_sideband(omega_M, kappa_w, kappa_o):
    if omega_M is None:
        return
    for name, kappa in (("kappa_w", kappa_w), ("kappa_o", kappa_o)):
        if kappa is not None and not kappa < omega_M:
            warnings.warn(
                ResolvedSidebandViolation(
                    f"{name}={kappa:.4g} rad/s is not below omega_M={omega_M:.4g} rad/s; "
                    "the beam-splitter model does not apply"
                ),
                stacklevel=3,
            )


def _assemble(
    *,
    gamma_M,
    kappa_w,
    kappa_o,
    eta_cpl_w,
    eta_cpl_o,
    G_w=None,
    G_o=None,
    Gamma_w=None,
    Gamma_o=None,
    **extra,
) -> DerivedSystem:
    _fraction("eta_cpl_w", eta_cpl_w)
    _fraction("eta_cpl_o", eta_cpl_o)
    for name, v in (("gamma_M", gamma_M), ("kappa_w", kappa_w), ("kappa_o", kappa_o)):
        if v is not None:
            _positive(name, v)
    if Gamma_w is None and G_w is not None and gamma_M is not None and kappa_w is not None:
        Gamma_w = G_w**2 / (kappa_w * gamma_M)
    if Gamma_o is None and G_o is not None and gamma_M is not None and kappa_o is not None:
        Gamma_o = G_o**2 / (kappa_o * gamma_M)
    if G_w is None and Gamma_w is not None and gamma_M is not None and kappa_w is not None:
        G_w = math.sqrt(Gamma_w * kappa_w * gamma_M)
    if G_o is None and Gamma_o is not None and gamma_M is not None and kappa_o is not None:
        G_o = math.sqrt(Gamma_o * kappa_o * gamma_M)
    for name, v in (("Gamma_w", Gamma_w), ("Gamma_o", Gamma_o)):
        if v is not None:
            _nonnegative(name, v)
    W_c = None
    if gamma_M is not None and Gamma_w is not None and Gamma_o is not None:
        W_c = gamma_M * (1.0 + Gamma_w + Gamma_o)
    kwe, kwi = _split(kappa_w, eta_cpl_w)
    koe, koi = _split(kappa_o, eta_cpl_o)
    return DerivedSystem(
        Gamma_w=Gamma_w,
        Gamma_o=Gamma_o,
        eta_cpl_w=eta_cpl_w,
        eta_cpl_o=eta_cpl_o,
        gamma_M=gamma_M,
        kappa_w=kappa_w,
        kappa_o=kappa_o,
        kappa_w_ext=kwe,
        kappa_w_int=kwi,
        kappa_o_ext=koe,
        kappa_o_int=koi,
        G_w=G_w,
        G_o=G_o,
        W_c=W_c,
        **extra,
    )


def derive(p: PhysicalParams, optical_thermal: bool = False) -> DerivedSystem:
    """Operating point from a full hardware description.

    Both cavities are red-sideband driven at detuning ``omega_M``. The pump
    amplitude uses the external-port drive ``|E_j|**2 = 2 kappa_j_ext P_j /
    (hbar omega_dj)`` with ``omega_dj = omega_j - omega_M``, and the
    intracavity photon number is ``|E_j|**2 / (kappa_j**2 + omega_M**2)``.

    The optical thermal occupation is held at zero unless
    ``optical_thermal`` is set.
    """
    _check_sideband(p.omega_M, p.kappa_w, p.kappa_o)
    gamma_M = p.omega_M / p.Q
    omega_o = p.omega_o
    g_o = omega_o / p.L * zero_point_fluctuation(p.m, p.omega_M)
    det2 = lambda kappa: kappa**2 + p.omega_M**2  # noqa: E731
    E2_w = 2 * p.eta_cpl_w * p.kappa_w * p.P_w / (HBAR * (p.omega_w - p.omega_M))
    E2_o = 2 * p.eta_cpl_o * p.kappa_o * p.P_o / (HBAR * (omega_o - p.omega_M))
    N_w = E2_w / det2(p.kappa_w)
    N_o = E2_o / det2(p.kappa_o)
    G_w = p.g_w * math.sqrt(N_w)
    G_o = g_o * math.sqrt(N_o)
    n_b, n_w, n_o = _thermal_triplet(p.T, p.omega_M, p.omega_w, omega_o, optical_thermal)
    return _assemble(
        gamma_M=gamma_M,
        kappa_w=p.kappa_w,
        kappa_o=p.kappa_o,
        eta_cpl_w=p.eta_cpl_w,
        eta_cpl_o=p.eta_cpl_o,
        G_w=G_w,
        G_o=G_o,
        omega_M=p.omega_M,
        omega_w=p.omega_w,
        omega_o=omega_o,
        g_w=p.g_w,
        g_o=g_o,
        N_w=N_w,
        N_o=N_o,
        T=p.T,
        n_b_T=n_b,
        n_w_T=n_w,
        n_o_T=n_o,
    )


def from_couplings(
    G_w: float,
    G_o: float,
    gamma_M: float,
    kappa_w: float,
    kappa_o: float,
    eta_cpl_w: float = 1.0,
    eta_cpl_o: float = 1.0,
    *,
    omega_M: Optional[float] = None,
    omega_w: Optional[float] = None,
    omega_o: Optional[float] = None,
    T: Optional[float] = None,
    optical_thermal: bool = False,
) -> DerivedSystem:
    _nonnegative("G_w", G_w)
    _nonnegative("G_o", G_o)
    _check_sideband(omega_M, kappa_w, kappa_o)
    n_b, n_w, n_o = _thermal_triplet(T, omega_M, omega_w, omega_o, optical_thermal)
    return _assemble(
        gamma_M=gamma_M,
        kappa_w=kappa_w,
        kappa_o=kappa_o,
        eta_cpl_w=eta_cpl_w,
        eta_cpl_o=eta_cpl_o,
        G_w=G_w,
        G_o=G_o,
        omega_M=omega_M,
        omega_w=omega_w,
        omega_o=omega_o,
        T=T,
        n_b_T=n_b,
        n_w_T=n_w,
        n_o_T=n_o,
    )


def from_cooperativities(
    Gamma_w: float,
    Gamma_o: float,
    eta_cpl_w: float = 1.0,
    eta_cpl_o: float = 1.0,
    *,
    gamma_M: Optional[float] = None,
    kappa_w: Optional[float] = None,
    kappa_o: Optional[float] = None,
    omega_M: Optional[float] = None,
    omega_w: Optional[float] = None,
    omega_o: Optional[float] = None,
    T: Optional[float] = None,
    optical_thermal: bool = False,
) -> DerivedSystem:
    _check_sideband(omega_M, kappa_w, kappa_o)
    n_b, n_w, n_o = _thermal_triplet(T, omega_M, omega_w, omega_o, optical_thermal)
    return _assemble(
        gamma_M=gamma_M,
        kappa_w=kappa_w,
        kappa_o=kappa_o,
        eta_cpl_w=eta_cpl_w,
        eta_cpl_o=eta_cpl_o,
        Gamma_w=Gamma_w,
        Gamma_o=Gamma_o,
        omega_M=omega_M,
        omega_w=omega_w,
        omega_o=omega_o,
        T=T,
        n_b_T=n_b,
        n_w_T=n_w,
        n_o_T=n_o,
    )


def with_cooperativities(base: DerivedSystem, Gamma_w: float, Gamma_o: float) -> DerivedSystem:
    """Copy of ``base`` with new cooperativities; G_j back-solved when rates are known.

    Pump-dependent fields (N_j) are dropped since they no longer match.
    """
    _nonnegative("Gamma_w", Gamma_w)
    _nonnegative("Gamma_o", Gamma_o)
    G_w = G_o = W_c = None
    if base.gamma_M is not None:
        W_c = base.gamma_M * (1.0 + Gamma_w + Gamma_o)
        if base.kappa_w is not None:
            G_w = math.sqrt(Gamma_w * base.kappa_w * base.gamma_M)
        if base.kappa_o is not None:
            G_o = math.sqrt(Gamma_o * base.kappa_o * base.gamma_M)
    return replace(
        base, Gamma_w=Gamma_w, Gamma_o=Gamma_o, G_w=G_w, G_o=G_o, W_c=W_c, N_w=None, N_o=None
    )


def implied_pump_powers(base: DerivedSystem, G_w: float, G_o: float):
    """Pump powers (W) that would realise couplings G_w, G_o on ``base`` hardware.

    Returns ``(None, None)`` when the single-photon couplings are unknown.
    """
    out = []
    for G, g, kappa, kext, omega in (
        (G_w, base.g_w, base.kappa_w, base.kappa_w_ext, base.omega_w),
        (G_o, base.g_o, base.kappa_o, base.kappa_o_ext, base.omega_o),
    ):
        if None in (g, kappa, kext, omega, base.omega_M) or g == 0 or kext == 0:
            out.append(None)
            continue
        N = (G / g) ** 2
        out.append(N * (kappa**2 + base.omega_M**2) * HBAR * (omega - base.omega_M) / (2 * kext))
    return tuple(out)


def coherence_margin(sys: DerivedSystem, T: float):
    """Ratios ``gamma_M k_B T / (hbar omega_M) / F_j`` with ``F_j = G_j**2 / kappa_j``.

    Values below 1 mean the mechanically mediated exchange is coherent.
    ``inf`` is returned for an uncoupled branch.
    """
    require(sys, "gamma_M", "omega_M", "G_w", "G_o", "kappa_w", "kappa_o", context="coherence_margin")
    if T < 0:
        raise NonPositiveParameter("T", T, "non-negative")
    heating = sys.gamma_M * K_B * T / (HBAR * sys.omega_M)
    ratios = []
    for G, kappa in ((sys.G_w, sys.kappa_w), (sys.G_o, sys.kappa_o)):
        F = G**2 / kappa
        if T == 0:
            ratios.append(0.0)
        elif F == 0:
            ratios.append(math.inf)
        else:
            ratios.append(heating / F)
    return tuple(ratios)
