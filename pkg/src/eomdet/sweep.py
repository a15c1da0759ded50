"""Design-space surfaces over (Gamma_w, Gamma_o) and matched-diagonal search.

Surface values are stored with shape ``(len(gamma_w), len(gamma_o))``.
Rows (fixed Gamma_w) are independent and may be evaluated on a thread
pool; results are always placed by row index, so the output does not
depend on the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from .detector import DetectorModel, eta_eff
from .errors import NonPositiveParameter, TargetUnreachable
from .params import DerivedSystem, implied_pump_powers, require, with_cooperativities
from .pulse import GaussianPulse
from .scattering import optical_row_arrays

__all__ = [
    "GridSpec",
    "EfficiencySurface",
    "efficiency_surface",
    "ratio_surface",
    "find_min_cooperativity",
    "thread_count",
    "THREADS_ENV",
]

THREADS_ENV = "EOMDET_THREADS"
_PEAK_NORM = 2.0 / math.sqrt(2.0 * math.pi)


def thread_count(workers: Optional[int] = None) -> int:
    """Worker count: explicit argument, else ``$EOMDET_THREADS``, else CPU count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(THREADS_ENV)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


@dataclass(frozen=True)
class GridSpec:
    gamma_w_range: Tuple[float, float] = (1e-2, 1e3)
    gamma_o_range: Tuple[float, float] = (1e-2, 1e3)
    points: int = 101
    scale: str = "log"

    def __post_init__(self):
        if self.scale not in ("log", "linear"):
            raise ValueError(f"scale must be 'log' or 'linear', got {self.scale!r}")
        if int(self.points) != self.points or self.points < 2:
            raise NonPositiveParameter("points", self.points, "an integer >= 2")
        for name, (lo, hi) in (("gamma_w_range", self.gamma_w_range), ("gamma_o_range", self.gamma_o_range)):
            floor_ok = lo > 0 if self.scale == "log" else lo >= 0
            if not floor_ok or not hi > lo:
                raise NonPositiveParameter(name, (lo, hi), "an increasing range valid for the scale")

    def _axis(self, lo, hi):
        if self.scale == "log":
            return np.geomspace(lo, hi, self.points)
        return np.linspace(lo, hi, self.points)

    @property
    def gamma_w(self) -> np.ndarray:
        return self._axis(*self.gamma_w_range)

    @property
    def gamma_o(self) -> np.ndarray:
        return self._axis(*self.gamma_o_range)


@dataclass(frozen=True)
class EfficiencySurface:
    grid: GridSpec
    values: np.ndarray
    kind: str
    metadata: dict = field(default_factory=dict)


def _map_rows(fn, n_rows, workers):
    n = thread_count(workers)
    if n == 1:
        rows = [fn(i) for i in range(n_rows)]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(fn, range(n_rows)))
    return np.vstack(rows)


def efficiency_surface(base: DerivedSystem, det: DetectorModel, grid: GridSpec,
                       workers: Optional[int] = None) -> EfficiencySurface:
    """``eta_eff`` at each grid point, with G_j back-solved from Gamma_j on ``base``."""
    gw_axis, go_axis = grid.gamma_w, grid.gamma_o

    def row(i):
        return np.array([eta_eff(with_cooperativities(base, gw_axis[i], go), det) for go in go_axis])

    values = _map_rows(row, len(gw_axis), workers)
    meta = {"eta": det.eta, "eta_cpl_w": base.eta_cpl_w, "eta_cpl_o": base.eta_cpl_o}
    meta.update(_pump_report(base, grid))
    return EfficiencySurface(grid, values, "eta_eff", meta)


def _pump_report(base: DerivedSystem, grid: GridSpec) -> dict:
    if base.gamma_M is None or base.kappa_w is None or base.kappa_o is None:
        return {}
    hi_w = math.sqrt(grid.gamma_w_range[1] * base.kappa_w * base.gamma_M)
    hi_o = math.sqrt(grid.gamma_o_range[1] * base.kappa_o * base.gamma_M)
    P_w, P_o = implied_pump_powers(base, hi_w, hi_o)
    return {"max_implied_P_w": P_w, "max_implied_P_o": P_o}


def _row_signal(base, gw, go_axis, pulse, W_over_Wc, epsrel):
    """Converted fraction ``N_o / n_p`` (signal only) along one row."""
    gamma = base.gamma_M
    G_w = math.sqrt(gw * base.kappa_w * gamma)
    G_o = np.sqrt(go_axis * base.kappa_o * gamma)
    W_c = gamma * (1.0 + gw + go_axis)
    W = W_over_Wc * W_c if W_over_Wc is not None else np.full_like(go_axis, pulse.W)
    d = pulse.delta_p

    def f(u):
        _, B, _, _, _ = optical_row_arrays(
            gamma, base.kappa_w_ext, base.kappa_w_int, base.kappa_o_ext, base.kappa_o_int,
            G_w, G_o, d + u * W,
        )
        return _PEAK_NORM * math.exp(-2.0 * u * u) * np.abs(B) ** 2

    val, _ = integrate.quad_vec(f, -8.0, 8.0, epsabs=0.0, epsrel=epsrel, norm="max", limit=2000)
    return val


def _row_noise(base, gw, go_axis, band_over_Wc, epsrel):
    """Thermal photons per detection window along one row; band = band_over_Wc * W_c.

    The window holds one temporal mode, so this is the band average of
    ``sum_X |X|**2 n_X``.
    """
    gamma = base.gamma_M
    G_w = math.sqrt(gw * base.kappa_w * gamma)
    G_o = np.sqrt(go_axis * base.kappa_o * gamma)
    band = band_over_Wc * gamma * (1.0 + gw + go_axis)

    def f(v):
        A, B, C, D, E = optical_row_arrays(
            gamma, base.kappa_w_ext, base.kappa_w_int, base.kappa_o_ext, base.kappa_o_int,
            G_w, G_o, v * band,
        )
        dens = (np.abs(C) ** 2 * base.n_b_T + np.abs(D) ** 2 * base.n_w_T
                + (np.abs(A) ** 2 + np.abs(E) ** 2) * base.n_o_T)
        return dens

    val, _ = integrate.quad_vec(f, -1.0, 1.0, epsabs=0.0, epsrel=epsrel, norm="max", limit=2000)
    return 0.5 * val


def ratio_surface(
    base: DerivedSystem,
    pulse: GaussianPulse,
    grid: GridSpec,
    noise: bool = False,
    W_over_Wc: Optional[float] = None,
    band_over_Wc: float = 1.0,
    workers: Optional[int] = None,
    epsrel: float = 1e-13,
) -> EfficiencySurface:
    """Output-to-input photon ratio ``N_o / n_p`` over the grid.

    With ``W_over_Wc`` set the pulse width tracks each point's converter
    bandwidth; otherwise ``pulse.W`` is used everywhere. Noise (when on) is
    counted in one detection window of ``|w| <= band_over_Wc * W_c``. ``n_p = 0`` yields a
    zero surface by convention.
    """
    require(base, "gamma_M", "kappa_w", "kappa_o", "kappa_w_ext", "kappa_o_ext", context="ratio_surface")
    gw_axis, go_axis = grid.gamma_w, grid.gamma_o
    meta = {
        "n_p": pulse.n_p,
        "W": None if W_over_Wc is not None else pulse.W,
        "W_over_Wc": W_over_Wc,
        "delta_p": pulse.delta_p,
        "noise": noise,
        "band_over_Wc": band_over_Wc if noise else None,
        "eta_cpl_w": base.eta_cpl_w,
        "eta_cpl_o": base.eta_cpl_o,
    }
    meta.update(_pump_report(base, grid))
    if pulse.n_p == 0:
        return EfficiencySurface(grid, np.zeros((len(gw_axis), len(go_axis))), "ratio", meta)

    def row(i):
        vals = _row_signal(base, gw_axis[i], go_axis, pulse, W_over_Wc, epsrel)
        if noise:
            vals = vals + _row_noise(base, gw_axis[i], go_axis, band_over_Wc, epsrel) / pulse.n_p
        return vals

    return EfficiencySurface(grid, _map_rows(row, len(gw_axis), workers), "ratio", meta)


def find_min_cooperativity(target_eff: float, det: DetectorModel, base: DerivedSystem,
                           rtol: float = 1e-12) -> float:
    """Smallest matched cooperativity ``Gamma = Gamma_w = Gamma_o`` reaching ``target_eff``.

    ``eta_eff`` is increasing along the diagonal with supremum
    ``eta * eta_cpl_w * eta_cpl_o``, which is never attained.
    """
    ceiling = det.eta * base.eta_cpl_w * base.eta_cpl_o
    if not target_eff > 0:
        raise NonPositiveParameter("target_eff", target_eff)
    if target_eff >= ceiling:
        raise TargetUnreachable(f"target {target_eff} is not below the ceiling {ceiling}")
    eff = lambda g: eta_eff(with_cooperativities(base, g, g), det)  # noqa: E731
    lo, hi = 0.0, 1.0
    while eff(hi) < target_eff:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise TargetUnreachable(f"target {target_eff} not reached")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if eff(mid) >= target_eff:
            hi = mid
        else:
            lo = mid
    return hi
