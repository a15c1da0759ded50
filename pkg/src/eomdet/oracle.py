"""Independent verification engines.

None of these reuse the structured solve in :mod:`eomdet.scattering`:

* :func:`dense_scattering` assembles the full 3x3 drift matrix and solves it
  with a plain Gaussian elimination with partial pivoting.
* :func:`time_domain_response` integrates the mean-field equations with a
  fixed-step RK4 under a monochromatic drive and reads off the output ratio.
* :func:`stationary_noise_flux` propagates the normal-ordered correlation
  matrix to its stationary point and reads off the output photon flux.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NotConverged, SingularSystem
from .params import DerivedSystem, require
from .scattering import ScatteringRow

__all__ = [
    "DriveProbe",
    "CHANNELS",
    "pivoted_solve",
    "drift_matrix",
    "dense_scattering",
    "time_domain_response",
    "stationary_noise_flux",
    "stationary_correlations",
]

CHANNELS = ("microwave-ext", "optical-ext", "mechanical")
_NEEDED = ("gamma_M", "kappa_w", "kappa_o", "G_w", "G_o", "kappa_w_ext", "kappa_o_ext")


def pivoted_solve(a, b, tol=0.0):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    ``b`` may hold several right-hand sides as columns. Inputs are copied.
    """
    a = np.array(a, dtype=complex)
    b = np.array(b, dtype=complex)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = a.shape[0]
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tol:
            raise SingularSystem("zero pivot")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            lam = a[i, k] / a[k, k]
            if lam != 0:
                a[i, k + 1:] -= lam * a[k, k + 1:]
                b[i] -= lam * b[k]
            a[i, k] = 0
    if abs(a[n - 1, n - 1]) <= tol:
        raise SingularSystem("zero pivot")
    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x[:, 0] if vec else x


def drift_matrix(sys: DerivedSystem) -> np.ndarray:
    """``M`` in ``d/dt (b, c_w, c_o) = -M (b, c_w, c_o) + inputs``."""
    require(sys, *_NEEDED, context="drift_matrix")
    return np.array(
        [
            [sys.gamma_M, 1j * sys.G_w, 1j * sys.G_o],
            [1j * sys.G_w, sys.kappa_w, 0],
            [1j * sys.G_o, 0, sys.kappa_o],
        ],
        dtype=complex,
    )


def _input_weights(sys: DerivedSystem) -> np.ndarray:
    """Columns: o_ext, w_ext, b_in, w_int, o_int (the A..E order)."""
    K = np.zeros((3, 5))
    K[2, 0] = math.sqrt(2 * sys.kappa_o_ext)
    K[1, 1] = math.sqrt(2 * sys.kappa_w_ext)
    K[0, 2] = math.sqrt(2 * sys.gamma_M)
    K[1, 3] = math.sqrt(2 * sys.kappa_w_int)
    K[2, 4] = math.sqrt(2 * sys.kappa_o_int)
    return K


def dense_scattering(sys: DerivedSystem, omega: float) -> ScatteringRow:
    """Optical-output row from a generic dense solve of ``(M - i w) x = K``."""
    M = drift_matrix(sys) - 1j * float(omega) * np.eye(3)
    K = _input_weights(sys)
    X = pivoted_solve(M, K)
    row = math.sqrt(2 * sys.kappa_o_ext) * X[2]
    row[0] -= 1.0
    A, B, C, D, E = (-row).tolist()
    return ScatteringRow(float(omega), A, B, C, D, E)


@dataclass(frozen=True)
class DriveProbe:
    channel: str
    amplitude: complex = 1.0
    detuning: float = 0.0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if not (np.isfinite(self.amplitude) and self.amplitude != 0):
            raise ValueError("probe amplitude must be finite and nonzero")


def _rk4_step_map(M: np.ndarray, k_in: np.ndarray, h: float, nu: float):
    """One RK4 step of ``x' = -M x + k_in a(t)``, ``a(t) = a_n exp(-i nu (t - t_n))``.

    The step is linear in ``(x_n, a_n)``: ``x_{n+1} = P x_n + q a_n``. Both
    pieces come from running the stage formulas on basis inputs.
    """
    half, full = np.exp(-0.5j * nu * h), np.exp(-1j * nu * h)

    def step(x, a):
        k1 = -M @ x + k_in * a
        k2 = -M @ (x + h / 2 * k1) + k_in * (a * half)
        k3 = -M @ (x + h / 2 * k2) + k_in * (a * half)
        k4 = -M @ (x + h * k3) + k_in * (a * full)
        return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    n = M.shape[0]
    P = np.column_stack([step(np.eye(n, dtype=complex)[:, i], 0.0) for i in range(n)])
    q = step(np.zeros(n, dtype=complex), 1.0)
    return P, q, full


def time_domain_response(
    sys: DerivedSystem,
    probe: DriveProbe,
    horizon: float | None = None,
    step_fraction: float = 0.02,
    tolerance: float = 1e-9,
) -> complex:
    """Steady-state optical output per unit drive, ``c_o,out(t) / a(t)``.

    The drive ``a(t) = amplitude * exp(-i detuning t)`` enters through the
    probe's channel and the mean-field ODEs are stepped with fixed-step RK4
    from rest. The returned ratio corresponds to ``-X(detuning)`` for the
    probed coefficient ``X`` (A for optical-ext, B for microwave-ext, C for
    mechanical).

    Because the equations are linear and the drive is monochromatic, one RK4
    step is an affine map of ``r_n = x_n / a_n`` with constant coefficients.
    The ``n``-step state is obtained by binary powering of that map, which
    reproduces the step-by-step recursion at logarithmic cost (stiff
    systems need millions of steps).

    The default horizon is 30 slowest-decay times, never shorter than
    ``20 / min(W_c, kappa_w, kappa_o)``.
    """
    M = drift_matrix(sys)
    K = _input_weights(sys)
    col = {"optical-ext": 0, "microwave-ext": 1, "mechanical": 2}[probe.channel]
    k_in = K[:, col].astype(complex)
    eigs = np.linalg.eigvals(M)
    slow = float(np.min(eigs.real))
    if slow <= 0:
        raise NotConverged("drift matrix is not stable")
    floor = 20.0 / min(sys.W_c if sys.W_c is not None else slow, sys.kappa_w, sys.kappa_o)
    if horizon is None:
        horizon = max(30.0 / slow, floor)
    fastest = float(np.max(np.abs(eigs))) + abs(probe.detuning)
    n_steps = max(int(math.ceil(horizon * fastest / step_fraction)), 20)
    h = horizon / n_steps
    P, q, phase = _rk4_step_map(M, k_in, h, float(probe.detuning))
    # augmented affine map on (r, 1), r_n = x_n / a_n
    T = np.eye(4, dtype=complex)
    T[:3, :3] = P / phase
    T[:3, 3] = q / phase
    r_out = math.sqrt(2 * sys.kappa_o_ext)

    def ratio_after(n):
        r = np.linalg.matrix_power(T, n)[:3, 3]
        return complex(r_out * r[2] - (1.0 if col == 0 else 0.0))

    ratio = ratio_after(n_steps)
    tail = [ratio_after(n_steps - k) for k in (1, max(n_steps // 40, 1), max(n_steps // 20, 1))]
    drift = max(abs(t - ratio) for t in tail)
    if drift > tolerance * max(abs(ratio), 1e-12):
        raise NotConverged(f"trailing-window drift {drift:.3g} relative to |ratio|={abs(ratio):.3g}")
    return ratio


def _van_loan(F: np.ndarray, D: np.ndarray, h: float):
    """Exact one-step propagator and accumulated diffusion of ``N' = F N + N F^H + D``."""
    n = F.shape[0]
    big = np.zeros((2 * n, 2 * n), dtype=complex)
    big[:n, :n] = -F
    big[:n, n:] = D
    big[n:, n:] = F.conj().T
    E = expm(big * h)
    Phi = E[n:, n:].conj().T
    Q = Phi @ E[:n, n:]
    return Phi, Q


def stationary_correlations(sys: DerivedSystem, line_thermal: bool = False,
                            max_doublings: int = 200, rtol: float = 1e-15) -> np.ndarray:
    """Stationary ``N_ij = <x_i^dagger x_j>`` for ``x = (b, c_w, c_o)``.

    Starts from the vacuum at t = 0 and doubles the propagation time until
    the correlation matrix stops changing. The optical bath is taken at
    zero occupation.
    """
    M = drift_matrix(sys)
    F = -M.conj()
    n_w_ext = sys.n_w_T if line_thermal else 0.0
    D = np.diag(
        [
            2 * sys.gamma_M * sys.n_b_T,
            2 * sys.kappa_w_ext * n_w_ext + 2 * sys.kappa_w_int * sys.n_w_T,
            0.0,
        ]
    ).astype(complex)
    h = 0.1 / float(np.max(np.abs(np.linalg.eigvals(M))))
    Phi, N = _van_loan(F, D, h)
    for _ in range(max_doublings):
        N_next = Phi @ N @ Phi.conj().T + N
        Phi = Phi @ Phi
        change = np.max(np.abs(N_next - N))
        N = N_next
        if change <= rtol * max(np.max(np.abs(N)), 1e-300) and np.max(np.abs(Phi)) < 1e-12:
            return N
    raise NotConverged("correlation matrix did not reach a stationary point")


def stationary_noise_flux(sys: DerivedSystem, line_thermal: bool = False) -> float:
    """Stationary optical output photon flux (photons/s) from thermal inputs."""
    require(sys, *_NEEDED, context="stationary_noise_flux")
    if sys.n_b_T == 0 and sys.n_w_T == 0:
        return 0.0
    N = stationary_correlations(sys, line_thermal)
    return float(2 * sys.kappa_o_ext * N[2, 2].real)
