"""Shared builders and hypothesis strategies for the test suite."""
import math
from dataclasses import replace
from pathlib import Path

from hypothesis import strategies as st

from eomdet.params import PhysicalParams, from_couplings

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
OMEGA_M = 2 * math.pi * 10e6


def ref_params(**overrides):
    kw = dict(
        m=10e-12,
        omega_M=OMEGA_M,
        Q=36e4,
        omega_w=2 * math.pi * 10e9,
        lambda_o=1064e-9,
        L=1e-3,
        kappa_w=0.101 * OMEGA_M,
        kappa_o=0.301 * OMEGA_M,
        P_w=35e-3,
        P_o=5e-3,
        g_w=6.2489,
        T=4.0,
    )
    kw.update(overrides)
    return PhysicalParams(**kw)


def log_uniform(lo, hi):
    return st.floats(math.log10(lo), math.log10(hi)).map(lambda x: 10.0**x)


@st.composite
def systems(draw, thermal=False):
    """Random valid three-mode systems spanning weak to strong coupling."""
    gamma = draw(log_uniform(1.0, 1e5))
    kw = draw(log_uniform(1e3, 1e8))
    ko = draw(log_uniform(1e3, 1e8))
    Gw = draw(st.one_of(st.just(0.0), log_uniform(1e-2, 1e8)))
    Go = draw(st.one_of(st.just(0.0), log_uniform(1e-2, 1e8)))
    ew = draw(st.floats(0.0, 1.0))
    eo = draw(st.floats(0.0, 1.0))
    sys = from_couplings(Gw, Go, gamma, kw, ko, ew, eo)
    if thermal:
        sys = replace(sys, n_b_T=draw(st.floats(0, 1e4)), n_w_T=draw(st.floats(0, 100)))
    return sys


def random_systems(rng, n, eta_free=True):
    """Deterministic batch of random systems for the bulk property checks."""
    out = []
    for _ in range(n):
        gamma = 10 ** rng.uniform(0, 5)
        kw, ko = 10 ** rng.uniform(3, 8, size=2)
        Gw, Go = 10 ** rng.uniform(-2, 8, size=2)
        ew, eo = (rng.uniform(0, 1, size=2) if eta_free else (1.0, 1.0))
        out.append(from_couplings(Gw, Go, gamma, kw, ko, ew, eo))
    return out


def random_run_config(rng):
    """Seeded random valid RunConfig covering all three input tiers."""
    from eomdet.config import RunConfig

    def pos():
        return float(10 ** rng.uniform(-6, 6))

    def maybe(value):
        return value if rng.random() < 0.5 else None

    tier = str(rng.choice(["direct", "couplings", "physical"]))
    kw = dict(
        omega_M=pos(), Q=float(10 ** rng.uniform(0, 8)), kappa_w=pos(), kappa_o=pos(),
        eta_cpl_w=maybe(float(rng.uniform())), eta_cpl_o=maybe(float(rng.uniform())),
        n_p=maybe(float(rng.uniform(0, 100))), W=maybe(pos()), W_over_Wc=maybe(float(rng.uniform(1e-3, 1))),
        delta_p=maybe(float(rng.normal())), eta=maybe(float(rng.uniform())),
        points=maybe(int(rng.integers(2, 500))), scale=maybe(str(rng.choice(["log", "linear"]))),
        kind=maybe(str(rng.choice(["efficiency", "ratio"]))), noise=maybe(bool(rng.random() < 0.5)),
        target=maybe(float(rng.uniform())), format=maybe(str(rng.choice(["csv", "json"]))),
    )
    if tier == "direct":
        kw.update(Gamma_w=pos(), Gamma_o=pos())
    elif tier == "couplings":
        kw.update(G_w=pos(), G_o=pos())
    else:
        kw.update(m=pos(), omega_w=pos(), lambda_o=pos(), L=pos(), P_w=pos(), P_o=pos(), g_w=pos(),
                  T=float(rng.uniform(0, 300)))
    return RunConfig(tier=tier, **kw)
