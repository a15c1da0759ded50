"""Run configuration: a line-based ``[section]`` / ``key = value`` format.

Dimensional values carry a unit suffix. Frequencies given in Hz, kHz, MHz,
GHz or THz are converted to angular units (multiplied by 2 pi); ``rad/s`` is
taken as is, and ``<x> omega_M`` means x times the mechanical angular
frequency. Other units: kg, g, mg, ug, ng, pg; m, mm, um, nm; W, mW, uW, nW;
K, mK. ``#`` and ``;`` start comments.

Exactly one input tier must be populated:

* ``direct``: Gamma_w, Gamma_o (optionally gamma_M or omega_M + Q, kappa_w, kappa_o)
* ``couplings``: G_w, G_o, kappa_w, kappa_o and gamma_M (or omega_M + Q)
* ``physical``: m, omega_M, Q, omega_w, lambda_o, L, kappa_w, kappa_o, P_w, P_o, g_w, T
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, fields, replace
from typing import Optional

from scipy.constants import c as SPEED_OF_LIGHT

from .detector import DetectorModel
from .errors import EomdetError, MissingParameter
from .params import (
    DerivedSystem,
    PhysicalParams,
    derive,
    from_cooperativities,
    from_couplings,
)
from .pulse import GaussianPulse
from .sweep import GridSpec

__all__ = [
    "RunConfig",
    "ConfigError",
    "ConfigSyntaxError",
    "UnknownKey",
    "UnitMismatch",
    "ConflictingTiers",
    "MissingConfigParameter",
    "parse_config",
    "emit_config",
    "build_system",
    "build_pulse",
    "build_detector",
    "build_grid",
    "W_CONSISTENCY_RTOL",
]

# relative mismatch tolerated between an absolute W and W_over_Wc * W_c
W_CONSISTENCY_RTOL = 0.01


class ConfigError(EomdetError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class UnitMismatch(ConfigError):
    pass


class ConflictingTiers(ConfigError):
    pass


class MissingConfigParameter(ConfigError, MissingParameter):
    def __init__(self, names, line=None, column=None):
        names = list(names)
        ConfigError.__init__(self, "missing parameter(s): " + ", ".join(names), line, column)
        self.names = names


_TWO_PI = 2 * math.pi
_UNITS = {
    "freq": {"Hz": _TWO_PI, "kHz": _TWO_PI * 1e3, "MHz": _TWO_PI * 1e6, "GHz": _TWO_PI * 1e9,
             "THz": _TWO_PI * 1e12, "rad/s": 1.0},
    "mass": {"kg": 1.0, "g": 1e-3, "mg": 1e-6, "ug": 1e-9, "ng": 1e-12, "pg": 1e-15},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "power": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "nW": 1e-9},
    "temp": {"K": 1.0, "mK": 1e-3},
}
_CANONICAL = {"freq": "rad/s", "mass": "kg", "length": "m", "power": "W", "temp": "K"}
_CHOICES = {
    "scale": ("log", "linear"),
    "kind": ("efficiency", "ratio"),
    "format": ("csv", "json"),
}

# key -> (section, kind)
_SCHEMA = {
    "omega_M": ("mechanics", "freq"),
    "Q": ("mechanics", "dimless"),
    "m": ("mechanics", "mass"),
    "gamma_M": ("mechanics", "freq"),
    "omega_w": ("microwave", "freq"),
    "kappa_w": ("microwave", "freq"),
    "eta_cpl_w": ("microwave", "dimless"),
    "P_w": ("microwave", "power"),
    "g_w": ("microwave", "freq"),
    "G_w": ("microwave", "freq"),
    "Gamma_w": ("microwave", "dimless"),
    "lambda_o": ("optical", "length"),
    "L": ("optical", "length"),
    "kappa_o": ("optical", "freq"),
    "eta_cpl_o": ("optical", "dimless"),
    "P_o": ("optical", "power"),
    "G_o": ("optical", "freq"),
    "Gamma_o": ("optical", "dimless"),
    "T": ("environment", "temp"),
    "n_p": ("pulse", "dimless"),
    "W": ("pulse", "freq"),
    "W_over_Wc": ("pulse", "dimless"),
    "delta_p": ("pulse", "freq"),
    "eta": ("detector", "dimless"),
    "bandwidth": ("detector", "freq"),
    "gamma_w_min": ("sweep", "dimless"),
    "gamma_w_max": ("sweep", "dimless"),
    "gamma_o_min": ("sweep", "dimless"),
    "gamma_o_max": ("sweep", "dimless"),
    "points": ("sweep", "int"),
    "scale": ("sweep", "choice"),
    "kind": ("sweep", "choice"),
    "target": ("match", "dimless"),
    "format": ("output", "choice"),
    "path": ("output", "text"),
    "noise": ("output", "bool"),
    "band_over_Wc": ("output", "dimless"),
}
_SECTIONS = tuple(dict.fromkeys(sec for sec, _ in _SCHEMA.values()))

_TIER_KEYS = {
    "physical": ("m", "L", "P_w", "P_o", "g_w"),
    "couplings": ("G_w", "G_o"),
    "direct": ("Gamma_w", "Gamma_o"),
}
_PHYSICAL_REQUIRED = ("m", "omega_M", "Q", "omega_w", "lambda_o", "L", "kappa_w", "kappa_o",
                      "P_w", "P_o", "g_w", "T")

_NUMBER = re.compile(r"[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf)")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; all dimensional values in SI / rad/s."""

    tier: str
    omega_M: Optional[float] = None
    Q: Optional[float] = None
    m: Optional[float] = None
    gamma_M: Optional[float] = None
    omega_w: Optional[float] = None
    kappa_w: Optional[float] = None
    eta_cpl_w: Optional[float] = None
    P_w: Optional[float] = None
    g_w: Optional[float] = None
    G_w: Optional[float] = None
    Gamma_w: Optional[float] = None
    lambda_o: Optional[float] = None
    L: Optional[float] = None
    kappa_o: Optional[float] = None
    eta_cpl_o: Optional[float] = None
    P_o: Optional[float] = None
    G_o: Optional[float] = None
    Gamma_o: Optional[float] = None
    T: Optional[float] = None
    n_p: Optional[float] = None
    W: Optional[float] = None
    W_over_Wc: Optional[float] = None
    delta_p: Optional[float] = None
    eta: Optional[float] = None
    bandwidth: Optional[float] = None
    gamma_w_min: Optional[float] = None
    gamma_w_max: Optional[float] = None
    gamma_o_min: Optional[float] = None
    gamma_o_max: Optional[float] = None
    points: Optional[int] = None
    scale: Optional[str] = None
    kind: Optional[str] = None
    target: Optional[float] = None
    format: Optional[str] = None
    path: Optional[str] = None
    noise: Optional[bool] = None
    band_over_Wc: Optional[float] = None


def _parse_value(key, kind, raw, line, col, pending):
    if kind == "text":
        return raw
    if kind == "choice":
        if raw not in _CHOICES[key]:
            raise ConfigSyntaxError(f"{key} must be one of {', '.join(_CHOICES[key])}, got {raw!r}", line, col)
        return raw
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "on", "yes", "1"):
            return True
        if low in ("false", "off", "no", "0"):
            return False
        raise ConfigSyntaxError(f"{key} expects a boolean, got {raw!r}", line, col)
    m = _NUMBER.match(raw)
    if not m:
        raise ConfigSyntaxError(f"expected a number for {key}, got {raw!r}", line, col)
    number = float(m.group(0))
    unit = raw[m.end():].strip()
    unit_col = col + len(raw) - len(raw[m.end():].lstrip())
    if kind == "int":
        if unit or not math.isfinite(number) or number != int(number):
            raise ConfigSyntaxError(f"{key} expects an integer, got {raw!r}", line, col)
        return int(number)
    if kind == "dimless":
        if unit:
            raise UnitMismatch(f"{key} is dimensionless but has unit {unit!r}", line, unit_col)
        return number
    if not unit:
        raise UnitMismatch(f"{key} needs a unit ({', '.join(_UNITS[kind])})", line, col + len(raw))
    if kind == "freq" and unit == "omega_M":
        pending[key] = (number, line, unit_col)
        return None
    scale = _UNITS[kind].get(unit)
    if scale is None:
        raise UnitMismatch(
            f"unit {unit!r} is not valid for {key}; expected one of {', '.join(_UNITS[kind])}"
            + (" or omega_M" if kind == "freq" else ""),
            line,
            unit_col,
        )
    return number * scale


def _detect_tier(values, positions):
    present = {t: [k for k in keys if k in values] for t, keys in _TIER_KEYS.items()}
    tiers = [t for t, ks in present.items() if ks]
    conflict = len(tiers) > 1
    keys = [k for t in tiers for k in present[t]]
    # gamma_M is derived from omega_M / Q in the physical tier
    if tiers == ["physical"] and "gamma_M" in values:
        conflict = True
        keys.append("gamma_M")
    if conflict:
        first = min((positions[k] for k in keys))
        raise ConflictingTiers(
            "keys from more than one input tier: " + ", ".join(keys), *first
        )
    if not tiers:
        raise MissingConfigParameter(
            ["Gamma_w + Gamma_o (direct tier)", "G_w + G_o (couplings tier)", "physical block (physical tier)"]
        )
    tier = tiers[0]
    if tier == "physical":
        needed = [k for k in _PHYSICAL_REQUIRED if k not in values]
    elif tier == "couplings":
        needed = [k for k in ("G_w", "G_o", "kappa_w", "kappa_o") if k not in values]
        if "gamma_M" not in values and not ("omega_M" in values and "Q" in values):
            needed.append("gamma_M (or omega_M and Q)")
    else:
        needed = [k for k in ("Gamma_w", "Gamma_o") if k not in values]
    if needed:
        raise MissingConfigParameter(needed)
    return tier


def parse_config(text: str) -> RunConfig:
    """Parse configuration text; raises a positioned :class:`ConfigError` on any problem."""
    section = None
    values: dict = {}
    positions: dict = {}
    pending: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = re.split(r"[#;]", raw_line, maxsplit=1)[0]
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip())
        body = stripped.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                raise ConfigSyntaxError("unterminated section header", lineno, indent + len(body) + 1)
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                raise UnknownKey(f"unknown section [{name}]", lineno, indent + 2)
            section = name
            continue
        if "=" not in body:
            raise ConfigSyntaxError("expected 'key = value'", lineno, indent + 1)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        key_col = indent + 1
        value_col = indent + len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        value = value_part.strip()
        if section is None:
            raise ConfigSyntaxError("key outside of any [section]", lineno, key_col)
        if not key:
            raise ConfigSyntaxError("empty key", lineno, key_col)
        spec = _SCHEMA.get(key)
        if spec is None or spec[0] != section:
            raise UnknownKey(f"unknown key {key!r} in section [{section}]", lineno, key_col)
        if key in values or key in pending:
            raise ConfigSyntaxError(f"duplicate key {key!r}", lineno, key_col)
        if not value:
            raise ConfigSyntaxError(f"missing value for {key!r}", lineno, value_col)
        parsed = _parse_value(key, spec[1], value, lineno, value_col, pending)
        positions[key] = (lineno, key_col)
        if parsed is not None:
            values[key] = parsed
    for key, (factor, lineno, col) in pending.items():
        if "omega_M" not in values:
            raise MissingConfigParameter(["omega_M"], lineno, col)
        values[key] = factor * values["omega_M"]
        positions[key] = (lineno, col)
    tier = _detect_tier(values, positions)
    return RunConfig(tier=tier, **values)


def _format_value(key, value) -> str:
    kind = _SCHEMA[key][1]
    if kind == "bool":
        return "true" if value else "false"
    if kind in ("text", "choice"):
        return str(value)
    if kind == "int":
        return str(int(value))
    text = repr(float(value))
    if kind in _CANONICAL:
        text += " " + _CANONICAL[kind]
    return text


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config(emit_config(cfg)) == cfg``."""
    lines = []
    for section in _SECTIONS:
        body = [
            f"{key} = {_format_value(key, getattr(cfg, key))}"
            for key, (sec, _) in _SCHEMA.items()
            if sec == section and getattr(cfg, key) is not None
        ]
        if body:
            if lines:
                lines.append("")
            lines.append(f"[{section}]")
            lines.extend(body)
    return "\n".join(lines) + "\n"


def _or(value, default):
    return default if value is None else value


def build_system(cfg: RunConfig) -> DerivedSystem:
    eta_w = _or(cfg.eta_cpl_w, 1.0)
    eta_o = _or(cfg.eta_cpl_o, 1.0)
    omega_o = 2 * math.pi * SPEED_OF_LIGHT / cfg.lambda_o if cfg.lambda_o else None
    if cfg.tier == "physical":
        return derive(
            PhysicalParams(
                m=cfg.m, omega_M=cfg.omega_M, Q=cfg.Q, omega_w=cfg.omega_w, lambda_o=cfg.lambda_o,
                L=cfg.L, kappa_w=cfg.kappa_w, kappa_o=cfg.kappa_o, P_w=cfg.P_w, P_o=cfg.P_o,
                g_w=cfg.g_w, T=cfg.T, eta_cpl_w=eta_w, eta_cpl_o=eta_o,
            )
        )
    gamma_M = cfg.gamma_M
    if gamma_M is None and cfg.omega_M is not None and cfg.Q is not None:
        gamma_M = cfg.omega_M / cfg.Q
    common = dict(omega_M=cfg.omega_M, omega_w=cfg.omega_w, omega_o=omega_o, T=cfg.T)
    if cfg.tier == "couplings":
        return from_couplings(cfg.G_w, cfg.G_o, gamma_M, cfg.kappa_w, cfg.kappa_o, eta_w, eta_o, **common)
    return from_cooperativities(
        cfg.Gamma_w, cfg.Gamma_o, eta_w, eta_o, gamma_M=gamma_M, kappa_w=cfg.kappa_w,
        kappa_o=cfg.kappa_o, **common,
    )


def build_pulse(cfg: RunConfig, sys: DerivedSystem):
    """Pulse plus a report of the W versus ``W_over_Wc * W_c`` consistency check.

    The relative form takes precedence when both are given.
    """
    if cfg.n_p is None:
        raise MissingConfigParameter(["n_p"])
    report = {"W_given": cfg.W, "W_over_Wc": cfg.W_over_Wc, "mismatch": None, "consistent": None}
    if cfg.W_over_Wc is not None:
        if sys.W_c is None:
            raise MissingParameter(["W_c (needs gamma_M)"], "W_over_Wc")
        W = cfg.W_over_Wc * sys.W_c
        if cfg.W is not None:
            mismatch = cfg.W / W - 1.0
            report["mismatch"] = mismatch
            report["consistent"] = abs(mismatch) <= W_CONSISTENCY_RTOL
            if not report["consistent"]:
                warnings.warn(
                    f"W = {cfg.W:.6g} rad/s disagrees with W_over_Wc * W_c = {W:.6g} rad/s "
                    f"(relative mismatch {mismatch:+.3g}); using the latter",
                    stacklevel=2,
                )
    elif cfg.W is not None:
        W = cfg.W
    else:
        raise MissingConfigParameter(["W or W_over_Wc"])
    report["W"] = W
    return GaussianPulse(cfg.n_p, W, _or(cfg.delta_p, 0.0)), report


def build_detector(cfg: RunConfig) -> DetectorModel:
    default = DetectorModel()
    return DetectorModel(eta=_or(cfg.eta, default.eta), bandwidth=_or(cfg.bandwidth, default.bandwidth))


def build_grid(cfg: RunConfig) -> GridSpec:
    d = GridSpec()
    return GridSpec(
        gamma_w_range=(_or(cfg.gamma_w_min, d.gamma_w_range[0]), _or(cfg.gamma_w_max, d.gamma_w_range[1])),
        gamma_o_range=(_or(cfg.gamma_o_min, d.gamma_o_range[0]), _or(cfg.gamma_o_max, d.gamma_o_range[1])),
        points=_or(cfg.points, d.points),
        scale=_or(cfg.scale, d.scale),
    )


def config_fields():
    return [f.name for f in fields(RunConfig) if f.name != "tier"]


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
