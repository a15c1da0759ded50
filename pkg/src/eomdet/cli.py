"""Command line front end.

    eomdet SUBCOMMAND CONFIG [-o PATH] [--format csv|json] [--threads N]

Subcommands: derive, spectrum, convert, sweep, match, oracle-check.
Data goes to the output path (standard output by default); diagnostics go
to standard error. Exit codes: 0 success, 2 configuration error,
3 numerical non-convergence, 4 failed oracle check.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import oracle
from .config import (
    ConfigError,
    build_detector,
    build_grid,
    build_pulse,
    build_system,
    parse_config,
)
from .detector import detected_photons, eta_eff, thermal_counts, thermal_counts_band
from .errors import (
    ApproximationOutOfRange,
    MissingParameter,
    NotConverged,
    QuadratureNonConvergence,
    SingularSystem,
    TargetUnreachable,
)
from .params import coherence_margin, require, with_cooperativities
from .pulse import converted_photons, input_spectrum, integrate_noise, noise_density, output_spectrum
from .scattering import b_coeff_dc, scattering_row, sum_rule_defect
from .sweep import efficiency_surface, find_min_cooperativity, ratio_surface

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE = 0, 2, 3, 4
SUBCOMMANDS = ("derive", "spectrum", "convert", "sweep", "match", "oracle-check")

# oracle-check tolerances
DENSE_ATOL = 1e-12
TIME_DOMAIN_RTOL = 1e-6
NOISE_RTOL = 1e-6
SPECTRUM_POINTS = 2001


class OracleFailure(Exception):
    pass


def _num(x) -> str:
    return f"{x:.17e}"


def write_csv(header, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _derive(cfg, args):
    sys_ = build_system(cfg)
    diag = {}
    if sys_.has_dynamics and sys_.omega_M is not None:
        T = sys_.T if sys_.T is not None else 0.0
        diag["coherence_margin"] = list(coherence_margin(sys_, T))
    if sys_.omega_M is not None:
        diag["resolved_sideband"] = {
            k: getattr(sys_, k) < sys_.omega_M for k in ("kappa_w", "kappa_o") if getattr(sys_, k) is not None
        }
    if sys_.Gamma_w is not None and sys_.Gamma_o is not None:
        diag["B0_squared"] = b_coeff_dc(sys_)
    out = sys_.as_dict()
    out["diagnostics"] = diag
    return write_json(out), "json"


def _spectrum(cfg, args):
    sys_ = build_system(cfg)
    require(sys_, "omega_M", context="spectrum (axis is omega/omega_M)")
    pulse, report = build_pulse(cfg, sys_)
    noise = cfg.noise if cfg.noise is not None else True
    w = np.linspace(pulse.delta_p - 8 * pulse.W, pulse.delta_p + 8 * pulse.W, SPECTRUM_POINTS)
    inp = input_spectrum(pulse, w)
    sig = output_spectrum(sys_, pulse, w, noise=False)
    nz = noise_density(sys_, w)
    band = sys_.W_c * (cfg.band_over_Wc or 1.0)
    out = output_spectrum(sys_, pulse, w, noise=True, band=band) if noise else sig
    header = [
        "omega_over_omega_M [1]",
        "input_density [photons/(rad/s)]",
        "output_density [photons/(rad/s) per detection window]",
        "output_signal_density [photons/(rad/s)]",
        "noise_density [photons/s/(rad/s)]",
    ]
    return write_csv(header, [w / sys_.omega_M, inp, out, sig, nz]), "csv"


def _convert(cfg, args):
    sys_ = build_system(cfg)
    det = build_detector(cfg)
    noise = cfg.noise if cfg.noise is not None else True
    band = None if cfg.band_over_Wc is None else cfg.band_over_Wc * sys_.W_c
    result = {"eta_eff": eta_eff(sys_, det), "thermal_counts": thermal_counts(sys_)}
    pulse, report = build_pulse(cfg, sys_)
    result["pulse"] = {"n_p": pulse.n_p, "W": pulse.W, "delta_p": pulse.delta_p, "check": report}
    if sys_.has_dynamics:
        conv = converted_photons(sys_, pulse, noise=noise, band=band)
        result.update(
            N_o=conv.total,
            signal=conv.signal,
            noise=conv.noise,
            quadrature_error=conv.abserr,
            ratio=conv.total / pulse.n_p if pulse.n_p > 0 else 0.0,
            method="quadrature",
        )
        if noise:
            result["thermal_counts_band"] = thermal_counts_band(sys_, band)
        try:
            d = detected_photons(sys_, pulse, det, noise=noise, band=band)
            result["detected"] = {"approx": d.approx, "exact": d.exact, "discrepancy": d.discrepancy}
        except ApproximationOutOfRange as exc:
            print(f"note: {exc}", file=sys.stderr)
            d = detected_photons(sys_, pulse, det, approx=False, noise=noise, band=band)
            result["detected"] = {"approx": None, "exact": d.exact, "discrepancy": None}
    else:
        # cooperativities only: narrowband (delta-pulse) estimate
        n_o = b_coeff_dc(sys_) * pulse.n_p + (thermal_counts(sys_) if noise else 0.0)
        result.update(N_o=n_o, ratio=n_o / pulse.n_p if pulse.n_p > 0 else 0.0, method="narrowband")
    return write_json(result), "json"


def _sweep(cfg, args):
    base = build_system(cfg)
    grid = build_grid(cfg)
    kind = cfg.kind or "efficiency"
    gw, go = np.meshgrid(grid.gamma_w, grid.gamma_o, indexing="ij")
    if kind == "efficiency":
        surf = efficiency_surface(base, build_detector(cfg), grid, workers=args.threads)
        names, cols = ["eta_eff [1]"], [surf.values]
        meta = surf.metadata
    else:
        pulse, report = build_pulse(cfg, base)
        rel = cfg.W_over_Wc
        off = ratio_surface(base, pulse, grid, noise=False, W_over_Wc=rel, workers=args.threads)
        names, cols = ["ratio_noise_off [1]"], [off.values]
        meta = dict(off.metadata, noise=None, W_check=report)
        if base.n_b_T or base.n_w_T or base.n_o_T:
            on = ratio_surface(base, pulse, grid, noise=True, W_over_Wc=rel,
                               band_over_Wc=cfg.band_over_Wc or 1.0, workers=args.threads)
            names.append("ratio_noise_on [1]")
            cols.append(on.values)
    fmt = args.format or cfg.format or "csv"
    if fmt == "csv":
        header = ["Gamma_w [1]", "Gamma_o [1]"] + names
        return write_csv(header, [gw.ravel(), go.ravel()] + [c.ravel() for c in cols]), "csv"
    doc = {
        "kind": kind,
        "grid": {"gamma_w": grid.gamma_w, "gamma_o": grid.gamma_o, "scale": grid.scale},
        "values": {n.split(" ")[0]: c for n, c in zip(names, cols)},
        "metadata": meta,
    }
    return write_json(doc), "json"


def _match(cfg, args):
    base = build_system(cfg)
    det = build_detector(cfg)
    if cfg.target is None:
        raise MissingParameter(["target"], "match")
    gamma = find_min_cooperativity(cfg.target, det, base)
    doc = {
        "target": cfg.target,
        "Gamma_w": gamma,
        "Gamma_o": gamma,
        "eta_eff": eta_eff(with_cooperativities(base, gamma, gamma), det),
        "ceiling": det.eta * base.eta_cpl_w * base.eta_cpl_o,
    }
    return write_json(doc), "json"


def oracle_report(sys_) -> dict:
    """Cross-check the structured solve against the independent engines."""
    require(sys_, "gamma_M", "kappa_w", "kappa_o", "G_w", "G_o", context="oracle-check")
    scale = min(sys_.W_c, sys_.kappa_w, sys_.kappa_o)
    checks = {}
    omegas = np.linspace(-5, 5, 41) * max(sys_.W_c, sys_.kappa_w, sys_.kappa_o)
    dev = defect = 0.0
    for w in omegas:
        a, b = oracle.dense_scattering(sys_, w), scattering_row(sys_, w)
        dev = max(dev, max(abs(complex(getattr(a, k)) - complex(getattr(b, k))) for k in "ABCDE"))
        defect = max(defect, float(sum_rule_defect(a)))
    checks["dense_vs_structured"] = {"max_deviation": dev, "tolerance": DENSE_ATOL}
    checks["dense_sum_rule"] = {"max_deviation": defect, "tolerance": DENSE_ATOL}
    worst = 0.0
    for nu in np.linspace(-3, 3, 10) * scale:
        r = oracle.time_domain_response(sys_, oracle.DriveProbe("microwave-ext", 1.0, nu))
        ref = -complex(scattering_row(sys_, nu).B)
        worst = max(worst, abs(r - ref) / abs(ref))
    checks["time_domain_vs_B"] = {"max_deviation": worst, "tolerance": TIME_DOMAIN_RTOL}
    for label, line in (("noise_flux", False), ("noise_flux_line_thermal", True)):
        flux = oracle.stationary_noise_flux(sys_, line_thermal=line)
        integral, _ = integrate_noise(sys_, math.inf, line_thermal=line)
        rel = 0.0 if flux == integral == 0 else abs(flux - integral) / abs(flux)
        checks[label] = {"max_deviation": rel, "tolerance": NOISE_RTOL, "flux": flux, "integral": integral}
    for c in checks.values():
        c["passed"] = c["max_deviation"] <= c["tolerance"]
    return checks


def _oracle_check(cfg, args):
    checks = oracle_report(build_system(cfg))
    text = write_json({"passed": all(c["passed"] for c in checks.values()), "checks": checks})
    if not all(c["passed"] for c in checks.values()):
        raise OracleFailure(text)
    return text, "json"


_HANDLERS = {
    "derive": _derive,
    "spectrum": _spectrum,
    "convert": _convert,
    "sweep": _sweep,
    "match": _match,
    "oracle-check": _oracle_check,
}


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eomdet", description="Electro-opto-mechanical microwave photodetector model")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("config", help="configuration file ('-' for standard input)")
    p.add_argument("-o", "--output", default=None, help="output path (default: [output] path or stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="surface format for sweep")
    p.add_argument("--threads", type=int, default=None, help="sweep worker threads (default: $EOMDET_THREADS or CPU count)")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config == "-":
            text = sys.stdin.read()
        else:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, cat, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        try:
            cfg = parse_config(text)
            payload, _ = _HANDLERS[args.subcommand](cfg, args)
        except OracleFailure as exc:
            _emit(str(exc), args.output)
            print("error: oracle check failed", file=sys.stderr)
            return EXIT_ORACLE
        except (ConfigError, MissingParameter, TargetUnreachable, ApproximationOutOfRange, ValueError) as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (QuadratureNonConvergence, NotConverged, SingularSystem) as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    _emit(payload, args.output or cfg.path)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
