"""Input and converted output spectra for the reference converter at 4 K.

Writes a CSV (detuning in units of omega_M, densities in photons per rad/s)
and prints the photon budget and spectral moments.

    python3 scripts/reference_spectrum.py [--config configs/reference.ini] [--out reference_spectrum.csv]
"""
import argparse
import math
from pathlib import Path

import numpy as np

from eomdet.config import build_pulse, build_system, parse_config
from eomdet.detector import DetectorModel, eta_eff, thermal_counts
from eomdet.pulse import converted_photons, input_spectrum, output_spectrum

ROOT = Path(__file__).resolve().parents[1]


def moments(w, s):
    area = np.trapezoid(s, w)
    mean = np.trapezoid(w * s, w) / area
    return area, mean, math.sqrt(np.trapezoid((w - mean) ** 2 * s, w) / area)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "reference.ini"))
    ap.add_argument("--out", default="reference_spectrum.csv")
    ap.add_argument("--points", type=int, default=4001)
    args = ap.parse_args()

    cfg = parse_config(Path(args.config).read_text())
    sys = build_system(cfg)
    pulse, report = build_pulse(cfg, sys)
    w = np.linspace(pulse.delta_p - 8 * pulse.W, pulse.delta_p + 8 * pulse.W, args.points)
    s_in = input_spectrum(pulse, w)
    s_sig = output_spectrum(sys, pulse, w, noise=False)
    s_out = output_spectrum(sys, pulse, w, noise=True)
    np.savetxt(
        args.out,
        np.column_stack([w / sys.omega_M, s_in, s_out, s_sig]),
        delimiter=",",
        header="omega_over_omega_M,input_density,output_density,output_signal_density",
        comments="",
        fmt="%.17e",
    )

    conv = converted_photons(sys, pulse)
    a_in, _, sd_in = moments(w, s_in)
    a_out, _, sd_out = moments(w, s_sig)
    print(f"W_c = {sys.W_c:.6e} rad/s, W = {pulse.W:.6e} rad/s (mismatch {report['mismatch']})")
    print(f"Gamma_w = {sys.Gamma_w:.6g}, Gamma_o = {sys.Gamma_o:.6g}")
    print(f"|B(0)|^2 = {eta_eff(sys, DetectorModel()):.8f}")
    print(f"input photons  {a_in:.9f}")
    print(f"signal photons {conv.signal:.9f}  noise photons {conv.noise:.6f}")
    print(f"point thermal counts {thermal_counts(sys):.6e}")
    print(f"rms width out/in {sd_out / sd_in:.5f}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
