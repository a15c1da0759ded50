"""Effective quantum efficiency over (Gamma_w, Gamma_o) and the matched optimum.

    python3 scripts/efficiency_surface.py [--eta 0.5] [--target 0.9]
"""
import argparse
from pathlib import Path

import numpy as np

from eomdet.config import build_system, parse_config
from eomdet.detector import DetectorModel
from eomdet.errors import TargetUnreachable
from eomdet.params import from_cooperativities
from eomdet.sweep import GridSpec, efficiency_surface, find_min_cooperativity

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "reference.ini"))
    ap.add_argument("--eta", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--target", type=float, default=0.9)
    ap.add_argument("--out", default="efficiency_surface.csv")
    args = ap.parse_args()

    ref = build_system(parse_config(Path(args.config).read_text()))
    base = from_cooperativities(1.0, 1.0, gamma_M=ref.gamma_M, kappa_w=ref.kappa_w, kappa_o=ref.kappa_o)
    det = DetectorModel(args.eta)
    grid = GridSpec((1e-2, 1e3), (1e-2, 1e3), points=args.points)
    surf = efficiency_surface(base, det, grid)

    gw, go = np.meshgrid(grid.gamma_w, grid.gamma_o, indexing="ij")
    np.savetxt(args.out, np.column_stack([gw.ravel(), go.ravel(), surf.values.ravel()]), delimiter=",",
               header="Gamma_w,Gamma_o,eta_eff", comments="", fmt="%.17e")
    for g_o in (1.0, 10.0, 100.0):
        j = int(np.argmin(np.abs(np.log(grid.gamma_o / g_o))))
        i = int(np.argmax(surf.values[:, j]))
        print(f"Gamma_o = {grid.gamma_o[j]:8.4g}: best Gamma_w = {grid.gamma_w[i]:8.4g} "
              f"(1 + Gamma_o = {1 + grid.gamma_o[j]:.4g}), eta_eff = {surf.values[i, j]:.6f}")
    try:
        g = find_min_cooperativity(args.target, det, base)
        print(f"eta_eff >= {args.target} needs Gamma_w = Gamma_o >= {g:.6g}")
    except TargetUnreachable as exc:
        print(f"target {args.target}: {exc}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
