#!/usr/bin/env python3
"""Remainder-scan study: how fast the averaged counting remainder grows.

For each reference box, scans lambda over two decades with the layer width
eps = lambda^-kappa and fits the log-log slope of the averaged remainder.
Boxes have Lipschitz layer volume, so the expected slope is (n - 1) / 2.
"""

import math
import pathlib
import sys

import numpy as np

from tauberlab import BoxDomain, fit_loglog_slope, remainder_scan

OUT = pathlib.Path("out/scans")

BOXES = {
    "interval": (BoxDomain([math.pi], cutoff=1.2e4), 1e4),
    "square": (BoxDomain([1.0, 1.0], cutoff=1.2e4), 1e4),
    "cube": (BoxDomain([1.0, 1.0, 1.0], cutoff=2.5e3), 2e3),
}


def run(kappa: float = 0.5) -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (box, lam_max) in BOXES.items():
        lams = np.geomspace(1e2, lam_max, 25)
        scan = remainder_scan(box, lams, kappa)
        slope = fit_loglog_slope([r.lam for r in scan],
                                 [r.riesz_remainder for r in scan])
        target = (box.dim - 1) / 2.0
        lines = ["lambda,epsilon,counting,weyl_term,interval_width,riesz_remainder"]
        lines += [",".join(f"{v:.12g}" for v in
                           (r.lam, r.epsilon, r.counting, r.weyl_term,
                            r.interval_width, r.riesz_remainder))
                  for r in scan]
        (OUT / f"{name}_scan.csv").write_text("\n".join(lines) + "\n")
        print(f"{name}: riesz-remainder slope {slope:+.3f} "
              f"(target {target:+.2f})")
    return 0


if __name__ == "__main__":
    sys.exit(run(float(sys.argv[1]) if len(sys.argv) > 1 else 0.5))
