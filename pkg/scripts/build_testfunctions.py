#!/usr/bin/env python3
"""Build and serialize the six standard test functions with certificates.

Writes JSON artifacts and certificate reports under out/testfns/ so later
runs (and the CLI) can reload them without redoing the eigensolves.
"""

import pathlib
import sys

from tauberlab.cli import main

OUT = pathlib.Path("out/testfns")


def run() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    status = 0
    for l in (1, 2, 3):
        status |= main(["build-testfn", "--family", "gamma", "--l", str(l),
                        "--out", str(OUT / f"gamma_l{l}.json"),
                        "--report", str(OUT / f"gamma_l{l}_cert.json")])
    for m in (1, 2, 3):
        status |= main(["build-testfn", "--family", "zeta", "--m", str(m),
                        "--out", str(OUT / f"zeta_m{m}.json"),
                        "--report", str(OUT / f"zeta_m{m}_cert.json")])
    return status


if __name__ == "__main__":
    sys.exit(run())
