"""Scan up->down and down->up flip times across alpha at fixed omega.

Writes a CSV with the closed-form times, the Hermitian bound pi/omega and the
propagated cross-check flag. Usage: python3 scripts/flip_time_scan.py --omega 1 --n 200
"""
import argparse
import csv
import math
import sys
from dataclasses import dataclass

import numpy as np

from ptbrach.evolution import flip_time_scan


@dataclass
class ScanConfig:
    omega: float = 1.0
    n: int = 200
    edge: float = 1e-6  # distance kept from alpha = +-pi/2


def main(argv=None):
    cfg = ScanConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--omega", type=float, default=cfg.omega)
    p.add_argument("--n", type=int, default=cfg.n)
    p.add_argument("--edge", type=float, default=cfg.edge)
    cfg = ScanConfig(**vars(p.parse_args(argv)))

    alphas = np.linspace(-math.pi / 2 + cfg.edge, math.pi / 2 - cfg.edge, cfg.n)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["alpha", "up_to_down", "down_to_up", "aa_bound", "below_bound", "validated"])
    for row in flip_time_scan(cfg.omega, alphas):
        w.writerow([f"{row.alpha:.17g}", f"{row.up_to_down:.17g}", f"{row.down_to_up:.17g}",
                    f"{row.aa_bound:.17g}", int(row.below_bound), int(row.validated)])


if __name__ == "__main__":
    main()
