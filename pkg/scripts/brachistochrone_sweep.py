"""Sweep beta toward the EP and tabulate the PT-frame passage time.

For each beta the canonical up -> down problem is solved; t_min falls below
pi/omega while the Hermitian-frame certificate keeps holding.
"""
import argparse
import math
from dataclasses import dataclass

import numpy as np

from ptbrach.brachistochrone import BrachistochroneProblem, aa_certificate, solve_pt


@dataclass
class SweepConfig:
    omega: float = 1.0
    beta_max: float = 15.0
    n: int = 31


def main(argv=None):
    cfg = SweepConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--omega", type=float, default=cfg.omega)
    p.add_argument("--beta-max", type=float, default=cfg.beta_max)
    p.add_argument("--n", type=int, default=cfg.n)
    cfg = SweepConfig(**vars(p.parse_args(argv)))

    print(f"{'beta':>8} {'t_min':>14} {'t_min*omega/pi':>15} {'aa':>4}")
    for beta in np.linspace(0.0, cfg.beta_max, cfg.n):
        sol = solve_pt(BrachistochroneProblem([1, 0], [0, 1], cfg.omega, beta))
        _, _, ok = aa_certificate(sol)
        print(f"{beta:8.3f} {sol.t_min:14.6e} {sol.t_min * cfg.omega / math.pi:15.6e} {'ok' if ok else 'FAIL':>4}")


if __name__ == "__main__":
    main()
