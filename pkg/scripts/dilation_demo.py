"""Solve the Riccati dilation for one Hamiltonian and report the certificates."""
import argparse
import math
from dataclasses import dataclass

from ptbrach.dilation import co_evolution_check, solve_dilation
from ptbrach.hamiltonian import build, derived_params


@dataclass
class DilationConfig:
    r: float = 1.0
    s: float = 1.0
    theta: float = math.pi / 6
    seed: int = 0
    method: str = "auto"


def main(argv=None):
    cfg = DilationConfig()
    p = argparse.ArgumentParser(description=__doc__)
    for k, v in vars(cfg).items():
        p.add_argument("--" + k, type=type(v), default=v)
    cfg = DilationConfig(**vars(p.parse_args(argv)))

    h = build(cfg.r, cfg.s, cfg.theta)
    blocks, report = solve_dilation(h, seed=cfg.seed, method=cfg.method)
    print(f"feasible={report.feasible} stage={report.stage} residual={report.residual_norm:.3e}")
    if report.feasible:
        t = 2 * math.pi / derived_params(h).omega
        for psi in ([1, 0], [0, 1], [1, 1j]):
            print(f"co-evolution deviation from {psi}: {co_evolution_check(h, blocks, psi, t):.3e}")


if __name__ == "__main__":
    main()
