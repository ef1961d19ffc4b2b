"""Numerical tolerances shared by the library, the tests and the CLI."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    # eigenvalue coalescence, relative to ||M||_F
    coalescence: float = 1e-9
    # |s^2 - r^2 sin^2(theta)| <= ep_band * max(s^2, r^2) is an exceptional point
    ep_band: float = 1e-9
    hermiticity: float = 1e-10
    # |det M| <= singularity * ||M||_F^dim is singular
    singularity: float = 1e-14
    jacobi_offdiag: float = 1e-15
    jacobi_max_sweeps: int = 50
    pade_order: int = 6
    pade_norm_threshold: float = 0.5
    # metric construction refused when cosh(beta) exceeds this
    metric_cosh_guard: float = 1e8
    certificate: float = 1e-10
    probability_clamp: float = 1e-12
    nonreal_probability: float = 1e-10
    collapse: float = 1e-14
    moebius_real: float = 1e-10
    riccati_feasible: float = 1e-8
    lm_max_iter: int = 500
    lm_residual: float = 1e-10
    lm_step: float = 1e-14
    flip_crosscheck: float = 1e-9
    projective: float = 1e-8

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()
