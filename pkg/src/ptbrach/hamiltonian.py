"""The two-level PT-symmetric Hamiltonian family.

    H(r, s, theta) = [[r e^{i theta}, s], [s, r e^{-i theta}]]

with parity P = sigma_x and time reversal acting as complex conjugation.
The exact-phase parametrisation in terms of (alpha, beta, omega, a0) lives
here as well; ``from_params`` inverts it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import InconsistentRadius, NegativeCoupling, NotExactPhase, ZeroCoupling
from .numerics import SIGMA_X, frobenius, frozen

PARITY = SIGMA_X


class Phase(str, Enum):
    EXACT = "ExactPT"
    EXCEPTIONAL = "ExceptionalPoint"
    BROKEN = "BrokenPT"


@dataclass(frozen=True)
class PTHamiltonian:
    r: float
    s: float
    theta: float
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("r", "s", "theta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.s == 0.0:
            raise ZeroCoupling("coupling s must be nonzero")
        re = self.r * math.cos(self.theta)
        im = self.r * math.sin(self.theta)
        m = np.array([[complex(re, im), self.s], [self.s, complex(re, -im)]])
        object.__setattr__(self, "matrix", frozen(m))

    @property
    def discriminant(self) -> float:
        """s^2 - r^2 sin^2(theta), factored to limit cancellation."""
        rs = self.r * math.sin(self.theta)
        return (self.s - rs) * (self.s + rs)

    def phase(self, tol: Tolerances = DEFAULT_TOL) -> Phase:
        d = self.discriminant
        if abs(d) <= tol.ep_band * max(self.s**2, self.r**2):
            return Phase.EXCEPTIONAL
        return Phase.EXACT if d > 0 else Phase.BROKEN


def build(r: float, s: float, theta: float) -> PTHamiltonian:
    return PTHamiltonian(r, s, theta)


def pt_commutator_norm(h: PTHamiltonian) -> float:
    """||P H* P - H||_F, zero iff [PT, H] = 0."""
    m = h.matrix
    return frobenius(PARITY @ np.conj(m) @ PARITY - m)


@dataclass(frozen=True)
class SpectralData:
    e_plus: complex
    e_minus: complex
    # columns: (|E+>, |E->), first component 1
    right: np.ndarray = field(repr=False)
    # columns: (|~E+>, |~E->) with <~E_i|E_j> = delta_ij; None at the EP
    left: np.ndarray | None = field(repr=False)
    phase: Phase

    @property
    def omega(self) -> complex:
        return self.e_plus - self.e_minus


def _chi(h: PTHamiltonian, energy: complex) -> np.ndarray:
    # (1, (E - r e^{i theta}) / s); reduces to (1, -i sin(alpha) +- cos(alpha))
    return np.array([1.0, (energy - h.matrix[0, 0]) / h.s], dtype=complex)


def spectrum(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> SpectralData:
    """Eigenvalues r cos(theta) +- sqrt(s^2 - r^2 sin^2 theta) and bi-orthonormal vectors.

    At an exceptional point the two eigenvalues are reported coalesced at
    ``r cos(theta)`` with the single isotropic eigenvector in both columns,
    and ``left`` is ``None``.
    """
    phase = h.phase(tol)
    a0 = h.r * math.cos(h.theta)
    if phase is Phase.EXCEPTIONAL:
        chi = _chi(h, a0)
        right = frozen(np.column_stack([chi, chi]))
        return SpectralData(complex(a0), complex(a0), right, None, phase)

    d = h.discriminant
    root = complex(math.sqrt(d)) if d > 0 else complex(0.0, math.sqrt(-d))
    e_plus, e_minus = a0 + root, a0 - root
    chis = [_chi(h, e_plus), _chi(h, e_minus)]
    right = np.column_stack(chis)
    # H is complex symmetric, so H^dagger conj(chi) = conj(E) conj(chi);
    # |~E> = conj(chi / chi^T chi) gives <~E|E> = 1
    left = np.column_stack([np.conj(c / (c @ c)) for c in chis])
    return SpectralData(e_plus, e_minus, frozen(right), frozen(left), phase)


@dataclass(frozen=True)
class DerivedParams:
    alpha: float
    beta: float
    omega: float
    a0: float


def derived_params(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> DerivedParams:
    """(alpha, beta, omega, a0) with sin(alpha) = (r/s) sin(theta) = tanh(beta)."""
    if h.phase(tol) is not Phase.EXACT:
        raise NotExactPhase(f"H(r={h.r}, s={h.s}, theta={h.theta}) is not in the exact phase")
    if h.s < 0:
        raise NegativeCoupling("s < 0 is not normalised; flip the sign of the second basis vector")
    rs = h.r * math.sin(h.theta)
    sqrt_d = math.sqrt(h.discriminant)
    sin_a = rs / h.s
    cos_a = sqrt_d / h.s
    alpha = math.atan2(sin_a, cos_a)
    beta = math.atanh(sin_a) if abs(sin_a) < 0.5 else 0.5 * math.log((h.s + rs) / (h.s - rs))
    return DerivedParams(alpha=alpha, beta=beta, omega=2.0 * sqrt_d, a0=h.r * math.cos(h.theta))


def from_params(omega: float, beta: float, r: float | None = None) -> PTHamiltonian:
    """Rebuild H from the level splitting and rapidity.

    ``r=None`` selects the tuned radius r = (omega/2) cosh(beta), for which
    a0 = omega/2 whatever beta is. Otherwise a0 = sqrt(r^2 - (omega^2/4) sinh^2 beta).
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    half = 0.5 * omega
    s = half * math.cosh(beta)
    rs = half * math.sinh(beta)
    if r is None:
        return PTHamiltonian(s, s, math.atan2(math.sinh(beta), 1.0))
    a0_sq = r * r - rs * rs
    if a0_sq < 0:
        raise InconsistentRadius(f"r = {r} is smaller than (omega/2)|sinh beta| = {abs(rs)}")
    a0 = math.sqrt(a0_sq)
    theta = math.atan2(rs, a0)
    return PTHamiltonian(math.hypot(rs, a0), s, theta)


def random_exact_hamiltonians(
    rng: np.random.Generator, n: int, max_abs_sin_alpha: float = 0.95
) -> list[PTHamiltonian]:
    """Draw exact-phase members with r in (-2, 2), s in (0.2, 2), |sin alpha| bounded."""
    out: list[PTHamiltonian] = []
    while len(out) < n:
        r = rng.uniform(-2.0, 2.0)
        s = rng.uniform(0.2, 2.0)
        theta = rng.uniform(-math.pi, math.pi)
        if abs(r * math.sin(theta) / s) < max_abs_sin_alpha:
            out.append(PTHamiltonian(r, s, theta))
    return out
