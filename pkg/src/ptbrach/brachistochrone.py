"""Time-optimal transfer between two states at fixed level splitting.

The PT-frame problem is solved by moving to the Hermitian frame with the
boost rho(beta), solving the ordinary problem there (a rotation about the
axis normal to the geodesic plane), and pulling the optimal generator back
as H_b = rho^{-1} h_b rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CertificateFailure, NotHermitian, ZeroState
from .geometry import bloch_distance, to_bloch
from .metric import MetricPair, metric_from_beta
from .numerics import SIGMA_X, SIGMA_Y, SIGMA_Z, as_cmat, as_cvec, expm, hermiticity_defect

BETA_GUARD = math.acosh(1e8)
_COINCIDENT = 1e-12


def _normalized(psi) -> np.ndarray:
    psi = as_cvec(psi, 2)
    n = np.linalg.norm(psi)
    if n == 0:
        raise ZeroState("state is zero")
    return psi / n


def _pauli_vector(n) -> np.ndarray:
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def _bloch_array(psi) -> np.ndarray:
    return np.array(to_bloch(psi))


def projective_residual(psi, chi) -> float:
    """|psi ^ chi| / (|psi| |chi|): sine of half the Bloch angle between the rays."""
    u, v = _normalized(psi), _normalized(chi)
    return float(abs(u[0] * v[1] - u[1] * v[0]))


@dataclass(frozen=True)
class BrachistochroneProblem:
    psi_i: np.ndarray
    psi_f: np.ndarray
    omega: float
    beta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "psi_i", as_cvec(self.psi_i, 2))
        object.__setattr__(self, "psi_f", as_cvec(self.psi_f, 2))
        if not np.any(self.psi_i) or not np.any(self.psi_f):
            raise ZeroState("boundary states must be nonzero")
        if not self.omega > 0:
            raise ValueError("omega must be positive")


@dataclass(frozen=True)
class BrachistochroneSolution:
    h_b: np.ndarray = field(repr=False)
    H_b: np.ndarray = field(repr=False)
    t_min: float
    phi_i: np.ndarray = field(repr=False)
    phi_f: np.ndarray = field(repr=False)
    omega: float
    beta: float = 0.0
    degenerate: bool = False
    branch_times: tuple[float, float] | None = None
    arrival_residual: float = 0.0


def hermitian_brachistochrone(phi_i, phi_f, omega: float) -> tuple[np.ndarray, float, bool]:
    """Geodesic rotation generator h_b = (omega/2) n.sigma and its arrival time.

    n is the unit normal of the great circle through the two Bloch points, so
    exp(-i t h_b) turns phi_i into phi_f after t = dist/omega. For antipodal
    states any normal to phi_i works; the first coordinate axis not nearly
    parallel to it is used. Coincident rays return t = 0 with the flag set.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    u, v = _normalized(phi_i), _normalized(phi_f)
    bi, bf = _bloch_array(u), _bloch_array(v)
    if projective_residual(u, v) <= _COINCIDENT:
        return 0.5 * omega * _pauli_vector(bi), 0.0, True
    n = np.cross(bi, bf)
    norm = np.linalg.norm(n)
    if norm < 1e-9:
        c = next(e for e in np.eye(3) if abs(bi @ e) < 0.9)
        n = c - (bi @ c) * bi
        norm = np.linalg.norm(n)
    n = n / norm
    return 0.5 * omega * _pauli_vector(n), bloch_distance(u, v) / omega, False


def first_arrival_time(h, phi_i, phi_f, tol: float = 1e-9) -> float:
    """Earliest t >= 0 with exp(-i t h) phi_i proportional to phi_f; inf if never.

    A Hermitian 2x2 h = c I + v.sigma precesses Bloch vectors about v at rate
    2|v|, so arrival needs both states on one cone about v and the time is the
    precession angle divided by the rate.
    """
    h = as_cmat(h, dims=(2,))
    if hermiticity_defect(h) > 1e-10 * max(1.0, float(np.max(np.abs(h)))):
        raise NotHermitian("first_arrival_time needs a Hermitian generator")
    u, w = _normalized(phi_i), _normalized(phi_f)
    if projective_residual(u, w) <= _COINCIDENT:
        return 0.0
    v = np.array([h[0, 1].real, -h[0, 1].imag, 0.5 * (h[0, 0] - h[1, 1]).real])
    rate = 2.0 * np.linalg.norm(v)
    if rate == 0.0:
        return math.inf
    n = v / np.linalg.norm(v)
    bi, bf = _bloch_array(u), _bloch_array(w)
    if abs(bi @ n - bf @ n) > tol:
        return math.inf
    pi_, pf = bi - (bi @ n) * n, bf - (bf @ n) * n
    ang = math.atan2(np.cross(pi_, pf) @ n, pi_ @ pf) % (2 * math.pi)
    return ang / rate


def solve_pt(problem: BrachistochroneProblem, tol: Tolerances = DEFAULT_TOL) -> BrachistochroneSolution:
    """Boost to the Hermitian frame, solve there, pull the generator back.

    Raises :class:`MetricOverflow` beyond the EP guard and
    :class:`CertificateFailure` if the PT-frame evolution under H_b misses
    psi_f at t_min by more than the projective tolerance.
    """
    mp: MetricPair = metric_from_beta(problem.beta, tol)
    phi_i, phi_f = mp.rho @ problem.psi_i, mp.rho @ problem.psi_f
    h_b, t_min, degenerate = hermitian_brachistochrone(phi_i, phi_f, problem.omega)
    H_b = mp.rho_inv @ h_b @ mp.rho
    arrived = expm(H_b, -1j * t_min, tol) @ problem.psi_i
    res = projective_residual(arrived, problem.psi_f)
    if res > tol.projective:
        raise CertificateFailure(f"PT-frame evolution misses the target by {res:.3e}")
    # flip-time branches of the family member with this omega and beta
    alpha = math.atan(math.sinh(problem.beta))
    branches = ((math.pi + 2 * alpha) / problem.omega, (math.pi - 2 * alpha) / problem.omega)
    return BrachistochroneSolution(
        h_b, H_b, t_min, phi_i, phi_f, problem.omega, problem.beta, degenerate, branches, res
    )


def retimed(solution: BrachistochroneSolution, h, beta: float | None = None) -> BrachistochroneSolution:
    """Same boundary states driven by another Hermitian-frame generator h."""
    h = as_cmat(h, dims=(2,))
    b = solution.beta if beta is None else beta
    mp = MetricPair(b)
    t = first_arrival_time(h, solution.phi_i, solution.phi_f)
    return replace(solution, h_b=h, H_b=mp.rho_inv @ h @ mp.rho, t_min=t, degenerate=False)


def aa_certificate(solution: BrachistochroneSolution, slack: float = 1e-10) -> tuple[float, float, bool]:
    """(t_min, dist/omega, t_min >= dist/omega - slack) in the Hermitian frame.

    omega is read off the spectrum of h_b rather than trusted from the
    problem, so a generator with a different gap is judged correctly.
    """
    h = solution.h_b
    gap = 2.0 * math.hypot(abs(h[0, 1]), 0.5 * (h[0, 0] - h[1, 1]).real)
    lhs = solution.t_min
    if gap == 0.0:
        return lhs, math.inf, False
    rhs = bloch_distance(solution.phi_i, solution.phi_f) / gap
    return lhs, rhs, bool(lhs >= rhs - slack)


__all__ = [
    "BETA_GUARD",
    "BrachistochroneProblem",
    "BrachistochroneSolution",
    "aa_certificate",
    "first_arrival_time",
    "hermitian_brachistochrone",
    "projective_residual",
    "retimed",
    "solve_pt",
]
