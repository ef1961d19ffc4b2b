"""Pseudo-unitary time evolution, spin-flip probabilities and passage times."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOL, Tolerances
from .errors import AlphaOutOfRange, CertificateFailure, NotExactPhase, ZeroState
from .hamiltonian import Phase, PTHamiltonian, derived_params, from_params
from .numerics import as_cvec, expm, frobenius

DEFAULT_GRID = 2048


def propagator_closed_form(h: PTHamiltonian, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """U(t) written with alpha and omega; exact phase only."""
    p = derived_params(h, tol)
    half = 0.5 * p.omega * t
    pref = cmath.exp(-1j * p.a0 * t) / math.cos(p.alpha)
    off = -1j * math.sin(half)
    return pref * np.array(
        [[math.cos(half - p.alpha), off], [off, math.cos(half + p.alpha)]], dtype=complex
    )


def propagator(h: PTHamiltonian, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """U(t) = exp(-i t H).

    In the exact phase the result is compared against the closed form and a
    :class:`CertificateFailure` is raised if they drift apart.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    u = expm(h.matrix, -1j * t)
    if h.phase(tol) is Phase.EXACT and h.s > 0:
        cf = propagator_closed_form(h, t, tol)
        scale = max(1.0, frobenius(cf)) * max(1.0, abs(t) * frobenius(h.matrix))
        if frobenius(u - cf) > tol.certificate * scale:
            raise CertificateFailure(f"expm and closed-form propagators differ by {frobenius(u - cf):.3e}")
    return u


@dataclass(frozen=True)
class EvolutionResult:
    time_grid: np.ndarray
    states: np.ndarray  # shape (n, 2)
    p_up: np.ndarray
    p_down: np.ndarray

    @property
    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)


def evolve_state(
    h: PTHamiltonian, psi0, t_max: float, n_steps: int = DEFAULT_GRID, tol: Tolerances = DEFAULT_TOL
) -> EvolutionResult:
    """psi(t_k) = U(t_k) psi0 on a uniform grid of ``n_steps`` points over [0, t_max].

    Probabilities are <psi|P|psi>/<psi|psi> for the sigma_z eigenstates; the
    global phase exp(-i a0 t) is kept in the stored states.
    """
    psi0 = as_cvec(psi0, 2)
    if not np.any(psi0):
        raise ZeroState("initial state is zero")
    if n_steps < 2:
        raise ValueError("n_steps must be at least 2")
    grid = np.linspace(0.0, t_max, n_steps)
    states = np.array([expm(h.matrix, -1j * t, tol) @ psi0 for t in grid])
    w = np.abs(states) ** 2
    norm = w.sum(axis=1)
    return EvolutionResult(grid, states, w[:, 0] / norm, w[:, 1] / norm)


def flip_probabilities(alpha: float, omega: float, t):
    """Closed-form (p_up, p_down) for the initial state |up>."""
    t = np.asarray(t, dtype=float)
    c = np.cos(0.5 * omega * t - alpha) ** 2
    s = np.sin(0.5 * omega * t) ** 2
    return c / (c + s), s / (c + s)


@dataclass(frozen=True)
class FlipTimes:
    up_to_down: float
    down_to_up: float
    round_trip: float
    aa_bound: float

    @property
    def below_bound(self) -> bool:
        return self.up_to_down < self.aa_bound


def _first_root(h: PTHamiltonian, psi0: np.ndarray, component: int, a0: float, t_hi: float) -> float:
    # the phase-stripped component is real and crosses zero at the flip
    def g(t: float) -> float:
        return (cmath.exp(1j * a0 * t) * (expm(h.matrix, -1j * t) @ psi0)[component]).real

    return brentq(g, 0.0, t_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def flip_times(h: PTHamiltonian, validate: bool = True, tol: Tolerances = DEFAULT_TOL) -> FlipTimes:
    """First up->down and down->up flip times (pi +- 2 alpha)/omega.

    With ``validate`` the closed-form times are checked against zeros of the
    numerically propagated amplitudes. The check is scaled by cosh^2(beta):
    entries of H grow like cosh(beta) near the EP while omega stays fixed,
    so the attainable precision degrades accordingly.
    """
    if h.phase(tol) is not Phase.EXACT:
        raise NotExactPhase("flip times need the exact phase")
    p = derived_params(h, tol)
    w = p.omega
    up = (math.pi + 2 * p.alpha) / w
    down = (math.pi - 2 * p.alpha) / w
    ft = FlipTimes(up, down, up + down, math.pi / w)
    if validate:
        t_up = _first_root(h, np.array([1, 0], complex), 0, p.a0, up + math.pi / w)
        t_down = _first_root(h, np.array([0, 1], complex), 1, p.a0, down + math.pi / w)
        cond = math.cosh(p.beta) ** 2
        bound = tol.flip_crosscheck * cond * max(1.0, 2 * math.pi / w)
        if abs(t_up - up) > bound or abs(t_down - down) > bound:
            raise CertificateFailure(
                f"flip times disagree with propagated zeros: {up} vs {t_up}, {down} vs {t_down}"
            )
    return ft


@dataclass(frozen=True)
class FlipTimeRow:
    alpha: float
    up_to_down: float
    down_to_up: float
    aa_bound: float
    below_bound: bool
    validated: bool


def hamiltonian_for_alpha(omega: float, alpha: float) -> PTHamiltonian:
    """Tuned family member with level splitting omega and angle alpha."""
    if not abs(alpha) < math.pi / 2:
        raise AlphaOutOfRange(f"|alpha| must be < pi/2, got {alpha}")
    # atanh(sin a) written to stay accurate as |a| -> pi/2
    beta = math.asinh(math.tan(alpha))
    return from_params(omega, beta)


def flip_time_scan(
    omega: float, alphas, validate: bool = True, tol: Tolerances = DEFAULT_TOL
) -> list[FlipTimeRow]:
    """Tabulate flip times against the Anandan-Aharonov bound pi/omega at fixed omega.

    Times are evaluated from (alpha, omega) directly, so rows stay exact
    arbitrarily close to the EP. With ``validate`` each row's Hamiltonian is
    rebuilt and cross-checked by :func:`flip_times`; rows whose H falls in
    the EP band are reported with ``validated=False``.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    rows = []
    for a in alphas:
        a = float(a)
        h = hamiltonian_for_alpha(omega, a)
        up = (math.pi + 2 * a) / omega
        down = (math.pi - 2 * a) / omega
        checked = False
        if validate and h.phase(tol) is Phase.EXACT:
            ft = flip_times(h, validate=True, tol=tol)
            bound = tol.flip_crosscheck * math.cosh(derived_params(h, tol).beta) ** 2
            if abs(ft.up_to_down - up) > bound * max(1.0, up) or abs(ft.down_to_up - down) > bound * max(1.0, down):
                raise CertificateFailure(f"scan row alpha={a}: H-derived times disagree")
            checked = True
        rows.append(FlipTimeRow(a, up, down, math.pi / omega, up < math.pi / omega, checked))
    return rows
