"""Observables and states in the PT frame and the Hermitian frame.

In the PT frame an observable with right/left eigenvectors |E_i>, |~E_i>
is described by quasi-projectors Pi_i = |E_i><~E_i| and a pure state by
Upsilon = |psi><~psi| with |~psi> = eta |psi>. Probabilities Tr(Pi_i Upsilon)
then coincide with the ordinary |<e_i|phi>|^2 of the Hermitian frame,
phi = rho psi.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    CertificateFailure,
    FrameMismatch,
    NonrealProbability,
    NotExactPhase,
    NotHermitian,
    RouteDisagreement,
    ZeroProbabilityOutcome,
    ZeroState,
)
from .hamiltonian import Phase, PTHamiltonian, derived_params, from_params, spectrum
from .metric import Direction, MetricPair, boost, hermitian_equivalent, metric_for
from .numerics import (
    I2,
    SIGMA_Y,
    SIGMA_Z,
    adjoint,
    as_cmat,
    as_cvec,
    eig2,
    eig_hermitian,
    frobenius,
    frozen,
    inverse,
    is_hermitian,
)


class Frame(str, Enum):
    HERMITIAN = "HermitianFrame"
    PT = "PTFrame"


class ProbabilityClampWarning(UserWarning):
    """A probability within round-off of zero but negative was clamped to 0."""


@dataclass(frozen=True)
class FrameObservable:
    operator: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)  # columns |E_i>
    left: np.ndarray = field(repr=False)  # columns |~E_i>, <~E_i|E_j> = delta_ij
    frame: Frame

    @property
    def quasi_projectors(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.outer(self.right[:, i], np.conj(self.left[:, i])) for i in range(len(self.eigenvalues))
        )


def _observable(op, values, right, left, frame) -> FrameObservable:
    order = np.argsort(np.real(values), kind="stable")
    return FrameObservable(
        frozen(op),
        np.real(np.asarray(values)[order]),
        frozen(np.asarray(right)[:, order]),
        frozen(np.asarray(left)[:, order]),
        Frame(frame),
    )


def observable_from_matrix(op, frame: Frame | str, tol: Tolerances = DEFAULT_TOL) -> FrameObservable:
    """Diagonalise a 2x2 operator with real, distinct eigenvalues."""
    op = as_cmat(op, dims=(2,))
    e = eig2(op, tol)
    if e.coalesced:
        raise NotExactPhase("operator has coalescing eigenvalues")
    if np.max(np.abs(e.values.imag)) > tol.certificate * max(1.0, frobenius(op)):
        raise NotExactPhase("operator has non-real eigenvalues")
    return _observable(op, e.values.real, e.right, e.left, frame)


def hamiltonian_observable(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> FrameObservable:
    """Energy observable of the PT frame from the bi-orthonormal spectrum of H."""
    sd = spectrum(h, tol)
    if sd.phase is not Phase.EXACT:
        raise NotExactPhase(f"H is in phase {sd.phase.value}")
    return _observable(h.matrix, [sd.e_plus.real, sd.e_minus.real], sd.right, sd.left, Frame.PT)


def hermitian_observable(op, tol: Tolerances = DEFAULT_TOL) -> FrameObservable:
    w, v = eig_hermitian(as_cmat(op, dims=(2,)), tol)
    return _observable(op, w, v, v, Frame.HERMITIAN)


@dataclass(frozen=True)
class StatisticalOperator:
    psi: np.ndarray = field(repr=False)
    psi_tilde: np.ndarray = field(repr=False)
    frame: Frame

    @property
    def upsilon(self) -> np.ndarray:
        return np.outer(self.psi, np.conj(self.psi_tilde))


def pt_state(psi, mp: MetricPair) -> StatisticalOperator:
    """Upsilon = |psi><~psi| with ~psi = eta psi, bi-normalised so <~psi|psi> = 1."""
    psi = as_cvec(psi, 2)
    n = mp.inner(psi, psi).real
    if not n > 0:
        raise ZeroState("state has zero eta-norm")
    psi = psi / math.sqrt(n)
    return StatisticalOperator(frozen(psi), frozen(mp.eta @ psi), Frame.PT)


def hermitian_state(phi) -> StatisticalOperator:
    phi = as_cvec(phi, 2)
    n = float(np.vdot(phi, phi).real)
    if not n > 0:
        raise ZeroState("state is zero")
    phi = phi / math.sqrt(n)
    return StatisticalOperator(frozen(phi), frozen(phi), Frame.HERMITIAN)


def to_frame(state: StatisticalOperator, mp: MetricPair, frame: Frame | str) -> StatisticalOperator:
    frame = Frame(frame)
    if state.frame is frame:
        return state
    if frame is Frame.HERMITIAN:
        return hermitian_state(mp.rho @ state.psi)
    return pt_state(mp.rho_inv @ state.psi, mp)


class Conjugated(NamedTuple):
    matrix: np.ndarray
    dirac_hermitian: bool


def conjugate_observable(op, mp: MetricPair, direction: str = "ToHermitianFrame") -> Conjugated:
    """rho O rho^{-1} (to the Hermitian frame) or rho^{-1} O rho (to the PT frame)."""
    op = as_cmat(op, dims=(2,))
    if Direction(direction) is Direction.TO_HERMITIAN:
        out = mp.rho @ op @ mp.rho_inv
    else:
        out = mp.rho_inv @ op @ mp.rho
    return Conjugated(out, is_hermitian(out))


def measurement_probabilities(
    observable: FrameObservable, state: StatisticalOperator, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """p_i = Tr(Pi_i Upsilon), certified against tr(Upsilon^dagger Pi_i^dagger)."""
    if observable.frame is not state.frame:
        raise FrameMismatch(f"observable in {observable.frame.value}, state in {state.frame.value}")
    ups = state.upsilon
    probs = []
    for pi in observable.quasi_projectors:
        p = complex(np.trace(pi @ ups))
        p_adj = complex(np.trace(adjoint(ups) @ adjoint(pi)))
        if abs(p - p_adj) > tol.nonreal_probability:
            raise NonrealProbability(f"Tr(Pi Upsilon) = {p} has a non-negligible imaginary part")
        probs.append(p.real)
    out = np.array(probs)
    if abs(out.sum() - 1.0) > tol.nonreal_probability:
        raise CertificateFailure(f"probabilities sum to {out.sum()}")
    for i, p in enumerate(out):
        if p < 0:
            if p < -tol.probability_clamp:
                raise NonrealProbability(f"negative probability {p}")
            warnings.warn(f"clamped probability {p:.3e} to 0", ProbabilityClampWarning, stacklevel=2)
            out[i] = 0.0
    return out


def expectation_routes(
    op, state: StatisticalOperator, mp: MetricPair, tol: Tolerances = DEFAULT_TOL
) -> dict[str, complex]:
    """The four evaluations of <O> linking both frames.

    ``op`` is read in the frame of ``state``. Returns Tr(o rho_state) in the
    Hermitian frame, sum_i E_i p_i with PT-frame quasi-projectors,
    Tr(O Upsilon) and Tr(Upsilon^dagger O^dagger).
    """
    op = as_cmat(op, dims=(2,))
    if state.frame is Frame.PT:
        op_pt, op_h = op, mp.rho @ op @ mp.rho_inv
    else:
        op_h, op_pt = op, mp.rho_inv @ op @ mp.rho
    if not is_hermitian(op_h, tol.hermiticity):
        raise NotHermitian("observable is not Hermitian in the Hermitian frame")
    s_pt = to_frame(state, mp, Frame.PT)
    s_h = to_frame(state, mp, Frame.HERMITIAN)

    w, e = eig_hermitian(op_h, tol)
    pt_obs = _observable(op_pt, w, mp.rho_inv @ e, mp.rho @ e, Frame.PT)
    p = measurement_probabilities(pt_obs, s_pt, tol)
    ups = s_pt.upsilon
    return {
        "hermitian_trace": complex(np.trace(op_h @ s_h.upsilon)),
        "spectral_sum": complex(np.dot(pt_obs.eigenvalues, p)),
        "pt_trace": complex(np.trace(op_pt @ ups)),
        "pt_adjoint_trace": complex(np.trace(adjoint(ups) @ adjoint(op_pt))),
    }


def expectation(op, state: StatisticalOperator, mp: MetricPair, tol: Tolerances = DEFAULT_TOL) -> float:
    routes = expectation_routes(op, state, mp, tol)
    vals = np.array(list(routes.values()))
    bound = tol.certificate * max(1.0, frobenius(op))
    if np.ptp(vals.real) > bound or np.max(np.abs(vals.imag)) > bound:
        raise RouteDisagreement(f"expectation routes disagree: {routes}")
    return float(vals[0].real)


def post_measurement_state(
    observable: FrameObservable, state: StatisticalOperator, outcome: int, tol: Tolerances = DEFAULT_TOL
) -> StatisticalOperator:
    """Pi_k (PT frame) or P_k (Hermitian frame) as the collapsed statistical operator."""
    p = measurement_probabilities(observable, state, tol)
    if p[outcome] <= tol.collapse:
        raise ZeroProbabilityOutcome(f"outcome {outcome} has probability {p[outcome]:.3e}")
    return StatisticalOperator(
        frozen(observable.right[:, outcome]), frozen(observable.left[:, outcome]), observable.frame
    )


# -- Weyl/Dirac boost analogy --------------------------------------------------

WEYL_ROTATION = frozen((I2 - 1j * SIGMA_Y) / math.sqrt(2.0))


@dataclass(frozen=True)
class WeylDecomposition:
    m: float
    p0: float
    py: float
    frak_h: np.ndarray = field(repr=False)
    frak_H: np.ndarray = field(repr=False)
    beta: float = 0.0


def weyl_decomposition(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> WeylDecomposition:
    """Rotate h - a0 to m sigma_z and H - a0 to sigma_z (p0 + sigma_y p_y)."""
    p = derived_params(h, tol)
    mp = metric_for(h, tol)
    v, v_inv = WEYL_ROTATION, inverse(WEYL_ROTATION)
    herm = hermitian_equivalent(h, mp, tol)
    frak_h = v_inv @ (herm - p.a0 * I2) @ v
    frak_H = v_inv @ (h.matrix - p.a0 * I2) @ v
    m = 0.5 * p.omega
    p0, py = m * math.cosh(p.beta), m * math.sinh(p.beta)
    scale = max(1.0, frobenius(h.matrix))
    checks = {
        "frak_h": frobenius(frak_h - m * SIGMA_Z),
        "frak_H": frobenius(frak_H - SIGMA_Z @ (p0 * I2 + py * SIGMA_Y)),
        "frak_H_conjugacy": frobenius(frak_H - mp.rho_inv @ frak_h @ mp.rho),
    }
    bad = {k: r for k, r in checks.items() if r > tol.certificate * scale * math.cosh(p.beta)}
    if bad:
        raise CertificateFailure(f"Weyl decomposition identities failed: {bad}")
    return WeylDecomposition(m, p0, py, frozen(frak_h), frozen(frak_H), p.beta)


def mass_shell_residual(w: WeylDecomposition) -> float:
    return abs(w.p0**2 - w.py**2 - w.m**2)


def chiral_block(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Sigma_z D_W = [[-m sigma_z, frak_H(beta)], [frak_H(-beta), -m sigma_z]] (4x4).

    frak_H(-beta) comes from the family member with opposite rapidity and
    the same omega and radius.
    """
    w = weyl_decomposition(h, tol)
    p = derived_params(h, tol)
    mirror = from_params(p.omega, -p.beta, r=math.hypot(h.r * math.sin(h.theta), p.a0))
    w_minus = weyl_decomposition(mirror, tol)
    ms = w.m * SIGMA_Z
    return np.block([[-ms, w.frak_H], [w_minus.frak_H, -ms]])


def boosted_chiral_pair(beta: float, phi0) -> np.ndarray:
    """(phi_R, phi_L) = (e^{beta sigma_y/2} phi0, e^{-beta sigma_y/2} phi0) stacked."""
    phi0 = as_cvec(phi0, 2)
    return np.concatenate([boost(beta) @ phi0, boost(-beta) @ phi0])
