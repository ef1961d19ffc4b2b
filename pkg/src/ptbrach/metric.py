"""Metric operator eta, boost rho = sqrt(eta), and the Hermitian equivalent h.

For the exact phase with rapidity beta (tanh beta = sin alpha):

    eta = exp(beta sigma_y),  rho = exp(beta sigma_y / 2),
    h = rho H rho^{-1} = a0 I + (omega/2) sigma_x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CertificateFailure, MetricOverflow
from .hamiltonian import PARITY, PTHamiltonian, derived_params
from .numerics import I2, SIGMA_X, adjoint, as_cvec, det, frobenius, frozen, SIGMA_Z


class Direction(str, Enum):
    TO_HERMITIAN = "ToHermitianFrame"
    TO_PT = "ToPTFrame"


def boost(beta: float) -> np.ndarray:
    """rho(beta) = exp(beta sigma_y / 2) = cosh(beta/2) I + sinh(beta/2) sigma_y."""
    ch, sh = math.cosh(0.5 * beta), math.sinh(0.5 * beta)
    return np.array([[ch, -1j * sh], [1j * sh, ch]], dtype=complex)


@dataclass(frozen=True)
class MetricPair:
    beta: float
    eta: np.ndarray = field(init=False, repr=False, compare=False)
    rho: np.ndarray = field(init=False, repr=False, compare=False)
    rho_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b = float(self.beta)
        object.__setattr__(self, "beta", b)
        ch, sh = math.cosh(b), math.sinh(b)
        object.__setattr__(self, "eta", frozen([[ch, -1j * sh], [1j * sh, ch]]))
        object.__setattr__(self, "rho", frozen(boost(b)))
        object.__setattr__(self, "rho_inv", frozen(boost(-b)))

    @property
    def c_operator(self) -> np.ndarray:
        """C with eta = P C."""
        return PARITY @ self.eta

    def inner(self, psi, chi) -> complex:
        """<psi|eta|chi>."""
        return complex(np.vdot(psi, self.eta @ np.asarray(chi, dtype=complex)))


def metric_from_beta(beta: float, tol: Tolerances = DEFAULT_TOL) -> MetricPair:
    if not math.isfinite(beta) or math.cosh(beta) > tol.metric_cosh_guard:
        raise MetricOverflow(f"cosh(beta) exceeds {tol.metric_cosh_guard:g}; too close to the EP")
    return MetricPair(beta)


def metric_certificates(mp: MetricPair, h: PTHamiltonian | None = None) -> dict[str, float]:
    """Residuals of every identity the pair must satisfy (all should vanish)."""
    eta, rho, rho_inv = mp.eta, mp.rho, mp.rho_inv
    res = {
        "eta_hermitian": frobenius(eta - adjoint(eta)),
        "det_eta": abs(det(eta) - 1.0),
        "eta_complex_orthogonal": frobenius(eta.T @ eta - I2),
        "rho_hermitian": frobenius(rho - adjoint(rho)),
        "rho_squared": frobenius(rho @ rho - eta),
        "rho_complex_orthogonal": frobenius(rho.T - rho_inv),
        "rho_inverse": frobenius(rho @ rho_inv - I2),
        "rho_pseudo_unitary": frobenius(adjoint(rho) @ SIGMA_Z @ rho - SIGMA_Z),
        "eta_transpose_cp": frobenius(eta.T - mp.c_operator @ PARITY),
    }
    if h is not None:
        m = h.matrix
        res["quasi_hermiticity"] = frobenius(eta @ m - adjoint(m) @ eta)
    return res


def _scale(mp: MetricPair) -> float:
    # identities involving eta are evaluated on O(cosh beta) entries
    return max(1.0, math.cosh(mp.beta))


def metric_for(h: PTHamiltonian, tol: Tolerances = DEFAULT_TOL) -> MetricPair:
    """Metric pair for an exact-phase H, with all certificates checked."""
    p = derived_params(h, tol)
    mp = metric_from_beta(p.beta, tol)
    bound = tol.certificate * _scale(mp) ** 2 * max(1.0, frobenius(h.matrix))
    bad = {k: v for k, v in metric_certificates(mp, h).items() if not v < bound}
    if bad:
        raise CertificateFailure(f"metric certificates failed: {bad}")
    return mp


def hermitian_equivalent(
    h: PTHamiltonian, mp: MetricPair, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """rho H rho^{-1}, checked against a0 I + (omega/2) sigma_x."""
    p = derived_params(h, tol)
    out = mp.rho @ h.matrix @ mp.rho_inv
    expected = p.a0 * I2 + 0.5 * p.omega * SIGMA_X
    bound = tol.certificate * _scale(mp) ** 2 * max(1.0, frobenius(h.matrix))
    if frobenius(out - adjoint(out)) > bound or frobenius(out - expected) > bound:
        raise CertificateFailure("metric pair does not map H to a0 I + (omega/2) sigma_x")
    return out


def map_state(mp: MetricPair, psi, direction: Direction | str) -> np.ndarray:
    """phi = rho psi (to the Hermitian frame) or psi = rho^{-1} phi (back)."""
    psi = as_cvec(psi, 2)
    if Direction(direction) is Direction.TO_HERMITIAN:
        return mp.rho @ psi
    return mp.rho_inv @ psi
