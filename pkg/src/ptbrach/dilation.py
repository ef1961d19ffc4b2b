"""Hermitian 4x4 embedding of the non-Hermitian 2x2 dynamics.

A block Hamiltonian [[A, B], [B^dagger, D]] with A, D Hermitian reproduces
i d/dt psi = H psi on its upper block whenever

    H^2 - (A + B D B^{-1}) H - B B^dagger + B D B^{-1} A = 0

and the lower block starts at chi(0) = B^{-1} (H - A) psi(0).
``solve_dilation`` searches for such blocks in two stages: scalar B = bI,
D = dI with A obtained from the linear constraint (2 real unknowns), then,
if that stalls, a full least-squares over all 16 real block parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import NotExactPhase, NotOrthogonalInput, SingularB, SingularMatrix
from .hamiltonian import Phase, PTHamiltonian, spectrum
from .numerics import I2, adjoint, as_cmat, as_cvec, eig_hermitian, expm, frobenius, frozen, inverse


@dataclass(frozen=True)
class DilationBlocks:
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("A", "B", "D"):
            object.__setattr__(self, name, frozen(as_cmat(getattr(self, name), dims=(2,))))

    @property
    def assembled(self) -> np.ndarray:
        return np.block([[self.A, self.B], [adjoint(self.B), self.D]])


@dataclass(frozen=True)
class RiccatiReport:
    residual_norm: float
    hermiticity_defect_A: float
    hermiticity_defect_D: float
    feasible: bool
    degenerate: bool = False
    stage: int = 0
    iterations: int = 0


def _b_inverse(blocks: DilationBlocks, tol: Tolerances) -> np.ndarray:
    try:
        return inverse(blocks.B, tol)
    except SingularMatrix as exc:
        raise SingularB(str(exc)) from None


def riccati_residual(h, blocks: DilationBlocks, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Left-hand side of the Riccati constraint, term by term."""
    m = h.matrix if isinstance(h, PTHamiltonian) else as_cmat(h, dims=(2,))
    A, B, D = blocks.A, blocks.B, blocks.D
    bdb = B @ D @ _b_inverse(blocks, tol)
    return m @ m - (A + bdb) @ m - B @ adjoint(B) + bdb @ A


def riccati_report(
    h, blocks: DilationBlocks, tol: Tolerances = DEFAULT_TOL, stage: int = 0, iterations: int = 0,
    defect_a: float | None = None,
) -> RiccatiReport:
    m = h.matrix if isinstance(h, PTHamiltonian) else as_cmat(h, dims=(2,))
    res = frobenius(riccati_residual(m, blocks, tol))
    da = frobenius(blocks.A - adjoint(blocks.A)) if defect_a is None else defect_a
    dd = frobenius(blocks.D - adjoint(blocks.D))
    limit = tol.riccati_feasible
    feasible = res < limit * max(1.0, frobenius(m)) ** 2 and da < limit and dd < limit
    return RiccatiReport(res, da, dd, bool(feasible), False, stage, iterations)


# -- least squares ---------------------------------------------------------------


class LMResult(NamedTuple):
    x: np.ndarray
    cost: float  # ||r(x)||
    iterations: int
    converged: bool


def levenberg_marquardt(
    fun: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    max_iter: int = 500,
    ftol: float = 1e-10,
    xtol: float = 1e-14,
    fd_step: float = 1e-7,
) -> LMResult:
    """Gauss-Newton with Levenberg damping and a central-difference Jacobian."""
    x = np.array(x0, dtype=float)
    r = fun(x)
    cost = float(r @ r)
    lam = 1e-3
    it = 0
    for it in range(1, max_iter + 1):
        if math.sqrt(cost) < ftol:
            return LMResult(x, math.sqrt(cost), it - 1, True)
        jac = np.empty((r.size, x.size))
        for k in range(x.size):
            hk = fd_step * max(1.0, abs(x[k]))
            e = np.zeros_like(x)
            e[k] = hk
            jac[:, k] = (fun(x + e) - fun(x - e)) / (2 * hk)
        jtj = jac.T @ jac
        g = jac.T @ r
        scale = max(float(np.max(np.diag(jtj))), 1e-300)
        while True:
            step = np.linalg.solve(jtj + lam * scale * np.eye(x.size), -g)
            x_new = x + step
            r_new = fun(x_new)
            c_new = float(r_new @ r_new)
            if np.isfinite(c_new) and c_new < cost:
                x, r, cost = x_new, r_new, c_new
                lam = max(lam / 3.0, 1e-15)
                break
            lam *= 4.0
            if lam > 1e16:
                return LMResult(x, math.sqrt(cost), it, math.sqrt(cost) < ftol)
        if np.linalg.norm(step) < xtol * (1.0 + np.linalg.norm(x)):
            break
    return LMResult(x, math.sqrt(cost), it, math.sqrt(cost) < ftol)


def _c2r(m: np.ndarray) -> np.ndarray:
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


_BAD = np.full(8, 1e6)


def _scalar_blocks(m: np.ndarray, b: float, d: float, tol: Tolerances) -> np.ndarray:
    """A solving A (dI - H) = b^2 I + d H - H^2 (B = bI, D = dI)."""
    rhs = b * b * I2 + d * m - m @ m
    return rhs @ inverse(d * I2 - m, tol)


def _stage1(h: PTHamiltonian, rng: np.random.Generator, tol: Tolerances, restarts: int = 8):
    # seeds for d are drawn inside the spectral window, where the Hermitian
    # locus (d - E-)(E+ - d) = b^2 lives
    m = h.matrix
    sd = spectrum(h, tol)
    centre, half = 0.5 * (sd.e_plus.real + sd.e_minus.real), 0.5 * abs(sd.omega)

    def fun(x):
        try:
            a = _scalar_blocks(m, x[0], x[1], tol)
        except SingularMatrix:
            return _BAD
        return _c2r(a - adjoint(a))

    best = None
    total = 0
    for _ in range(restarts):
        x0 = np.array([half * rng.uniform(0.3, 1.5), centre + half * rng.uniform(-0.9, 0.9)])
        res = levenberg_marquardt(fun, x0, tol.lm_max_iter, tol.lm_residual, tol.lm_step)
        total += res.iterations
        if best is None or res.cost < best.cost:
            best = res
        if res.converged and abs(res.x[0]) > 1e-6:
            break
    return best, total


def _unpack_full(x: np.ndarray) -> DilationBlocks:
    A = np.array([[x[0], x[2] + 1j * x[3]], [x[2] - 1j * x[3], x[1]]])
    B = (x[4:8] + 1j * x[8:12]).reshape(2, 2)
    D = np.array([[x[12], x[14] + 1j * x[15]], [x[14] - 1j * x[15], x[13]]])
    return DilationBlocks(A, B, D)


def _pack_full(blocks: DilationBlocks) -> np.ndarray:
    A, B, D = blocks.A, blocks.B, blocks.D
    return np.concatenate([
        [A[0, 0].real, A[1, 1].real, A[0, 1].real, A[0, 1].imag],
        B.real.ravel(), B.imag.ravel(),
        [D[0, 0].real, D[1, 1].real, D[0, 1].real, D[0, 1].imag],
    ])


def _stage2(m: np.ndarray, x0: np.ndarray, tol: Tolerances) -> LMResult:
    def fun(x):
        try:
            return _c2r(riccati_residual(m, _unpack_full(x), tol))
        except SingularMatrix:
            return _BAD

    return levenberg_marquardt(fun, x0, tol.lm_max_iter, tol.lm_residual, tol.lm_step)


def solve_dilation(
    h: PTHamiltonian, seed: int = 0, method: str = "auto", tol: Tolerances = DEFAULT_TOL
) -> tuple[DilationBlocks, RiccatiReport]:
    """Find Hermitian-block dilation data for an exact-phase H.

    ``method`` is ``"auto"`` (stage 1, then stage 2 if needed), ``"scalar"``
    (stage 1 only) or ``"full"`` (stage 2 from a random start). A Hermitian
    H returns the decoupled direct sum with ``degenerate=True``. The report's
    ``feasible`` flag is the only success signal; blocks are returned either
    way so callers can inspect a failed search.
    """
    if h.phase(tol) is not Phase.EXACT:
        raise NotExactPhase("dilation needs the exact phase")
    m = h.matrix
    if frobenius(m - adjoint(m)) <= tol.hermiticity * max(1.0, frobenius(m)):
        blocks = DilationBlocks(m, np.zeros((2, 2)), m)
        return blocks, RiccatiReport(float("nan"), 0.0, 0.0, False, True, 0, 0)

    rng = np.random.default_rng(seed)
    iterations = 0
    if method in ("auto", "scalar"):
        best, iterations = _stage1(h, rng, tol)
        b, d = best.x
        a_raw = _scalar_blocks(m, b, d, tol)
        blocks = DilationBlocks(0.5 * (a_raw + adjoint(a_raw)), b * I2, d * I2)
        report = riccati_report(m, blocks, tol, 1, iterations, frobenius(a_raw - adjoint(a_raw)))
        if report.feasible or method == "scalar":
            return blocks, report
        x0 = _pack_full(blocks)
    elif method == "full":
        scale = max(1.0, frobenius(m))
        x0 = rng.normal(scale=scale, size=16)
    else:
        raise ValueError(f"unknown method {method!r}")

    res = _stage2(m, x0, tol)
    blocks = _unpack_full(res.x)
    return blocks, riccati_report(m, blocks, tol, 2, iterations + res.iterations)


def co_evolution_check(
    h, blocks: DilationBlocks, psi0, t_max: float, n_steps: int = 2048, tol: Tolerances = DEFAULT_TOL
) -> float:
    """max_t || top block of exp(-it H_hat)(psi0, chi0) - exp(-itH) psi0 ||."""
    m = h.matrix if isinstance(h, PTHamiltonian) else as_cmat(h, dims=(2,))
    psi0 = as_cvec(psi0, 2)
    chi0 = _b_inverse(blocks, tol) @ (m - blocks.A) @ psi0
    w, v = eig_hermitian(blocks.assembled, tol)
    big0 = v.conj().T @ np.concatenate([psi0, chi0])
    dev = 0.0
    for t in np.linspace(0.0, t_max, n_steps):
        top = (v @ (np.exp(-1j * w * t) * big0))[:2]
        small = expm(m, -1j * t, tol) @ psi0
        dev = max(dev, float(np.linalg.norm(top - small)))
    return dev


def evolve_dilated(blocks: DilationBlocks, psi_hat, times, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Rows exp(-i t H_hat) psi_hat for each t."""
    w, v = eig_hermitian(blocks.assembled, tol)
    c = v.conj().T @ as_cvec(psi_hat, 4)
    return np.array([v @ (np.exp(-1j * w * t) * c) for t in np.atleast_1d(times)])


class OverlapSplit(NamedTuple):
    full_overlap: complex
    top_overlap: complex
    bottom_overlap: complex


def orthogonality_transfer(
    blocks: DilationBlocks, psi_hat, phi_hat, t: float, tol: Tolerances = DEFAULT_TOL
) -> OverlapSplit:
    """Overlaps of two evolved orthogonal 4-vectors, split by subsystem."""
    psi_hat, phi_hat = as_cvec(psi_hat, 4), as_cvec(phi_hat, 4)
    scale = np.linalg.norm(psi_hat) * np.linalg.norm(phi_hat)
    if abs(np.vdot(psi_hat, phi_hat)) > tol.certificate * max(scale, 1e-300):
        raise NotOrthogonalInput("initial 4-vectors are not orthogonal")
    a = evolve_dilated(blocks, psi_hat, t, tol)[0]
    b = evolve_dilated(blocks, phi_hat, t, tol)[0]
    return OverlapSplit(complex(np.vdot(a, b)), complex(np.vdot(a[:2], b[:2])), complex(np.vdot(a[2:], b[2:])))
