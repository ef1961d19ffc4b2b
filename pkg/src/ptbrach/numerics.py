"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers
here add the closed forms and guards the rest of the package relies on:
a trace/determinant eigensolver with left vectors for 2x2 input, a cyclic
Jacobi solver for Hermitian input, and a matrix exponential that picks a
closed form, an eigen route or Pade scaling-and-squaring.
"""
from __future__ import annotations

import cmath
import math
from math import factorial
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import NotHermitian, SingularMatrix

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


def as_cmat(m, dims: tuple[int, ...] = (2, 4)) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise ValueError(f"expected a square matrix of dimension {dims}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_cvec(v, dim: int | None = None) -> np.ndarray:
    a = np.array(v, dtype=complex).reshape(-1)
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def transpose(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).T.copy()


def trace(m: np.ndarray) -> complex:
    return complex(np.trace(m))


def det(m: np.ndarray) -> complex:
    m = np.asarray(m, dtype=complex)
    if m.shape == (2, 2):
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return complex(np.linalg.det(m))


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hermiticity_defect(m: np.ndarray) -> float:
    return frobenius(m - adjoint(m))


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL.hermiticity) -> bool:
    return hermiticity_defect(m) < tol * max(1.0, frobenius(m))


def _check_invertible(m: np.ndarray, tol: Tolerances) -> None:
    n = m.shape[0]
    scale = max(frobenius(m), 1e-300) ** n
    if abs(det(m)) <= tol.singularity * scale:
        raise SingularMatrix(f"matrix is numerically singular (|det| = {abs(det(m)):.3e})")


def solve(m: np.ndarray, b: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve ``m x = b``; LAPACK's LU with partial pivoting does the work."""
    m = as_cmat(m)
    _check_invertible(m, tol)
    return np.linalg.solve(m, np.asarray(b, dtype=complex))


def inverse(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    m = as_cmat(m)
    _check_invertible(m, tol)
    if m.shape == (2, 2):
        d = det(m)
        return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / d
    return np.linalg.inv(m)


# -- 2x2 eigenproblem ----------------------------------------------------------


class Eig2(NamedTuple):
    values: np.ndarray  # (2,) complex
    right: np.ndarray  # columns are right eigenvectors, unit norm
    left: np.ndarray | None  # columns w_i with <w_i|v_j> = delta_ij; None when coalesced
    coalesced: bool


def _null_vector_2x2(m: np.ndarray, lam: complex) -> np.ndarray:
    # rows of (m - lam I) are orthogonal to the kernel; take the better-conditioned one
    v1 = np.array([m[0, 1], lam - m[0, 0]], dtype=complex)
    v2 = np.array([lam - m[1, 1], m[1, 0]], dtype=complex)
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    n = np.linalg.norm(v)
    if n == 0.0:
        return np.array([1, 0], dtype=complex)
    return v / n


def eig2(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Eig2:
    """Closed-form eigen-decomposition of a 2x2 matrix.

    Eigenvalues are ``tr/2 +- sqrt(tr^2/4 - det)``, returned in that order.
    Left vectors solve ``m^dagger w = conj(lambda) w`` and are scaled so that
    ``<w_i|v_i> = 1``. Near coalescence the left vectors are not defined and
    ``left`` is ``None``; ``coalesced`` is set instead of raising so the
    caller can decide what an exceptional point means for it.
    """
    m = as_cmat(m, dims=(2,))
    half_tr = 0.5 * (m[0, 0] + m[1, 1])
    # tr^2/4 - det == ((a-d)/2)^2 + bc, which avoids one cancellation
    disc = (0.5 * (m[0, 0] - m[1, 1])) ** 2 + m[0, 1] * m[1, 0]
    root = cmath.sqrt(disc)
    values = np.array([half_tr + root, half_tr - root], dtype=complex)
    scale = max(frobenius(m), 1e-300)
    coalesced = abs(values[0] - values[1]) < tol.coalescence * scale

    if m[0, 1] == 0 and m[1, 0] == 0:
        # diagonal: keep basis vectors exactly
        order = [0, 1] if abs(values[0] - m[0, 0]) <= abs(values[0] - m[1, 1]) else [1, 0]
        right = np.eye(2, dtype=complex)[:, order]
        left = None if coalesced else right.copy()
        if coalesced:
            right = np.eye(2, dtype=complex)
        return Eig2(values, right, left, coalesced)

    right = np.column_stack([_null_vector_2x2(m, lam) for lam in values])
    if coalesced:
        return Eig2(values, right, None, True)
    mh = adjoint(m)
    left = np.column_stack([_null_vector_2x2(mh, np.conj(lam)) for lam in values])
    for i in range(2):
        left[:, i] = left[:, i] / np.conj(np.vdot(left[:, i], right[:, i]))
    return Eig2(values, right, left, False)


# -- Hermitian eigenproblem ----------------------------------------------------


class EigH(NamedTuple):
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # orthonormal columns


def eig_hermitian(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> EigH:
    """Cyclic complex Jacobi diagonalisation of a Hermitian matrix."""
    a = as_cmat(m)
    if not is_hermitian(a, tol.hermiticity):
        raise NotHermitian(f"hermiticity defect {hermiticity_defect(a):.3e}")
    a = 0.5 * (a + adjoint(a))
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(frobenius(a), 1e-300)
    for _ in range(tol.jacobi_max_sweeps):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(n) for q in range(n) if p != q))
        if off <= tol.jacobi_offdiag * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                angle = 0.5 * math.atan2(2.0 * mag, aqq - app)
                c, s = math.cos(angle), math.sin(angle)
                j = np.eye(n, dtype=complex)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * np.conj(phase)
                j[q, q] = c * np.conj(phase)
                a = adjoint(j) @ a @ j
                v = v @ j
    values = np.real(np.diag(a))
    order = np.argsort(values, kind="stable")
    return EigH(values[order], v[:, order])


# -- matrix exponential --------------------------------------------------------


def _sinhc_cosh(q: complex) -> tuple[complex, complex]:
    """Return (cosh(sqrt q), sinh(sqrt q)/sqrt q); both are entire in q."""
    if abs(q) < 1e-8:
        return 1 + q / 2 + q * q / 24, 1 + q / 6 + q * q / 120
    x = cmath.sqrt(q)
    return cmath.cosh(x), cmath.sinh(x) / x


def _expm2(x: np.ndarray) -> np.ndarray:
    c = 0.5 * (x[0, 0] + x[1, 1])
    n = x - c * I2
    # n is traceless so n @ n = q I with q = -det(n)
    q = -(n[0, 0] * n[1, 1] - n[0, 1] * n[1, 0])
    ch, shc = _sinhc_cosh(q)
    return cmath.exp(c) * (ch * I2 + shc * n)


def _pade_coefficients(order: int) -> list[float]:
    m = order
    return [
        factorial(2 * m - k) * factorial(m) / (factorial(2 * m) * factorial(k) * factorial(m - k))
        for k in range(m + 1)
    ]


def _expm_pade(x: np.ndarray, tol: Tolerances) -> np.ndarray:
    norm1 = float(np.max(np.sum(np.abs(x), axis=0)))
    squarings = 0
    if norm1 > tol.pade_norm_threshold:
        squarings = max(0, int(math.ceil(math.log2(norm1 / tol.pade_norm_threshold))))
    xs = x / (2.0**squarings)
    coef = _pade_coefficients(tol.pade_order)
    ident = np.eye(x.shape[0], dtype=complex)
    num = np.zeros_like(xs)
    den = np.zeros_like(xs)
    power = ident
    for k, ck in enumerate(coef):
        num = num + ck * power
        den = den + ck * ((-1) ** k) * power
        power = power @ xs
    r = np.linalg.solve(den, num)
    for _ in range(squarings):
        r = r @ r
    return r


def expm(m: np.ndarray, scale: complex = 1.0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """exp(scale * m).

    2x2 input uses the closed form ``e^c (cosh(k) I + sinh(k)/k N)`` with
    ``m = cI + N``; Hermitian 4x4 input goes through :func:`eig_hermitian`;
    anything else uses Pade scaling-and-squaring.
    """
    m = as_cmat(m)
    if m.shape == (2, 2):
        return _expm2(complex(scale) * m)
    if is_hermitian(m, tol.hermiticity):
        w, v = eig_hermitian(m, tol)
        return (v * np.exp(complex(scale) * w)) @ adjoint(v)
    return _expm_pade(complex(scale) * m, tol)
