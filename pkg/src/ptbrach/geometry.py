"""Projective geometry of two-level states.

States (a, b) are charted by z = b/a on the extended plane, so a matrix
S = [[A, B], [C, D]] acting on (1, z) induces the linear fractional map
z -> (D z + C) / (B z + A). Maps are classified by T = (tr S)^2 after
normalising det S = 1. The module also carries Bloch-sphere coordinates,
the Fubini-Study metric and its eta-deformed form.
"""
from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Union

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import DegenerateDenominator, DegenerateIdentity, SingularMatrix, ZeroState
from .numerics import as_cmat, as_cvec, det, frozen


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Extended = Union[complex, _Infinity]


def is_inf(z) -> bool:
    return z is INF


class MoebiusKind(str, Enum):
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    LOXODROMIC = "Loxodromic"


def classify_trace_square(t: complex, tol: Tolerances = DEFAULT_TOL) -> MoebiusKind:
    eps = tol.moebius_real * (1.0 + abs(t))
    if abs(t.imag) >= eps:
        return MoebiusKind.LOXODROMIC
    x = t.real
    if abs(x - 4.0) <= eps:
        return MoebiusKind.PARABOLIC
    if 0.0 <= x < 4.0 or abs(x) <= eps:
        return MoebiusKind.ELLIPTIC
    if x > 4.0:
        return MoebiusKind.HYPERBOLIC
    return MoebiusKind.LOXODROMIC


def _fixed_sort_key(z):
    return (1, 0.0, 0.0) if is_inf(z) else (0, -z.imag, -z.real)


@dataclass(frozen=True)
class MoebiusMap:
    """SL(2, C) representative with its trace square, kind and fixed points.

    ``fixed_points`` is sorted by decreasing imaginary part (infinity last);
    for the boost rho(beta) that is (+i, -i). The identity has every point
    fixed and is flagged ``degenerate`` with an empty tuple.
    """

    matrix: np.ndarray = field(repr=False)
    trace_square: complex
    kind: MoebiusKind
    fixed_points: tuple
    degenerate: bool = False

    @property
    def entries(self) -> tuple[complex, complex, complex, complex]:
        m = self.matrix
        return complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])

    def __call__(self, z: Extended) -> Extended:
        return apply(self, z)


def moebius_from(s, tol: Tolerances = DEFAULT_TOL) -> MoebiusMap:
    s = as_cmat(s, dims=(2,))
    d = det(s)
    scale = float(np.max(np.abs(s)))
    if scale == 0.0 or abs(d) <= tol.singularity * scale * scale:
        raise SingularMatrix("Moebius matrix must be invertible")
    s = s / cmath.sqrt(d)
    A, B, C, D = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
    t = complex((A + D) ** 2)
    kind = classify_trace_square(t, tol)
    small = 1e-14
    if abs(B) <= small and abs(C) <= small and abs(A - D) <= small:
        return MoebiusMap(frozen(s), t, MoebiusKind.PARABOLIC, (), True)

    if abs(B) <= small:
        # z -> (D z + C)/A fixes infinity
        pts = [INF] if abs(A - D) <= small else [complex(C / (A - D)), INF]
    else:
        # both roots are always formed: a near-identity map can classify as
        # parabolic while its fixed points are still well separated
        root = cmath.sqrt((A - D) ** 2 + 4 * B * C)
        z1, z2 = complex((D - A + root) / (2 * B)), complex((D - A - root) / (2 * B))
        pts = [z1] if abs(z1 - z2) <= 1e-10 * (1 + abs(z1)) else [z1, z2]
    return MoebiusMap(frozen(s), t, kind, tuple(sorted(pts, key=_fixed_sort_key)))


def apply(mp: MoebiusMap, z: Extended) -> Extended:
    """z -> (D z + C)/(B z + A) on the extended plane."""
    A, B, C, D = mp.entries
    if is_inf(z):
        return INF if B == 0 else D / B
    z = complex(z)
    den = B * z + A
    if den == 0:
        return INF
    return (D * z + C) / den


def derivative(mp: MoebiusMap, z: complex) -> complex:
    A, B, _, _ = mp.entries
    return 1.0 / (B * complex(z) + A) ** 2


def fixed_point_derivative(mp: MoebiusMap, which: int | str = "+") -> complex:
    """f' at the first ('+') or second ('-') fixed point.

    At a fixed point at infinity the derivative is taken in the chart
    w = 1/z, where it equals A/D.
    """
    if mp.degenerate:
        raise DegenerateIdentity("identity map has no isolated fixed points")
    idx = 0 if which in ("+", 1, +1) else 1
    if idx >= len(mp.fixed_points):
        raise ValueError("map has a single fixed point")
    z = mp.fixed_points[idx]
    if is_inf(z):
        A, _, _, D = mp.entries
        return A / D
    return derivative(mp, z)


def fixed_point_role(fprime: complex, tol: float = 1e-12) -> str:
    m = abs(fprime)
    if abs(m - 1.0) <= tol:
        return "neutral"
    return "attractor" if m < 1.0 else "repellor"


# -- Bloch sphere and charts -----------------------------------------------------


class BlochPoint(NamedTuple):
    x: float
    y: float
    z: float


def _nonzero(psi) -> np.ndarray:
    psi = as_cvec(psi, 2)
    if not np.any(psi):
        raise ZeroState("state is zero")
    return psi


def to_bloch(psi) -> BlochPoint:
    a, b = _nonzero(psi)
    n = abs(a) ** 2 + abs(b) ** 2
    xy = 2 * np.conj(a) * b / n
    return BlochPoint(float(xy.real), float(xy.imag), float((abs(a) ** 2 - abs(b) ** 2) / n))


def to_chart(psi) -> Extended:
    a, b = _nonzero(psi)
    if a == 0:
        return INF
    return complex(b / a)


def from_chart(z: Extended) -> np.ndarray:
    if is_inf(z):
        return np.array([0, 1], dtype=complex)
    return np.array([1, complex(z)], dtype=complex)


def bloch_distance(psi1, psi2) -> float:
    """2 arccos |<psi2|psi1>| for normalised states, in [0, pi]."""
    u, v = _nonzero(psi1), _nonzero(psi2)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    overlap = abs(np.vdot(v, u))
    # atan2 form keeps precision when the states nearly coincide
    wedge = abs(u[0] * v[1] - u[1] * v[0])
    return 2.0 * math.atan2(wedge, overlap)


# -- metrics ---------------------------------------------------------------------


def fs_metric(z: complex) -> float:
    """Round Fubini-Study density g with ds^2 = g dz dz*."""
    return 2.0 / (1.0 + abs(z) ** 2) ** 2


def deformed_fs_metric(z: complex, beta: float) -> float:
    """2 / [cosh b (1 + |z|^2) + i sinh b (z* - z)]^2."""
    z = complex(z)
    try:
        den = math.cosh(beta) * (1.0 + abs(z) ** 2) + (1j * math.sinh(beta) * (z.conjugate() - z)).real
    except OverflowError:
        den = math.inf
    if not den > 0 or not math.isfinite(den):
        raise DegenerateDenominator(f"deformed metric denominator {den} is not positive")
    return 2.0 / den**2


def deformed_fs_general(z: complex, a: float, c: complex, d: float) -> float:
    """eta-deformed density for eta = [[a, conj(c)], [c, d]] on the chart (1, z).

    This is 2 (q d - |c + d z|^2) / q^2 with q = a + c* z + c z* + d |z|^2;
    the numerator equals det(eta).
    """
    z = complex(z)
    q = (a + np.conj(c) * z + c * z.conjugate() + d * abs(z) ** 2).real
    if not q > 0:
        raise DegenerateDenominator(f"q = {q} is not positive")
    return float(2.0 * (q * d - abs(c + d * z) ** 2) / q**2)


def pullback_metric(z: complex, mp: MoebiusMap) -> float:
    """g(f(z)) |f'(z)|^2: the round metric pulled back through a Moebius map."""
    w = apply(mp, z)
    if is_inf(w):
        raise DegenerateDenominator("z maps to infinity")
    return fs_metric(w) * abs(derivative(mp, z)) ** 2


# -- path export -----------------------------------------------------------------


class PathRow(NamedTuple):
    index: int
    bloch: BlochPoint
    chart: Extended


CSV_COLUMNS = ("index", "x", "y", "z", "re_chart", "im_chart", "chart_at_infinity")


def export_path(states: Iterable) -> list[PathRow]:
    rows = [PathRow(i, to_bloch(s), to_chart(s)) for i, s in enumerate(states)]
    if not rows:
        raise ValueError("empty path")
    return rows


def path_csv(rows: list[PathRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        inf = is_inf(r.chart)
        re = "" if inf else f"{r.chart.real:.17g}"
        im = "" if inf else f"{r.chart.imag:.17g}"
        w.writerow([r.index, *(f"{c:.17g}" for c in r.bloch), re, im, int(inf)])
    return buf.getvalue()
