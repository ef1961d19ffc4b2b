import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from oracles import bloch_vector, boost_matrix, fd_pullback, moebius_fd_derivative, random_sl2, random_state
from ptbrach.errors import DegenerateDenominator, DegenerateIdentity, SingularMatrix, ZeroState
from ptbrach.evolution import evolve_state, hamiltonian_for_alpha
from ptbrach.geometry import (
    INF,
    MoebiusKind,
    apply,
    bloch_distance,
    classify_trace_square,
    deformed_fs_general,
    deformed_fs_metric,
    export_path,
    fixed_point_derivative,
    fixed_point_role,
    from_chart,
    fs_metric,
    is_inf,
    moebius_from,
    path_csv,
    pullback_metric,
    to_bloch,
    to_chart,
)
from ptbrach.hamiltonian import build, derived_params, spectrum
from ptbrach.metric import MetricPair, hermitian_equivalent, metric_for
from ptbrach.numerics import expm

H_REF = build(1, 1, math.pi / 6)
nonzero = st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False)
chart = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False)


def test_identity_is_degenerate_parabolic():
    mp = moebius_from(np.eye(2))
    assert mp.trace_square == 4
    assert mp.kind is MoebiusKind.PARABOLIC
    assert mp.degenerate and mp.fixed_points == ()
    assert apply(mp, 0.3 - 2j) == 0.3 - 2j
    assert apply(mp, INF) is INF
    with pytest.raises(DegenerateIdentity):
        fixed_point_derivative(mp)


def test_boost_is_hyperbolic_with_fixed_points_pm_i():
    mp = moebius_from(boost_matrix(1.0))
    assert abs(mp.trace_square - 4 * math.cosh(0.5) ** 2) < 1e-12
    assert abs(mp.trace_square - 5.0861613) < 1e-6
    assert mp.kind is MoebiusKind.HYPERBOLIC
    assert_allclose(mp.fixed_points, [1j, -1j], atol=1e-12)
    for z in mp.fixed_points:
        assert abs(apply(mp, z) - z) < 1e-10


def test_hermitian_propagator_is_elliptic():
    h = hermitian_equivalent(H_REF, metric_for(H_REF))
    for t in np.linspace(0.05, 10, 60):
        assert moebius_from(expm(h, -1j * t)).kind is MoebiusKind.ELLIPTIC


@pytest.mark.parametrize(
    "t, kind",
    [(4, MoebiusKind.PARABOLIC), (4 + 1e-12, MoebiusKind.PARABOLIC), (0, MoebiusKind.ELLIPTIC), (3.9, MoebiusKind.ELLIPTIC),
     (4.5, MoebiusKind.HYPERBOLIC), (-1, MoebiusKind.LOXODROMIC), (2 + 1j, MoebiusKind.LOXODROMIC)],
)
def test_classification(t, kind):
    assert classify_trace_square(complex(t)) is kind


def test_translation_fixes_only_infinity():
    mp = moebius_from([[1, 0], [1, 1]])
    assert mp.kind is MoebiusKind.PARABOLIC
    assert mp.fixed_points == (INF,)
    assert apply(mp, 2.0) == 3.0
    assert apply(mp, INF) is INF


def test_singular_matrix_rejected():
    with pytest.raises(SingularMatrix):
        moebius_from([[1, 2], [2, 4]])


def test_pole_and_infinity_bookkeeping():
    mp = moebius_from(boost_matrix(1.0))
    A, B, C, D = mp.entries
    assert is_inf(apply(mp, -A / B))
    assert apply(mp, INF) == D / B
    # inversion z -> 1/z swaps 0 and infinity
    inv = moebius_from([[0, 1], [1, 0]])
    assert is_inf(apply(inv, 0))
    assert apply(inv, INF) == 0


def test_derivative_at_fixed_points_against_finite_differences():
    s = boost_matrix(1.0)
    mp = moebius_from(s)
    plus, minus = fixed_point_derivative(mp, "+"), fixed_point_derivative(mp, "-")
    assert abs(plus - math.exp(-1)) < 1e-12
    assert abs(minus - math.e) < 1e-12
    assert abs(moebius_fd_derivative(s, 1j) - plus) < 1e-8
    assert abs(moebius_fd_derivative(s, -1j) - minus) < 1e-8
    assert fixed_point_role(plus) == "attractor"
    assert fixed_point_role(minus) == "repellor"


def test_roles_swap_for_negative_beta():
    mp = moebius_from(boost_matrix(-0.7))
    assert fixed_point_role(fixed_point_derivative(mp, "+")) == "repellor"
    assert fixed_point_role(fixed_point_derivative(mp, "-")) == "attractor"


def test_vanishing_boost_is_neutral():
    # beta = 0 exactly is the identity; just next to it both points are neutral
    mp = moebius_from(boost_matrix(1e-13))
    assert_allclose(mp.fixed_points, [1j, -1j], atol=1e-12)
    for which in "+-":
        d = fixed_point_derivative(mp, which)
        assert abs(d - 1) < 1e-12
        assert fixed_point_role(d) == "neutral"


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50)
def test_moebius_homomorphism(seed):
    rng = np.random.default_rng(seed)
    s1, s2 = random_sl2(rng), random_sl2(rng)
    z = complex(*rng.normal(size=2))
    lhs = apply(moebius_from(s1 @ s2), z)
    rhs = apply(moebius_from(s1), apply(moebius_from(s2), z))
    if is_inf(lhs) or is_inf(rhs):
        return
    assert abs(lhs - rhs) < 1e-10 * max(1, abs(lhs))


def test_bloch_and_chart_examples():
    assert to_bloch([1, 0]) == (0, 0, 1)
    assert to_chart([1, 0]) == 0
    assert_allclose(to_bloch(np.array([1, 1j]) / math.sqrt(2)), [0, 1, 0], atol=1e-15)
    assert to_chart([1, 1j]) == 1j
    assert to_bloch([0, 1]) == (0, 0, -1)
    assert is_inf(to_chart([0, 2]))
    assert_allclose(from_chart(INF), [0, 1])
    with pytest.raises(ZeroState):
        to_bloch([0, 0])


@given(nonzero, nonzero, nonzero)
def test_bloch_projective_invariance(a, b, c):
    p, q = to_bloch([a, b]), to_bloch([c * a, c * b])
    assert_allclose(p, q, atol=1e-12)
    assert abs(sum(x * x for x in p) - 1) < 1e-12
    assert_allclose(p, bloch_vector([a, b]), atol=1e-12)


def test_distance_examples():
    rng = np.random.default_rng(0)
    psi = random_state(rng)
    assert bloch_distance(psi, 3j * psi) < 1e-7
    assert bloch_distance([1, 0], [0, 1]) == math.pi
    with pytest.raises(ZeroState):
        bloch_distance([0, 0], psi)


@given(nonzero, nonzero, nonzero, nonzero)
def test_distance_is_angle_between_bloch_vectors(a, b, c, d):
    u, v = bloch_vector([a, b]), bloch_vector([c, d])
    angle = math.acos(max(-1.0, min(1.0, float(u @ v))))
    assert abs(bloch_distance([a, b], [c, d]) - angle) < 1e-6


def test_mapped_canonical_distance_explains_flip_time():
    # the arc swept by the up -> down flip is the geodesic for alpha <= 0 and
    # the complementary arc for alpha > 0
    for alpha in (math.pi / 6, -math.pi / 6, 0.0):
        h = hamiltonian_for_alpha(math.sqrt(3), alpha)
        mp = metric_for(h)
        dist = bloch_distance(mp.rho @ [1, 0], mp.rho @ [0, 1])
        assert abs(dist - (math.pi - 2 * abs(alpha))) < 1e-8
        arc = math.sqrt(3) * (math.pi + 2 * alpha) / math.sqrt(3)
        assert abs(arc - (dist if alpha <= 0 else 2 * math.pi - dist)) < 1e-8


def test_metric_examples():
    assert fs_metric(0) == 2
    assert deformed_fs_metric(0, 0.0) == 2
    for delta in (1e-4, 1e-4j, -1e-4 + 1e-4j):
        g = deformed_fs_metric(1j + delta, 1.0)
        assert abs(g - math.exp(-2) / 2) < 1e-3 * g
        assert abs(g / fs_metric(1j + delta) - math.exp(-2)) < 1e-3


@pytest.mark.parametrize("beta", [-2.0, -0.5, 0.5, 2.0])
def test_pullback_identity(beta):
    rng = np.random.default_rng(int(10 * beta) + 100)
    s = boost_matrix(beta)
    mp = moebius_from(s)
    ch, sh = math.cosh(beta), math.sinh(beta)
    for z in rng.normal(scale=2, size=100) + 1j * rng.normal(scale=2, size=100):
        g = deformed_fs_metric(z, beta)
        assert abs(g - pullback_metric(z, mp)) < 1e-10 * g
        assert abs(g - deformed_fs_general(z, ch, 1j * sh, ch)) < 1e-12 * max(g, 1e-300)
        assert abs(g - fd_pullback(s, z)) < 1e-6 * g


def test_degenerate_denominators():
    with pytest.raises(DegenerateDenominator):
        deformed_fs_metric(1j, 800.0)
    with pytest.raises(DegenerateDenominator):
        deformed_fs_general(0.0, -1.0, 0.0, 1.0)


def test_general_form_round_metric():
    for z in (0, 1 + 1j, -3j):
        assert abs(deformed_fs_general(z, 1, 0, 1) - fs_metric(z)) < 1e-15


def test_export_single_state():
    (row,) = export_path([[1, 0]])
    assert row.index == 0 and row.bloch == (0, 0, 1) and row.chart == 0
    with pytest.raises(ValueError):
        export_path([])
    with pytest.raises(ZeroState):
        export_path([[1, 0], [0, 0]])


def test_hermitian_path_is_a_great_circle():
    mp = metric_for(H_REF)
    h = hermitian_equivalent(H_REF, mp)
    states = [expm(h, -1j * t) @ np.array([1, 0]) for t in np.linspace(0, 3, 80)]
    pts = np.array([r.bloch for r in export_path(states)])
    # the fitted plane passes through the origin
    _, sv, vt = np.linalg.svd(pts)
    assert sv[-1] < 1e-8
    assert np.max(np.abs(pts @ vt[-1])) < 1e-8


def test_pt_path_closes_after_round_trip():
    p = derived_params(H_REF)
    ev = evolve_state(H_REF, [1, 0], 2 * math.pi / p.omega, 300)
    rows = export_path(ev.states)
    assert_allclose(rows[-1].bloch, rows[0].bloch, atol=1e-6)


def test_csv_layout():
    text = path_csv(export_path([[1, 0], [0, 1], [1, 1j]]))
    lines = text.splitlines()
    assert lines[0] == "index,x,y,z,re_chart,im_chart,chart_at_infinity"
    assert lines[2].endswith(",,,1")
    assert len(lines) == 4


@pytest.mark.parametrize("beta", [0.3, 1.0, 2.5])
def test_boost_moves_points_toward_attractor(beta):
    rng = np.random.default_rng(1)
    rho = boost_matrix(beta)
    attractor = np.array([1, 1j])
    for _ in range(50):
        psi = random_state(rng)
        assert bloch_distance(rho @ psi, attractor) < bloch_distance(psi, attractor)


def test_orthogonality_transport():
    sd = spectrum(H_REF)
    mp = metric_for(H_REF)
    e_plus, e_minus = sd.right[:, 0], sd.right[:, 1]
    assert bloch_distance(e_plus, e_minus) < math.pi - 0.1
    assert abs(bloch_distance(mp.rho @ e_plus, mp.rho @ e_minus) - math.pi) < 1e-8


def test_distance_vanishes_toward_the_ep():
    dists = []
    for k in range(1, 7):
        alpha = -math.pi / 2 + 10.0**-k
        mp = MetricPair(math.asinh(math.tan(alpha)))
        dists.append(bloch_distance(mp.rho @ [1, 0], mp.rho @ [0, 1]))
        assert abs(dists[-1] - 2 * 10.0**-k) < 1e-9
    assert all(a > b for a, b in zip(dists, dists[1:]))


def test_fixed_point_states_are_ep_eigenvectors():
    for sign in (1, -1):
        h = build(2, 1, sign * math.pi / 6)
        chi = spectrum(h).right[:, 0]
        assert abs(to_chart(chi) - (-sign * 1j)) < 1e-12 or abs(to_chart(chi) - sign * 1j) < 1e-12
        assert cmath.isclose(chi @ chi, 0, abs_tol=1e-12)
