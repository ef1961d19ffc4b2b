import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oracles import hamiltonian_matrix, rk4_first_flip
from ptbrach.errors import AlphaOutOfRange, NotExactPhase, ZeroState
from ptbrach.evolution import (
    evolve_state,
    flip_probabilities,
    flip_time_scan,
    flip_times,
    hamiltonian_for_alpha,
    propagator,
    propagator_closed_form,
)
from ptbrach.hamiltonian import build, derived_params, random_exact_hamiltonians
from ptbrach.metric import hermitian_equivalent, metric_for
from ptbrach.numerics import SIGMA_X, expm, frobenius

H_REF = build(1, 1, math.pi / 6)
W_REF = math.sqrt(3)


def test_propagator_at_zero_is_identity():
    assert_allclose(propagator(H_REF, 0.0), np.eye(2), atol=1e-15)


def test_hermitian_full_flip():
    h = build(0.4, 1.0, 0.0)
    w = derived_params(h).omega
    u = propagator(h, math.pi / w)
    phase = u[0, 1] / -1j
    assert abs(abs(phase) - 1) < 1e-14
    assert_allclose(u / phase, -1j * SIGMA_X, atol=1e-14)


def test_propagator_routes_agree():
    assert frobenius(expm(H_REF.matrix, -0.3j) - propagator_closed_form(H_REF, 0.3)) < 1e-10


def test_propagator_is_not_unitary():
    u = propagator(H_REF, 0.9)
    assert frobenius(u.conj().T @ u - np.eye(2)) > 1e-2


@pytest.mark.parametrize("seed", range(5))
def test_probabilities_match_closed_form(seed):
    rng = np.random.default_rng(seed)
    for h in random_exact_hamiltonians(rng, 10):
        p = derived_params(h)
        ev = evolve_state(h, [1, 0], 2 * math.pi / p.omega, 257)
        up, down = flip_probabilities(p.alpha, p.omega, ev.time_grid)
        assert_allclose(ev.p_up, up, atol=1e-10)
        assert_allclose(ev.p_down, down, atol=1e-10)
        assert_allclose(ev.p_up + ev.p_down, 1, atol=1e-12)
        assert ev.p_up[0] == 1


def test_rabi_limit():
    h = build(0.3, 0.8, 0.0)
    ev = evolve_state(h, [1, 0], 5.0, 101)
    assert_allclose(ev.p_down, np.sin(0.8 * ev.time_grid) ** 2, atol=1e-12)


def test_evolve_rejects_zero_state_and_short_grid():
    with pytest.raises(ZeroState):
        evolve_state(H_REF, [0, 0], 1.0)
    with pytest.raises(ValueError):
        evolve_state(H_REF, [1, 0], 1.0, 1)


@pytest.mark.parametrize("seed", range(3))
def test_eta_norm_is_conserved_and_plain_norm_is_not(seed):
    rng = np.random.default_rng(seed)
    for h in random_exact_hamiltonians(rng, 5):
        mp = metric_for(h)
        psi0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        p = derived_params(h)
        ev = evolve_state(h, psi0, 2 * math.pi / p.omega)
        eta_norm = np.array([mp.inner(s, s).real for s in ev.states])
        assert np.ptp(eta_norm) < 1e-10 * eta_norm[0] * max(1.0, math.cosh(p.beta))
    h = hamiltonian_for_alpha(1.0, 0.5)
    ev = evolve_state(h, [1, 0], 2 * math.pi)
    assert np.ptp(ev.norms) / ev.norms[0] > 0.01


def test_propagators_are_conjugate():
    mp = metric_for(H_REF)
    h = hermitian_equivalent(H_REF, mp)
    for t in np.linspace(0, 2 * math.pi / W_REF, 50):
        lhs = mp.rho @ propagator(H_REF, t) @ mp.rho_inv
        assert frobenius(lhs - expm(h, -1j * t)) < 1e-10


def test_flip_times_hermitian():
    ft = flip_times(build(1, 1, 0))
    assert ft.up_to_down == ft.down_to_up == math.pi / 2 == ft.aa_bound
    assert not ft.below_bound


def test_flip_times_reference_against_rk4():
    ft = flip_times(H_REF)
    assert abs(ft.up_to_down - 4 * math.pi / (3 * W_REF)) < 1e-12
    assert abs(ft.down_to_up - 2 * math.pi / (3 * W_REF)) < 1e-12
    m = hamiltonian_matrix(1, 1, math.pi / 6)
    assert abs(rk4_first_flip(m, (1, 0), 1, 3.0) - ft.up_to_down) < 1e-6
    assert abs(rk4_first_flip(m, (0, 1), 0, 3.0) - ft.down_to_up) < 1e-6


def test_flip_times_reject_broken_phase():
    with pytest.raises(NotExactPhase):
        flip_times(build(2, 1, 1.2))


def test_flip_time_scan_examples():
    (row,) = flip_time_scan(2.0, [0.0])
    assert row.up_to_down == row.aa_bound == math.pi / 2
    (row,) = flip_time_scan(1.5, [-math.pi / 3])
    assert abs(row.up_to_down - math.pi / (3 * 1.5)) < 1e-14
    assert row.below_bound and row.validated
    h = hamiltonian_for_alpha(1.5, -math.pi / 3)
    t_rk4 = rk4_first_flip(h.matrix, (1, 0), 1, 1.5, 1e-5)
    assert abs(t_rk4 - row.up_to_down) < 1e-6
    with pytest.raises(AlphaOutOfRange):
        flip_time_scan(1.0, [math.pi / 2])


def test_scan_sign_analysis():
    alphas = np.linspace(-math.pi / 2, math.pi / 2, 102)[1:-1]
    for row in flip_time_scan(1.3, alphas):
        if row.alpha < 0:
            assert row.up_to_down < row.aa_bound
        elif row.alpha > 0:
            assert row.up_to_down > row.aa_bound
        assert abs(row.up_to_down + row.down_to_up - 2 * math.pi / 1.3) < 1e-10


def test_scan_marks_ep_band_rows_unvalidated():
    rows = flip_time_scan(1.0, [-math.pi / 2 + 1e-6, -0.2])
    assert not rows[0].validated
    assert rows[1].validated
