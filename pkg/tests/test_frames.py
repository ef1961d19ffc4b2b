import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from oracles import random_state
from ptbrach.errors import FrameMismatch, NonrealProbability, NotExactPhase, ZeroProbabilityOutcome
from ptbrach.frames import (
    Frame,
    ProbabilityClampWarning,
    StatisticalOperator,
    boosted_chiral_pair,
    chiral_block,
    conjugate_observable,
    expectation,
    expectation_routes,
    hamiltonian_observable,
    hermitian_observable,
    hermitian_state,
    mass_shell_residual,
    measurement_probabilities,
    observable_from_matrix,
    post_measurement_state,
    pt_state,
    to_frame,
    weyl_decomposition,
)
from ptbrach.hamiltonian import build, from_params, random_exact_hamiltonians
from ptbrach.metric import MetricPair, hermitian_equivalent, metric_for
from ptbrach.numerics import I2, SIGMA_Z, frobenius, is_hermitian

H_REF = build(1, 1, math.pi / 6)
MP_REF = metric_for(H_REF)


def test_quasi_projectors_complete_and_idempotent():
    rng = np.random.default_rng(0)
    for h in random_exact_hamiltonians(rng, 50):
        obs = hamiltonian_observable(h)
        p0, p1 = obs.quasi_projectors
        scale = math.cosh(metric_for(h).beta) ** 2
        assert frobenius(p0 + p1 - I2) < 1e-10 * scale
        assert frobenius(p0 @ p0 - p0) < 1e-10 * scale
        assert frobenius(p0 @ p1) < 1e-10 * scale


def test_hermitian_frame_projectors_are_hermitian():
    h = hermitian_equivalent(H_REF, MP_REF)
    for p in hermitian_observable(h).quasi_projectors:
        assert is_hermitian(p)


def test_conjugate_observable_examples():
    assert_allclose(conjugate_observable(SIGMA_Z, MetricPair(0)).matrix, SIGMA_Z)
    out = conjugate_observable(SIGMA_Z, MetricPair(1.0))
    assert not out.dirac_hermitian
    assert_allclose(np.sort(np.linalg.eigvals(out.matrix).real), [-1, 1], atol=1e-10)
    back = conjugate_observable(out.matrix, MetricPair(1.0), "ToPTFrame")
    assert_allclose(back.matrix, SIGMA_Z, atol=1e-14)
    assert back.dirac_hermitian


def test_probabilities_eigenstate_hermitian_frame():
    obs = hermitian_observable(SIGMA_Z)
    p = measurement_probabilities(obs, hermitian_state([0, 1]))
    assert_allclose(p, [1, 0])


def test_probabilities_reference_both_frames():
    s_pt = pt_state([1, 0], MP_REF)
    p_pt = measurement_probabilities(hamiltonian_observable(H_REF), s_pt)
    phi = MP_REF.rho @ s_pt.psi
    _, e = np.linalg.eigh(hermitian_equivalent(H_REF, MP_REF))
    p_h = np.abs(e.conj().T @ phi) ** 2 / np.vdot(phi, phi).real
    assert_allclose(p_pt, p_h, atol=1e-12)
    ups = s_pt.upsilon
    for pi, p in zip(hamiltonian_observable(H_REF).quasi_projectors, p_pt):
        assert abs(np.trace(ups.conj().T @ pi.conj().T) - p) < 1e-12


def test_frame_mismatch():
    with pytest.raises(FrameMismatch):
        measurement_probabilities(hamiltonian_observable(H_REF), hermitian_state([1, 0]))


def test_nonreal_probability_detected():
    obs = hamiltonian_observable(H_REF)
    bogus = StatisticalOperator(np.array([1, 0j]), np.array([1, 1j]), Frame.PT)
    with pytest.raises(NonrealProbability):
        measurement_probabilities(obs, bogus)


def test_tiny_negative_probability_is_clamped():
    obs = hermitian_observable(SIGMA_Z)

    def state(eps):
        # probabilities (1 + eps^2, -eps^2): real, summing to one
        return StatisticalOperator(np.array([1, eps]), np.array([1 + eps**2, -eps]), Frame.HERMITIAN)

    with pytest.warns(ProbabilityClampWarning):
        p = measurement_probabilities(obs, state(1e-7))
    # ascending order: the -1 eigenvalue (second basis state) comes first
    assert p[0] == 0
    with pytest.raises(NonrealProbability):
        measurement_probabilities(obs, state(1e-5))


def test_expectation_examples():
    assert expectation(SIGMA_Z, hermitian_state([1, 0]), MetricPair(0)) == 1
    psi = np.array([1, 1]) / math.sqrt(2)
    state = pt_state(psi, MP_REF)
    routes = expectation_routes(H_REF.matrix, state, MP_REF)
    vals = np.array(list(routes.values()))
    assert np.ptp(vals.real) < 1e-12
    assert np.max(np.abs(vals.imag)) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_expectation_is_real_on_random_states(seed):
    rng = np.random.default_rng(seed)
    for h in random_exact_hamiltonians(rng, 20):
        mp = metric_for(h)
        state = pt_state(random_state(rng), mp)
        routes = expectation_routes(h.matrix, state, mp)
        assert max(abs(v.imag) for v in routes.values()) < 1e-10 * max(1, frobenius(h.matrix)) * math.cosh(mp.beta) ** 2


def test_hermitian_subclass_routes_coincide():
    h = build(0.3, 1.1, 0)
    mp = metric_for(h)
    obs = hamiltonian_observable(h)
    for p in obs.quasi_projectors:
        assert is_hermitian(p, 1e-14)
    routes = expectation_routes(h.matrix, pt_state([0.6, 0.8j], mp), mp)
    vals = np.array(list(routes.values()))
    assert np.ptp(vals.real) < 1e-14


def test_post_measurement_states():
    obs = hermitian_observable(SIGMA_Z)
    post = post_measurement_state(obs, hermitian_state([1, 1]), 1)
    assert_allclose(post.upsilon, [[1, 0], [0, 0]])
    obs_pt = hamiltonian_observable(H_REF)
    state = pt_state([1, 0.3], MP_REF)
    for k in range(2):
        post = post_measurement_state(obs_pt, state, k)
        assert abs(np.trace(obs_pt.quasi_projectors[k] @ post.upsilon) - 1) < 1e-12
    with pytest.raises(ZeroProbabilityOutcome):
        post_measurement_state(obs, hermitian_state([1, 0]), 0)


def test_post_measurement_frame_covariance():
    h_herm = hermitian_equivalent(H_REF, MP_REF)
    obs_h = hermitian_observable(h_herm)
    obs_pt = hamiltonian_observable(H_REF)
    s_pt = pt_state([0.2, 1], MP_REF)
    s_h = to_frame(s_pt, MP_REF, Frame.HERMITIAN)
    for k in range(2):
        ups_h = post_measurement_state(obs_h, s_h, k).upsilon
        ups_pt = post_measurement_state(obs_pt, s_pt, k).upsilon
        assert frobenius(MP_REF.rho_inv @ ups_h @ MP_REF.rho - ups_pt) < 1e-12


@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3), st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
@settings(max_examples=50)
def test_probabilities_gauge_invariant(c0, c1):
    obs = hamiltonian_observable(H_REF)
    scaled = type(obs)(obs.operator, obs.eigenvalues, obs.right * [c0, c1], obs.left / np.conj([c0, c1]), obs.frame)
    state = pt_state([0.7, -0.2j], MP_REF)
    assert_allclose(measurement_probabilities(scaled, state), measurement_probabilities(obs, state), atol=1e-12)


def test_dirac_hermiticity_flags_in_both_frames():
    s_z_pt = SIGMA_Z
    h = hermitian_equivalent(H_REF, MP_REF)
    assert not is_hermitian(H_REF.matrix)
    assert is_hermitian(s_z_pt)
    assert is_hermitian(h)
    assert not conjugate_observable(s_z_pt, MP_REF).dirac_hermitian


def test_observable_from_matrix_rejects_complex_spectrum():
    with pytest.raises(NotExactPhase):
        observable_from_matrix(build(2, 1, 1.2).matrix, "PTFrame")


def test_weyl_examples():
    w = weyl_decomposition(build(1, 1, 0))
    assert (w.p0, w.py) == (w.m, 0)
    assert_allclose(w.frak_H, w.m * SIGMA_Z, atol=1e-15)
    w = weyl_decomposition(H_REF)
    assert abs(w.m - math.sqrt(3) / 2) < 1e-15
    assert abs(w.p0 - 1) < 1e-15
    assert abs(w.py - 0.5) < 1e-15


@pytest.mark.parametrize("beta", np.linspace(-3, 3, 31))
def test_mass_shell_and_chiral_annihilation(beta):
    h = from_params(1.4, beta)
    w = weyl_decomposition(h)
    assert mass_shell_residual(w) < 1e-12 * max(1, w.p0**2)
    block = chiral_block(h)
    for phi0 in ([1, 0], [0, 1], [0.3 - 1j, 2]):
        pair = boosted_chiral_pair(beta, phi0)
        assert np.linalg.norm(block @ pair) < 1e-10 * max(1, np.linalg.norm(pair)) * math.cosh(beta)


def test_chiral_block_is_singular_on_mass_shell():
    block = chiral_block(H_REF)
    assert abs(np.linalg.det(block)) < 1e-12
