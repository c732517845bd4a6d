from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscsim.classical import (ExactPropagator, evolve_exact_quantum, evolve_newton,
                              integrate_rk4, kinetic_energy_series, normal_modes)
from oscsim.model import (build_hamiltonian, build_system, initial_state_vector,
                          kinetic_energy_classical, mass_matrix, potential_energy,
                          stiffness_matrix, total_energy)


def test_two_body_modes(two_body):
    np.testing.assert_allclose(normal_modes(two_body).frequencies, [0, math.sqrt(2)], atol=1e-12)


def test_uncoupled_modes_are_zero():
    s = build_system(masses=[1, 2], v0=[1, 0])
    assert np.all(normal_modes(s).frequencies == 0)


def test_modes_vs_dense_eigensolver():
    s = build_system("impl1-chain", 4)
    ev = np.sort(np.linalg.eigvals(np.linalg.inv(mass_matrix(s)) @ stiffness_matrix(s)).real)
    np.testing.assert_allclose(normal_modes(s).frequencies ** 2, ev, atol=1e-10)


def test_modes_m_orthonormal():
    s = build_system("impl2-chain", 8)
    V = normal_modes(s).mode_matrix
    np.testing.assert_allclose(V.T @ mass_matrix(s) @ V, np.eye(8), atol=1e-12)


def test_newton_t0(small_preset):
    x, v = evolve_newton(small_preset, 0.0)
    np.testing.assert_allclose(x, small_preset.x0, atol=1e-15)
    np.testing.assert_allclose(v, small_preset.v0, atol=1e-15)


def test_two_body_closed_form(two_body):
    # centre of mass drifts at unit speed, relative coordinate oscillates at sqrt 2
    t = np.linspace(0, 5, 11)
    x, v = evolve_newton(two_body, t)
    np.testing.assert_allclose(x.mean(axis=1), 1.5 + t, atol=1e-12)
    w = math.sqrt(2)
    rel = -np.cos(w * t)  # x1 - x2 starts at -1 with zero relative velocity
    np.testing.assert_allclose(x[:, 0] - x[:, 1], rel, atol=1e-12)


def test_energy_conserved(rng):
    for s in [build_system("impl1-chain", 8), build_system("impl2-chain", 4), build_system("two-body")]:
        T = total_energy(s)
        for t in rng.uniform(0, 100, 50):
            x, v = evolve_newton(s, t)
            assert kinetic_energy_classical(s, v) + potential_energy(s, x) == pytest.approx(T, abs=1e-10)


def test_rk4_cross_check():
    s = build_system("impl1-chain", 4)
    x, v = evolve_newton(s, 5.0)
    xr, vr = integrate_rk4(s, 5.0, 1e-4)
    assert np.max(np.abs(x - xr)) < 1e-6 and np.max(np.abs(v - vr)) < 1e-6


def test_exact_quantum_basic(two_body):
    H = build_hamiltonian(two_body).dense()
    psi0 = initial_state_vector(two_body)
    np.testing.assert_allclose(evolve_exact_quantum(H, psi0, 0.0), psi0, atol=1e-14)
    np.testing.assert_allclose(evolve_exact_quantum(np.zeros((8, 8)), psi0, 3.0), psi0, atol=1e-14)
    with pytest.raises(ValueError):
        ExactPropagator(np.triu(np.ones((4, 4))))


@pytest.mark.parametrize("preset,n", [("two-body", 2), ("impl1-chain", 4), ("impl2-chain", 4), ("impl1-chain", 8)])
def test_quantum_classical_correspondence(preset, n):
    s = build_system(preset, n)
    T = total_energy(s)
    prop = ExactPropagator(build_hamiltonian(s).dense())
    psi0 = initial_state_vector(s)
    times = np.linspace(0, 5, 26)
    E = [T * np.sum(np.abs(prop.evolve(psi0, t)[:n]) ** 2) for t in times]
    np.testing.assert_allclose(E, kinetic_energy_series(s, times), atol=1e-8)
    for t in times:
        assert np.linalg.norm(prop.evolve(psi0, t)) == pytest.approx(1, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=4, max_size=4),
       st.lists(st.floats(0.0, 2.0), min_size=3, max_size=3),
       st.floats(0, 10))
def test_correspondence_random_chains(masses, springs, t):
    couplings = {(j, j + 1): k for j, k in enumerate(springs)}
    s = build_system(masses=masses, couplings=couplings, wall_springs={0: 0.5},
                     x0=[0.3, -0.1, 0.2, 0.0], v0=[0.1, 0.0, -0.2, 0.4])
    T = total_energy(s)
    psi = evolve_exact_quantum(build_hamiltonian(s).dense(), initial_state_vector(s), t)
    assert T * np.sum(np.abs(psi[:4]) ** 2) == pytest.approx(kinetic_energy_series(s, [t])[0], abs=1e-8)
