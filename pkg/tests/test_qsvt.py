from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import cosm, expm

from oscsim.model import build_system, hamiltonian_circuit_layout
from oscsim.qsvt import (PhaseSolveError, bdagger_target, bessel_j, block_encode_bdagger,
                         block_encode_hamiltonian, cheb_eval, evolve_qsvt, jacobi_anger_plan,
                         lcu_evolution_circuit, load_phases, qsp_phases, qsp_unitary_00,
                         qsvt_circuit, save_phases, solve_plan)
from oscsim.simulator import extract_block, run_circuit
from oscsim.stateprep import target_state

NODES = np.cos((2 * np.arange(1, 201) - 1) * np.pi / 400)


def bessel_series(n: int, tau: float, terms: int = 80) -> float:
    return math.fsum((-1) ** m * (tau / 2) ** (2 * m + n) / (math.factorial(m) * math.factorial(m + n))
                     for m in range(terms))


@pytest.mark.parametrize("tau", [0.3, 1.0, 4.5, 10.0])
def test_bessel_matches_power_series(tau):
    J = bessel_j(30, tau)
    for n in range(31):
        assert J[n] == pytest.approx(bessel_series(n, tau), abs=1e-12)


def test_plan_at_zero_time():
    plan = jacobi_anger_plan(0.0, 3.0, 1e-6)
    np.testing.assert_allclose(plan.cos_coef, [1.0])
    assert plan.cos_degree == 0
    assert plan.sin_degree == 1
    np.testing.assert_allclose(plan.sin_coef, 0.0)


def test_plan_tau_one_accuracy():
    plan = jacobi_anger_plan(1.0, 1.0, 1e-6)
    x = np.linspace(-1, 1, 1000)
    assert np.max(np.abs(cheb_eval(plan.cos_coef, x) - np.cos(x))) <= 1e-6
    assert np.max(np.abs(cheb_eval(plan.sin_coef, x) - np.sin(x))) <= 1e-6


@pytest.mark.parametrize("tau", [1.0, 5.0, 12.0])
def test_plan_bound_and_parity(tau):
    plan = jacobi_anger_plan(tau, 1.0, 1e-5)
    x = np.linspace(-1, 1, 1000)
    pc, ps = cheb_eval(plan.cos_coef, x), cheb_eval(plan.sin_coef, x)
    assert plan.cos_degree % 2 == 0 and plan.sin_degree % 2 == 1
    np.testing.assert_allclose(pc, pc[::-1], atol=1e-12)
    np.testing.assert_allclose(ps, -ps[::-1], atol=1e-12)
    assert np.max(np.abs(pc)) <= 1 + 1e-5 and np.max(np.abs(ps)) <= 1 + 1e-5


def test_plan_rejects_bad_eps():
    with pytest.raises(ValueError):
        jacobi_anger_plan(1.0, 1.0, 0.7)


def test_qsp_identity_polynomial():
    ph = qsp_phases([0.0, 1.0])
    np.testing.assert_allclose(qsp_unitary_00(ph, NODES).real, NODES, atol=1e-12)


def test_qsp_t2():
    ph = qsp_phases([0.0, 0.0, 1.0 - 1e-3])
    np.testing.assert_allclose(qsp_unitary_00(ph, NODES).real, (1 - 1e-3) * (2 * NODES ** 2 - 1), atol=1e-10)


def test_qsp_cos_plan():
    plan = solve_plan(jacobi_anger_plan(1.0, 1.0, 1e-8))
    got = qsp_unitary_00(plan.cos_phases, NODES).real / plan.scale
    np.testing.assert_allclose(got, np.cos(NODES), atol=1e-7)


def test_qsp_errors():
    with pytest.raises(ValueError):
        qsp_phases([0.0, 1.5])
    with pytest.raises(ValueError):
        qsp_phases([0.5, 0.5])
    with pytest.raises(PhaseSolveError):
        qsp_phases([0.0, 0.0, 0.0, 0.0, 0.0, 0.999], max_iter=1)


def test_phase_file_round_trip(tmp_path):
    ph = np.array([math.pi / 3, -0.1234567890123456789, 1e-17])
    save_phases(tmp_path / "p.txt", ph)
    lines = (tmp_path / "p.txt").read_text().splitlines()
    assert len(lines) == 3
    np.testing.assert_array_equal(load_phases(tmp_path / "p.txt"), ph)


def _column_error(be, target):
    N = be.sys_.n_osc
    cols = np.arange(N) * N
    blk = be.block()
    return np.max(np.abs(blk[:, cols] - target[:, cols] / be.lam))


def test_bdagger_block_two_body(two_body):
    be = block_encode_bdagger(two_body, 4)
    err = _column_error(be, bdagger_target(two_body))
    assert err <= be.eps_be + 1e-12
    # relative to the largest entry, within 2^(1-r)
    assert err * be.lam <= 2 ** -3 * np.max(np.abs(bdagger_target(two_body)))


@pytest.mark.slow
def test_bdagger_block_impl2_n4_exact():
    sys_ = build_system("impl2-chain", 4)
    be = block_encode_bdagger(sys_, 4)
    assert be.eps_be == pytest.approx(0.0, abs=1e-15)
    assert _column_error(be, bdagger_target(sys_)) <= 1e-12


def test_bdagger_zero_springs():
    sys_ = build_system(masses=[1.0, 1.0], couplings={}, x0=[1.0, 0.0], v0=[0.0, 1.0])
    be = block_encode_bdagger(sys_, 4)
    N = 2
    assert np.max(np.abs(be.block()[:, np.arange(N) * N])) < 1e-12


def test_hamiltonian_block_two_body(two_body):
    be = block_encode_hamiltonian(two_body, 4)
    blk = be.block()
    H = hamiltonian_circuit_layout(two_body)
    H = H.toarray() if hasattr(H, "toarray") else H
    assert np.max(np.abs(blk - H / be.lam)) <= be.eps_be + 1e-12
    np.testing.assert_allclose(blk, blk.conj().T, atol=1e-10)


def test_qsvt_identity_polynomial_gives_h_over_lambda(two_body):
    be = block_encode_hamiltonian(two_body, 4)
    H = hamiltonian_circuit_layout(two_body)
    H = H.toarray() if hasattr(H, "toarray") else H

    def block(ph):
        c = qsvt_circuit(be, ph)
        return extract_block(c, be.system_qubits, [q for q in range(c.width) if q not in be.system_qubits])

    # reflection sequence realises (-i)^d P(A); the trivial phases give P(x) = x exactly
    np.testing.assert_allclose(1j * block(np.zeros(2)), H / be.lam, atol=1e-8)
    # solved phases fix only Re P; averaging +phi and -phi keeps the real part
    ph = qsp_phases([0.0, 1.0])
    avg = 1j * (block(ph) + block(-ph)) / 2
    np.testing.assert_allclose(avg, H / be.lam, atol=1e-8)


def test_degree_zero_plan_is_identity(two_body):
    be = block_encode_hamiltonian(two_body, 4)
    c = qsvt_circuit(be, np.array([0.0]))
    blk = extract_block(c, be.system_qubits, [q for q in range(c.width) if q not in be.system_qubits])
    np.testing.assert_allclose(blk, np.eye(blk.shape[0]), atol=1e-12)


def test_lcu_block_is_scaled_evolution(two_body):
    be = block_encode_hamiltonian(two_body, 4)
    plan = solve_plan(jacobi_anger_plan(1.0, be.lam, 1e-6))
    c = lcu_evolution_circuit(be, plan)
    rng = np.random.default_rng(5)
    for _ in range(3):  # norm preservation before postselection
        v = rng.normal(size=2 ** c.width) + 1j * rng.normal(size=2 ** c.width)
        v /= np.linalg.norm(v)
        assert np.linalg.norm(run_circuit(c, v)) == pytest.approx(1, abs=1e-10)
    anc = [q for q in range(c.width) if q not in be.system_qubits]
    blk = extract_block(c, be.system_qubits, anc) * 2 / plan.scale
    H = hamiltonian_circuit_layout(two_body)
    H = H.toarray() if hasattr(H, "toarray") else H
    np.testing.assert_allclose(blk, expm(-1j * H), atol=1e-5)
    cos_blk = (blk + expm(1j * H)) / 2  # symmetric part recovers cos(H)
    np.testing.assert_allclose(cos_blk, cosm(H), atol=1e-5)


def test_evolve_at_zero_time(two_body):
    res = evolve_qsvt(two_body, 0.0, 1e-4)
    psi0 = target_state(two_body)
    assert abs(np.vdot(psi0, res.state)) == pytest.approx(1, abs=1e-8)
    assert res.success_probability == pytest.approx(res.plan.scale ** 2 / 4, rel=1e-6)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_evolve_fidelity(two_body, t):
    res = evolve_qsvt(two_body, t, 1e-4)
    H = hamiltonian_circuit_layout(two_body)
    H = H.toarray() if hasattr(H, "toarray") else H
    exact = expm(-1j * H * t) @ target_state(two_body)
    assert abs(np.vdot(exact, res.state)) ** 2 >= 1 - 1e-3


def _probe(be, A, rng):
    """``<0_anc| U |v, 0_anc>`` for a random system vector, in the system subspace."""
    ns = len(be.system_qubits)
    assert be.system_qubits == list(range(ns))
    v = rng.normal(size=2 ** ns) + 1j * rng.normal(size=2 ** ns)
    v /= np.linalg.norm(v)
    full = np.zeros(2 ** be.circuit.width, dtype=complex)
    full.reshape(2 ** ns, -1)[:, 0] = v
    out = run_circuit(be.circuit, full).reshape(2 ** ns, -1)[:, 0]
    return np.linalg.norm(out - A @ v / be.lam)


@pytest.mark.slow
@pytest.mark.parametrize("preset,N", [("impl1-chain", 8), ("impl2-chain", 8), ("impl1-chain", 16)])
def test_hamiltonian_probe_large(preset, N, rng):
    sys_ = build_system(preset, N)
    be = block_encode_hamiltonian(sys_, 4)
    H = hamiltonian_circuit_layout(sys_)
    H = H.toarray() if hasattr(H, "toarray") else H
    assert _probe(be, H, rng) <= be.eps_be * H.shape[0] + 1e-10


@pytest.mark.slow
def test_qsvt_energy_series_two_body(two_body):
    from oscsim.classical import kinetic_energy_series
    from oscsim.model import total_energy
    from oscsim.observables import kinetic_energy
    times = np.arange(0, 5.01, 0.5)
    T = total_energy(two_body)
    be = block_encode_hamiltonian(two_body, 4)
    E = [kinetic_energy(evolve_qsvt(two_body, t, 1e-4, be=be).state, T, 2, "circuit") for t in times]
    assert np.max(np.abs(np.array(E) - kinetic_energy_series(two_body, times))) < 0.05
