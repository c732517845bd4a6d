from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscsim.model import build_system, initial_state_vector, kinetic_energy_classical, potential_energy
from oscsim.resources import resource_report
from oscsim.stateprep import (energy_split, gin_bound, gin_bound_ratio, oracle_prepare,
                              sparse_prepare, sparse_prepare_system, t_max, target_state)


def test_sparse_basis_state_is_x_pattern():
    psi = np.zeros(8)
    psi[5] = 1
    ps = sparse_prepare(psi)
    assert [g.kind for g in ps.circuit.gates] == ["X", "X"]
    assert sorted(g.targets[0] for g in ps.circuit.gates) == [0, 2]
    assert ps.fidelity == pytest.approx(1, abs=1e-14)


def test_sparse_worked_example(two_body):
    target = np.array([1, 1, 0, 0, 0, -1j, 0, 0]) / math.sqrt(3)
    ps = sparse_prepare(target)
    phase = ps.state[0] / abs(ps.state[0])
    np.testing.assert_allclose(ps.state / phase, target, atol=1e-10)
    assert ps.state[5] / phase == pytest.approx(-1j / math.sqrt(3), abs=1e-10)


def test_sparse_zero_vector_rejected():
    with pytest.raises(ValueError):
        sparse_prepare(np.zeros(4))


def test_sparse_impl1_n16():
    ps = sparse_prepare_system(build_system("impl1-chain", 16))
    assert ps.fidelity >= 1 - 1e-8
    assert resource_report(ps.circuit).total_gates > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_sparse_random_vectors(q, s, seed):
    rng = np.random.default_rng(seed)
    dim = 2 ** q
    psi = np.zeros(dim, dtype=complex)
    idx = rng.choice(dim, size=min(s, dim), replace=False)
    psi[idx] = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
    ps = sparse_prepare(psi)
    assert ps.fidelity >= 1 - 1e-10


@pytest.mark.parametrize("preset,N", [("impl1-chain", 2), ("impl2-chain", 2),
                                      ("impl1-chain", 4), ("impl2-chain", 4)])
def test_oracle_prepare_presets(preset, N):
    sys_ = build_system(preset, N)
    ps = oracle_prepare(sys_, 4)
    assert ps.fidelity >= 0.999
    assert ps.report.w <= 8
    kin, pot = energy_split(sys_, ps.state)
    assert kin == pytest.approx(kinetic_energy_classical(sys_, sys_.v0), abs=1e-3)
    assert pot == pytest.approx(potential_energy(sys_, sys_.x0), abs=1e-3)


def test_oracle_prepare_zero_velocity():
    sys_ = build_system("impl2-chain", 4, v0=np.zeros(4))
    ps = oracle_prepare(sys_, 4)
    assert ps.fidelity >= 0.999
    assert np.linalg.norm(ps.state[: len(ps.state) // 2]) < 1e-12


def test_oracle_prepare_zero_energy_rejected():
    with pytest.raises(ValueError):
        oracle_prepare(build_system("impl2-chain", 4, x0=np.zeros(4), v0=np.zeros(4)))


FP_CONSTANT = 0.1  # empirical c in 1 - F <= c 2^-r


@pytest.mark.slow
@pytest.mark.parametrize("walls", [False, True])
def test_oracle_fidelity_model(walls):
    sys_ = build_system(masses=[1.0, 2.0, 3.0, 1.5], couplings={(0, 1): 0.3, (1, 2): 0.7, (2, 3): 1.1},
                        wall_springs={0: 0.4, 1: 0.9, 2: 0.2, 3: 0.6} if walls else {},
                        x0=[0.2, -0.1, 0.3, 0.0], v0=[0.1, 0.25, 0, -0.2])
    consts = []
    for r in range(2, 7):
        ps = oracle_prepare(sys_, r)
        consts.append((1 - ps.fidelity) * 2 ** r)
    print("fidelity constants (1-F) 2^r:", [f"{c:.3g}" for c in consts])
    assert max(consts) <= FP_CONSTANT


def test_tmax_and_bound():
    sys_ = build_system("impl1-chain", 4)
    assert t_max(sys_) == pytest.approx(0.3125)
    T = 0.28125
    expected = math.sqrt(2 * 0.3125 / T) * math.log(4 * 0.3125 / (1e-2 * T)) ** 2
    assert gin_bound(sys_, 1e-2, d=2) == pytest.approx(expected, rel=1e-14)
    assert gin_bound_ratio(sys_, 1e-2, 100, d=2) == pytest.approx(100 / expected)
    with pytest.raises(ValueError):
        gin_bound(build_system("impl1-chain", 4, x0=np.zeros(4), v0=np.zeros(4)))


def test_target_state_matches_model_vector():
    sys_ = build_system("impl2-chain", 4)
    psi = target_state(sys_)
    assert np.linalg.norm(psi) == pytest.approx(1)
    assert set(np.round(np.abs(psi), 12)) == set(np.round(np.abs(initial_state_vector(sys_)), 12))
