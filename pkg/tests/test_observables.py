from __future__ import annotations

import math

import numpy as np
import pytest

from oscsim.classical import ExactPropagator, kinetic_energy_series, normal_modes
from oscsim.model import (build_hamiltonian, build_system, initial_state_vector, potential_energy,
                          to_circuit_layout, total_energy)
from oscsim.observables import (RegionPartition, extract_normal_frequencies, frequency_spectrum,
                                kinetic_energy, log_partition, region_energies, vibrational_thermo,
                                wave_speed)


def exact_states(sys_, times):
    prop = ExactPropagator(build_hamiltonian(sys_).dense())
    psi0 = initial_state_vector(sys_)
    return [prop.evolve(psi0, t) for t in times]


def grid(t1, dt):
    return np.round(np.arange(0, t1 + dt / 2, dt), 10)


# --- kinetic energy ------------------------------------------------------------

def test_kinetic_energy_pair_block_is_zero():
    psi = np.zeros(8)
    psi[5] = 1
    assert kinetic_energy(psi, 3.0) == 0.0


def test_kinetic_energy_two_body(two_body):
    psi = initial_state_vector(two_body)
    assert kinetic_energy(psi, 1.5) == pytest.approx(1.0, abs=1e-14)
    assert kinetic_energy(to_circuit_layout(psi, 2), 1.5, 2, "circuit") == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        kinetic_energy(psi, 1.5, layout="bogus")


@pytest.mark.parametrize("preset,N", [("two-body", 2), ("impl1-chain", 4), ("impl2-chain", 8)])
def test_kinetic_energy_matches_classical(preset, N):
    sys_ = build_system(preset, N)
    times = np.linspace(0, 5, 11)
    T = total_energy(sys_)
    E = [kinetic_energy(p, T) for p in exact_states(sys_, times)]
    np.testing.assert_allclose(E, kinetic_energy_series(sys_, times), atol=1e-8)
    assert np.all((np.array(E) >= -1e-12) & (np.array(E) <= T + 1e-12))


# --- spectrum ------------------------------------------------------------------

def test_constant_signal_has_empty_spectrum():
    t = grid(10, 0.1)
    spec = frequency_spectrum(t, np.full(len(t), 0.75), 1.5)
    assert np.max(np.abs(spec.values)) < 1e-12
    res = extract_normal_frequencies(spec)
    assert not res.found and len(res.frequencies) == 0


def test_cosine_tone():
    t = grid(40, 0.05)
    spec = frequency_spectrum(t, 0.5 + np.cos(2 * t), 1.0)
    res = extract_normal_frequencies(spec)
    assert len(res.peaks) == 1
    assert abs(res.peaks[0] - 2.0) <= spec.bin_width
    assert res.frequencies[0] == pytest.approx(res.peaks[0] / 2)


def test_spectrum_validation():
    t = grid(10, 0.1)
    with pytest.raises(ValueError):
        frequency_spectrum(t[:10], t[:10], 1.0)
    bad = t.copy()
    bad[5] += 0.03
    with pytest.raises(ValueError):
        frequency_spectrum(bad, np.zeros(len(t)), 1.0)


def test_two_body_normal_frequency(two_body):
    t = grid(40, 0.05)
    T = total_energy(two_body)
    E = [kinetic_energy(p, T) for p in exact_states(two_body, t)]
    spec = frequency_spectrum(t, E, T)
    res = extract_normal_frequencies(spec)
    assert spec.bin_width == pytest.approx(2 * math.pi / 40, rel=2e-3)
    assert len(res.frequencies) == 1
    assert abs(res.peaks[0] - 2 * math.sqrt(2)) <= spec.bin_width


def test_window_doubling_keeps_peaks(two_body):
    T = total_energy(two_body)
    out = []
    for t1 in (40, 80):
        t = grid(t1, 0.05)
        out.append(extract_normal_frequencies(frequency_spectrum(t, kinetic_energy_series(two_body, t), T)))
    bin40 = 2 * math.pi / (len(grid(40, 0.05)) * 0.05)
    assert len(out[0].peaks) == len(out[1].peaks)
    assert np.all(np.abs(out[0].peaks - out[1].peaks) <= bin40)


def test_impl1_n4_recovers_subset_of_modes():
    sys_ = build_system("impl1-chain", 4)
    t = grid(40, 0.05)
    spec = frequency_spectrum(t, kinetic_energy_series(sys_, t), total_energy(sys_))
    res = extract_normal_frequencies(spec)
    modes = normal_modes(sys_)
    w = modes.frequencies
    assert res.found
    for f in res.frequencies:
        assert np.min(np.abs(2 * w - 2 * f)) <= spec.bin_width
    # mode-overlap oracle: the most energetic mode must be among the peaks
    q0 = modes.mode_matrix.T @ (sys_.masses * sys_.x0)
    p0 = modes.mode_matrix.T @ (sys_.masses * sys_.v0)
    e = 0.5 * (p0 ** 2 + (w * q0) ** 2)
    top = w[np.argmax(e)]
    assert np.min(np.abs(2 * res.frequencies - 2 * top)) <= spec.bin_width


# --- thermodynamics ------------------------------------------------------------

def test_thermo_limits():
    cold = vibrational_thermo([1.3], 1e-3)
    assert cold.U == pytest.approx(0.65, abs=1e-12)
    assert cold.C_V < 1e-12 and cold.S < 1e-12
    hot = vibrational_thermo([1.3], 1e4)
    assert hot.C_V == pytest.approx(1.0, abs=1e-6)


def test_thermo_matches_finite_differences():
    w, T, h = [math.sqrt(2)], 1.0, 1e-4
    th = vibrational_thermo(w, T)
    lnZ = lambda tt: log_partition(w, tt)
    assert th.Z == pytest.approx(math.exp(lnZ(T)), rel=1e-12)
    assert th.F == pytest.approx(-T * lnZ(T), abs=1e-12)
    U_fd = T ** 2 * (lnZ(T + h) - lnZ(T - h)) / (2 * h)
    assert th.U == pytest.approx(U_fd, abs=1e-6)
    F = lambda tt: -tt * lnZ(tt)
    assert th.S == pytest.approx(-(F(T + h) - F(T - h)) / (2 * h), abs=1e-6)
    C_fd = -T * (F(T + h) - 2 * F(T) + F(T - h)) / h ** 2
    assert th.C_V == pytest.approx(C_fd, abs=1e-6)


@pytest.mark.parametrize("T", [0.1, 0.7, 3.0, 50.0])
def test_entropy_identity(T):
    th = vibrational_thermo([0.5, 1.2, 2.9], T)
    assert th.S == pytest.approx((th.U - th.F) / T, abs=1e-10)


def test_thermo_errors():
    with pytest.raises(ValueError):
        vibrational_thermo([0.0], 1.0)
    with pytest.raises(ValueError):
        vibrational_thermo([1.0], 0.0)
    # rigid modes are dropped
    assert vibrational_thermo([0.0, 1.0], 1.0) == vibrational_thermo([1.0], 1.0)


# --- regions -------------------------------------------------------------------

def test_partition_validation():
    assert RegionPartition.uniform(8, 2).regions == ((0, 1, 2, 3), (4, 5, 6, 7))
    with pytest.raises(ValueError):
        RegionPartition(((0, 2), (1, 3)))
    with pytest.raises(ValueError):
        RegionPartition(((0, 1), (1, 2, 3)))
    with pytest.raises(ValueError):
        RegionPartition.uniform(8, 3)


def test_single_region_holds_everything():
    sys_ = build_system("impl1-chain", 4)
    T = total_energy(sys_)
    out = region_energies(initial_state_vector(sys_), T, RegionPartition.uniform(4, 1), sys_)
    assert out[0, 2] == pytest.approx(T, abs=1e-12)


def test_boundary_spring_split():
    x0 = np.zeros(8)
    x0[3] = 0.5
    v0 = np.zeros(8)
    v0[:4] = [0.3, -0.2, 0.1, 0.4]
    sys_ = build_system("impl1-chain", 8, x0=x0, v0=v0)
    T = total_energy(sys_)
    out = region_energies(initial_state_vector(sys_), T, RegionPartition.uniform(8, 2), sys_)
    boundary = 0.5 * 1.0 * (x0[3] - x0[4]) ** 2
    assert out[1, 0] == pytest.approx(0.0, abs=1e-14)
    assert out[1, 2] == pytest.approx(boundary / 2, abs=1e-12)
    assert out[0, 1] == pytest.approx(potential_energy(sys_, x0) - boundary / 2, abs=1e-12)


def test_region_energy_balance():
    sys_ = build_system("impl1-chain", 8)
    T = total_energy(sys_)
    part = RegionPartition.uniform(8, 4)
    for psi in exact_states(sys_, np.linspace(0, 6, 7)):
        assert region_energies(psi, T, part, sys_)[:, 2].sum() == pytest.approx(T, abs=1e-8)


def test_region_size_mismatch():
    sys_ = build_system("impl1-chain", 4)
    with pytest.raises(ValueError):
        region_energies(initial_state_vector(sys_), 1.0, RegionPartition.uniform(8, 2), sys_)


# --- wave speed ----------------------------------------------------------------

def test_static_profile_all_undefined():
    ws = wave_speed(np.ones((6, 5)), 1.0, 0.1, 2, floor=1e-9)
    assert ws.all_undefined
    assert np.all(np.isnan(ws.v))


def test_travelling_pulse_speed():
    c, a, n_r, dt, sigma = 1.5, 1.0, 4, 0.1, 16.0
    x = a * n_r * np.arange(40)
    t = dt * np.arange(40)
    TR = np.exp(-((x[None, :] - 80 - c * t[:, None]) ** 2) / (2 * sigma ** 2))
    dxx = np.abs(TR[:, 2:] - 2 * TR[:, 1:-1] + TR[:, :-2])
    ws = wave_speed(TR, a, dt, n_r, floor=0.1 * dxx.max())
    assert ws.defined.sum() > 50
    np.testing.assert_allclose(ws.v[ws.defined], c, rtol=0.1)


def test_wave_speed_shape_errors():
    with pytest.raises(ValueError):
        wave_speed(np.ones((5, 2)), 1.0, 0.1, 1, floor=1e-9)
