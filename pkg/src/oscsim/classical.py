"""Ground truth: normal modes, closed-form Newtonian motion, exact quantum evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .model import SpringMassSystem, stiffness_matrix, kinetic_energy_classical, potential_energy


@dataclass(frozen=True)
class NormalModes:
    frequencies: np.ndarray
    mode_matrix: np.ndarray  # columns are M-orthonormal eigenvectors


def normal_modes(sys_: SpringMassSystem) -> NormalModes:
    F = stiffness_matrix(sys_)
    w2, V = sla.eigh(F, np.diag(sys_.masses))
    if np.any(w2 < -1e-9):
        raise ValueError(f"stiffness matrix is not positive semidefinite (min eig {w2.min():.3g})")
    w2 = np.where(w2 < 0, 0.0, w2)
    return NormalModes(np.sqrt(w2), V)


def evolve_newton(sys_: SpringMassSystem, t, modes: NormalModes | None = None):
    """Exact positions and velocities at time(s) ``t``.

    Returns arrays of shape ``(N,)`` for scalar ``t`` and ``(len(t), N)`` otherwise.
    Zero-frequency modes drift linearly.
    """
    modes = normal_modes(sys_) if modes is None else modes
    V, w = modes.mode_matrix, modes.frequencies
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    Mx = sys_.masses
    q0 = V.T @ (Mx * sys_.x0)
    p0 = V.T @ (Mx * sys_.v0)
    wt = np.outer(t, w)
    rigid = w < 1e-12
    safe_w = np.where(rigid, 1.0, w)
    sinc_term = np.where(rigid, t[:, None], np.sin(wt) / safe_w)
    q = q0 * np.cos(wt) + p0 * sinc_term
    qd = -q0 * w * np.sin(wt) + p0 * np.cos(wt)
    x = q @ V.T
    v = qd @ V.T
    if scalar:
        return x[0], v[0]
    return x, v


def kinetic_energy_series(sys_: SpringMassSystem, times) -> np.ndarray:
    _, v = evolve_newton(sys_, np.atleast_1d(times))
    return 0.5 * np.sum(sys_.masses * v ** 2, axis=1)


def energy_at(sys_: SpringMassSystem, t: float) -> tuple[float, float]:
    x, v = evolve_newton(sys_, t)
    return kinetic_energy_classical(sys_, v), potential_energy(sys_, x)


def integrate_rk4(sys_: SpringMassSystem, t_end: float, dt: float = 1e-4):
    """Fixed-step fourth-order Runge-Kutta; cross-check for :func:`evolve_newton`."""
    F = stiffness_matrix(sys_)
    A = -F / sys_.masses[:, None]
    x, v = sys_.x0.copy(), sys_.v0.copy()
    steps = int(round(t_end / dt))
    for _ in range(steps):
        k1x, k1v = v, A @ x
        k2x, k2v = v + 0.5 * dt * k1v, A @ (x + 0.5 * dt * k1x)
        k3x, k3v = v + 0.5 * dt * k2v, A @ (x + 0.5 * dt * k2x)
        k4x, k4v = v + dt * k3v, A @ (x + dt * k3x)
        x = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x, v


class ExactPropagator:
    """Eigendecomposition of a Hermitian matrix, reused across many times."""

    def __init__(self, H):
        H = H.toarray() if hasattr(H, "toarray") else np.asarray(H)
        if not np.allclose(H, H.conj().T, atol=1e-12):
            raise ValueError("H must be Hermitian")
        self.evals, self.evecs = np.linalg.eigh(H)

    def evolve(self, psi0, t: float) -> np.ndarray:
        c = self.evecs.conj().T @ psi0
        return self.evecs @ (np.exp(-1j * self.evals * t) * c)

    def unitary(self, t: float) -> np.ndarray:
        return (self.evecs * np.exp(-1j * self.evals * t)) @ self.evecs.conj().T


def evolve_exact_quantum(H, psi0, t: float) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-10:
        raise ValueError("psi0 must be normalized")
    return ExactPropagator(H).evolve(psi0, t)
