"""Pauli decomposition and second-order product-formula evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, RegisterLayout
from .observables import EnergySeries
from .model import SpringMassSystem, to_circuit_layout, hamiltonian_circuit_layout, total_energy
from .simulator import circuit_unitary, run_circuit

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


@dataclass(frozen=True)
class PauliDecomposition:
    terms: tuple[tuple[float, str], ...]
    n_qubits: int

    @property
    def L(self) -> int:
        return len(self.terms)

    @property
    def Lambda(self) -> float:
        return max((abs(h) for h, _ in self.terms), default=0.0)

    def matrix(self) -> np.ndarray:
        dim = 2 ** self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for h, s in self.terms:
            out += h * pauli_matrix(s)
        return out


def pauli_matrix(label: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for ch in label:
        m = np.kron(m, _PAULI[ch])
    return m


def pauli_decompose(H, tol: float = 1e-13) -> PauliDecomposition:
    """Coefficients ``tr(P H) / 2^q`` by recursive 2x2 block splitting.

    Zero blocks are pruned, so cost tracks the sparsity of ``H``.
    """
    H = H.toarray() if hasattr(H, "toarray") else np.asarray(H, dtype=complex)
    dim = H.shape[0]
    q = int(round(math.log2(dim))) if dim > 0 else -1
    if H.shape != (dim, dim) or dim < 2 or 2 ** q != dim:
        raise ValueError("H must be square with power-of-two dimension >= 2")
    if not np.allclose(H, H.conj().T, atol=1e-12):
        raise ValueError("H must be Hermitian")
    terms: list[tuple[float, str]] = []

    def rec(M: np.ndarray, prefix: str):
        if not np.any(np.abs(M) > tol):
            return
        if M.shape[0] == 1:
            terms.append((float(M[0, 0].real), prefix))
            return
        h = M.shape[0] // 2
        A, B, C, D = M[:h, :h], M[:h, h:], M[h:, :h], M[h:, h:]
        rec((A + D) / 2, prefix + "I")
        rec((B + C) / 2, prefix + "X")
        rec(1j * (B - C) / 2, prefix + "Y")
        rec((A - D) / 2, prefix + "Z")

    rec(H, "")
    terms.sort(key=lambda t: t[1])
    return PauliDecomposition(tuple(terms), q)


def trotter_bound(L: int, Lam: float, t: float, r_st: int) -> float:
    a = 2 * L * Lam * abs(t)
    return a ** 3 / (3 * r_st ** 2) * math.exp(a / r_st)


def trotter_step_count(L: int, Lam: float, t: float, eps: float) -> int:
    """Smallest ``r`` with ``(2 L Lam t)^3 / (3 r^2) * exp(2 L Lam t / r) <= eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if t == 0 or L == 0 or Lam == 0:
        return 1
    hi = 1
    while trotter_bound(L, Lam, t, hi) > eps:
        hi *= 2
    lo = hi // 2 if hi > 1 else 1
    if trotter_bound(L, Lam, t, lo) <= eps:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if trotter_bound(L, Lam, t, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def pauli_exponential(c: Circuit, label: str, theta: float, qubits=None) -> Circuit:
    """``exp(-i theta P)`` via basis change, a CX parity ladder and one Rz.

    The all-identity string is a global phase and emits nothing.
    """
    qubits = list(range(len(label))) if qubits is None else list(qubits)
    act = [(q, ch) for q, ch in zip(qubits, label) if ch != "I"]
    if not act:
        return c
    pre = Circuit(c.layout)
    for q, ch in act:
        if ch == "X":
            pre.add("H", q)
        elif ch == "Y":
            pre.add("SDG", q)
            pre.add("H", q)
    tgt = act[-1][0]
    for (q, _), (q2, _) in zip(act[:-1], act[1:]):
        pre.add("X", q2, [q])
    c.compose(pre)
    c.add("RZ", tgt, param=2 * theta)
    c.compose(pre.inverse())
    return c


def trotter_step(decomp: PauliDecomposition, dt: float, layout: RegisterLayout | None = None) -> Circuit:
    """One symmetric second-order step: forward sweep then reversed sweep, each ``dt/2``."""
    layout = layout or RegisterLayout.of([("q", decomp.n_qubits)])
    c = Circuit(layout)
    for h, s in decomp.terms:
        pauli_exponential(c, s, h * dt / 2)
    for h, s in reversed(decomp.terms):
        pauli_exponential(c, s, h * dt / 2)
    return c


def trotter_circuit(decomp: PauliDecomposition, t: float, r_st: int,
                    layout: RegisterLayout | None = None) -> Circuit:
    if r_st < 1:
        raise ValueError("r_st must be >= 1")
    step = trotter_step(decomp, t / r_st, layout)
    c = Circuit(step.layout)
    for _ in range(r_st):
        c.compose(step)
    return c


def trotter_unitary(decomp: PauliDecomposition, t: float, r_st: int) -> np.ndarray:
    """Unitary of :func:`trotter_circuit`, built from one simulated step and powered."""
    U = circuit_unitary(trotter_step(decomp, t / r_st))
    return np.linalg.matrix_power(U, r_st)


def velocity_indices(n_osc: int) -> np.ndarray:
    """Circuit-layout indices ``|b=0>|j>|k=0>`` of the velocity amplitudes."""
    return np.arange(n_osc) * n_osc


def evolve_trotter(sys_: SpringMassSystem, times, r_st: int | None = None, eps: float = 0.1,
                   prep_state=None) -> EnergySeries:
    """Kinetic-energy series from the second-order product formula.

    ``r_st`` defaults to the step-count bound at each time.  ``prep_state``
    (circuit layout) defaults to the sparse preparation of the initial state.
    """
    from .stateprep import sparse_prepare_system
    times = np.atleast_1d(np.asarray(times, dtype=float))
    T = total_energy(sys_)
    if prep_state is None:
        prep_state = sparse_prepare_system(sys_).state
    decomp = pauli_decompose(hamiltonian_circuit_layout(sys_))
    vel = velocity_indices(sys_.n_osc)
    out = np.empty(len(times))
    for i, t in enumerate(times):
        r = r_st if r_st is not None else trotter_step_count(decomp.L, decomp.Lambda, t, eps)
        psi = trotter_unitary(decomp, t, r) @ prep_state
        out[i] = T * float(np.sum(np.abs(psi[vel]) ** 2))
    return EnergySeries(times, out, T)


def trotter_error(sys_: SpringMassSystem, t: float, r_st: int) -> float:
    """Spectral-norm distance between the product formula and ``exp(-iHt)``."""
    from .classical import ExactPropagator
    H = hamiltonian_circuit_layout(sys_)
    U = trotter_unitary(pauli_decompose(H), t, r_st)
    return float(np.linalg.norm(U - ExactPropagator(H).unitary(t), 2))


def run_trotter_circuit(sys_: SpringMassSystem, t: float, r_st: int) -> np.ndarray:
    """Full gate-level path: sparse prep followed by the Trotter circuit (small N)."""
    from .stateprep import sparse_prepare_system
    prep = sparse_prepare_system(sys_)
    c = prep.circuit.copy()
    c.compose(trotter_circuit(pauli_decompose(hamiltonian_circuit_layout(sys_)), t, r_st, c.layout))
    return run_circuit(c, np.eye(2 ** c.width, dtype=complex)[:, 0])
