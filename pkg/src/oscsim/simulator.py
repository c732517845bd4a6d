"""Dense statevector simulation of :class:`~oscsim.circuit.Circuit`.

States are viewed as tensors of shape ``(2,)*w + (batch,)`` so a single pass
can push many input columns through a circuit (used for block extraction).
Controlled gates are applied natively by slicing on the control axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate

_SQ2 = 1.0 / math.sqrt(2.0)


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix of a single-qubit gate kind (controls ignored)."""
    k, p = g.kind, g.param
    if k == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if k == "Z":
        return np.diag([1, -1]).astype(complex)
    if k == "H":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if k == "S":
        return np.diag([1, 1j])
    if k == "SDG":
        return np.diag([1, -1j])
    if k == "P":
        return np.diag([1, np.exp(1j * p)])
    c, s = math.cos(p / 2), math.sin(p / 2)
    if k == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if k == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k == "RZ":
        return np.diag([np.exp(-0.5j * p), np.exp(0.5j * p)])
    raise ValueError(f"no 2x2 matrix for {k}")


def apply_gate(state: np.ndarray, g: Gate) -> None:
    """Apply ``g`` in place to a tensor of shape ``(2,)*w + (batch,)``."""
    w = state.ndim - 1
    idx: list = [slice(None)] * w
    for c, pol in zip(g.controls, g.polarity):
        idx[c] = pol
    if g.kind == "SWAP":
        a, b = g.targets
        i01, i10 = list(idx), list(idx)
        i01[a], i01[b] = 0, 1
        i10[a], i10[b] = 1, 0
        v01, v10 = state[tuple(i01)], state[tuple(i10)]
        tmp = v01.copy()
        v01[...] = v10
        v10[...] = tmp
        return
    t = g.targets[0]
    i0, i1 = list(idx), list(idx)
    i0[t], i1[t] = 0, 1
    a0, a1 = state[tuple(i0)], state[tuple(i1)]
    if g.kind == "X":
        tmp = a0.copy()
        a0[...] = a1
        a1[...] = tmp
        return
    m = gate_matrix(g)
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            a0 *= m[0, 0]
        a1 *= m[1, 1]
        return
    n0 = m[0, 0] * a0 + m[0, 1] * a1
    n1 = m[1, 0] * a0 + m[1, 1] * a1
    a0[...] = n0
    a1[...] = n1


def run_circuit(circuit: Circuit, psi_in, check_norm: bool = True) -> np.ndarray:
    """Apply ``circuit`` to a state vector, or to the columns of a matrix."""
    psi = np.array(psi_in, dtype=complex)
    w = circuit.width
    dim = 2 ** w
    if psi.shape[0] != dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, circuit needs {dim}")
    if check_norm and psi.ndim == 1 and abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("input state is not normalized")
    vec = psi.ndim == 1
    state = psi.reshape((2,) * w + (-1,))
    for g in circuit.gates:
        apply_gate(state, g)
    out = state.reshape(dim, -1)
    return out[:, 0] if vec else out


def basis_state(width: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(2 ** width, dtype=complex)
    psi[index] = 1.0
    return psi


def circuit_unitary(circuit: Circuit, columns=None, max_elems: int = 2 ** 23) -> np.ndarray:
    """Full unitary (or selected columns), running basis inputs in batches."""
    dim = 2 ** circuit.width
    cols = np.arange(dim) if columns is None else np.asarray(columns)
    batch = max(1, max_elems // dim)
    out = np.empty((dim, len(cols)), dtype=complex)
    for s in range(0, len(cols), batch):
        chunk = cols[s:s + batch]
        basis = np.zeros((dim, len(chunk)), dtype=complex)
        basis[chunk, np.arange(len(chunk))] = 1.0
        out[:, s:s + len(chunk)] = run_circuit(circuit, basis, check_norm=False)
    return out


def index_of(values: dict[str, int], layout) -> int:
    """Basis index for register values given by name (others zero)."""
    bits = [0] * layout.width
    for name, v in values.items():
        q = layout[name]
        if not 0 <= v < 2 ** len(q):
            raise ValueError(f"value {v} does not fit register {name}")
        for i, qb in enumerate(q):
            bits[qb] = (v >> (len(q) - 1 - i)) & 1
    return int("".join(map(str, bits)), 2) if bits else 0


def match_mask(width: int, qubits, pattern) -> np.ndarray:
    """Boolean mask over basis indices whose ``qubits`` match ``pattern``.

    ``pattern`` is an int (MSB first over ``qubits``) or a string of
    ``0``/``1``/``x`` characters.
    """
    qubits = list(qubits)
    if isinstance(pattern, (int, np.integer)):
        if not 0 <= pattern < 2 ** len(qubits):
            raise ValueError("pattern does not fit the register")
        pattern = format(int(pattern), f"0{len(qubits)}b") if qubits else ""
    if len(pattern) != len(qubits):
        raise ValueError("pattern width does not match register width")
    idx = np.arange(2 ** width)
    mask = np.ones(2 ** width, dtype=bool)
    for q, ch in zip(qubits, pattern):
        if ch == "x":
            continue
        bit = (idx >> (width - 1 - q)) & 1
        mask &= bit == int(ch)
    return mask


@dataclass(frozen=True)
class Projection:
    state: np.ndarray | None  # renormalised; None when probability is zero
    probability: float

    @property
    def ok(self) -> bool:
        return self.state is not None


def project(psi, width: int, qubits, pattern, floor: float = 0.0) -> Projection:
    """Project onto ``qubits == pattern``; zero probability gives ``state=None``."""
    psi = np.asarray(psi)
    mask = match_mask(width, qubits, pattern)
    out = np.where(mask, psi, 0)
    p = float(np.vdot(out, out).real)
    if p <= floor or p == 0.0:
        return Projection(None, p)
    return Projection(out / math.sqrt(p), p)


def extract_block(circuit: Circuit, system_qubits, ancilla_qubits) -> np.ndarray:
    """``<0_anc| U |0_anc>`` as a matrix on the system qubits (MSB first)."""
    w = circuit.width
    sys_q, anc_q = list(system_qubits), list(ancilla_qubits)
    if sorted(sys_q + anc_q) != list(range(w)):
        raise ValueError("system and ancilla qubits must partition the circuit")
    ns = len(sys_q)
    sub = np.arange(2 ** ns)
    cols = np.zeros(2 ** ns, dtype=np.int64)
    for i, q in enumerate(sys_q):
        cols |= ((sub >> (ns - 1 - i)) & 1) << (w - 1 - q)
    dim = 2 ** w
    batch = max(1, 2 ** 23 // dim)
    block = np.empty((len(cols), len(cols)), dtype=complex)
    for s in range(0, len(cols), batch):
        block[:, s:s + batch] = circuit_unitary(circuit, cols[s:s + batch])[cols, :]
    return block
