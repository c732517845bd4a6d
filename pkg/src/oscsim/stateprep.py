"""Initial-state preparation: sparse amplitude loading and the oracle route."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arithmetic import compare_ge_reg, hadamard_all, phase_on_value, swap_registers
from .circuit import Circuit, RegisterLayout
from .dataload import (AmplificationReport, GoodSubspace, amplitude_amplify, apply_slot_map,
                       mass_table, oracle_load, slot_map_for, spring_table)
from .model import SpringMassSystem, initial_state_vector, to_circuit_layout, total_energy
from .simulator import basis_state, run_circuit


@dataclass
class PreparedState:
    circuit: Circuit
    target: np.ndarray
    fidelity: float
    route: str
    system_qubits: tuple[int, ...]
    good: GoodSubspace | None = None
    report: AmplificationReport | None = None
    state: np.ndarray | None = None  # system-register state after postselection


# --- sparse route ----------------------------------------------------------

def _discriminating_bits(p: int, others, length: int) -> list[int]:
    """Greedy set of prefix bit positions separating ``p`` from every other prefix."""
    chosen: list[int] = []
    rest = list(others)
    while rest:
        best, best_kill = None, -1
        for pos in range(length):
            if pos in chosen:
                continue
            bit = (p >> (length - 1 - pos)) & 1
            kill = sum(1 for o in rest if ((o >> (length - 1 - pos)) & 1) != bit)
            if kill > best_kill:
                best, best_kill = pos, kill
        chosen.append(best)
        bit = (p >> (length - 1 - best)) & 1
        rest = [o for o in rest if ((o >> (length - 1 - best)) & 1) == bit]
    return sorted(chosen)


def sparse_prepare_gates(psi, qubits, tol: float = 1e-14) -> list:
    """Gates (as ``(kind, target, controls, polarity, param)``) preparing ``psi``
    from ``|0>`` on ``qubits`` up to a global phase.

    A binary tree of Ry rotations walks the support one qubit at a time; each
    rotation is controlled only on the prefix bits needed to single out its
    branch, so the cost is polynomial in the sparsity and qubit count.
    """
    psi = np.asarray(psi, dtype=complex)
    q = len(qubits)
    if psi.shape != (2 ** q,):
        raise ValueError("vector length does not match the qubit count")
    norm = np.linalg.norm(psi)
    if norm < tol:
        raise ValueError("cannot prepare the zero vector")
    psi = psi / norm
    support = [int(i) for i in np.flatnonzero(np.abs(psi) > tol)]
    weights = {i: abs(psi[i]) ** 2 for i in support}
    ops = []
    for level in range(q):
        shift = q - level
        prefixes = sorted({i >> shift for i in support})
        mass: dict[tuple[int, int], float] = {}
        for i in support:
            key = (i >> shift, (i >> (shift - 1)) & 1)
            mass[key] = mass.get(key, 0.0) + weights[i]
        for p in prefixes:
            w0, w1 = mass.get((p, 0), 0.0), mass.get((p, 1), 0.0)
            if w1 == 0.0:
                continue
            bits = _discriminating_bits(p, [o for o in prefixes if o != p], level) if level else []
            ctl = [qubits[b] for b in bits]
            pol = [(p >> (level - 1 - b)) & 1 for b in bits]
            if w0 == 0.0:
                ops.append(("X", qubits[level], ctl, pol, None))
            else:
                theta = 2 * math.atan2(math.sqrt(w1), math.sqrt(w0))
                ops.append(("RY", qubits[level], ctl, pol, theta))
    # relative phases, referenced to the first support element
    ref = np.angle(psi[support[0]])
    for i in support:
        phi = float(np.angle(psi[i]) - ref)
        phi = math.remainder(phi, 2 * math.pi)
        if abs(phi) < 1e-15:
            continue
        others = [o for o in support if o != i]
        bits = _discriminating_bits(i, others, q)
        ctl = [qubits[b] for b in bits]
        pol = [(i >> (q - 1 - b)) & 1 for b in bits]
        ops.append(("PHASE", None, ctl, pol, phi))
    return ops


def emit_ops(c: Circuit, ops, controls=(), polarity=None) -> Circuit:
    ctl = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(ctl)
    for kind, target, oc, op, param in ops:
        if kind == "PHASE":
            phase_on_value(c, ctl + oc, int("".join(map(str, pol + op)), 2), param)
        else:
            c.add(kind, target, ctl + oc, pol + op, param=param)
    return c


def sparse_prepare(psi0, layout: RegisterLayout | None = None) -> PreparedState:
    """Prepare an arbitrary (sparse) vector exactly, up to a global phase."""
    psi0 = np.asarray(psi0, dtype=complex)
    q = int(round(math.log2(psi0.size)))
    if 2 ** q != psi0.size:
        raise ValueError("vector length must be a power of two")
    layout = layout or RegisterLayout.of([("q", q)])
    if layout.width != q:
        raise ValueError("layout width does not match the vector")
    c = Circuit(layout)
    emit_ops(c, sparse_prepare_gates(psi0, list(range(q))))
    out = run_circuit(c, basis_state(q))
    target = psi0 / np.linalg.norm(psi0)
    fid = float(abs(np.vdot(target, out)))
    return PreparedState(c, target, fid, "sparse", tuple(range(q)), state=out)


def system_layout(n: int) -> RegisterLayout:
    return RegisterLayout.of([("b", 1), ("j", n), ("k", n)])


def sparse_prepare_system(sys_: SpringMassSystem) -> PreparedState:
    """Circuit-layout initial state on ``|b>|j>|k>`` via :func:`sparse_prepare`."""
    psi = to_circuit_layout(initial_state_vector(sys_), sys_.n_osc)
    return sparse_prepare(psi, system_layout(sys_.n_qubits))


# --- oracle route ----------------------------------------------------------

def oracle_layout(n: int, r: int) -> RegisterLayout:
    return RegisterLayout.of([("b", 1), ("j", n), ("k", n), ("val", r), ("x", r),
                              ("flag", 1), ("ord", 1), ("a1", 1), ("carry", 1)])


def target_state(sys_: SpringMassSystem) -> np.ndarray:
    return to_circuit_layout(initial_state_vector(sys_), sys_.n_osc)


def order_pair(c: Circuit, lay: RegisterLayout, controls=(), polarity=None) -> Circuit:
    """Sort ``(j, k)`` into ``(min, max)``; the order flag carries the sign."""
    ctl = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(ctl)
    o = lay["ord"][0]
    # ord ^= [j > k] = not [k >= j]
    compare_ge_reg(c, lay["k"], lay["j"], o, lay["carry"][0], ctl, pol)
    c.add("X", o, ctl, pol)
    swap_registers(c, lay["j"], lay["k"], ctl + [o], pol + [1])
    c.add("Z", o, ctl, pol)
    c.add("H", o, ctl, pol)
    return c


def oracle_prepare_circuit(sys_: SpringMassSystem, r: int = 4):
    """The un-amplified preparation ``A`` and its good subspace."""
    n, N = sys_.n_qubits, sys_.n_osc
    lay = oracle_layout(n, r)
    c = Circuit(lay)
    b = lay["b"][0]
    smap = slot_map_for(sys_)
    alpha = float(np.linalg.norm(sys_.v0))
    beta = float(np.linalg.norm(sys_.x0))
    if alpha == 0 and beta == 0:
        raise ValueError("total energy is zero")
    mtab, gm = mass_table(sys_, r, sqrt=True, headroom=True)
    ktab, gk = spring_table(sys_, r, sqrt=True, headroom=True, ordered=True)
    if sys_.kappa_max <= 0:
        beta = 0.0
    wa = math.sqrt(sys_.m_max) * alpha * gm
    wb = math.sqrt(2 * smap.d_slots * sys_.kappa_max) * beta * gk
    theta = 2 * math.atan2(wb, wa)
    if theta:
        c.add("RY", b, param=theta)
    j = lay["j"]
    if alpha:
        emit_ops(c, sparse_prepare_gates(sys_.v0, j), [b], [0])
    if beta:
        emit_ops(c, sparse_prepare_gates(sys_.x0, j), [b], [1])
    c.add("S", b)
    k = lay["k"]
    slot_q = k[len(k) - smap.slot_bits:] if smap.slot_bits else []
    hadamard_all(c, slot_q, [b], [1])
    apply_slot_map(c, smap, j, k, lay["a1"][0], [b], [1])

    def loader(cc):
        oracle_load(cc, [j], mtab, lay["val"], [b], [0])
        oracle_load(cc, [j, k], ktab, lay["val"], [b], [1])

    loader(c)
    hadamard_all(c, lay["x"])
    compare_ge_reg(c, lay["x"], lay["val"], lay["flag"][0], lay["carry"][0])
    hadamard_all(c, lay["x"])
    loader(c)
    order_pair(c, lay, [b], [1])
    anc = lay.qubits("val", "x", "flag", "ord", "a1", "carry")
    good = GoodSubspace(tuple(anc), "0" * len(anc))
    return c, good


def oracle_prepare(sys_: SpringMassSystem, r: int = 4, w_cap: int = 8,
                   amplify: bool = True) -> PreparedState:
    A, good = oracle_prepare_circuit(sys_, r)
    lay = A.layout
    if amplify:
        circ, rep = amplitude_amplify(A, good, w_cap=w_cap)
    else:
        circ, rep = A, None
    psi = run_circuit(circ, basis_state(circ.width))
    sys_q = lay.qubits("b", "j", "k")
    state = postselect(psi, circ.width, sys_q, good)
    target = target_state(sys_)
    fid = float(abs(np.vdot(target, state))) if state is not None else 0.0
    return PreparedState(circ, target, fid, "oracle", tuple(sys_q), good, rep, state)


def postselect(psi, width: int, sys_q, good: GoodSubspace):
    """Good-subspace amplitudes on the leading system qubits, normalised.

    ``good`` must fix every non-system qubit.  Returns None on zero weight.
    """
    ns = len(sys_q)
    if list(sys_q) != list(range(ns)):
        raise ValueError("system qubits must lead the layout")
    if sorted(good.qubits) != list(range(ns, width)):
        raise ValueError("good subspace must fix every ancilla")
    col = 0
    for q, ch in zip(good.qubits, good.pattern):
        col |= int(ch) << (width - 1 - q)
    out = np.asarray(psi).reshape(2 ** ns, -1)[:, col]
    nrm = np.linalg.norm(out)
    if nrm == 0:
        return None
    return out / nrm


# --- G_in benchmark --------------------------------------------------------

def t_max(sys_: SpringMassSystem) -> float:
    """Energy with every mass and spring replaced by the largest ones."""
    return 0.5 * sys_.m_max * float(np.sum(sys_.v0 ** 2)) + \
        0.5 * sys_.kappa_max * float(np.sum(sys_.x0 ** 2))


def gin_bound(sys_: SpringMassSystem, eps: float = 1e-2, d: int | None = None) -> float:
    T = total_energy(sys_)
    if T <= 0:
        raise ValueError("total energy is zero")
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = sys_.sparsity if d is None else d
    tm = t_max(sys_)
    return math.sqrt(d * tm / T) * math.log(sys_.n_osc * tm / (eps * T)) ** 2


def gin_bound_ratio(sys_: SpringMassSystem, eps: float, measured_gates: int,
                    d: int | None = None) -> float:
    return measured_gates / gin_bound(sys_, eps, d)


def energy_split(sys_: SpringMassSystem, state) -> tuple[float, float]:
    """``T * |b=0 block|^2`` and ``T * |b=1 block|^2`` of a circuit-layout state."""
    T = total_energy(sys_)
    half = len(state) // 2
    return T * float(np.sum(np.abs(state[:half]) ** 2)), T * float(np.sum(np.abs(state[half:]) ** 2))
