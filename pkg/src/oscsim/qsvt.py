"""Block encodings of B^dag and H, Jacobi-Anger plans, QSP phases, QSVT and LCU.

Phase conventions
-----------------
Phases are solved in the Wx convention,
``U(x) = e^{i phi_0 Z} prod_k W(x) e^{i phi_k Z}`` with
``W(x) = [[x, i s], [i s, x]]``, ``s = sqrt(1 - x^2)``, fitting
``Re <0|U(x)|0> = f(x)``.  Circuits use the reflection convention, where the
signal is the block encoding itself and phases act as ``e^{i psi (2 Pi - I)}``.
Since ``W(x) = i e^{-i pi/4 Z} R(x) e^{-i pi/4 Z}``, the conversion is
``psi_0 = phi_0 - pi/4``, ``psi_k = phi_k - pi/2``, ``psi_d = phi_d - pi/4``
and the reflection sequence realises ``(-i)^d P(A)``.  Negating the Wx phases
conjugates ``P``, so averaging the ``+phi`` and ``-phi`` sequences leaves the
real target ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .arithmetic import hadamard_all, phase_on_value
from .circuit import Circuit, Gate, RegisterLayout
from .dataload import apply_slot_map, bdagger_table, inequality_encode, oracle_load, slot_map_for
from .model import SpringMassSystem, build_b_matrix, hamiltonian_circuit_layout
from .simulator import extract_block, run_circuit
from .stateprep import order_pair

BE_ANCILLAS = (("val", None), ("x", None), ("flag", 1), ("ord", 1), ("a1", 1), ("carry", 1))


@dataclass
class BlockEncoding:
    circuit: Circuit
    system: tuple[str, ...]
    ancillas: tuple[str, ...]
    lam: float
    eps_be: float
    sys_: SpringMassSystem | None = field(default=None, repr=False)

    @property
    def system_qubits(self) -> list[int]:
        return self.circuit.layout.qubits(*self.system)

    @property
    def ancilla_qubits(self) -> list[int]:
        return self.circuit.layout.qubits(*self.ancillas)

    def block(self) -> np.ndarray:
        return extract_block(self.circuit, self.system_qubits, self.ancilla_qubits)


def _be_registers(r: int):
    return [(name, r if w is None else w) for name, w in BE_ANCILLAS]


def bdagger_layout(n: int, r: int) -> RegisterLayout:
    return RegisterLayout.of([("j", n), ("k", n)] + _be_registers(r))


def hamiltonian_layout(n: int, r: int) -> RegisterLayout:
    return RegisterLayout.of([("b", 1), ("j", n), ("k", n), ("P", 1)] + _be_registers(r))


def _append_bdagger(c: Circuit, sys_: SpringMassSystem, r: int):
    lay = c.layout
    smap = slot_map_for(sys_)
    table, gamma = bdagger_table(sys_, r)
    j, k = lay["j"], lay["k"]
    slot_q = k[len(k) - smap.slot_bits:] if smap.slot_bits else []
    hadamard_all(c, slot_q)
    apply_slot_map(c, smap, j, k, lay["a1"][0])
    inequality_encode(c, lambda cc: oracle_load(cc, [j, k], table, lay["val"]),
                      lay["val"], lay["x"], lay["flag"][0], lay["carry"][0])
    order_pair(c, lay)
    return smap, table, gamma


def bdagger_normalization(sys_: SpringMassSystem, r: int = 4) -> tuple[float, float]:
    """``(lambda, eps_be)`` for :func:`block_encode_bdagger`."""
    smap = slot_map_for(sys_)
    table, gamma = bdagger_table(sys_, r)
    if sys_.kappa_max <= 0:
        return 1.0, 0.0
    aleph = sys_.kappa_max / sys_.m_min
    lam = gamma * math.sqrt(2 * smap.d_slots * aleph)
    err = 0.0
    for (j, k), fp in table.items():
        exact = math.sqrt(sys_.kappa(j, k) * sys_.m_min / (sys_.masses[j] * sys_.kappa_max)) / gamma
        err = max(err, abs(exact - fp.value) / math.sqrt(2 * smap.d_slots))
    return lam, err


def block_encode_bdagger(sys_: SpringMassSystem, r: int = 4) -> BlockEncoding:
    """Columns ``|j, k=0>`` of the block equal ``B^dag / lambda`` (pairs sorted j <= k)."""
    if r < 2:
        raise ValueError("need r >= 2")
    c = Circuit(bdagger_layout(sys_.n_qubits, r))
    _append_bdagger(c, sys_, r)
    lam, eps = bdagger_normalization(sys_, r)
    return BlockEncoding(c, ("j", "k"), tuple(n for n, _ in BE_ANCILLAS), lam, eps, sys_)


def bdagger_target(sys_: SpringMassSystem) -> np.ndarray:
    """``B^dag`` as an ``N^2 x N^2`` matrix acting on inputs ``|j, 0>``."""
    N = sys_.n_osc
    B = build_b_matrix(sys_).toarray()
    out = np.zeros((N * N, N * N))
    out[:, np.arange(N) * N] = B.T
    return out


def _reflect_k_zero(c: Circuit, k, controls, polarity):
    """``2 P0 - I`` on the k register (``P0 = |0><0|``) under controls."""
    phase_on_value(c, k, 0, math.pi, controls, polarity)
    # -1 on the controlled branch
    tgt, rest = controls[-1], list(controls[:-1])
    pol = list(polarity)
    if pol[-1] == 0:
        c.add("X", tgt)
    c.add("Z", tgt, rest, pol[:-1])
    if pol[-1] == 0:
        c.add("X", tgt)


def append_hamiltonian(c: Circuit, sys_: SpringMassSystem, r: int) -> None:
    """The six-step construction on a layout holding ``b, j, k, P`` and the B^dag ancillas.

    1. H on P.  2. ``2 P0 - I`` on k if b=0, P=1.  3. U_Bdag if b=0, U_B if b=1.
    4. ``2 P0 - I`` on k if b=1, P=1.  5. H on P.  6. X on b and an overall -1.
    """
    lay = c.layout
    b, P = lay["b"][0], lay["P"][0]
    k = lay["k"]
    ub = Circuit(lay)
    _append_bdagger(ub, sys_, r)
    c.add("H", P)
    _reflect_k_zero(c, k, [b, P], [0, 1])
    c.extend(ub.controlled([b], [0]))
    c.extend(ub.inverse().controlled([b], [1]))
    _reflect_k_zero(c, k, [b, P], [1, 1])
    c.add("H", P)
    c.add("X", b)
    for kind in ("Z", "X", "Z", "X"):
        c.add(kind, b)


def block_encode_hamiltonian(sys_: SpringMassSystem, r: int = 4) -> BlockEncoding:
    """``<0_anc| U_H |0_anc> = H / lambda`` in circuit layout, same lambda as B^dag."""
    c = Circuit(hamiltonian_layout(sys_.n_qubits, r))
    append_hamiltonian(c, sys_, r)
    lam, eps = bdagger_normalization(sys_, r)
    return BlockEncoding(c, ("b", "j", "k"), ("P",) + tuple(n for n, _ in BE_ANCILLAS), lam, eps, sys_)


# --- Jacobi-Anger ------------------------------------------------------------

def bessel_j(n_max: int, tau: float) -> np.ndarray:
    """``J_0..J_{n_max}(tau)`` by downward recurrence, normalised by ``J0 + 2 sum J_2m = 1``."""
    if tau == 0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    start = int(max(n_max, abs(tau)) + 30 + 2 * math.sqrt(40 * max(n_max, abs(tau)) + 1))
    start += start % 2
    j = np.zeros(start + 2)
    j[start] = 1e-300
    for n in range(start, 0, -1):
        j[n - 1] = 2 * n / tau * j[n] - j[n + 1]
        if abs(j[n - 1]) > 1e250:
            j[n - 1:] *= 1e-250
    norm = j[0] + 2 * j[2::2].sum()
    return (j / norm)[: n_max + 1]


@dataclass(frozen=True)
class QsvtPlan:
    tau: float
    degree: int
    cos_coef: np.ndarray  # Chebyshev coefficients, index = order
    sin_coef: np.ndarray
    eps_poly: float
    cos_phases: np.ndarray | None = None
    sin_phases: np.ndarray | None = None
    scale: float = 1.0

    @property
    def cos_degree(self) -> int:
        return len(self.cos_coef) - 1

    @property
    def sin_degree(self) -> int:
        return len(self.sin_coef) - 1


def jacobi_anger_plan(t: float, lam: float, eps_poly: float = 1e-6) -> QsvtPlan:
    """Truncated expansions of ``cos(tau x)`` (even) and ``sin(tau x)`` (odd), ``tau = lam t``."""
    if not 0 < eps_poly < 0.5:
        raise ValueError("eps_poly must lie in (0, 0.5)")
    tau = lam * t
    if not math.isfinite(tau):
        raise ValueError("tau must be finite")
    n_max = int(abs(tau) * 1.5 + 60)
    J = bessel_j(n_max + 40, abs(tau))
    sgn = np.sign(tau) if tau else 1.0
    tail = 2 * np.cumsum(np.abs(J[::-1]))[::-1]  # tail[k] = 2 sum_{j>=k} |J_j|
    k = 0
    while k + 1 < len(tail) and tail[k + 1] > eps_poly:
        k += 1
    dc = k if k % 2 == 0 else k - 1
    ds = max(k if k % 2 == 1 else k - 1, 1)
    cos_coef = np.zeros(dc + 1)
    cos_coef[0] = J[0]
    for m in range(1, dc // 2 + 1):
        cos_coef[2 * m] = 2 * (-1) ** m * J[2 * m]
    sin_coef = np.zeros(ds + 1)
    for m in range((ds - 1) // 2 + 1):
        sin_coef[2 * m + 1] = 2 * (-1) ** m * J[2 * m + 1] * sgn
    return QsvtPlan(tau, k, cos_coef, sin_coef, eps_poly)


def cheb_eval(coef, x) -> np.ndarray:
    return np.polynomial.chebyshev.chebval(x, coef)


# --- QSP phases ---------------------------------------------------------------

class PhaseSolveError(RuntimeError):
    pass


def qsp_unitary_00(phases, x) -> np.ndarray:
    """``<0|U_Phi(x)|0>`` in the Wx convention, vectorised over ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1 - x ** 2, 0, None))
    # track first row (a, b) of the 2x2 product
    e0 = np.exp(1j * phases[0])
    a = np.full(x.shape, e0, dtype=complex)
    b = np.zeros(x.shape, dtype=complex)
    for phi in phases[1:]:
        a, b = a * x + b * 1j * s, a * 1j * s + b * x
        a = a * np.exp(1j * phi)
        b = b * np.exp(-1j * phi)
    return a


def _full_phases(red: np.ndarray, d: int) -> np.ndarray:
    full = np.empty(d + 1)
    for i, v in enumerate(red):
        full[i] = full[d - i] = v
    return full


def qsp_phases(coef, parity: int | None = None, tol: float = 1e-8, max_iter: int = 2000) -> np.ndarray:
    """Symmetric Wx phases with ``Re <0|U(x)|0> = sum_k coef_k T_k(x)``.

    Least-squares fit at the positive Chebyshev nodes, started from
    ``(pi/4, 0, ..., 0, pi/4)``; converged when the residual at 200
    Chebyshev nodes is below ``tol``.
    """
    coef = np.asarray(coef, dtype=float)
    d = len(coef) - 1
    if parity is None:
        parity = d % 2
    if d % 2 != parity or np.any(np.abs(coef[(1 - parity)::2]) > 1e-14):
        raise ValueError("coefficients must have definite parity matching the degree")
    check = np.cos((2 * np.arange(1, 201) - 1) * np.pi / 400)
    fc = cheb_eval(coef, check)
    if np.max(np.abs(fc)) >= 1:
        raise ValueError("polynomial must be bounded by 1 in magnitude on [-1, 1]")
    if d == 0:
        return np.array([math.acos(coef[0])])
    h = (d + 2) // 2
    nodes = np.cos((2 * np.arange(1, h + 1) - 1) * np.pi / (4 * h))
    target = cheb_eval(coef, nodes)

    def resid(red):
        return qsp_unitary_00(_full_phases(red, d), nodes).real - target

    x0 = np.zeros(h)
    x0[0] = math.pi / 4
    sol = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter * h)
    phases = _full_phases(sol.x, d)
    err = float(np.max(np.abs(qsp_unitary_00(phases, check).real - fc)))
    if err > tol:
        raise PhaseSolveError(f"QSP phase fit did not converge: residual {err:.3e} (degree {d})")
    return phases


def to_reflection_phases(phases) -> np.ndarray:
    psi = np.array(phases, dtype=float)
    d = len(psi) - 1
    if d == 0:
        return psi
    psi[0] -= math.pi / 4
    psi[d] -= math.pi / 4
    psi[1:d] -= math.pi / 2
    return psi


def save_phases(path, phases) -> None:
    Path(path).write_text("".join(format(float(p), ".17g") + "\n" for p in phases))


def load_phases(path) -> np.ndarray:
    return np.array([float(line) for line in Path(path).read_text().split()])


def solve_plan(plan: QsvtPlan, margin: float = 1e-3) -> QsvtPlan:
    """Attach phases for ``scale * P_cos`` and ``scale * P_sin`` (``|.| < 1``)."""
    grid = np.cos(np.linspace(0, np.pi, 2001))
    peak = max(np.max(np.abs(cheb_eval(plan.cos_coef, grid))),
               np.max(np.abs(cheb_eval(plan.sin_coef, grid))), 1.0)
    scale = (1 - margin) / peak
    pc = qsp_phases(plan.cos_coef * scale, 0)
    ps = qsp_phases(plan.sin_coef * scale, 1)
    return QsvtPlan(plan.tau, plan.degree, plan.cos_coef, plan.sin_coef, plan.eps_poly, pc, ps, scale)


# --- QSVT circuits -------------------------------------------------------------

def projector_phase(c: Circuit, anc, pq: int, psi: float, controls=(), polarity=None) -> Circuit:
    """``e^{i psi (2 Pi - I)}`` with ``Pi`` = ancillas all zero, via the phase qubit ``pq``."""
    anc = list(anc)
    c.add("X", pq, anc, [0] * len(anc))
    c.add("RZ", pq, list(controls), polarity, param=2 * psi)
    c.add("X", pq, anc, [0] * len(anc))
    return c


def qsvt_circuit(be: BlockEncoding, phases, extra: tuple[tuple[str, int], ...] = ()) -> Circuit:
    """Reflection-convention sequence for Wx ``phases``; block = ``(-i)^d P(A)``."""
    psi = to_reflection_phases(phases)
    d = len(psi) - 1
    lay = be.circuit.layout.copy()
    lay.add("pq", 1)
    for name, w in extra:
        lay.add(name, w)
    c = Circuit(lay)
    U = be.circuit.gates
    Ud = be.circuit.inverse().gates
    anc = be.ancilla_qubits
    pq = lay["pq"][0]
    projector_phase(c, anc, pq, psi[d])
    for m in range(1, d + 1):
        c.extend(U if m % 2 == 1 else Ud)
        projector_phase(c, anc, pq, psi[d - m])
    return c


def lcu_evolution_circuit(be: BlockEncoding, plan: QsvtPlan) -> Circuit:
    """Four-term LCU over ``(cos, sin) x (+phi, -phi)`` sharing the block-encoding calls.

    Block on ``ancillas = pq = sel = 0`` is ``scale/2 * (P_cos - i P_sin)(A)``.
    """
    if plan.cos_phases is None:
        plan = solve_plan(plan)
    lay = be.circuit.layout.copy()
    lay.add("pq", 1)
    lay.add("sel", 2)
    c = Circuit(lay)
    U, Ud = be.circuit.gates, be.circuit.inverse().gates
    anc, pq = be.ancilla_qubits, lay["pq"][0]
    s_br, s_sg = lay["sel"]
    branches = []  # (select value (branch, sign), reflection phases, correction)
    for br, wx in ((0, plan.cos_phases), (1, plan.sin_phases)):
        d = len(wx) - 1
        corr = (1j) ** d if br == 0 else -1j * (1j) ** d  # undo (-i)^d, then -i for sin
        for sg in (0, 1):
            branches.append(((br, sg), to_reflection_phases(wx if sg == 0 else -wx), corr))
    D = max(len(p) - 1 for _, p, _ in branches)
    hadamard_all(c, [s_br, s_sg])
    for (br, _), _, corr in branches[::2]:
        ang = float(np.angle(corr))
        if not ang:
            continue
        if br == 0:
            c.add("X", s_br)
        c.add("P", s_br, param=ang)
        if br == 0:
            c.add("X", s_br)
    for m in range(D + 1):
        if m:
            gates = U if m % 2 == 1 else Ud
            live = [br for (br, _), p, _ in branches if len(p) - 1 >= m]
            if len(set(live)) == 2:
                c.extend(gates)
            else:
                c.extend(Gate(g.kind, g.targets, (s_br,) + g.controls, (live[0],) + g.polarity, g.param)
                         for g in gates)
        c.add("X", pq, anc, [0] * len(anc))
        for (br, sg), p, _ in branches:
            d = len(p) - 1
            if m <= d:
                c.add("RZ", pq, [s_br, s_sg], [br, sg], param=2 * p[d - m])
        c.add("X", pq, anc, [0] * len(anc))
    hadamard_all(c, [s_br, s_sg])
    return c


@dataclass
class QsvtResult:
    state: np.ndarray | None
    success_probability: float
    plan: QsvtPlan
    lam: float


def evolve_qsvt(sys_: SpringMassSystem, t: float, eps: float = 1e-4, r: int = 4,
                psi0=None, floor: float = 1e-6, be: BlockEncoding | None = None) -> QsvtResult:
    """``e^{-iHt} psi0`` via QSVT + LCU and postselection (circuit layout, b/j/k).

    ``psi0`` defaults to the exact initial state (circuit layout).
    """
    from .stateprep import target_state
    be = be or block_encode_hamiltonian(sys_, r)
    plan = solve_plan(jacobi_anger_plan(t, be.lam, eps))
    circ = lcu_evolution_circuit(be, plan)
    psi0 = target_state(sys_) if psi0 is None else np.asarray(psi0, dtype=complex)
    ns = len(be.system_qubits)
    full = np.zeros(2 ** circ.width, dtype=complex)
    full.reshape(2 ** ns, -1)[:, 0] = psi0 / np.linalg.norm(psi0)
    out = run_circuit(circ, full).reshape(2 ** ns, -1)[:, 0]
    p = float(np.vdot(out, out).real)
    if p < floor:
        return QsvtResult(None, p, plan, be.lam)
    return QsvtResult(out / math.sqrt(p), p, plan, be.lam)
