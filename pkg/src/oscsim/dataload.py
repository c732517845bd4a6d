"""Data-loading oracles, inequality testing and amplitude amplification.

Loaders XOR an r-bit fixed-point word into a value register, keyed on the
basis values of other registers.  Inequality testing then turns the loaded
integer ``xi`` into the amplitude ``xi / 2**r`` of a flagged component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .arithmetic import add_constant, compare_ge_const, compare_ge_reg, hadamard_all, phase_on_value
from .circuit import Circuit, Gate
from .model import FixedPointValue, SpringMassSystem, encode_fixed_point, headroom_scale
from .simulator import basis_state, match_mask, run_circuit


# --- lookup tables -------------------------------------------------------

def mass_table(sys_: SpringMassSystem, r: int = 4, sqrt: bool = False,
               headroom: bool = False) -> tuple[dict[tuple[int], FixedPointValue], float]:
    """``m_j / m_max`` (or its square root) per ``j``; returns (table, headroom factor)."""
    vals = sys_.masses / sys_.m_max
    if sqrt:
        vals = np.sqrt(vals)
    g = headroom_scale(vals, r) if headroom else 1.0
    return {(j,): encode_fixed_point(v / g, 1.0, r) for j, v in enumerate(vals)}, g


def spring_table(sys_: SpringMassSystem, r: int = 4, sqrt: bool = False,
                 headroom: bool = False, ordered: bool = True):
    """``kappa_jk / kappa_max`` keyed on ``(j, k)``; both orders when ``ordered``."""
    kmax = sys_.kappa_max
    if kmax <= 0:
        return {}, 1.0
    raw: dict[tuple[int, int], float] = {}
    for (j, k), kappa in sys_.couplings.items():
        raw[(j, k)] = kappa / kmax
        if ordered:
            raw[(k, j)] = kappa / kmax
    for j, kappa in sys_.wall_springs.items():
        raw[(j, j)] = kappa / kmax
    if sqrt:
        raw = {key: math.sqrt(v) for key, v in raw.items()}
    g = headroom_scale(raw.values(), r) if headroom else 1.0
    return {key: encode_fixed_point(v / g, 1.0, r) for key, v in raw.items()}, g


def bdagger_table(sys_: SpringMassSystem, r: int = 4):
    """``a_jk = sqrt(kappa_jk m_min / (m_j kappa_max))`` keyed on (row j, column k)."""
    kmax = sys_.kappa_max
    if kmax <= 0:
        return {}, 1.0
    raw = {}
    for (j, k) in list(sys_.couplings) + [(j, j) for j in sys_.wall_springs]:
        kappa = sys_.kappa(j, k)
        for a, b in ((j, k), (k, j)):
            raw[(a, b)] = math.sqrt(kappa * sys_.m_min / (sys_.masses[a] * kmax))
    g = headroom_scale(raw.values(), r)
    return {key: encode_fixed_point(v / g, 1.0, r) for key, v in raw.items()}, g


# --- oracles ---------------------------------------------------------------

def oracle_load(c: Circuit, key_regs: Sequence[Sequence[int]],
                table: Mapping[tuple, FixedPointValue], target: Sequence[int],
                controls=(), polarity=None) -> Circuit:
    """``|key>|z> -> |key>|z XOR value(key)>``; an involution."""
    target = list(target)
    ctl = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(ctl)
    r = len(target)
    for key, fp in sorted(table.items()):
        if fp.bits != r:
            raise ValueError(f"value for {key} has {fp.bits} bits, register has {r}")
        if fp.raw == 0:
            continue
        if len(key) != len(key_regs):
            raise ValueError("key arity does not match the key registers")
        kq, kp = [], []
        for reg, v in zip(key_regs, key):
            n = len(reg)
            if not 0 <= v < 2 ** n:
                raise ValueError(f"key value {v} out of range for {n}-qubit register")
            kq += list(reg)
            kp += [(v >> (n - 1 - i)) & 1 for i in range(n)]
        for i in range(r):
            if (fp.raw >> (r - 1 - i)) & 1:
                c.add("X", target[i], ctl + kq, pol + kp)
    return c


def sparsity_value(n_osc: int, j: int, l: int) -> int:
    """Column of the ``l``-th nonzero in row ``j`` of a chain; unused slots give 0."""
    if n_osc == 2:
        return (j + 1) % 2 if l == 0 else 0
    if l == 0:
        return j - 1 if j > 0 else 1
    return j + 1 if 0 < j < n_osc - 1 else 0


def oracle_sparsity(c: Circuit, j_reg, l_reg, out_reg, flags: Sequence[int],
                    n_osc: int, controls=(), polarity=None) -> Circuit:
    """Out-of-place ``|j, l, 0> -> |j, l, f(j, l)>`` with two boundary comparators.

    ``flags`` are two clean qubits receiving ``[j > 0]`` and ``[j < N-1]``.
    """
    j_reg, out_reg = list(j_reg), list(out_reg)
    l = l_reg[-1] if isinstance(l_reg, (list, tuple)) else l_reg
    ctl = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(ctl)
    lo, hi = flags
    comp = Circuit(c.layout)
    compare_ge_const(comp, j_reg, 1, lo)
    compare_ge_const(comp, j_reg, n_osc - 1, hi)
    comp.add("X", hi)  # hi = [j < N-1]
    c.compose(comp)
    # l = 0, j > 0: j - 1
    for q_j, q_o in zip(j_reg, out_reg):
        c.add("X", q_o, ctl + [q_j, l, lo], pol + [1, 0, 1])
    add_constant(c, out_reg, -1, ctl + [l, lo], pol + [0, 1])
    # l = 0, j = 0: 1
    c.add("X", out_reg[-1], ctl + [l, lo], pol + [0, 0])
    if n_osc > 2:
        # l = 1, 0 < j < N-1: j + 1 (row 0 has a single neighbour in slot 0)
        for q_j, q_o in zip(j_reg, out_reg):
            c.add("X", q_o, ctl + [q_j, l, lo, hi], pol + [1, 1, 1, 1])
        add_constant(c, out_reg, 1, ctl + [l, lo, hi], pol + [1, 1, 1])
    c.compose(comp.inverse())
    return c


@dataclass(frozen=True)
class SlotMap:
    """In-place map from slot index (low bits of k) to column index."""

    n_osc: int
    d_slots: int
    walls: bool

    @property
    def slot_bits(self) -> int:
        return int(math.log2(self.d_slots)) if self.d_slots > 1 else 0

    def column(self, j: int, l: int) -> int:
        n = self.n_osc
        if n == 2:
            if self.d_slots == 1:
                return j ^ 1
            return j ^ 1 ^ l
        if self.walls:
            return (j - 1 + l) % n
        if j == 0:
            return l ^ 1
        return (j - 1 + 2 * l) % n


def slot_map_for(sys_: SpringMassSystem) -> SlotMap:
    if not sys_.is_chain():
        raise ValueError("only nearest-neighbour chains are supported")
    walls = bool(sys_.wall_springs)
    if sys_.n_osc == 2:
        return SlotMap(2, 2 if walls else 1, walls)
    return SlotMap(sys_.n_osc, 4 if walls else 2, walls)


def apply_slot_map(c: Circuit, smap: SlotMap, j_reg, k_reg, a1: int,
                   controls=(), polarity=None) -> Circuit:
    """``|j>|l> -> |j>|col(j, l)>`` in place on the k register.

    ``a1`` is a clean work qubit (holds ``[j > 0]`` transiently).
    """
    j_reg, k_reg = list(j_reg), list(k_reg)
    ctl = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(ctl)
    n = len(j_reg)

    def add_j(extra, extra_pol):
        for i, q in enumerate(j_reg):
            add_constant(c, k_reg, 2 ** (n - 1 - i), ctl + extra + [q], pol + extra_pol + [1])

    if smap.n_osc == 2:
        c.add("X", k_reg[-1], ctl + [j_reg[-1]], pol + [1])
        c.add("X", k_reg[-1], ctl, pol)
        return c
    if smap.walls:
        add_j([], [])
        add_constant(c, k_reg, -1, ctl, pol)
        return c
    compare_ge_const(c, j_reg, 1, a1)
    c.add("SWAP", (k_reg[-1], k_reg[-2]), ctl + [a1], pol + [1])
    add_j([a1], [1])
    add_constant(c, k_reg, -1, ctl + [a1], pol + [1])
    c.add("X", k_reg[-1], ctl + [a1], pol + [0])
    compare_ge_const(c, j_reg, 1, a1)
    return c


# --- inequality testing ----------------------------------------------------

@dataclass(frozen=True)
class GoodSubspace:
    qubits: tuple[int, ...]
    pattern: str

    def mask(self, width: int) -> np.ndarray:
        return match_mask(width, self.qubits, self.pattern)


def inequality_encode(c: Circuit, loader: Callable[[Circuit], None], value_reg, x_reg,
                      flag: int, work: int, controls=(), polarity=None) -> GoodSubspace:
    """Load ``xi``, map it to amplitude ``xi/2^r`` on ``x = 0, flag = 0``, unload.

    ``loader(c)`` must append the XOR data oracle.
    """
    loader(c)
    hadamard_all(c, x_reg)
    compare_ge_reg(c, x_reg, value_reg, flag, work, controls, polarity)
    hadamard_all(c, x_reg)
    loader(c)
    return GoodSubspace(tuple(x_reg) + (flag,), "0" * (len(x_reg) + 1))


# --- amplitude amplification ---------------------------------------------

@dataclass(frozen=True)
class AmplificationReport:
    theta: float
    w: int
    c1: float
    success_prob: float
    measured_prob: float


def reflect_zero(c: Circuit, qubits: Sequence[int]) -> Circuit:
    """``I - 2|0><0|`` on ``qubits``."""
    qubits = list(qubits)
    phase_on_value(c, qubits, 0, math.pi)
    return c


def global_minus(c: Circuit, q: int = 0) -> Circuit:
    for kind in ("Z", "X", "Z", "X"):
        c.add(kind, q)
    return c


def good_probability(circuit: Circuit, good: GoodSubspace) -> float:
    psi = run_circuit(circuit, basis_state(circuit.width))
    m = good.mask(circuit.width)
    return float(np.sum(np.abs(psi[m]) ** 2))


def amplitude_amplify(prep: Circuit, good: GoodSubspace, w_cap: int = 8,
                      w: int | None = None) -> tuple[Circuit, AmplificationReport]:
    """``Q^w A`` with ``Q = -A S0 A^dag S_good`` and ``w = floor(pi / (4 theta))``."""
    p = good_probability(prep, good)
    if p <= 1e-15:
        raise ValueError("good-subspace amplitude is zero; cannot amplify")
    c1 = math.sqrt(min(p, 1.0))
    theta = math.asin(c1)
    if w is None:
        w = int(math.floor(math.pi / (4 * theta) + 1e-12))
    if w > w_cap:
        raise ValueError(f"{w} Grover iterations needed, cap is {w_cap} (theta={theta:.4g})")
    out = prep.copy()
    inv = prep.inverse()
    everything = list(range(prep.width))
    for _ in range(w):
        phase_on_value(out, list(good.qubits), int(good.pattern, 2), math.pi)
        out.compose(inv)
        reflect_zero(out, everything)
        out.compose(prep)
        global_minus(out)
    predicted = math.sin((2 * w + 1) * theta) ** 2
    measured = good_probability(out, good) if w else p
    return out, AmplificationReport(theta, w, c1, predicted, measured)
