"""Deterministic resource estimates from a fixed decomposition table.

Every gate is lowered to a stream of one-qubit unitaries and CX gates:

* CCX: the standard 15-gate network, 6 CX + 9 one-qubit gates.
* MCX with ``c >= 3`` controls: a V-chain of ``2c - 3`` CCX on ``c - 2``
  clean ancillas.
* any other gate with ``c >= 2`` controls: the AND of the controls is
  computed into an ancilla (``c - 1`` CCX), the singly controlled gate
  acts, and the AND is uncomputed; ``2(c - 1)`` CCX in total.
* singly controlled gates: X -> CX; Z, Y -> 1 CX + 2; H -> 1 CX + 4;
  RX, RY, RZ -> 2 CX + 2; P, S, SDG -> 2 CX + 3.
* SWAP: 3 CX; controlled SWAP: CX, MCX with one extra control, CX.
* each control on |0> costs two X gates.

Ancillas used by the lowering are shared across gates and added to the width.
Depth is the ASAP schedule length of the lowered stream.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate

_SINGLE_CTL = {
    "X": (1, 0), "Z": (1, 2), "Y": (1, 2), "H": (1, 4),
    "RX": (2, 2), "RY": (2, 2), "RZ": (2, 2),
    "P": (2, 3), "S": (2, 3), "SDG": (2, 3),
}


@dataclass(frozen=True)
class ResourceReport:
    width: int
    depth: int
    total_gates: int
    cx: int = 0
    one_qubit: int = 0

    def as_dict(self) -> dict:
        return {"width": self.width, "depth": self.depth, "gates": self.total_gates,
                "cx": self.cx, "one_qubit": self.one_qubit}


class _Lowering:
    def __init__(self, width: int):
        self.base = width
        self.extra = 0
        self.level: dict[int, int] = {}
        self.cx = 0
        self.one = 0

    def _touch(self, qubits):
        lv = max(self.level.get(q, 0) for q in qubits) + 1
        for q in qubits:
            self.level[q] = lv

    def u1(self, q):
        self.one += 1
        self._touch((q,))

    def cnot(self, c, t):
        self.cx += 1
        self._touch((c, t))

    def anc(self, i: int) -> int:
        self.extra = max(self.extra, i + 1)
        return self.base + i

    def ccx(self, a, b, t):
        self.u1(t)
        self.cnot(b, t); self.u1(t)
        self.cnot(a, t); self.u1(t)
        self.cnot(b, t); self.u1(t)
        self.cnot(a, t)
        self.u1(b); self.u1(t); self.u1(t)
        self.cnot(a, b); self.u1(a); self.u1(b)
        self.cnot(a, b)

    def and_chain(self, ctl, offset=0):
        """AND of ``ctl`` (len >= 2) into a fresh ancilla; returns (anc, steps)."""
        steps = [(ctl[0], ctl[1], self.anc(offset))]
        for i, q in enumerate(ctl[2:], start=1):
            steps.append((q, steps[-1][2], self.anc(offset + i)))
        return steps

    def mcx(self, ctl, t, offset=0):
        if len(ctl) == 0:
            self.u1(t)
        elif len(ctl) == 1:
            self.cnot(ctl[0], t)
        elif len(ctl) == 2:
            self.ccx(ctl[0], ctl[1], t)
        else:
            steps = self.and_chain(ctl[:-1], offset)
            for s in steps:
                self.ccx(*s)
            self.ccx(ctl[-1], steps[-1][2], t)
            for s in reversed(steps):
                self.ccx(*s)

    def single_controlled(self, kind, c, t):
        n_cx, n_1q = _SINGLE_CTL[kind]
        if kind == "X":
            self.cnot(c, t)
            return
        # split the one-qubit gates around the CX gates on the target
        pre = n_1q // 2
        for _ in range(pre):
            self.u1(t)
        for i in range(n_cx):
            self.cnot(c, t)
            if i < n_cx - 1:
                self.u1(t)
        rest = n_1q - pre - (n_cx - 1)
        for i in range(rest):
            self.u1(c if (kind in ("P", "S", "SDG") and i == rest - 1) else t)

    def gate(self, g: Gate):
        neg = [q for q, p in zip(g.controls, g.polarity) if not p]
        for q in neg:
            self.u1(q)
        ctl = list(g.controls)
        if g.kind == "SWAP":
            a, b = g.targets
            self.cnot(b, a)
            self.mcx(ctl + [a], b)
            self.cnot(b, a)
        elif not ctl:
            self.u1(g.targets[0])
        elif g.kind == "X":
            self.mcx(ctl, g.targets[0])
        elif len(ctl) == 1:
            self.single_controlled(g.kind, ctl[0], g.targets[0])
        else:
            steps = self.and_chain(ctl)
            for s in steps:
                self.ccx(*s)
            self.single_controlled(g.kind, steps[-1][2], g.targets[0])
            for s in reversed(steps):
                self.ccx(*s)
        for q in neg:
            self.u1(q)


def resource_report(circuit: Circuit) -> ResourceReport:
    low = _Lowering(circuit.width)
    for g in circuit.gates:
        low.gate(g)
    depth = max(low.level.values(), default=0)
    return ResourceReport(circuit.width + low.extra, depth, low.cx + low.one, low.cx, low.one)
