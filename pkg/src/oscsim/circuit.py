"""Gate-level circuit IR over named registers.

Qubit 0 is the most significant bit of a basis index, and every register is
stored MSB first, so a layout ``b:1, j:n, k:n`` puts basis state
``|b>|j>|k>`` at index ``b*N^2 + j*N + k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

KINDS_1Q = ("X", "Y", "Z", "H", "S", "SDG", "RX", "RY", "RZ", "P")
PARAM_KINDS = ("RX", "RY", "RZ", "P")
SELF_INVERSE = ("X", "Y", "Z", "H", "SWAP")
MAX_QUBITS = 26


class ResourceCapError(ValueError):
    """A requested size exceeds a configured cap."""


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    polarity: tuple[int, ...] = ()
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS_1Q + ("SWAP",):
            raise ValueError(f"unknown gate kind {self.kind}")
        n_t = 2 if self.kind == "SWAP" else 1
        if len(self.targets) != n_t:
            raise ValueError(f"{self.kind} takes {n_t} target(s)")
        if not self.polarity:
            object.__setattr__(self, "polarity", (1,) * len(self.controls))
        if len(self.polarity) != len(self.controls):
            raise ValueError("polarity list must match controls")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"overlapping qubits in {self}")
        if self.kind in PARAM_KINDS:
            if self.param is None or not math.isfinite(self.param):
                raise ValueError(f"{self.kind} needs a finite parameter")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        if self.kind == "S":
            return Gate("SDG", self.targets, self.controls, self.polarity)
        if self.kind == "SDG":
            return Gate("S", self.targets, self.controls, self.polarity)
        return Gate(self.kind, self.targets, self.controls, self.polarity, -self.param)

    def controlled(self, controls: Sequence[int], polarity: Sequence[int] | None = None) -> "Gate":
        pol = tuple(polarity) if polarity is not None else (1,) * len(controls)
        return Gate(self.kind, self.targets, tuple(controls) + self.controls,
                    pol + self.polarity, self.param)

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.targets),
                    tuple(mapping[q] for q in self.controls), self.polarity, self.param)

    def dump(self) -> str:
        parts = [self.kind, ",".join(map(str, self.targets))]
        if self.controls:
            ctl = ",".join(f"{c}{'+' if p else '-'}" for c, p in zip(self.controls, self.polarity))
            parts.append(f"[{ctl}]")
        if self.param is not None:
            parts.append(format(self.param, ".17g"))
        return " ".join(parts)

    @classmethod
    def parse(cls, line: str) -> "Gate":
        tokens = line.split()
        kind, targets = tokens[0], tuple(int(t) for t in tokens[1].split(","))
        controls, polarity, param = (), (), None
        for tok in tokens[2:]:
            if tok.startswith("["):
                items = tok[1:-1].split(",")
                controls = tuple(int(i[:-1]) for i in items)
                polarity = tuple(1 if i[-1] == "+" else 0 for i in items)
            else:
                param = float(tok)
        return cls(kind, targets, controls, polarity, param)


@dataclass(frozen=True)
class Register:
    name: str
    start: int
    width: int

    @property
    def qubits(self) -> list[int]:
        return list(range(self.start, self.start + self.width))


@dataclass
class RegisterLayout:
    registers: dict[str, Register] = field(default_factory=dict)
    cap: int = MAX_QUBITS

    @classmethod
    def of(cls, spec: Iterable[tuple[str, int]], cap: int = MAX_QUBITS) -> "RegisterLayout":
        layout = cls(cap=cap)
        for name, width in spec:
            layout.add(name, width)
        return layout

    @property
    def width(self) -> int:
        return sum(r.width for r in self.registers.values())

    def add(self, name: str, width: int) -> Register:
        if name in self.registers:
            raise ValueError(f"duplicate register {name}")
        if width < 1:
            raise ValueError("register width must be >= 1")
        if self.width + width > self.cap:
            raise ResourceCapError(f"layout exceeds the {self.cap}-qubit cap")
        reg = Register(name, self.width, width)
        self.registers[name] = reg
        return reg

    def __getitem__(self, name: str) -> list[int]:
        return self.registers[name].qubits

    def __contains__(self, name: str) -> bool:
        return name in self.registers

    def qubits(self, *names: str) -> list[int]:
        out: list[int] = []
        for name in names:
            out += self[name]
        return out

    def copy(self) -> "RegisterLayout":
        return RegisterLayout(dict(self.registers), self.cap)

    def dump(self) -> str:
        return " ".join(f"{r.name}:{r.width}" for r in self.registers.values())


class Circuit:
    """Ordered gate list on a register layout."""

    def __init__(self, layout: RegisterLayout, gates: Iterable[Gate] = ()):
        self.layout = layout
        self.gates: list[Gate] = []
        for g in gates:
            self.append(g)

    @property
    def width(self) -> int:
        return self.layout.width

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def append(self, gate: Gate) -> "Circuit":
        if max(gate.qubits) >= self.width or min(gate.qubits) < 0:
            raise ValueError(f"gate {gate.dump()} outside {self.width}-qubit layout")
        self.gates.append(gate)
        return self

    def add(self, kind: str, target, controls=(), polarity=None, param=None) -> "Circuit":
        targets = tuple(target) if isinstance(target, (tuple, list)) else (target,)
        controls = tuple(controls)
        pol = tuple(polarity) if polarity is not None else (1,) * len(controls)
        return self.append(Gate(kind, targets, controls, pol, param))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        return self.extend(other.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.layout, [g.inverse() for g in reversed(self.gates)])

    def controlled(self, controls, polarity=None) -> list[Gate]:
        return [g.controlled(controls, polarity) for g in self.gates]

    def copy(self) -> "Circuit":
        c = Circuit(self.layout)
        c.gates = list(self.gates)
        return c

    def dump(self) -> str:
        lines = [f"# layout {self.layout.dump()}"]
        lines += [g.dump() for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Circuit":
        layout, gates = None, []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("# layout"):
                spec = [tuple(item.split(":")) for item in line.split()[2:]]
                layout = RegisterLayout.of((n, int(w)) for n, w in spec)
            elif not line.startswith("#"):
                gates.append(Gate.parse(line))
        if layout is None:
            raise ValueError("missing layout header")
        return cls(layout, gates)
