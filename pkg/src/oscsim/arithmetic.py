"""Reversible arithmetic fragments: constant adders and comparators.

Registers are qubit lists, most significant bit first.  Every builder takes
optional extra ``controls``/``polarity`` that gate the whole fragment.
"""

from __future__ import annotations

from typing import Sequence

from .circuit import Circuit


def value_controls(reg: Sequence[int], value: int) -> tuple[list[int], list[int]]:
    """Controls that fire exactly when ``reg`` holds ``value``."""
    n = len(reg)
    if not 0 <= value < 2 ** n:
        raise ValueError(f"{value} does not fit {n} bits")
    return list(reg), [(value >> (n - 1 - i)) & 1 for i in range(n)]


def _ctl(controls, polarity):
    controls = list(controls)
    pol = list(polarity) if polarity is not None else [1] * len(controls)
    return controls, pol


def add_constant(c: Circuit, reg: Sequence[int], value: int, controls=(), polarity=None) -> Circuit:
    """``|v> -> |v + value mod 2^n>`` as a cascade of shifted increments."""
    reg = list(reg)
    n = len(reg)
    value %= 2 ** n
    ctl, pol = _ctl(controls, polarity)
    for i in range(n):  # bit i (LSB = 0) of the constant
        if not (value >> i) & 1:
            continue
        # increment the sub-register of bits i..n-1; highest bit first
        for p in range(n - 1, i - 1, -1):
            lower = [reg[n - 1 - b] for b in range(i, p)]
            c.add("X", reg[n - 1 - p], ctl + lower, pol + [1] * len(lower))
    return c


def compare_ge_const(c: Circuit, x_reg: Sequence[int], bound: int, flag: int,
                     controls=(), polarity=None) -> Circuit:
    """``flag ^= [x >= bound]`` for an integer constant ``bound``."""
    x_reg = list(x_reg)
    if flag in x_reg:
        raise ValueError("flag qubit lies inside the compared register")
    n = len(x_reg)
    ctl, pol = _ctl(controls, polarity)
    if bound <= 0:
        c.add("X", flag, ctl, pol)
        return c
    if bound >= 2 ** n:
        return c
    bits = [(bound >> (n - 1 - i)) & 1 for i in range(n)]
    # disjoint cases: first differing bit (from the top) has x=1, bound=0
    for i in range(n):
        if bits[i] == 0:
            c.add("X", flag, ctl + x_reg[:i + 1], pol + bits[:i] + [1])
    c.add("X", flag, ctl + x_reg, pol + bits)
    return c


def compare_ge_reg(c: Circuit, x_reg: Sequence[int], y_reg: Sequence[int], flag: int,
                   work: int, controls=(), polarity=None) -> Circuit:
    """``flag ^= [x >= y]`` using one clean work qubit.

    Computes the carry out of ``x + ~y + 1`` with a ripple of majority gates,
    copies it to ``flag`` and uncomputes.
    """
    x_reg, y_reg = list(x_reg), list(y_reg)
    if len(x_reg) != len(y_reg):
        raise ValueError("registers must have equal width")
    if flag in x_reg + y_reg or work in x_reg + y_reg or flag == work:
        raise ValueError("flag/work qubits overlap the compared registers")
    n = len(x_reg)
    ctl, pol = _ctl(controls, polarity)
    xs = x_reg[::-1]  # LSB first
    ys = y_reg[::-1]
    fwd = Circuit(c.layout)
    for q in ys:
        fwd.add("X", q)
    fwd.add("X", work)
    carry = work
    for b in range(n):
        fwd.add("X", ys[b], [xs[b]])
        fwd.add("X", carry, [xs[b]])
        fwd.add("X", xs[b], [carry, ys[b]])
        carry = xs[b]
    c.compose(fwd)
    c.add("X", flag, ctl + [carry], pol + [1])
    c.compose(fwd.inverse())
    return c


def compare_ge(c: Circuit, x_reg, bound, flag: int, work: int | None = None,
               controls=(), polarity=None) -> Circuit:
    """Dispatch on an integer or register ``bound``."""
    if isinstance(bound, (int,)) and not isinstance(bound, bool):
        return compare_ge_const(c, x_reg, bound, flag, controls, polarity)
    if work is None:
        raise ValueError("register comparison needs a work qubit")
    return compare_ge_reg(c, x_reg, bound, flag, work, controls, polarity)


def swap_registers(c: Circuit, a: Sequence[int], b: Sequence[int], controls=(), polarity=None) -> Circuit:
    ctl, pol = _ctl(controls, polarity)
    for qa, qb in zip(a, b):
        c.add("SWAP", (qa, qb), ctl, pol)
    return c


def hadamard_all(c: Circuit, reg: Sequence[int], controls=(), polarity=None) -> Circuit:
    ctl, pol = _ctl(controls, polarity)
    for q in reg:
        c.add("H", q, ctl, pol)
    return c


def phase_on_value(c: Circuit, reg: Sequence[int], value: int, phase: float,
                   controls=(), polarity=None) -> Circuit:
    """Multiply the amplitude of ``reg == value`` (under controls) by ``e^{i phase}``."""
    ctl, pol = _ctl(controls, polarity)
    q, p = value_controls(reg, value)
    allq, allp = ctl + q, pol + p
    target, tpol = allq[-1], allp[-1]
    if tpol == 0:
        c.add("X", target)
    c.add("P", target, allq[:-1], allp[:-1], param=phase)
    if tpol == 0:
        c.add("X", target)
    return c
