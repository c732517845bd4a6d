"""Resource sweeps over N for the three implementations and the prep ratio study.

All counts come from :func:`oscsim.resources.resource_report`, a fixed
lowering table, so they show scaling shape and not any particular
compiler's absolute numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .circuit import RegisterLayout, ResourceCapError
from .model import build_system, hamiltonian_circuit_layout, is_power_of_two
from .resources import ResourceReport, resource_report
from .stateprep import gin_bound, oracle_prepare, oracle_prepare_circuit, sparse_prepare_system
from .trotter import pauli_decompose, trotter_step, trotter_step_count

CIRCUIT_CAP = 16  # largest N for gate-level circuits
MATRIX_CAP = 256  # largest N for preparation and matrix-level work

BENCH_KINDS = ("stateprep", "trotter", "endtoend", "ratio")


@dataclass(frozen=True)
class BenchRow:
    kind: str
    n_osc: int
    route: str
    width: int | None
    depth: int | None
    gates: int | None
    extra: dict
    skipped: str = ""

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "N": self.n_osc, "route": self.route,
               "width": self.width, "depth": self.depth, "gates": self.gates}
        out.update(self.extra)
        out["skipped"] = self.skipped
        return out


def check_size(n_osc: int, cap: int) -> None:
    if not is_power_of_two(n_osc):
        raise ValueError(f"N={n_osc} is not a power of two >= 2")
    if n_osc > cap:
        raise ResourceCapError(f"N={n_osc} exceeds cap {cap}")


def sequential(*reports: ResourceReport) -> ResourceReport:
    """Circuits run one after another on shared qubits."""
    return ResourceReport(max(r.width for r in reports), sum(r.depth for r in reports),
                          sum(r.total_gates for r in reports), sum(r.cx for r in reports),
                          sum(r.one_qubit for r in reports))


def repeated(rep: ResourceReport, times: int) -> ResourceReport:
    """``times`` back-to-back copies; depth is the serial upper bound."""
    return ResourceReport(rep.width, rep.depth * times, rep.total_gates * times,
                          rep.cx * times, rep.one_qubit * times)


def sparse_prep_report(sys_) -> ResourceReport:
    return resource_report(sparse_prepare_system(sys_).circuit)


def oracle_prep_report(sys_, r: int = 4, w: int | None = None) -> tuple[ResourceReport, int]:
    """Cost of the amplified preparation ``Q^w A``; returns (report, w).

    ``w`` defaults to ``floor(pi / 4 theta)`` from the simulated success
    probability of ``A``.
    """
    from .dataload import amplitude_amplify, good_probability
    A, good = oracle_prepare_circuit(sys_, r)
    if w is None:
        theta = math.asin(math.sqrt(min(good_probability(A, good), 1.0)))
        w = int(math.floor(math.pi / (4 * theta) + 1e-12))
    amp, _ = amplitude_amplify(A, good, w_cap=max(w, 1), w=w) if w else (A, None)
    return resource_report(amp), w


def trotter_report(sys_, t: float, eps: float = 0.1,
                   r_st: int | None = None) -> tuple[ResourceReport, int, int, float]:
    """Per-step report times the step count; returns (report, r_st, L, Lambda)."""
    decomp = pauli_decompose(hamiltonian_circuit_layout(sys_))
    r_st = r_st or trotter_step_count(decomp.L, decomp.Lambda, t, eps)
    n = sys_.n_qubits
    layout = RegisterLayout.of([("b", 1), ("j", n), ("k", n)])
    step = resource_report(trotter_step(decomp, t / r_st, layout))
    return repeated(step, r_st), r_st, decomp.L, decomp.Lambda


def qsvt_report(sys_, t: float, eps: float = 1e-4, r: int = 4) -> tuple[ResourceReport, int]:
    """LCU-of-QSVT evolution circuit; returns (report, max polynomial degree)."""
    from .qsvt import block_encode_hamiltonian, jacobi_anger_plan, lcu_evolution_circuit
    be = block_encode_hamiltonian(sys_, r)
    plan = jacobi_anger_plan(t, be.lam, eps)
    circ = lcu_evolution_circuit(be, placeholder_phases(plan))
    return resource_report(circ), max(plan.cos_degree, plan.sin_degree)


def placeholder_phases(plan):
    """Plan with fixed non-zero phases of the right lengths.

    Gate counts do not depend on phase values, so sweeps skip the solver.
    """
    return replace(plan, cos_phases=np.full(plan.cos_degree + 1, 0.1),
                   sin_phases=np.full(plan.sin_degree + 1, 0.1))


def bench_rows(kind: str, sizes, *, preset: str = "impl1-chain", t: float = 1.0,
               eps: float | None = None, r: int = 4, r_st: int | None = None) -> list[BenchRow]:
    if kind not in BENCH_KINDS:
        raise ValueError(f"unknown bench kind {kind!r}; expected one of {BENCH_KINDS}")
    rows: list[BenchRow] = []
    for N in sizes:
        cap = MATRIX_CAP if kind in ("ratio", "stateprep") else CIRCUIT_CAP
        try:
            check_size(N, cap)
        except ResourceCapError as e:
            rows.append(BenchRow(kind, N, "", None, None, None, {}, str(e)))
            continue
        sys_ = build_system(preset, N)
        if kind == "ratio":
            e = 1e-2 if eps is None else eps
            rep = sparse_prep_report(sys_)
            bound = gin_bound(sys_, e, d=2)
            rows.append(BenchRow(kind, N, "sparse", rep.width, rep.depth, rep.total_gates,
                                 {"bound": bound, "ratio": rep.total_gates / bound}))
        elif kind == "stateprep":
            e = 1e-2 if eps is None else eps
            bound = gin_bound(sys_, e, d=2)
            sp = sparse_prepare_system(sys_)
            rep = resource_report(sp.circuit)
            rows.append(BenchRow(kind, N, "sparse", rep.width, rep.depth, rep.total_gates,
                                 {"fidelity": sp.fidelity, "theta": None, "w": 0,
                                  "gin_ratio": rep.total_gates / bound}))
            if N > CIRCUIT_CAP:
                rows.append(BenchRow(kind, N, "oracle", None, None, None, {},
                                     f"N={N} exceeds cap {CIRCUIT_CAP}"))
                continue
            op = oracle_prepare(sys_, r)
            rep = resource_report(op.circuit)
            rows.append(BenchRow(kind, N, "oracle", rep.width, rep.depth, rep.total_gates,
                                 {"fidelity": op.fidelity, "theta": op.report.theta,
                                  "w": op.report.w, "gin_ratio": rep.total_gates / bound}))
        elif kind == "trotter":
            rep, steps, L, lam = trotter_report(sys_, t, 0.1 if eps is None else eps, r_st)
            rep = sequential(sparse_prep_report(sys_), rep)
            rows.append(BenchRow(kind, N, "impl1", rep.width, rep.depth, rep.total_gates,
                                 {"L": L, "Lambda": lam, "r_st": steps}))
        else:
            e = 1e-4 if eps is None else eps
            q, deg = qsvt_report(sys_, t, e, r)
            op, w = oracle_prep_report(sys_, r)
            full = sequential(op, q)
            rows.append(BenchRow(kind, N, "impl2", full.width, full.depth, full.total_gates,
                                 {"degree": deg, "grover_iterations": w}))
            light = sequential(sparse_prep_report(sys_), q)
            rows.append(BenchRow(kind, N, "impl3", light.width, light.depth, light.total_gates,
                                 {"degree": deg, "grover_iterations": 0}))
    return rows
