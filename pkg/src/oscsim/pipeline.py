"""The three end-to-end routes plus the exact reference, as kinetic-energy series.

Valid combinations of evolution route and preparation:

* ``trotter`` + ``sparse``: Implementation I
* ``qsvt`` + ``oracle``: Implementation II
* ``qsvt`` + ``sparse``: Implementation III
* ``exact`` + either: dense matrix exponential reference
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import ResourceCapError
from .classical import ExactPropagator, kinetic_energy_series
from .model import SpringMassSystem, hamiltonian_circuit_layout, total_energy
from .observables import EnergySeries, kinetic_energy

ROUTES = ("trotter", "qsvt", "exact")
PREPS = ("sparse", "oracle")
VALID = {("trotter", "sparse"): "I", ("qsvt", "oracle"): "II", ("qsvt", "sparse"): "III",
         ("exact", "sparse"): "exact", ("exact", "oracle"): "exact"}
CIRCUIT_CAP = 16


@dataclass(frozen=True)
class RouteResult:
    route: str
    prep: str
    implementation: str
    series: EnergySeries
    classical: np.ndarray
    success: np.ndarray  # postselection probability per time (1 where none)
    budget: float  # absolute kinetic-energy error budget
    params: dict

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.series.values - self.classical)

    @property
    def within_budget(self) -> bool:
        return bool(np.all(self.abs_err <= self.budget))


def validate_route(route: str, prep: str) -> str:
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    if prep not in PREPS:
        raise ValueError(f"unknown prep {prep!r}; expected one of {PREPS}")
    if (route, prep) not in VALID:
        raise ValueError(f"route {route!r} does not combine with prep {prep!r}")
    return VALID[(route, prep)]


def qsvt_error_budget(T: float, eps_poly: float, degree: int, eps_be: float,
                      prep_err: float) -> float:
    """Energy budget ``4 T eps_total`` with ``eps_total = 2 eps_poly + degree eps_be + prep_err``.

    Two truncated branches each contribute ``eps_poly``; renormalising after
    postselection at most doubles a state error, and ``|dE| <= 2 T |dpsi|``.
    """
    return 4 * T * (2 * eps_poly + degree * eps_be + prep_err)


def trotter_error_budget(T: float, eps: float) -> float:
    """``|dE| <= 2 T |dpsi|`` with ``|dpsi| <= eps`` from the step-count bound."""
    return 2 * T * eps


def run_route(sys_: SpringMassSystem, route: str, prep: str, times, *, eps: float | None = None,
              r: int = 4, r_st: int | None = None) -> RouteResult:
    """Kinetic-energy series along ``times`` for one route.

    Trotter: ``r_st`` fixed if given, else the step-count bound for ``eps``
    (default 0.1) at each time.  QSVT: ``eps`` is the polynomial tolerance
    (default 1e-4).
    """
    impl = validate_route(route, prep)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if route != "exact" and sys_.n_osc > CIRCUIT_CAP:
        raise ResourceCapError(f"N={sys_.n_osc} exceeds the circuit-level cap {CIRCUIT_CAP}")
    T = total_energy(sys_)
    classical = kinetic_energy_series(sys_, times)
    N = sys_.n_osc
    success = np.ones(len(times))
    params: dict = {"route": route, "prep": prep, "r_bits": r}
    if route == "exact":
        from .stateprep import target_state
        prop = ExactPropagator(hamiltonian_circuit_layout(sys_))
        psi0 = target_state(sys_)
        vals = np.array([kinetic_energy(prop.evolve(psi0, t), T, N, "circuit") for t in times])
        budget = 1e-8
    elif route == "trotter":
        from .trotter import evolve_trotter
        e = 0.1 if eps is None else eps
        series = evolve_trotter(sys_, times, r_st=r_st, eps=e)
        vals = series.values
        # a fixed r_st carries no certified bound; the per-time bound still applies
        budget = trotter_error_budget(T, e) if r_st is None else 0.1
        params.update(eps=e if r_st is None else None, r_st=r_st)
    else:
        from .qsvt import bdagger_normalization, block_encode_hamiltonian, evolve_qsvt
        from .stateprep import oracle_prepare, sparse_prepare_system
        e = 1e-4 if eps is None else eps
        if prep == "oracle":
            ps = oracle_prepare(sys_, r)
            p_prep = ps.report.measured_prob if ps.report else 1.0
        else:
            ps = sparse_prepare_system(sys_)
            p_prep = 1.0
        if ps.state is None:
            raise RuntimeError("state preparation failed postselection")
        prep_err = max(0.0, 1.0 - ps.fidelity)
        be = block_encode_hamiltonian(sys_, r)
        _, eps_be = bdagger_normalization(sys_, r)
        vals = np.empty(len(times))
        degree = 0
        for i, t in enumerate(times):
            res = evolve_qsvt(sys_, t, e, r, psi0=ps.state, be=be)
            if res.state is None:
                raise RuntimeError(f"postselection probability {res.success_probability:.3g} "
                                   f"below floor at t={t}")
            vals[i] = kinetic_energy(res.state, T, N, "circuit")
            success[i] = p_prep * res.success_probability
            degree = max(degree, res.plan.degree)
        budget = qsvt_error_budget(T, e, degree, eps_be, prep_err)
        params.update(eps=e, max_degree=degree, eps_be=eps_be, prep_fidelity=ps.fidelity,
                      prep_success=p_prep, lam=be.lam)
    return RouteResult(route, prep, impl, EnergySeries(times, vals, T), classical, success,
                       budget, params)


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Inclusive grid ``t0, t0 + dt, ..., t1``; a single point when ``t0 == t1``."""
    if dt <= 0 and t1 != t0:
        raise ValueError("dt must be positive")
    if t1 < t0:
        raise ValueError("t1 must not be below t0")
    if t1 == t0:
        return np.array([t0])
    n = int(math.floor((t1 - t0) / dt + 1e-9))
    return t0 + dt * np.arange(n + 1)
