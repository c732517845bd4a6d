from __future__ import annotations

import numpy as np
import pytest

from oscsim.bench import (BENCH_KINDS, bench_rows, check_size, placeholder_phases, qsvt_report,
                          repeated, sequential)
from oscsim.circuit import ResourceCapError
from oscsim.model import build_system
from oscsim.qsvt import jacobi_anger_plan
from oscsim.resources import ResourceReport


def test_sequential_and_repeated():
    a, b = ResourceReport(3, 5, 10, 4, 6), ResourceReport(4, 2, 7, 3, 4)
    s = sequential(a, b)
    assert (s.width, s.depth, s.total_gates, s.cx, s.one_qubit) == (4, 7, 17, 7, 10)
    r = repeated(a, 3)
    assert (r.width, r.depth, r.total_gates) == (3, 15, 30)


def test_check_size():
    check_size(16, 16)
    with pytest.raises(ResourceCapError):
        check_size(32, 16)
    with pytest.raises(ValueError):
        check_size(6, 16)


def test_unknown_kind():
    assert "ratio" in BENCH_KINDS
    with pytest.raises(ValueError):
        bench_rows("bogus", [2])


def test_placeholder_phases_lengths():
    plan = placeholder_phases(jacobi_anger_plan(1.0, 4.0, 1e-4))
    assert len(plan.cos_phases) == plan.cos_degree + 1
    assert len(plan.sin_phases) == plan.sin_degree + 1


def test_qsvt_report_degree_grows_with_time():
    sys_ = build_system("impl1-chain", 2)
    _, d1 = qsvt_report(sys_, 0.5)
    rep, d2 = qsvt_report(sys_, 2.0)
    assert d2 > d1 and rep.total_gates > 0


def test_ratio_rows():
    rows = bench_rows("ratio", [2, 4, 512])
    assert [r.n_osc for r in rows] == [2, 4, 512]
    assert rows[2].skipped
    assert rows[0].extra["ratio"] > rows[1].extra["ratio"] > 0


def test_stateprep_rows():
    rows = bench_rows("stateprep", [4, 32])
    routes = [(r.n_osc, r.route, bool(r.skipped)) for r in rows]
    assert routes == [(4, "sparse", False), (4, "oracle", False), (32, "sparse", False), (32, "oracle", True)]
    assert rows[0].extra["fidelity"] == pytest.approx(1, abs=1e-10)
    assert rows[1].extra["fidelity"] >= 0.999


def test_trotter_width_formula():
    rows = bench_rows("trotter", [2, 4, 8], t=0.5)
    assert [r.width for r in rows] == [2 * int(np.log2(n)) + 1 + 1 for n in (2, 4, 8)]
    assert [r.extra["L"] for r in rows] == [10, 96, 768]


def test_endtoend_impl3_cheaper():
    rows = bench_rows("endtoend", [2, 4], t=0.5, eps=1e-3)
    by = {(r.n_osc, r.route): r for r in rows}
    for n in (2, 4):
        assert by[(n, "impl3")].gates < by[(n, "impl2")].gates
