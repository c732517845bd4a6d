"""Implementations I, II and III on a four-mass chain at a few times.

QSVT runs simulate about twenty qubits; expect a minute or two.

    python3 demos/routes.py
"""

from __future__ import annotations

from oscsim.model import build_system
from oscsim.pipeline import run_route


def main():
    sys_ = build_system("impl2-chain", 4)
    times = [0.0, 1.0, 2.0]
    for route, prep, kw in (("trotter", "sparse", {}), ("qsvt", "oracle", {"eps": 1e-3}),
                            ("qsvt", "sparse", {"eps": 1e-3})):
        res = run_route(sys_, route, prep, times, **kw)
        print(f"Implementation {res.implementation:>3}: E = {res.series.values.round(6).tolist()}"
              f"  max|dE| = {res.abs_err.max():.2e}  budget = {res.budget:.2e}"
              f"  min success = {res.success.min():.3f}")


if __name__ == "__main__":
    main()
