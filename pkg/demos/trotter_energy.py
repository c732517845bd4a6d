"""Two-body worked example: Trotter kinetic energy against the Newtonian reference.

    python3 demos/trotter_energy.py
"""

from __future__ import annotations

import numpy as np

from oscsim.classical import kinetic_energy_series
from oscsim.model import build_system
from oscsim.pipeline import time_grid
from oscsim.trotter import evolve_trotter


def main():
    sys_ = build_system("two-body")
    times = time_grid(0, 5, 0.1)
    quantum = evolve_trotter(sys_, times, r_st=20).values
    classical = kinetic_energy_series(sys_, times)
    for t, q, c in zip(times[::5], quantum[::5], classical[::5]):
        print(f"t={t:4.1f}  E_quantum={q:.6f}  E_classical={c:.6f}")
    print(f"max |dE| = {np.max(np.abs(quantum - classical)):.3e}")


if __name__ == "__main__":
    main()
