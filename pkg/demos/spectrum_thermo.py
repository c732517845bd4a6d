"""Normal frequencies from the kinetic-energy spectrum, then vibrational thermodynamics.

    python3 demos/spectrum_thermo.py
"""

from __future__ import annotations

import numpy as np

from oscsim.classical import ExactPropagator, normal_modes
from oscsim.model import build_hamiltonian, build_system, initial_state_vector, total_energy
from oscsim.observables import (extract_normal_frequencies, frequency_spectrum, kinetic_energy,
                                vibrational_thermo)
from oscsim.pipeline import time_grid


def main():
    sys_ = build_system("impl1-chain", 4)
    T = total_energy(sys_)
    prop = ExactPropagator(build_hamiltonian(sys_).dense())
    psi0 = initial_state_vector(sys_)
    times = time_grid(0, 40, 0.05)
    E = [kinetic_energy(prop.evolve(psi0, t), T) for t in times]
    peaks = extract_normal_frequencies(frequency_spectrum(times, E, T))
    print("recovered omega:", np.round(peaks.frequencies, 4))
    print("normal modes:   ", np.round(normal_modes(sys_).frequencies, 4))
    for temp in (0.2, 1.0, 5.0):
        th = vibrational_thermo(peaks.frequencies, temp)
        print(f"T={temp:3.1f}  F={th.F:.4f}  U={th.U:.4f}  S={th.S:.4f}  C_V={th.C_V:.4f}")


if __name__ == "__main__":
    main()
