"""Spring-mass systems and their quantum (Schrodinger-form) encoding.

A chain of ``N = 2**n`` masses coupled by springs is mapped onto a
``2N^2``-dimensional Hamiltonian ``H = -[[0, B], [B^dag, 0]]``.  The first
``N^2`` amplitudes hold velocities (only indices ``0..N-1`` are used), the
second ``N^2`` amplitudes hold spring coordinates on the padded pair index
``j*N + k`` (``j <= k``).

Circuits address the velocity block differently: velocity ``j`` lives on
``|b=0>|j>|k=0>``, i.e. index ``j*N``.  :func:`circuit_permutation` converts
between the two labelings.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import scipy.sparse as sp

PRESETS = ("impl1-chain", "impl2-chain", "two-body")


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def n_qubits_for(n_osc: int) -> int:
    return int(round(math.log2(n_osc)))


@dataclass(frozen=True)
class SpringMassSystem:
    n_osc: int
    masses: np.ndarray
    couplings: Mapping[tuple[int, int], float]
    wall_springs: Mapping[int, float]
    x0: np.ndarray
    v0: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        n = self.n_osc
        if not is_power_of_two(n):
            raise ValueError(f"n_osc must be a power of two >= 2, got {n}")
        masses = np.asarray(self.masses, dtype=float)
        x0 = np.asarray(self.x0, dtype=float)
        v0 = np.asarray(self.v0, dtype=float)
        if masses.shape != (n,) or x0.shape != (n,) or v0.shape != (n,):
            raise ValueError("masses, x0 and v0 must all have length n_osc")
        if np.any(masses <= 0):
            raise ValueError("masses must be positive")
        couplings: dict[tuple[int, int], float] = {}
        for (j, k), kappa in dict(self.couplings).items():
            j, k, kappa = int(j), int(k), float(kappa)
            if j == k:
                raise ValueError("self-coupling belongs in wall_springs")
            if not (0 <= j < n and 0 <= k < n):
                raise ValueError(f"coupling index ({j}, {k}) out of range")
            if kappa < 0:
                raise ValueError("spring constants must be non-negative")
            key = (min(j, k), max(j, k))
            if key in couplings and couplings[key] != kappa:
                raise ValueError(f"asymmetric coupling for pair {key}")
            if kappa > 0:
                couplings[key] = kappa
        walls: dict[int, float] = {}
        for j, kappa in dict(self.wall_springs).items():
            j, kappa = int(j), float(kappa)
            if not 0 <= j < n:
                raise ValueError(f"wall index {j} out of range")
            if kappa < 0:
                raise ValueError("spring constants must be non-negative")
            if kappa > 0:
                walls[j] = kappa
        for arr in (masses, x0, v0):
            arr.setflags(write=False)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "couplings", dict(sorted(couplings.items())))
        object.__setattr__(self, "wall_springs", dict(sorted(walls.items())))

    @property
    def n_qubits(self) -> int:
        return n_qubits_for(self.n_osc)

    @property
    def sparsity(self) -> int:
        """Largest number of off-diagonal couplings in any row."""
        counts = np.zeros(self.n_osc, dtype=int)
        for j, k in self.couplings:
            counts[j] += 1
            counts[k] += 1
        return int(counts.max()) if self.n_osc else 0

    def kappa(self, j: int, k: int) -> float:
        if j == k:
            return self.wall_springs.get(j, 0.0)
        return self.couplings.get((min(j, k), max(j, k)), 0.0)

    def kappa_matrix(self) -> np.ndarray:
        K = np.zeros((self.n_osc, self.n_osc))
        for (j, k), kappa in self.couplings.items():
            K[j, k] = K[k, j] = kappa
        for j, kappa in self.wall_springs.items():
            K[j, j] = kappa
        return K

    @property
    def m_max(self) -> float:
        return float(self.masses.max())

    @property
    def m_min(self) -> float:
        return float(self.masses.min())

    @property
    def kappa_max(self) -> float:
        vals = list(self.couplings.values()) + list(self.wall_springs.values())
        return max(vals) if vals else 0.0

    def is_chain(self) -> bool:
        return all(k - j == 1 for j, k in self.couplings)

    def with_initial(self, x0, v0) -> "SpringMassSystem":
        return SpringMassSystem(self.n_osc, self.masses, self.couplings,
                                self.wall_springs, x0, v0, self.name)


def build_system(preset: str | None = None, n_osc: int | None = None, *,
                 masses=None, couplings=None, wall_springs=None,
                 x0=None, v0=None) -> SpringMassSystem:
    """Build a preset chain (``impl1-chain``/``impl2-chain``) or a raw system."""
    if preset is None:
        if masses is None:
            raise ValueError("either a preset or raw masses are required")
        n = len(masses) if n_osc is None else n_osc
        return SpringMassSystem(n, masses, couplings or {}, wall_springs or {},
                                np.zeros(n) if x0 is None else x0,
                                np.zeros(n) if v0 is None else v0)
    if preset == "two-body":
        # two unit masses joined by one unit spring; the minimal worked example
        if n_osc not in (None, 2):
            raise ValueError("preset 'two-body' has exactly 2 oscillators")
        return SpringMassSystem(2, [1.0, 1.0], {(0, 1): 1.0}, {},
                                [1.0, 2.0] if x0 is None else x0,
                                [1.0, 1.0] if v0 is None else v0, name=preset)
    if n_osc is None or not is_power_of_two(n_osc):
        raise ValueError(f"preset {preset!r} needs a power-of-two n_osc >= 2")
    n = n_osc
    xi = np.zeros(n)
    xi[:2] = (0.25, -0.25)
    x0 = xi if x0 is None else x0
    v0 = xi.copy() if v0 is None else v0
    if preset == "impl1-chain":
        masses = np.ones(n)
        if n >= 4:
            masses[-2:] = 4.0
        couplings = {(j, j + 1): 1.0 for j in range(n - 1)}
        walls = {j: 1.0 for j in range(n)}
    elif preset == "impl2-chain":
        masses = np.ones(n)
        masses[-1] = 4.0
        couplings = {(j, j + 1): 0.25 for j in range(n - 1)}
        couplings[(n - 2, n - 1)] = 1.0
        walls = {}
    else:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    return SpringMassSystem(n, masses, couplings, walls, x0, v0, name=preset)


def load_system(path) -> SpringMassSystem:
    """Read a system from the JSON config format."""
    cfg = json.loads(Path(path).read_text())
    return system_from_config(cfg)


def system_from_config(cfg: dict) -> SpringMassSystem:
    if "preset" in cfg:
        return build_system(cfg["preset"], int(cfg["n_osc"]),
                            x0=cfg.get("x0"), v0=cfg.get("v0"))
    n = int(cfg["n_osc"])
    couplings = {}
    for s in cfg.get("springs", []):
        key = (int(s["j"]), int(s["k"]))
        rev = (key[1], key[0])
        if rev in couplings and couplings[rev] != float(s["kappa"]):
            raise ValueError(f"asymmetric coupling for pair {key}")
        couplings[key] = float(s["kappa"])
    walls = {int(w["j"]): float(w["kappa"]) for w in cfg.get("wall", [])}
    return SpringMassSystem(n, cfg["masses"], couplings, walls,
                            cfg.get("x0", [0.0] * n), cfg.get("v0", [0.0] * n),
                            name=cfg.get("name", "custom"))


def system_to_config(sys_: SpringMassSystem) -> dict:
    return {
        "name": sys_.name,
        "n_osc": sys_.n_osc,
        "masses": sys_.masses.tolist(),
        "springs": [{"j": j, "k": k, "kappa": v} for (j, k), v in sys_.couplings.items()],
        "wall": [{"j": j, "kappa": v} for j, v in sys_.wall_springs.items()],
        "x0": sys_.x0.tolist(),
        "v0": sys_.v0.tolist(),
    }


def stiffness_matrix(sys_: SpringMassSystem) -> np.ndarray:
    """``F`` with ``f_jj = sum_k kappa_jk`` (walls included) and ``f_jk = -kappa_jk``."""
    K = sys_.kappa_matrix()
    F = -K.copy()
    np.fill_diagonal(F, K.sum(axis=1))
    return F


def mass_matrix(sys_: SpringMassSystem) -> np.ndarray:
    return np.diag(sys_.masses)


def build_b_matrix(sys_: SpringMassSystem) -> sp.csr_matrix:
    """``B`` as an ``N x N^2`` sparse matrix on the padded pair index ``j*N + k``."""
    n = sys_.n_osc
    inv_sqrt_m = 1.0 / np.sqrt(sys_.masses)
    rows, cols, vals = [], [], []
    for j, kappa in sys_.wall_springs.items():
        rows.append(j)
        cols.append(j * n + j)
        vals.append(math.sqrt(kappa) * inv_sqrt_m[j])
    for (j, k), kappa in sys_.couplings.items():
        s = math.sqrt(kappa)
        rows += [j, k]
        cols += [j * n + k] * 2
        vals += [s * inv_sqrt_m[j], -s * inv_sqrt_m[k]]
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n * n))


def b_unpadded(sys_: SpringMassSystem) -> np.ndarray:
    """``B`` restricted to the ``N(N+1)/2`` ordered pairs ``j <= k`` (row-major)."""
    n = sys_.n_osc
    cols = [j * n + k for j in range(n) for k in range(j, n)]
    return build_b_matrix(sys_).toarray()[:, cols]


@dataclass(frozen=True)
class PaddedHamiltonian:
    n_osc: int
    matrix: sp.csr_matrix
    block_b: sp.csr_matrix = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.n_osc ** 2

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def build_hamiltonian(sys_: SpringMassSystem) -> PaddedHamiltonian:
    n2 = sys_.n_osc ** 2
    B = build_b_matrix(sys_)
    B_pad = sp.vstack([B, sp.csr_matrix((n2 - sys_.n_osc, n2))]).tocsr()
    H = -sp.bmat([[None, B_pad], [B_pad.T, None]], format="csr")
    H.eliminate_zeros()
    return PaddedHamiltonian(sys_.n_osc, H, B_pad)


def kinetic_energy_classical(sys_: SpringMassSystem, v) -> float:
    v = np.asarray(v, dtype=float)
    return 0.5 * float(np.sum(sys_.masses * v ** 2))


def potential_energy(sys_: SpringMassSystem, x) -> float:
    x = np.asarray(x, dtype=float)
    u = sum(kappa * x[j] ** 2 for j, kappa in sys_.wall_springs.items())
    u += sum(kappa * (x[j] - x[k]) ** 2 for (j, k), kappa in sys_.couplings.items())
    return 0.5 * float(u)


def total_energy(sys_: SpringMassSystem, x=None, v=None) -> float:
    x = sys_.x0 if x is None else x
    v = sys_.v0 if v is None else v
    return kinetic_energy_classical(sys_, v) + potential_energy(sys_, x)


def initial_state_vector(sys_: SpringMassSystem, normalize: bool = True) -> np.ndarray:
    """Model-layout initial state ``(sqrt(M) v, i B^dag sqrt(M) x) / sqrt(2T)``."""
    n = sys_.n_osc
    T = total_energy(sys_)
    if normalize and T <= 0:
        raise ValueError("total energy is zero; initial state cannot be normalized")
    psi = np.zeros(2 * n * n, dtype=complex)
    sqrt_m = np.sqrt(sys_.masses)
    psi[:n] = sqrt_m * sys_.v0
    psi[n * n:] = 1j * (build_b_matrix(sys_).T @ (sqrt_m * sys_.x0))
    if normalize:
        psi /= math.sqrt(2 * T)
    return psi


def circuit_permutation(n_osc: int) -> np.ndarray:
    """Index map ``perm`` with ``psi_circuit[perm[i]] = psi_model[i]``.

    Swaps velocity slot ``j`` with ``j*N`` in the first block; an involution.
    """
    perm = np.arange(2 * n_osc * n_osc)
    for j in range(1, n_osc):
        perm[j], perm[j * n_osc] = j * n_osc, j
    return perm


def to_circuit_layout(psi, n_osc: int) -> np.ndarray:
    psi = np.asarray(psi)
    out = np.empty_like(psi)
    out[circuit_permutation(n_osc)] = psi
    return out


def to_model_layout(psi, n_osc: int) -> np.ndarray:
    return np.asarray(psi)[circuit_permutation(n_osc)]


def hamiltonian_circuit_layout(sys_: SpringMassSystem) -> np.ndarray:
    H = build_hamiltonian(sys_).dense()
    perm = circuit_permutation(sys_.n_osc)
    out = np.empty_like(H)
    out[np.ix_(perm, perm)] = H
    return out


# --- fixed point -----------------------------------------------------------

@dataclass(frozen=True)
class FixedPointValue:
    raw: int
    bits: int
    scale: float
    clamped: bool = False

    @property
    def value(self) -> float:
        return self.scale * self.raw / 2 ** self.bits

    def bitstring(self) -> str:
        return format(self.raw, f"0{self.bits}b")


def encode_fixed_point(value: float, scale: float, r: int = 4,
                       warn: bool = False) -> FixedPointValue:
    """Round-to-nearest (ties up) r-bit encoding of ``value / scale``.

    ``value == scale`` cannot be represented and saturates to ``2**r - 1``.
    """
    if r < 1:
        raise ValueError("need at least one bit")
    if scale <= 0:
        raise ValueError("scale must be positive")
    if value < 0:
        raise ValueError("value must be non-negative")
    if value > scale * (1 + 1e-12):
        raise ValueError(f"value {value} exceeds scale {scale}")
    raw = int(math.floor(value / scale * 2 ** r + 0.5))
    clamped = raw > 2 ** r - 1
    if clamped:
        raw = 2 ** r - 1
        if warn:
            warnings.warn(f"fixed-point saturation: {value} at scale {scale}, r={r}")
    return FixedPointValue(raw, r, float(scale), clamped)


def headroom_scale(values, r: int) -> float:
    """Smallest power of two ``g >= 1`` with ``max(values)/g`` representable in r bits."""
    vmax = max(values, default=0.0)
    g = 1.0
    while vmax / g > (2 ** r - 1) / 2 ** r:
        g *= 2.0
    return g
