"""Physics read out of evolved states: energies, spectra, thermodynamics, transport.

States are taken in the model layout (velocities first) unless a function
says otherwise; use :func:`oscsim.model.to_model_layout` on circuit output.
Thermodynamic quantities use hbar = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SpringMassSystem


@dataclass(frozen=True)
class EnergySeries:
    times: np.ndarray
    values: np.ndarray
    total: float

    def rescaled(self) -> np.ndarray:
        """``E'(t) = E(t) - T/2``."""
        return self.values - self.total / 2


def kinetic_energy(psi, T: float, n_osc: int | None = None, layout: str = "model") -> float:
    """``T * sum_{i<N} |psi_i|^2``; with ``layout='circuit'`` velocities sit at ``j*N``."""
    psi = np.asarray(psi)
    if n_osc is None:
        n_osc = int(round(math.sqrt(psi.size / 2)))
    if layout == "model":
        idx = np.arange(n_osc)
    elif layout == "circuit":
        idx = np.arange(n_osc) * n_osc
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return T * float(np.sum(np.abs(psi[idx]) ** 2))


# --- spectrum ------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    values: np.ndarray  # complex E~'(omega)
    dt: float
    n_samples: int

    @property
    def bin_width(self) -> float:
        return 2 * math.pi / (self.n_samples * self.dt)


def frequency_spectrum(times, energies, T: float, min_samples: int = 64) -> Spectrum:
    """``sum_k E'(t_k) e^{-i w t_k} dt`` with ``E' = E - T/2`` on the DFT grid."""
    times = np.asarray(times, dtype=float)
    E = np.asarray(energies, dtype=float)
    if times.shape != E.shape or times.ndim != 1:
        raise ValueError("times and energies must be matching 1-D arrays")
    if len(times) < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {len(times)}")
    steps = np.diff(times)
    dt = float(steps.mean())
    if np.max(np.abs(steps - dt)) > 1e-9 * max(dt, 1.0):
        raise ValueError("sampling must be uniform")
    K = len(times)
    vals = np.fft.rfft(E - T / 2) * dt
    omega = 2 * math.pi * np.arange(len(vals)) / (K * dt)
    vals = vals * np.exp(-1j * omega * times[0])
    return Spectrum(omega, vals, dt, K)


@dataclass(frozen=True)
class PeakResult:
    frequencies: np.ndarray  # normal frequencies (peak positions halved)
    peaks: np.ndarray  # spectral peak positions
    found: bool


def extract_normal_frequencies(spec: Spectrum, threshold: float = 5.0) -> PeakResult:
    """Interior local maxima of ``|E~'|`` above ``threshold`` x median, halved."""
    a = np.abs(spec.values)
    med = float(np.median(a))
    peaks = []
    for m in range(1, len(a) - 1):
        if a[m] > a[m - 1] and a[m] >= a[m + 1] and a[m] > threshold * med and a[m] > 1e-12:
            # parabolic refinement of the peak position
            den = a[m - 1] - 2 * a[m] + a[m + 1]
            shift = 0.5 * (a[m - 1] - a[m + 1]) / den if den != 0 else 0.0
            peaks.append(spec.omega[m] + shift * spec.bin_width)
    out: list[float] = []
    for p in sorted(peaks):
        if not out or p - out[-1] > spec.bin_width:
            out.append(p)
    pk = np.array(out)
    return PeakResult(pk / 2, pk, bool(len(pk)))


# --- thermodynamics ------------------------------------------------------------

@dataclass(frozen=True)
class Thermo:
    temperature: float
    Z: float
    F: float
    U: float
    S: float
    C_V: float


def _modes(frequencies) -> np.ndarray:
    w = np.asarray(frequencies, dtype=float)
    w = w[w > 1e-12]
    if w.size == 0:
        raise ValueError("no non-zero frequencies")
    return w


def log_partition(frequencies, temperature: float) -> float:
    w = _modes(frequencies)
    b = 1.0 / temperature
    return float(np.sum(-b * w / 2 - np.log1p(-np.exp(-b * w))))


def vibrational_thermo(frequencies, temperature: float) -> Thermo:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    w = _modes(frequencies)
    T = temperature
    x = w / T
    with np.errstate(over="ignore"):
        n = 1.0 / np.expm1(x)
    F = float(np.sum(w / 2) + T * np.sum(np.log1p(-np.exp(-x))))
    U = float(np.sum(w * (0.5 + n)))
    with np.errstate(divide="ignore", invalid="ignore"):
        nlogn = np.where(n > 0, n * np.log(n), 0.0)
    S = float(np.sum((n + 1) * np.log1p(n) - nlogn))
    C = float(np.sum(x ** 2 * n * (n + 1)))
    return Thermo(T, math.exp(log_partition(w, T)), F, U, S, C)


# --- coarse-grained regions ------------------------------------------------------

@dataclass(frozen=True)
class RegionPartition:
    regions: tuple[tuple[int, ...], ...]
    spacing: float = 1.0

    def __post_init__(self):
        seen = []
        for r in self.regions:
            if not r:
                raise ValueError("empty region")
            if list(r) != list(range(r[0], r[0] + len(r))):
                raise ValueError("regions must be contiguous")
            seen += list(r)
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("regions must be disjoint and cover 0..N-1")

    @classmethod
    def uniform(cls, n_osc: int, m: int, spacing: float = 1.0) -> "RegionPartition":
        if n_osc % m:
            raise ValueError("N must be divisible by the number of regions")
        L = n_osc // m
        return cls(tuple(tuple(range(i * L, (i + 1) * L)) for i in range(m)), spacing)

    @property
    def n_osc(self) -> int:
        return sum(len(r) for r in self.regions)

    def region_of(self) -> np.ndarray:
        out = np.empty(self.n_osc, dtype=int)
        for I, r in enumerate(self.regions):
            out[list(r)] = I
        return out


def region_energies(psi, T: float, partition: RegionPartition, sys_: SpringMassSystem) -> np.ndarray:
    """Rows ``(E_R, V_R, T_R)`` per region from a model-layout state.

    Springs inside a region count fully; springs across a boundary give half
    of their energy to each side.
    """
    N = sys_.n_osc
    if partition.n_osc != N:
        raise ValueError("partition does not match the system size")
    psi = np.asarray(psi)
    owner = partition.region_of()
    M = len(partition.regions)
    out = np.zeros((M, 3))
    prob = np.abs(psi) ** 2
    for i in range(N):
        out[owner[i], 0] += T * prob[i]
    base = N * N
    for j in sys_.wall_springs:
        out[owner[j], 1] += T * prob[base + j * N + j]
    for (j, k) in sys_.couplings:
        e = T * prob[base + j * N + k]
        if owner[j] == owner[k]:
            out[owner[j], 1] += e
        else:
            out[owner[j], 1] += e / 2
            out[owner[k], 1] += e / 2
    out[:, 2] = out[:, 0] + out[:, 1]
    return out


@dataclass(frozen=True)
class WaveSpeed:
    v: np.ndarray  # (n_times, n_regions), NaN where undefined
    defined: np.ndarray

    @property
    def all_undefined(self) -> bool:
        return not self.defined.any()


def wave_speed(TR, a: float, dt: float, n_modes, floor: float) -> WaveSpeed:
    """``v = a N_R / dt * sqrt(d_t^2 T_R / d_x^2 T_R)`` at interior times and regions.

    ``TR`` has shape ``(n_times, n_regions)``.  Entries whose spatial second
    difference is below ``floor`` in magnitude, or whose ratio is negative,
    are undefined.
    """
    TR = np.asarray(TR, dtype=float)
    K, M = TR.shape
    if M < 3 or K < 3:
        raise ValueError("need at least 3 regions and 3 time samples")
    n_modes = np.broadcast_to(np.asarray(n_modes, dtype=float), (M,))
    v = np.full((K, M), np.nan)
    ok = np.zeros((K, M), dtype=bool)
    for t in range(1, K - 1):
        for I in range(1, M - 1):
            dtt = TR[t + 1, I] - 2 * TR[t, I] + TR[t - 1, I]
            dxx = TR[t, I + 1] - 2 * TR[t, I] + TR[t, I - 1]
            if abs(dxx) < floor:
                continue
            ratio = dtt / dxx
            if ratio < 0:
                continue
            v[t, I] = a * n_modes[I] / dt * math.sqrt(ratio)
            ok[t, I] = True
    return WaveSpeed(v, ok)
