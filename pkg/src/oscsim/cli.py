"""``oscsim evolve|bench|observe|model``.

Exit codes: 0 success, 2 validation error, 3 resource cap exceeded.
CSVs use a header row and 17 significant digits; each command writes a
``manifest.json`` holding every parameter needed to rerun it.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .circuit import ResourceCapError
from .model import PRESETS, build_system, load_system, system_to_config, total_energy

EXIT_OK, EXIT_VALIDATION, EXIT_CAP = 0, 2, 3


# --- output helpers ------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    """Write atomically: a temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    os.replace(tmp, path)
    return path


def write_manifest(out: Path, command: str, args: argparse.Namespace, files, extra=None) -> Path:
    params = {k: v for k, v in vars(args).items() if k != "func"}
    man = {
        "command": command,
        "params": params,
        "files": sorted(str(Path(f).name) for f in files),
        "seed": None,  # every computation is deterministic
        "versions": {"oscsim": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
    }
    if extra:
        man["results"] = extra
    path = out / "manifest.json"
    path.write_text(json.dumps(man, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def system_from_args(args):
    if getattr(args, "system", None):
        return load_system(args.system)
    n = args.n
    if n is None and args.preset != "two-body":
        n = 2
    return build_system(args.preset, n)


# --- commands ----------------------------------------------------------------------

def cmd_model(args) -> int:
    from .classical import normal_modes
    from .model import build_b_matrix, build_hamiltonian
    sys_ = system_from_args(args)
    H = build_hamiltonian(sys_)
    modes = normal_modes(sys_)
    info = {
        "system": system_to_config(sys_),
        "total_energy": total_energy(sys_),
        "sparsity": sys_.sparsity,
        "n_qubits_system": 2 * sys_.n_qubits + 1,
        "b_nnz": int(build_b_matrix(sys_).nnz),
        "h_dim": H.dim,
        "normal_frequencies": modes.frequencies.tolist(),
    }
    text = json.dumps(info, indent=2, default=_json_default)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "system.json").write_text(json.dumps(system_to_config(sys_), indent=2) + "\n")
        write_manifest(out, "model", args, [out / "system.json"], info)
    return EXIT_OK


def cmd_evolve(args) -> int:
    from .pipeline import run_route, time_grid, validate_route
    validate_route(args.route, args.prep)
    sys_ = system_from_args(args)
    times = time_grid(args.t0, args.t1, args.dt)
    r_st = args.r_st
    if args.route == "trotter" and r_st is None and args.eps is None:
        r_st = 20
    if r_st == 0:
        r_st = None  # step count from the error bound
    res = run_route(sys_, args.route, args.prep, times, eps=args.eps, r=args.r_bits, r_st=r_st)
    out = Path(args.out)
    name = {"trotter": "trotter_energy.csv", "qsvt": "qsvt_energy.csv",
            "exact": "exact_energy.csv"}[args.route]
    rows = zip(times, res.series.values, res.classical, res.abs_err, res.success)
    f = write_csv(out / name, ["t", "E_quantum", "E_classical", "abs_error", "success_prob"], rows)
    summary = {"implementation": res.implementation, "total_energy": res.series.total,
               "max_abs_err": float(res.abs_err.max()), "budget": res.budget,
               "within_budget": res.within_budget, **res.params}
    write_manifest(out, "evolve", args, [f], summary)
    print(f"{res.implementation}: max |dE| = {summary['max_abs_err']:.3e} "
          f"(budget {res.budget:.3e}) -> {f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench_rows
    rows = bench_rows(args.kind, args.sizes, preset=args.preset, t=args.t1, eps=args.eps,
                      r=args.r_bits, r_st=args.r_st)
    dicts = [r.as_dict() for r in rows]
    header = []
    for d in dicts:
        header += [k for k in d if k not in header]
    out = Path(args.out)
    name = {"stateprep": "stateprep_scaling.csv", "trotter": "trotter_scaling.csv"}.get(
        args.kind, f"bench_{args.kind}.csv")
    f = write_csv(out / name, header, ([d.get(k) for k in header] for d in dicts))
    write_manifest(out, "bench", args, [f])
    skipped = [d for d in dicts if d["skipped"]]
    for d in dicts:
        tag = f"skipped: {d['skipped']}" if d["skipped"] else \
            f"width={d['width']} depth={d['depth']} gates={d['gates']}"
        print(f"N={d['N']:>4} {d['route']:>7} {tag}")
    return EXIT_CAP if skipped and len(skipped) == len(dicts) else EXIT_OK


def cmd_observe(args) -> int:
    from . import observables as obs
    from .classical import ExactPropagator, normal_modes
    from .model import hamiltonian_circuit_layout
    from .pipeline import time_grid
    from .stateprep import target_state
    out = Path(args.out)
    files = []
    extra: dict = {}
    if args.what == "thermo":
        sys_ = system_from_args(args)
        freqs = normal_modes(sys_).frequencies
        temps = args.temps
        rows = []
        for T in temps:
            th = obs.vibrational_thermo(freqs, T)
            rows.append((T, th.F, th.U, th.S, th.C_V))
        files.append(write_csv(out / "thermo.csv", ["T_temp", "F", "U", "S", "C_V"], rows))
        write_manifest(out, "observe", args, files)
        return EXIT_OK
    sys_ = system_from_args(args)
    T = total_energy(sys_)
    N = sys_.n_osc
    times = time_grid(args.t0, args.t1, args.dt)
    prop = ExactPropagator(hamiltonian_circuit_layout(sys_))
    psi0 = target_state(sys_)
    if args.what == "spectrum":
        if args.route == "exact":
            E = [obs.kinetic_energy(prop.evolve(psi0, t), T, N, "circuit") for t in times]
        else:
            from .pipeline import run_route
            E = run_route(sys_, args.route, args.prep, times, eps=args.eps, r=args.r_bits,
                          r_st=args.r_st).series.values
        spec = obs.frequency_spectrum(times, E, T)
        files.append(write_csv(out / "spectrum.csv", ["omega", "re", "im", "abs"],
                               zip(spec.omega, spec.values.real, spec.values.imag,
                                   np.abs(spec.values))))
        peaks = obs.extract_normal_frequencies(spec)
        true = normal_modes(sys_).frequencies
        true = true[true > 1e-12]
        rows = []
        for w in peaks.frequencies:
            near = float(true[np.argmin(np.abs(true - w))]) if true.size else math.nan
            rows.append((w, near, abs(w - near)))
        files.append(write_csv(out / "modes.csv", ["omega_quantum", "omega_classical", "abs_err"], rows))
        extra = {"peaks_found": peaks.found, "bin_width": spec.bin_width}
        if not peaks.found:
            print("no spectral peaks found")
    elif args.what in ("regions", "wavespeed"):
        part = obs.RegionPartition.uniform(N, args.regions, args.spacing)
        series = np.array([obs.region_energies(_model(prop.evolve(psi0, t), N), T, part, sys_)
                           for t in times])
        rows = [(t, I, *series[i, I]) for i, t in enumerate(times) for I in range(args.regions)]
        files.append(write_csv(out / "regions.csv", ["t", "region", "E", "V", "Ttot"], rows))
        if args.what == "wavespeed":
            n_modes = [len(r) for r in part.regions]
            ws = obs.wave_speed(series[:, :, 2], part.spacing, args.dt, n_modes, 1e-9 * T)
            rows = [(t, I, ws.v[i, I], ws.defined[i, I]) for i, t in enumerate(times)
                    for I in range(args.regions)]
            files.append(write_csv(out / "wavespeed.csv", ["t", "region", "v", "defined_flag"], rows))
            extra = {"all_undefined": ws.all_undefined}
            if ws.all_undefined:
                print("wave speed undefined at every interior point")
    write_manifest(out, "observe", args, files, extra)
    for f in files:
        print(f)
    return EXIT_OK


def _model(psi_circuit, N):
    from .model import to_model_layout
    return to_model_layout(psi_circuit, N)


# --- parser ------------------------------------------------------------------------

def _pos_float(s):
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _sizes(s):
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oscsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"oscsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def system_args(sp):
        sp.add_argument("--preset", choices=PRESETS, default="two-body")
        sp.add_argument("--n", type=int, default=None,
                        help="number of oscillators (default 2)")
        sp.add_argument("--system", help="JSON system file (overrides --preset/--n)")

    def run_args(sp, t1=5.0, dt=0.1):
        sp.add_argument("--route", choices=("trotter", "qsvt", "exact"), default="trotter")
        sp.add_argument("--prep", choices=("sparse", "oracle"), default="sparse")
        sp.add_argument("--t0", type=float, default=0.0)
        sp.add_argument("--t1", type=float, default=t1)
        sp.add_argument("--dt", type=_pos_float, default=dt)
        sp.add_argument("--eps", type=_pos_float, default=None,
                        help="Trotter operator-norm target or QSVT polynomial tolerance")
        sp.add_argument("--r-bits", type=int, default=4, help="fixed-point bits r")
        sp.add_argument("--r-st", type=int, default=None,
                        help="Trotter steps; 0 picks the bound for --eps (default 20)")

    m = sub.add_parser("model", help="build a system and print its matrices' summary")
    system_args(m)
    m.add_argument("--out", default=None)
    m.set_defaults(func=cmd_model)

    e = sub.add_parser("evolve", help="kinetic-energy series along one route")
    system_args(e)
    run_args(e)
    e.add_argument("--out", default="out")
    e.set_defaults(func=cmd_evolve)

    b = sub.add_parser("bench", help="resource sweeps over N")
    b.add_argument("kind", choices=("stateprep", "trotter", "endtoend", "ratio"))
    b.add_argument("--preset", choices=PRESETS, default="impl1-chain")
    b.add_argument("--sizes", type=_sizes, default=[2, 4, 8, 16], help="comma-separated N list")
    b.add_argument("--t1", type=float, default=1.0, help="evolution time for evolution benches")
    b.add_argument("--eps", type=_pos_float, default=None)
    b.add_argument("--r-bits", type=int, default=4)
    b.add_argument("--r-st", type=int, default=None)
    b.add_argument("--out", default="out")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("observe", help="spectrum, thermodynamics, regions, wave speed")
    o.add_argument("what", choices=("spectrum", "thermo", "regions", "wavespeed"))
    system_args(o)
    run_args(o, t1=40.0, dt=0.05)
    o.set_defaults(route="exact")
    o.add_argument("--temps", type=lambda s: [_pos_float(x) for x in s.split(",")],
                   default=[0.5, 1.0, 2.0])
    o.add_argument("--regions", type=int, default=2, help="number of regions M")
    o.add_argument("--spacing", type=_pos_float, default=1.0, help="lattice spacing a")
    o.add_argument("--out", default="out")
    o.set_defaults(func=cmd_observe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ResourceCapError as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, FileNotFoundError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
