"""Resource sweeps: preparation ratio and end-to-end widths and gate counts.

    python3 demos/scaling.py
"""

from __future__ import annotations

from oscsim.bench import bench_rows


def main():
    for row in bench_rows("ratio", [2, 4, 8, 16, 32, 64, 128, 256]):
        print(f"N={row.n_osc:>3}  sparse-prep gates={row.gates:>6}  ratio={row.extra['ratio']:.3f}")
    for row in bench_rows("endtoend", [2, 4, 8]):
        print(f"N={row.n_osc:>3}  {row.route}  width={row.width}  gates={row.gates}"
              f"  degree={row.extra['degree']}")


if __name__ == "__main__":
    main()
