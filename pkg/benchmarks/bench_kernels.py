"""Time the compiled and pure-Python kernels on the workloads the CLI runs.

    python benchmarks/bench_kernels.py [--repeat N] [--json PATH]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from sawcavity import kernels
from sawcavity.config import reference_device
from sawcavity.core import qubit_frequency
from sawcavity.reflection import flux_to_current
from sawcavity.spectral import build_interaction, mode_couplings


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads(rows=200, cols=2000):
    dev = reference_device()
    modes = dev.modes
    g = mode_couplings(modes, dev.coupling)
    h = build_interaction(modes, dev.coupling, 4.2568e9).matrix()
    h -= np.mean(np.diag(h)) * np.eye(len(h))
    grid = np.linspace(4.2165e9, 4.2895e9, cols)
    wq = np.atleast_1d(qubit_frequency(flux_to_current(np.linspace(0.245, 0.262, rows), dev.transmon), dev.transmon))
    spectrum_grid = np.linspace(4.2165e9, 4.2895e9, 20001)
    return {
        "jacobi_eigh 18x18": lambda k: k.jacobi_eigh(h, 1e-13, 100),
        "lorentzian_s11 20001x17": lambda k: k.lorentzian_s11(spectrum_grid, modes.frequencies, modes.kappa_internal,
                                                              modes.kappa_external),
        f"flux_map_abs {rows}x{cols}": lambda k: k.flux_map_abs(grid, modes.frequencies, modes.kappa_internal,
                                                                modes.external_amplitudes, g, modes.kappa0,
                                                                dev.transmon.gamma_intrinsic, wq, 1e-13),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--rows", type=int, default=200)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    backends = {mod.NAME: mod for mod in kernels.available_backends()}
    results = {}
    print(f"{'workload':28s}" + "".join(f"{name:>14s}" for name in backends) + "   speedup")
    for label, work in workloads(args.rows).items():
        row = {name: _best(lambda: work(mod), args.repeat) for name, mod in backends.items()}
        results[label] = row
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{label:28s}" + "".join(f"{row[n]:13.5f}s" for n in backends) + f"   {speed:7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
