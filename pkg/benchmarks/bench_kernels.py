"""Throughput of the compiled and numpy error-counting kernels.

    python3 benchmarks/bench_kernels.py --trials 2000000 --repeat 3

Both backends are run on identical blocks; the script also checks that they
return the same error counts.
"""
import argparse
import math
import time

from qdsim import kernels
from qdsim.channel import Branch
from qdsim.montecarlo import SimConfig, _PointKernel

CASES = {
    "bpsk-ideal": dict(orders=(2, 2)),
    "bpsk-deviated": dict(orders=(2, 2), theta_x=math.radians(30), theta_y=math.radians(8)),
    "8psk": dict(orders=(8, 8)),
}


def time_backend(kernel, backend, trials, repeat):
    best, errors = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        errors = kernel((0, trials), backend)
        best = min(best, time.perf_counter() - t0)
    return best, errors


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--snr-db", type=float, default=4.0)
    args = p.parse_args(argv)

    available = kernels.backends()
    print(f"default backend: {kernels.BACKEND}; available: {', '.join(available)}")
    print(f"{'case':15s} {'branch':13s} " + " ".join(f"{n + ' Mtrial/s':>17s}" for n in available)
          + ("  speedup" if len(available) > 1 else ""))
    for name, extra in CASES.items():
        cfg = SimConfig(seed=1, snr_grid_db=(args.snr_db,), **extra)
        for branch in Branch:
            kernel = _PointKernel(cfg, 0, branch)
            rates, counts = {}, set()
            for bname, mod in available.items():
                dt, errs = time_backend(kernel, mod, args.trials, args.repeat)
                rates[bname] = args.trials / dt / 1e6
                counts.add(errs)
            if len(counts) != 1:
                raise SystemExit(f"backends disagree on {name}/{branch.value}: {counts}")
            line = f"{name:15s} {branch.value:13s} " + " ".join(f"{r:17.2f}" for r in rates.values())
            if "cython" in rates:
                line += f"  {rates['cython'] / rates['python']:7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
