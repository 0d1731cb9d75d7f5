"""Compare the numba and numpy path kernels on identical work.

Usage::

    python3 benchmarks/bench_kernels.py [--paths 200000] [--repeat 3]

Both backends draw the same per-path uniforms, so survivor counts should
match; the script reports them alongside wall times.
"""
import argparse
import time
import warnings

from qsworkload.errors import InsufficientDataWarning
from qsworkload.levy_models import LevyModel
from qsworkload.simulator import SimulationConfig, simulate


def bench(model, t, paths, backend, repeat):
    cfg = SimulationConfig(model, t, paths, seed=2024, backend=backend)
    simulate(SimulationConfig(model, t, 1000, seed=1, backend=backend))  # warm-up / JIT
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = simulate(cfg)
        best = min(best, time.perf_counter() - t0)
    return best, res.n_survivors


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    warnings.simplefilter("ignore", InsufficientDataWarning)
    cases = [
        ("M/M/1 rho=1/2, t=10", LevyModel.mm1(1.0, 2.0), 10.0),
        ("Brownian sigma=1, t=8", LevyModel.brownian(), 8.0),
    ]
    print(f"{'case':<24} {'backend':<7} {'seconds':>9} {'paths/s':>12} {'survivors':>10}")
    for name, model, t in cases:
        times = {}
        for backend in ("numba", "numpy"):
            sec, surv = bench(model, t, args.paths, backend, args.repeat)
            times[backend] = sec
            print(f"{name:<24} {backend:<7} {sec:>9.3f} {args.paths / sec:>12.3g} {surv:>10d}")
        print(f"{'':<24} speed-up {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
