"""Benchmark the compiled stepping kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--paths 10000] [--steps 1000] [--repeat 5]

The Monte-Carlo objective loop dominates end-to-end runtime, so this is the
hot path the compiled extension exists for.  Results are wall-clock medians.
"""

import argparse
import statistics
import time

import numpy as np

import ethena_ctl._kernels_py as numpy_kernels

try:
    import ethena_ctl._kernels as compiled_kernels
except ImportError:
    compiled_kernels = None


def time_fn(fn, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=10_000)
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    dw = np.ascontiguousarray(rng.normal(0.0, np.sqrt(1e-3), (args.paths, args.steps)))
    gn = np.full(args.steps, -2.22)
    gd = np.full(args.steps, 5.82)
    g0 = np.full(args.steps, 0.199)
    weights = np.full(args.steps, 1e-3)
    sim_args = (0.04, 0.0, 0.0, 1e-3, 2.0, 0.04, 0.3, 0.1, 4.0, 0.04, 0.1)
    obj_args = (0.04, 0.0, 1e-3, 2.0, 0.04, 0.3, 0.1, 4.0, 0.04, 0.5, 0.1)

    backends = [("numpy", numpy_kernels)]
    if compiled_kernels is not None:
        backends.insert(0, ("compiled", compiled_kernels))
    else:
        print("compiled extension not built; benchmarking numpy kernels only")

    print(f"{args.paths} paths x {args.steps} steps, median of {args.repeat} runs")
    print(f"{'kernel':<18}{'backend':<12}{'seconds':>10}")
    results = {}
    for label, mod in backends:
        t_sim = time_fn(lambda m=mod: m.simulate_batch(*sim_args, gn, gd, g0, dw), args.repeat)
        t_obj = time_fn(
            lambda m=mod: m.objective_batch(*obj_args, gn, gd, g0, weights, -2.0, dw),
            args.repeat,
        )
        results[label] = (t_sim, t_obj)
        print(f"{'simulate_batch':<18}{label:<12}{t_sim:>10.4f}")
        print(f"{'objective_batch':<18}{label:<12}{t_obj:>10.4f}")
    if len(results) == 2:
        for i, name in enumerate(("simulate_batch", "objective_batch")):
            speedup = results["numpy"][i] / results["compiled"][i]
            print(f"{name}: compiled is {speedup:.1f}x the numpy fallback")


if __name__ == "__main__":
    main()
