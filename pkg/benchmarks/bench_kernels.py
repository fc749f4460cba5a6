#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot kernels at the reference-scenario size (240 UEs x 9
BSs) and a full end-to-end solve under each backend (backend selection
happens at import, so the end-to-end runs use subprocesses with
HETNET_EE_BACKEND set).

Usage:  python3 benchmarks/bench_kernels.py [--repeats 2000]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hetnet_ee.kernels import available_backends

N_UE, N_BS = 240, 9

_SOLVE_SNIPPET = """
import time
from hetnet_ee import channel, dinkelbach, kernels
inst = channel.generate_topology(channel.TopologyParams())
t0 = time.perf_counter()
sol = dinkelbach.solve(inst)
t1 = time.perf_counter()
print(f"{kernels.backend()} {t1 - t0:.4f} {sol.q_star:.12f}")
"""


def kernel_inputs(seed=0):
    rng = np.random.default_rng(seed)
    gains = np.ascontiguousarray(10.0 ** rng.uniform(-14.0, -8.0, (N_UE, N_BS)))
    p = np.ascontiguousarray(10.0 ** rng.uniform(-4.0, 1.5, N_BS))
    rho = np.log(p)
    aw = np.ascontiguousarray(rng.uniform(0.0, 2.0, (N_UE, N_BS)))
    aw[rng.random((N_UE, N_BS)) < 0.88] = 0.0  # roughly one assigned BS per UE
    pow_cost = np.ascontiguousarray(rng.uniform(0.0, 1.0, N_BS))
    return gains, p, rho, aw, pow_cost, 1e-13


def time_call(fn, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1e6  # us


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    impls = available_backends()
    gains, p, rho, aw, pow_cost, noise = kernel_inputs()

    cases = {
        "sinr_matrix": lambda mod: mod.sinr_matrix(gains, p, noise),
        "rate_matrix": lambda mod: mod.rate_matrix(gains, p, noise, 10.0),
        "surrogate_value": lambda mod: mod.surrogate_value(
            rho, gains, noise, aw, 1.0, pow_cost
        ),
        "surrogate_value_grad": lambda mod: mod.surrogate_value_grad(
            rho, gains, noise, aw, 1.0, pow_cost
        ),
    }

    print(f"kernel timings ({N_UE}x{N_BS}, {args.repeats} repeats, microseconds/call)")
    header = f"{'kernel':<22}" + "".join(f"{name:>12}" for name in impls)
    print(header)
    speedups = {}
    for case, fn in cases.items():
        row = f"{case:<22}"
        times = {}
        for name, mod in impls.items():
            times[name] = time_call(lambda m=mod: fn(m), args.repeats)
            row += f"{times[name]:>12.1f}"
        if "cython" in times and "python" in times:
            speedups[case] = times["python"] / times["cython"]
        print(row)
    if speedups:
        best = max(speedups.values())
        worst = min(speedups.values())
        print(f"compiled speedup: {worst:.1f}x - {best:.1f}x")

    print("\nend-to-end reference-scenario solve (one run per backend)")
    for name in impls:
        env = dict(os.environ, HETNET_EE_BACKEND=name)
        out = subprocess.run(
            [sys.executable, "-c", _SOLVE_SNIPPET],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        backend, seconds, q_star = out.stdout.split()
        print(f"{backend:<8} {float(seconds):.3f} s   q* = {q_star}")


if __name__ == "__main__":
    main()
