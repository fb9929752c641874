#!/usr/bin/env python3
"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Workloads: brute-force Rel(K_n) (2^C(n,2) edge subsets, union-find per
subset) and Monte Carlo connectivity on the Petersen graph.
"""

import argparse
import time

from relroots import kernels
from relroots.graphs import complete_graph, petersen
from relroots.relcore import monte_carlo_rel, rel_bruteforce


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--kn", type=int, default=6, help="n for the brute-force K_n workload")
    ap.add_argument("--trials", type=int, default=200_000)
    args = ap.parse_args()

    backends = ["python"] + (["compiled"] if kernels.compiled_available() else [])
    if len(backends) == 1:
        print("compiled kernels not built; timing the fallback only")

    workloads = {
        f"brute Rel(K_{args.kn})": lambda b: rel_bruteforce(complete_graph(args.kn), backend=b),
        f"MC Petersen x{args.trials}": lambda b: monte_carlo_rel(petersen(), 0.3, args.trials, 1, backend=b),
    }
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workloads.items():
        row = {}
        outs = {}
        for b in backends:
            row[b], outs[b] = best_of(args.repeat, lambda: fn(b))
        # both backends must produce the same answer
        assert len({repr(o) for o in outs.values()}) == 1, f"backends disagree on {name}"
        speed = row["python"] / row["compiled"] if "compiled" in row else float("nan")
        print(f"{name:<28}" + "".join(f"{row[b]:>11.3f}s" for b in backends) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
