"""Compare the compiled and pure-Python shortest-path kernels.

    python benchmarks/bench_kernels.py [--sizes 25 50 100] [--repeat 5]

For each node count, times single min-cost-flow solves and full DSSP runs on
generated instances with both backends, and checks that the flows agree.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from psidssp.dssp import run_dssp
from psidssp.flow import available, solve_min_cost_flow
from psidssp.generator import GeneratorParams, generate_instance


def _best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100])
    parser.add_argument("--instances", type=int, default=3, help="instances per size")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = available()
    if "cython" not in backends:
        print("compiled kernel not built; only the Python fallback is available")
    print(f"{'n':>4} {'arcs':>6} {'what':>6} " + " ".join(f"{b + ' ms':>12}" for b in backends) + f" {'speedup':>8}")
    for n in args.sizes:
        for k in range(args.instances):
            inst = generate_instance(GeneratorParams(node_count=n, seed=args.seed * 1000 + n * 10 + k))
            cost = inst.variable_cost + inst.fixed_cost / inst.total_supply
            solve_t, dssp_t, flows = {}, {}, {}
            for b in backends:
                solve_t[b], _, sol = _best_of(lambda b=b: solve_min_cost_flow(inst, cost, backend=b), args.repeat)
                flows[b] = sol.flow
                dssp_t[b], _, _ = _best_of(lambda b=b: run_dssp(inst, 1.0, backend=b), max(1, args.repeat // 2))
            if len(backends) == 2:
                assert np.array_equal(flows["cython"], flows["python"]), "backends disagree"
            for label, t in (("solve", solve_t), ("dssp", dssp_t)):
                cells = " ".join(f"{1000 * t[b]:12.2f}" for b in backends)
                speed = f"{t['python'] / t['cython']:8.1f}x" if len(backends) == 2 else ""
                print(f"{n:4d} {inst.arc_count:6d} {label:>6} {cells} {speed}")


if __name__ == "__main__":
    main()
