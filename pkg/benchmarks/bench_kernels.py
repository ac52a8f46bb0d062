"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the path-pair utility sums and full LP solves (simplex inner loop) on
identical inputs, checks that both backends agree, and prints a table.
"""
import argparse
import time

import numpy as np

from lgsg import _kernels_py, kernels, lp
from lgsg.game import payoff_block
from lgsg.graph import enumerate_paths
from lgsg.scenarios import UnrollSpec, grid_world, unroll_pe

try:
    from lgsg import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def with_backend(impl, fn):
    saved = kernels.pair_sums, kernels.simplex_iterate
    kernels.pair_sums, kernels.simplex_iterate = impl.pair_sums, impl.simplex_iterate
    try:
        return fn()
    finally:
        kernels.pair_sums, kernels.simplex_iterate = saved


def random_lp(rng, n, m):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, size=n)
    b = A @ x0 + rng.uniform(0.1, 1.0, size=m)
    return lp.LpProblem(rng.normal(size=n), A, [lp.LE] * m, b, hi=np.full(n, 2.0), sense="max")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(args.seed)

    game = unroll_pe(grid_world(4, 0.1, 0.1, args.seed), UnrollSpec(horizon=5))
    P_d = enumerate_paths(game.defender, 10**5)
    P_a = enumerate_paths(game.attacker, 10**5)
    lps = [random_lp(rng, 60, 40) for _ in range(5)]

    cases = [
        (f"payoff block {len(P_d)}x{len(P_a)}", lambda: [payoff_block(game, P_d, P_a)]),
        ("5 LPs, 60 vars x 40 rows", lambda: [lp.solve_lp(p).x for p in lps]),
    ]
    print(f"{'case':34s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  agree")
    for name, fn in cases:
        t_c, out_c = best_of(lambda: with_backend(_compiled, fn), args.repeat)
        t_p, out_p = best_of(lambda: with_backend(_kernels_py, fn), args.repeat)
        agree = all(np.array_equal(a, b) for a, b in zip(out_c, out_p))
        print(f"{name:34s} {t_c:10.4f} {t_p:10.4f} {t_p / t_c:8.1f}  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
