"""Compare the compiled and pure-Python situation kernels.

Times a full NE scan (every situation checked) on seeded random games of
growing size, once per available backend::

    python3 benchmarks/bench_kernel.py [--repeat 3] [--sizes 12 14 16]
"""

from __future__ import annotations

import argparse
import time

from dggames import harness
from dggames.kernel import available_backends


def bench(game, cls, repeat):
    kernel = game.kernel(cls)
    count = game.situation_count()
    best = float("inf")
    found = None
    for _ in range(repeat):
        start = time.perf_counter()
        found = kernel.scan(0, count, False)
        best = min(best, time.perf_counter() - start)
    return best, len(found)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--sizes", type=int, nargs="+", default=[12, 14, 16])
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    backends = available_backends()
    names = sorted(backends)
    print(f"backends: {', '.join(names)}")
    header = f"{'positions':>9} {'situations':>11} " + " ".join(f"{n + ' s':>10}" for n in names)
    if "cython" in backends:
        header += f" {'speedup':>8}"
    print(header)
    for n in args.sizes:
        params = harness.GenParams(positions=n, terminals=3, players=3, max_out_degree=3, seed=args.seed)
        game = harness.random_game(params)
        times = {}
        counts = set()
        for name in names:
            times[name], ne = bench(game, backends[name], args.repeat)
            counts.add(ne)
        assert len(counts) == 1, "backends disagree on the equilibrium count"
        row = f"{n:>9} {game.situation_count():>11} " + " ".join(f"{times[k]:>10.4f}" for k in names)
        if "cython" in backends:
            row += f" {times['python'] / times['cython']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
