"""Timing comparison of the two pair-scan kernels.

Builds the evidence set for synthetic tables of growing size with the
compiled (numba) kernel and the pure-numpy fallback, checks that both
produce byte-identical results, and prints a table of wall times.

Run from the repository root:

    python3 benchmarks/bench_evidence.py --rows 1000 3000 10000 --threads 4
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from adcmine import build_evidence, from_cells, generate_predicate_space


def synth(n: int, seed: int = 99):
    rng = np.random.default_rng(seed)
    pool = [f"v{i:02d}" for i in range(12)]
    cols = {
        "cat_a": [pool[int(x)] for x in rng.integers(0, 12, n)],
        "cat_b": [pool[int(x)] for x in rng.integers(0, 12, n)],
        "num_c": [str(int(x)) for x in rng.integers(0, 30, n)],
        "num_d": [str(int(x) + 100) for x in rng.integers(0, 30, n)],
        "num_e": [str(int(x) + 200) for x in rng.integers(0, 30, n)],
        "num_f": [str(int(x) + 300) for x in rng.integers(0, 30, n)],
    }
    names = list(cols)
    return from_cells(names, [[cols[c][i] for c in names] for i in range(n)])


def bench(d, space, backend: str, threads: int, repeat: int):
    best = None
    e = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        e, _ = build_evidence(d, space, threads=threads,
                              with_vios=False, backend=backend)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, e


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, nargs="+", default=[1000, 3000, 10000])
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=2)
    args = ap.parse_args()

    try:
        import numba  # noqa: F401
        backends = ["numba", "numpy"]
    except ImportError:
        print("numba not installed; timing the numpy kernel only")
        backends = ["numpy"]

    if "numba" in backends:
        # compile outside the timed region
        tiny = synth(64)
        build_evidence(tiny, generate_predicate_space(tiny),
                       backend="numba", with_vios=False)

    print(f"{'rows':>8} {'pairs':>13} {'preds':>6} "
          + "".join(f"{b + ' (s)':>12}" for b in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for n in args.rows:
        d = synth(n)
        space = generate_predicate_space(d)
        times = {}
        results = {}
        for b in backends:
            times[b], results[b] = bench(d, space, b, args.threads, args.repeat)
        if len(backends) == 2:
            a, b = results["numba"], results["numpy"]
            if not (np.array_equal(a.sets, b.sets)
                    and np.array_equal(a.mult, b.mult)):
                print(f"rows={n}: kernels disagree!")
                return 1
        line = (f"{n:>8} {n * (n - 1):>13} {len(space):>6} "
                + "".join(f"{times[b]:>12.3f}" for b in backends))
        if len(backends) == 2:
            line += f"  {times['numpy'] / times['numba']:>6.2f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
