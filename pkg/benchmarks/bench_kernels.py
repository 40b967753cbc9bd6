"""Compare the numba and numpy paths of the configuration kernel.

    python3 benchmarks/bench_kernels.py [--configs 2000]

Both paths run in the same process (``use_numba`` is passed explicitly), and
their outputs are compared row by row before timings are printed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from permlike import kernels
from permlike._accel import USE_NUMBA
from permlike.structure import default_modulus
from permlike.sweep import _layout

CASES = [(3, 2, 4), (3, 2, 8), (5, 1, 2), (3, 3, 2), (3, 3, 10)]


def bench(p: int, n: int, r: int, configs: int, seed: int) -> tuple[float, float, bool]:
    M = default_modulus(p, n, r)
    lay = _layout(p, n, r, M)
    rng = np.random.default_rng(seed)
    tuples = rng.integers(0, M, size=(configs, len(lay.reps)), dtype=np.int64)
    cap = 10_000 // lay.d
    args = (lay.d, M, r, lay.ordr, lay.lasts, lay.orbit_of, lay.orbit_len_of)

    kernels.sweep_tuples(*args, tuples[:2], cap, use_numba=True)  # compile outside the clock
    t0 = time.perf_counter()
    fast = kernels.sweep_tuples(*args, tuples, cap, use_numba=True)
    t_fast = time.perf_counter() - t0
    t0 = time.perf_counter()
    slow = kernels.sweep_tuples(*args, tuples, cap, use_numba=False)
    t_slow = time.perf_counter() - t0
    return t_fast, t_slow, bool(np.array_equal(fast, slow))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not USE_NUMBA:
        raise SystemExit("numba is disabled (PERMLIKE_DISABLE_NUMBA); nothing to compare")
    print(f"{'case':>12} {'numba us/cfg':>13} {'numpy us/cfg':>13} {'speedup':>8} agree")
    for p, n, r in CASES:
        tf, ts, same = bench(p, n, r, args.configs, args.seed)
        per = 1e6 / args.configs
        print(f"{f'({p},{n},{r})':>12} {tf * per:13.1f} {ts * per:13.1f} {ts / tf:8.1f} {same}")


if __name__ == "__main__":
    main()
