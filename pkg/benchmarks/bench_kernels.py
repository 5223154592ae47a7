"""Time the compiled kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numpy path is what runs under ``LGFKIT_DISABLE_NUMBA=1``.  Each row
also reports whether both paths returned identical bits.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from lgfkit import _kernels as K


def best_of(fn, repeat):
    fn()  # warm-up (triggers compilation)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    pad = rng.standard_normal((72, 72, 72))
    offs = np.array([[0, 0, 0]] + [[s * (a == 0), s * (a == 1), s * (a == 2)]
                                   for a in range(3) for s in (-4, -3, -2, -1, 1, 2, 3, 4)])
    w = rng.standard_normal(len(offs))
    yield ("stencil_apply 64^3, 25 points",
           lambda: K.stencil_apply(pad, offs, w, (4, 4, 4), (64, 64, 64)),
           lambda: K.stencil_apply_numpy(pad, offs, w, (4, 4, 4), (64, 64, 64)))
    f = rng.standard_normal((10, 10, 10))
    ker = rng.standard_normal((19, 19, 19))
    yield ("direct_convolve3 10^3",
           lambda: K.direct_convolve3(f, ker),
           lambda: K.direct_convolve3_numpy(f, ker))
    vals = rng.standard_normal((65 * 66 * 67) // 6)
    yield ("expand_symmetric extent 64",
           lambda: K.expand_symmetric(vals, 64, 3),
           lambda: K.expand_symmetric_numpy(vals, 64, 3))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"numba active: {K.USING_NUMBA}")
    print(f"{'kernel':34s} {'compiled [s]':>13s} {'numpy [s]':>11s} {'speed-up':>9s}  bits")
    for name, fast, slow in cases(np.random.default_rng(0)):
        same = np.array_equal(fast(), slow())
        tf, ts = best_of(fast, args.repeat), best_of(slow, args.repeat)
        print(f"{name:34s} {tf:13.4f} {ts:11.4f} {ts / tf:9.1f}  {'same' if same else 'DIFFER'}")


if __name__ == "__main__":
    main()
