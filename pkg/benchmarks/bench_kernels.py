"""Compare the compiled and pure-Python truncated-Taylor product kernels.

    python3 benchmarks/bench_kernels.py [--repeat 200] [--batch 64]

Each row times one product in the monomial space of a jet with 2n
variables (z and zbar) truncated at the given order, plus a batched
product of ``--batch`` rows.  The two kernels are checked to agree first.
"""

import argparse
import timeit

import numpy as np

from hermcurv import _kernels
from hermcurv.jets import taylor_space


def _time(fn, repeat):
    # best of 5 runs, per call
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.compiled_mul is None:
        print("compiled kernel not built; reinstall with Cython available to compare")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'n':>2} {'order':>5} {'terms':>7} {'python us':>10} {'compiled us':>12} {'speedup':>8}"
          f" {'batch py us':>12} {'batch c us':>11} {'speedup':>8}")
    for n in (2, 3, 4):
        for order in (2, 3):
            sp = taylor_space(2 * n, order)
            a = rng.standard_normal(sp.size) + 1j * rng.standard_normal(sp.size)
            b = rng.standard_normal(sp.size) + 1j * rng.standard_normal(sp.size)
            A = rng.standard_normal((args.batch, sp.size)) + 1j * rng.standard_normal((args.batch, sp.size))
            B = rng.standard_normal((args.batch, sp.size)) + 1j * rng.standard_normal((args.batch, sp.size))
            ref = _kernels.python_mul(a, b, sp.I, sp.J, sp.K, sp.size)
            got = _kernels.compiled_mul(a, b, sp.I, sp.J, sp.K, sp.size)
            assert np.allclose(ref, got, rtol=1e-13, atol=1e-13)
            ref_many = _kernels.python_mul_many(A, B, sp.I, sp.J, sp.K, sp.size)
            got_many = _kernels.compiled_mul_many(A, B, sp.I, sp.J, sp.K, sp.size)
            assert np.allclose(ref_many, got_many, rtol=1e-13, atol=1e-13)

            tp = _time(lambda: _kernels.python_mul(a, b, sp.I, sp.J, sp.K, sp.size), args.repeat)
            tc = _time(lambda: _kernels.compiled_mul(a, b, sp.I, sp.J, sp.K, sp.size), args.repeat)
            reps = max(1, args.repeat // 10)
            bp = _time(lambda: _kernels.python_mul_many(A, B, sp.I, sp.J, sp.K, sp.size), reps)
            bc = _time(lambda: _kernels.compiled_mul_many(A, B, sp.I, sp.J, sp.K, sp.size), reps)
            print(f"{n:>2} {order:>5} {sp.I.size:>7} {tp * 1e6:>10.2f} {tc * 1e6:>12.2f} {tp / tc:>8.1f}"
                  f" {bp * 1e6:>12.1f} {bc * 1e6:>11.1f} {bp / bc:>8.1f}")

    # end-to-end: one order-2 metric jet of a DSL-defined metric
    from hermcurv import models
    from hermcurv.jets import evaluate_jet

    field = models.model("random_poly", n=3, seed=1)
    p = models.sample_points(models.ModelSpec("random_poly", n=3, seed=1), 1, 0)[0]
    t = _time(lambda: evaluate_jet(field, p, 2), 5)
    print(f"order-2 jet of random_poly(n=3) with the {_kernels.BACKEND} kernel: {t * 1e3:.1f} ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
