"""Compare the compiled and pure-Python kernel backends.

Run ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on the
same inputs under both backends, outputs are checked for agreement, and a
table of best-of-N wall times and speedups is printed.
"""
import argparse
import timeit

import numpy as np

from lipmod import _pykernels

try:
    from lipmod import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _pairwise_case(rng, size, dim, q_code, split_last):
    A = rng.standard_normal((size, dim))
    B = rng.standard_normal((size, dim))
    label = f"pairwise {size}x{size} dim={dim} q={q_code or 'inf'}{' split' if split_last else ''}"
    return label, lambda impl: impl.pairwise_distances(A, B, q_code, split_last)


def _hildreth_case(rng, rows, dim, sweeps):
    A = rng.standard_normal((rows, dim))
    b = A @ rng.standard_normal(dim) + rng.uniform(0, 1, rows)
    x = 5 * rng.standard_normal(dim)
    row_sq = (A * A).sum(axis=1)

    def call(impl):
        y, lam = x.copy(), np.zeros(rows)
        impl.hildreth_sweeps(A, b, y, lam, row_sq, sweeps)
        return y

    return f"hildreth {rows} rows dim={dim} sweeps={sweeps}", call


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is kept)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
        return 1
    rng = np.random.default_rng(args.seed)
    cases = [
        _pairwise_case(rng, 200, 3, 2, True),
        _pairwise_case(rng, 200, 3, 0, True),
        _pairwise_case(rng, 500, 5, 1, False),
        _hildreth_case(rng, 20, 4, 25),
        _hildreth_case(rng, 200, 10, 25),
    ]
    print(f"{'kernel':48s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for label, call in cases:
        np.testing.assert_allclose(call(_ckernels), call(_pykernels), rtol=1e-12, atol=1e-12)
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=args.repeat))
        print(f"{label:48s} {1e3 * t_py:12.3f} {1e3 * t_c:12.3f} {t_py / t_c:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
