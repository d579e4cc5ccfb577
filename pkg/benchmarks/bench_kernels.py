"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]
"""
import argparse
import timeit
from math import comb

import numpy as np

from s6twistor import _kernels_py, octonion
from s6twistor.exterior import _wedge_table

try:
    from s6twistor import _ckernels
except ImportError:
    _ckernels = None


def cases(rows, rng):
    x, y = rng.normal(size=(2, rows, 8))
    yield "octonion product", "signed_table_mul", (x, y, octonion.TABLE_INDEX, octonion.TABLE_SIGN)
    for k, l in [(1, 2), (2, 2), (2, 3)]:
        a = rng.normal(size=(rows, comb(7, k)))
        b = rng.normal(size=(rows, comb(7, l)))
        yield f"wedge {k}^{l} on R^7", "sparse_bilinear", (a, b, *_wedge_table(7, k, l), comb(7, k + l))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=100_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    backends = {"numpy": _kernels_py}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the numpy fallback only")
    print(f"{'kernel':22s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for label, fname, fargs in cases(args.rows, rng):
        times = {}
        outs = {}
        for name, mod in backends.items():
            fn = getattr(mod, fname)
            outs[name] = fn(*fargs)
            times[name] = min(timeit.repeat(lambda: fn(*fargs), number=1, repeat=args.repeat))
        if len(outs) == 2:
            assert np.allclose(outs["numpy"], outs["cython"], atol=1e-10), label
        speed = f"{times['numpy'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{label:22s} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times.values()) + "  " + speed)


if __name__ == "__main__":
    main()
