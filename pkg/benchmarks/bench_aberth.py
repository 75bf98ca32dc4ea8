"""Compare the compiled and pure-Python Aberth kernels.

Times the double-precision sweep alone (the part the kernels implement) and
the full ``find_roots`` call, on ladder polynomials of growing degree.

    python benchmarks/bench_aberth.py --sizes 20 40 80 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from zerolimits import _aberth_py, rootfind
from zerolimits.fixtures import load_fixture
from zerolimits.recurrence import nth_poly
from zerolimits.rootfind import RootFindOptions, find_roots


def best_of(repeat: int, fn) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def kernel_times(p, repeat: int) -> dict[str, float]:
    coeffs = rootfind._normalized_doubles(p)
    start = rootfind._starting_points(p)
    opts = RootFindOptions()
    out = {}

    def python_kernel():
        z = list(start)
        _aberth_py.aberth([complex(c) for c in coeffs], z, opts.tol, opts.max_iter, 2.0**-52)

    out["python"] = best_of(repeat, python_kernel)
    if rootfind._compiled_aberth is not None:
        c = np.array(coeffs, dtype=np.complex128)

        def compiled_kernel():
            z = np.array(start, dtype=np.complex128)
            rootfind._compiled_aberth(c, z, opts.tol, opts.max_iter, 2.0**-52)

        out["cython"] = best_of(repeat, compiled_kernel)
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    spec = load_fixture("ladder")
    print(f"compiled kernel available: {rootfind._compiled_aberth is not None}")
    print(f"{'n':>5} {'deg':>5} {'py sweep':>10} {'cy sweep':>10} {'speedup':>8} {'py total':>10} {'cy total':>10}")
    for n in args.sizes:
        p = nth_poly(spec, n)
        k = kernel_times(p, args.repeat)
        total_py = best_of(1, lambda: find_roots(p, RootFindOptions(backend="python")))
        cy = k.get("cython")
        total_cy = best_of(1, lambda: find_roots(p, RootFindOptions(backend="cython"))) if cy else float("nan")
        speedup = k["python"] / cy if cy else float("nan")
        print(
            f"{n:>5} {p.degree:>5} {k['python']:>10.4f} {cy if cy else float('nan'):>10.4f} "
            f"{speedup:>8.1f} {total_py:>10.4f} {total_cy:>10.4f}"
        )


if __name__ == "__main__":
    main()
