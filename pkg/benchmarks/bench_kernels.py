"""Compare the compiled elimination kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 20 40 80] [--repeat 3]

Workloads: random sparse integer matrices, and the integer differentials of
a resolution of ``R/I^s`` (the matrices the Tor code actually diagonalizes).
"""

import argparse
import random
import timeit

from extkoszul._core import fallback

try:
    from extkoszul._core import _kernels as compiled
except ImportError:
    compiled = None

PRIME = 1000003


def random_matrix(size, density=0.1, seed=0):
    rng = random.Random(seed)
    return [[rng.choice((-2, -1, 1, 2)) if rng.random() < density else 0 for _ in range(size)] for _ in range(size)]


def resolution_matrices(n, s):
    from extkoszul.complexes import condense
    from extkoszul.koszul import ExtendedKoszul, FORMAL

    C = condense(ExtendedKoszul(n, FORMAL, bound=s).window(0, s + 1))
    return [(C.diff(k).to_dense(), C.diff(k).ncols) for k in C.degrees() if C.diff(k).nrows and C.diff(k).ncols]


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(label, rows, ncols, repeat):
    line = [label]
    for name in ("diagonalize_int", "rank_mod_p", "rref_mod_p"):
        args = (ncols,) if name == "diagonalize_int" else (ncols, PRIME)
        py = best_of(lambda: getattr(fallback, name)([r[:] for r in rows], *args), repeat)
        if compiled is None:
            line.append(f"{name} py {py * 1e3:8.2f} ms")
            continue
        try:
            cy = best_of(lambda: getattr(compiled, name)([r[:] for r in rows], *args), repeat)
        except OverflowError:
            # the dispatcher reruns such inputs in the fallback
            line.append(f"{name} py {py * 1e3:8.2f} ms  cy overflow, dispatched to fallback")
            continue
        line.append(f"{name} py {py * 1e3:8.2f} ms  cy {cy * 1e3:7.2f} ms  x{py / cy:5.1f}")
    print("  ".join(line))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[20, 40, 80])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if compiled is None:
        print("compiled kernels not built; timing the fallback only")
    for size in args.sizes:
        bench(f"random {size}x{size}", random_matrix(size), size, args.repeat)
    for n, s in ((3, 3), (4, 2)):
        mats = resolution_matrices(n, s)
        big = max(mats, key=lambda m: len(m[0]) * m[1])
        bench(f"resolution n={n} s={s} {len(big[0])}x{big[1]}", big[0], big[1], args.repeat)


if __name__ == "__main__":
    main()
