"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Kernel-level timings call
each backend module directly; the end-to-end timing runs a series workload
in a subprocess with and without ``GRADEDGEO_PURE=1``.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from gradedgeo import kernels


def _workload(seed: int = 0):
    rng = random.Random(seed)
    k = 6
    degs = [tuple(rng.randint(0, 1) for _ in range(2)) for _ in range(k)]
    degs = [d if any(d) else (1, 0) for d in degs]
    pair_lower = tuple(sum(1 << j for j in range(i) if sum(a * b for a, b in zip(degs[i], degs[j])) % 2)
                       for i in range(k))
    odd = tuple(sum(d) % 2 for d in degs)

    def mono():
        return tuple(rng.randint(0, 1) if o else rng.randint(0, 2) for o in odd)

    ta = [(mono(), Fraction(rng.randint(1, 9), rng.randint(1, 4))) for _ in range(40)]
    tb = [(mono(), Fraction(rng.randint(1, 9), rng.randint(1, 4))) for _ in range(40)]
    pa = {tuple(rng.randint(0, 3) for _ in range(2)): Fraction(rng.randint(1, 9)) for _ in range(20)}
    pb = {tuple(rng.randint(0, 3) for _ in range(2)): Fraction(rng.randint(1, 9)) for _ in range(20)}
    return ta, tb, pair_lower, odd, pa, pb


END_TO_END = """
import random, time
from gradedgeo import kernels
from gradedgeo.algebra import Chart
U = Chart('U', [('x', (0, 0)), ('z', (1, 1)), ('a', (0, 1)), ('b', (1, 0)), ('c', (0, 1)), ('d', (1, 0))], 2, 6)
x, z, a, b, c, d = (U.coordinate(n) for n in ('x', 'z', 'a', 'b', 'c', 'd'))
f = (1 + x + z + a * b + c * d + x * a * d) ** 2
g = (2 - x * z + b * c + a * d * z) ** 2
t0 = time.perf_counter()
for _ in range({reps}):
    h = f * g
print(kernels.BACKEND, (time.perf_counter() - t0) / {reps})
"""


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=50, help="calls per timing (default 50)")
    ap.add_argument("--reps", type=int, default=20, help="series products in the end-to-end run")
    args = ap.parse_args(argv)
    ta, tb, pl, odd, pa, pb = _workload()
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled backend not built; only the pure-Python timings are shown")
    rows = []
    for name, mod in sorted(backends.items()):
        times = {
            "mul_terms": timeit.timeit(lambda: mod.mul_terms(ta, tb, pl, odd, 6), number=args.number),
            "ldiff_terms": timeit.timeit(lambda: mod.ldiff_terms(ta, 3, pl), number=args.number * 20),
            "poly_mul": timeit.timeit(lambda: mod.poly_mul(pa, pb), number=args.number * 5),
        }
        rows.append((name, times))
    print(f"{'kernel':<14}" + "".join(f"{n:>12}" for n, _ in rows) + ("     speedup" if len(rows) == 2 else ""))
    for k in rows[0][1]:
        vals = [t[k] for _, t in rows]
        line = f"{k:<14}" + "".join(f"{v * 1e3:>10.2f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{vals[1] / vals[0]:>11.2f}x"  # python time over compiled time
        print(line)
    print("\nend-to-end series product (T = 6, six coordinates):")
    for env_pure in ("", "1"):
        env = dict(os.environ)
        env.pop("GRADEDGEO_PURE", None)
        if env_pure:
            env["GRADEDGEO_PURE"] = env_pure
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(reps=args.reps)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:<8} {float(out[1]) * 1e3:8.2f} ms per product")


if __name__ == "__main__":
    main()
