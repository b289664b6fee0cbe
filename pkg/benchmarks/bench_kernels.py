"""Compare the compiled kernels with the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--takacs-n 400 20000] [--events 200000] [--repeat 3]

Both backends run the same inputs and the script prints best-of-``repeat``
wall times, the speed-up and whether the outputs agree.  Simulation
accumulators must match bit for bit.  The Takacs tables are compared
against ``10 * eps * n**2`` relative: at ``rho1 = 1`` the forward recursion
amplifies input rounding by roughly ``n**2``, so the two summation schemes
(compensated double and long double) legitimately differ at that level.
"""

import argparse
import sys
import time

import numpy as np

from largedam import BatchDistribution, DamModel, ServiceDistribution
from largedam import _fallback

try:
    from largedam import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_model():
    batch = BatchDistribution.geometric(0.5)
    m = DamModel(1.0, batch, ServiceDistribution.exponential(1.0), ServiceDistribution.exponential(1.0), 10)
    return m.with_rho(rho1=1.0, rho2=0.5)


def takacs_case(kern, n):
    m = bench_model().replace(L=n)
    f = m.coeffs.values
    return lambda: kern.takacs_forward(f, 1.0, n)


def sim_case(kern, events):
    m = bench_model()
    c1, p1 = m.service1.kernel_spec()
    c2, p2 = m.service2.kernel_spec()
    cdf = m.batch.cdf_table()

    def run():
        bitgen = np.random.PCG64(np.random.SeedSequence(7))
        return kern.simulate_kernel(bitgen, m.lam, cdf, c1, p1, c2, p2, m.L, events, events // 5, 32)

    return run


def takacs_agree(a, b, n):
    diff = float(np.max(np.abs(a - b) / np.abs(b)))
    return diff <= 10 * np.finfo(float).eps * n * n, f"(max rel diff {diff:.1e})"


def sim_agree(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a, b)), "(bit-identical)"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--takacs-n", type=int, nargs="+", default=[400, 20_000])
    ap.add_argument("--events", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
        return 1

    print(f"{'kernel':<28}{'compiled [s]':>14}{'python [s]':>14}{'speed-up':>10}  agree")
    ok = True
    cases = [
        (f"takacs_forward n={n}", lambda k, n=n: takacs_case(k, n), lambda a, b, n=n: takacs_agree(a, b, n))
        for n in args.takacs_n
    ]
    cases.append((f"simulate_kernel {args.events} ev", lambda k: sim_case(k, args.events), sim_agree))
    for name, make, agree in cases:
        tc, oc = best_of(make(_kernels), args.repeat)
        tp, op = best_of(make(_fallback), args.repeat)
        same, note = agree(oc, op)
        ok &= same
        print(f"{name:<28}{tc:>14.4f}{tp:>14.4f}{tp / tc:>9.1f}x  {'yes' if same else 'NO'} {note}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
