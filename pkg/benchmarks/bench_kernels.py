"""Compare the compiled and pure-Python likelihood kernels.

    python3 benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Reports the best wall time per call for each backend on the same sample
and checks that both return the same log-likelihood.
"""

import argparse
import timeit

import numpy as np

from bdsiw import BivMaxParams, PairedSample, fit_mle, sample_pairs
from bdsiw._backend import get_kernels


def bench(fn, repeat):
    fn()  # warm up
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    backends = {}
    for name in ("cython", "python"):
        try:
            backends[name] = get_kernels(name)
        except ImportError:
            print(f"{name}: not available")

    for family, truth in (("dsiw", (0.8, 0.4, 0.4, 0.5)), ("dsw", (0.6, 0.5, 0.7, 1.3))):
        p = BivMaxParams(*truth, family=family)
        x1, x2 = sample_pairs(p, args.n, rng)
        w = np.ones(args.n)
        lt = p.log_thetas
        print(f"\n{family}: pair_loglik on {args.n} uncompressed pairs")
        results = {}
        for name, k in backends.items():
            call = lambda k=k: k.pair_loglik(x1, x2, w, *lt, p.zeta, p.kernel_model)
            results[name] = call()
            print(f"  {name:7s} {bench(call, args.repeat) * 1e3:9.3f} ms   loglik {results[name]:.10f}")
        if len(results) == 2:
            a, b = results.values()
            print(f"  relative difference {abs(a - b) / abs(b):.2e}")

    data = PairedSample(*sample_pairs(BivMaxParams(0.8, 0.4, 0.4, 0.5), 400, rng))
    print("\nfit_mle on n=400, 4 starts")
    for name in backends:
        t = bench(lambda name=name: fit_mle(data, n_starts=4, backend=name), max(1, args.repeat // 2))
        print(f"  {name:7s} {t:9.3f} s")


if __name__ == "__main__":
    main()
