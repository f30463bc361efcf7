"""Compare the compiled kernel core against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--n 4000] [--dim 64] [--k 16]
Prints per-kernel timings for both backends and the speedup ratio.
"""

import argparse
import time

import numpy as np

from sdec._kernels import _numpy_impl
from sdec.numeric import Rng

try:
    from sdec._kernels import _core
except ImportError:
    _core = None


def best_of(fn, rounds=5, repeats=10):
    fn()  # warmup
    best = None
    for _ in range(rounds):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        t = (time.perf_counter() - t0) / repeats
        best = t if best is None else min(best, t)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4000)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--k", type=int, default=16)
    args = parser.parse_args()

    rng = Rng(1)
    x = rng.gaussian_matrix(args.n, args.dim)
    mu = rng.gaussian_matrix(args.k, args.dim)
    labels = np.arange(args.n, dtype=np.int64) % args.k

    cases = [
        ("selu", lambda impl: impl.selu(x)),
        ("selu_grad", lambda impl: impl.selu_grad(x)),
        ("pairwise_sqdist", lambda impl: impl.pairwise_sqdist(x, mu)),
        ("student_t_q", lambda impl: impl.student_t_q(x, mu, 1.0)),
        ("nearest_centroid", lambda impl: impl.nearest_centroid(x, mu)),
        ("label_sums", lambda impl: impl.label_sums(x, labels, args.k)),
    ]

    print(f"n={args.n} dim={args.dim} k={args.k}")
    header = f"{'kernel':<18}{'numpy (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_np = best_of(lambda: call(_numpy_impl)) * 1e3
        if _core is None:
            print(f"{name:<18}{t_np:>12.3f}{'unavailable':>15}{'-':>9}")
            continue
        t_c = best_of(lambda: call(_core)) * 1e3
        print(f"{name:<18}{t_np:>12.3f}{t_c:>15.3f}{t_np / t_c:>9.2f}")


if __name__ == "__main__":
    main()
