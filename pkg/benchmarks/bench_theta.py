"""Time the compiled and numpy theta kernels on the same lattice sums.

    python benchmarks/bench_theta.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from ppav import _theta_py
from ppav.siegel import SiegelPoint
from ppav.theta import truncation

try:
    from ppav import _theta_kernel
except ImportError:
    _theta_kernel = None


def case(g, seed=0, tol=1e-12):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(g, g)))
    y = q @ np.diag(rng.uniform(0.5, 1.5, g)) @ q.T
    x = rng.normal(size=(g, g))
    Z = SiegelPoint(0.5 * (x + x.T) + 0.5j * (y + y.T))
    z = np.zeros(g, dtype=complex)
    tr = truncation(Z, z, tol)
    u = np.zeros(g)
    lo = np.ceil(tr.center - tr.radius).astype(np.int_)
    hi = np.floor(tr.center + tr.radius).astype(np.int_)
    return (np.ascontiguousarray(Z.Z.real), np.ascontiguousarray(Z.Z.imag), z.real.copy(), z.imag.copy(), u, tr.center, tr.radius, lo, hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = {"numpy": _theta_py.theta_terms}
    if _theta_kernel is not None:
        backends["cython"] = _theta_kernel.theta_terms
    print(f"{'g':>2} {'terms':>8} " + " ".join(f"{name:>12}" for name in backends) + "   speedup")
    for g in (1, 2, 3, 4):
        inputs = case(g)
        n = len(_theta_py.theta_terms(*inputs))
        times = {name: min(timeit.repeat(lambda f=f: f(*inputs), number=1, repeat=args.repeat)) for name, f in backends.items()}
        ratio = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{g:>2} {n:>8} " + " ".join(f"{t * 1e3:>10.3f}ms" for t in times.values()) + f"   {ratio:7.2f}x")


if __name__ == "__main__":
    main()
