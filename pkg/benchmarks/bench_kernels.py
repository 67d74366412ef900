"""Time the numba kernels against their numpy fallbacks.

Usage::

    python3 benchmarks/bench_kernels.py --dim 40 --points 40000 --repeat 5

The numba timings exclude compilation (one warm-up call per kernel).  The
numpy backend alone is what ``NONCLASS_DISABLE_NUMBA=1`` selects at import.
"""

import argparse
import time

import numpy as np

from nonclass import _kernels as K


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=40, help="Fock dimension of the random density matrix")
    ap.add_argument("--points", type=int, default=40000, help="phase-space points per call")
    ap.add_argument("--terms", type=int, default=4, help="coherent components for the superposition kernel")
    ap.add_argument("--tau", type=float, default=0.5)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    rho = random_density(rng, args.dim)
    hl = K.half_log_factorials(args.dim)
    act = K.active_diagonals(rho)
    zr = rng.uniform(-4, 4, args.points)
    zi = rng.uniform(-4, 4, args.points)
    coeffs = rng.normal(size=args.terms) + 1j * rng.normal(size=args.terms)
    alphas = rng.normal(size=args.terms) + 1j * rng.normal(size=args.terms)
    psi = rng.normal(size=args.dim) + 1j * rng.normal(size=args.dim)
    psi /= np.linalg.norm(psi)

    cases = {
        "r_fock": lambda f: f(rho, zr, zi, args.tau, hl, act),
        "r_coherent": lambda f: f(coeffs, alphas, zr, zi, args.tau),
        "q_density": lambda f: f(rho, zr, zi, hl),
        "q_pure": lambda f: f(psi, zr, zi, hl),
    }
    print(f"dim={args.dim} points={args.points} tau={args.tau} numba available: {K.HAVE_NUMBA}")
    print(f"{'kernel':<12}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}")
    for name, call in cases.items():
        t_np = best_time(lambda: call(getattr(K, name + "_np")), args.repeat)
        if K.HAVE_NUMBA:
            t_nb = best_time(lambda: call(getattr(K, name + "_nb")), args.repeat)
            print(f"{name:<12}{t_np:12.4f}{t_nb:12.4f}{t_np / t_nb:10.1f}")
        else:
            print(f"{name:<12}{t_np:12.4f}{'n/a':>12}{'n/a':>10}")


if __name__ == "__main__":
    main()
