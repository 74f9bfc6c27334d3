"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is fed identical inputs on both backends; the script also
reports the largest relative difference between the two results.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from hypdot import _kernels_py as py
from hypdot.spheroidal import recurrence_coefficients

try:
    from hypdot import _kernels as cy
except ImportError:  # extension not built
    cy = None


def _inputs():
    nu, mu, theta = complex(-0.5, 1.7), 1, -36.0
    A, B, C = recurrence_coefficients(nu, mu, theta, -60, 60)
    lam = complex(B[60]) + 3.0
    w = np.abs(B) + 1.0
    return {
        "legendre_backward": (complex(0.3, 0.4), 1.5, 200, 160),
        "bessel_backward": (complex(0.2, 1.1), 24.0, 200, 180),
        "cf_function": (lam, A, B, C, 60),
        "minimal_solution": (lam, A, B, C, 60),
        "hill_determinant": (lam, A, B, C, w.astype(complex)),
    }


def _time(fn, args, repeat, inner):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            out = fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best, out


def _diff(x, y):
    x = np.atleast_1d(np.asarray(x[0] if isinstance(x, tuple) else x, dtype=complex))
    y = np.atleast_1d(np.asarray(y[0] if isinstance(y, tuple) else y, dtype=complex))
    return float(np.max(np.abs(x - y) / np.maximum(np.abs(y), 1e-300)))


E2E = (
    "import time, math; from hypdot import spectrum, BACKEND; "
    "p = spectrum.ModelParams.from_a2(24.0); t0 = time.perf_counter(); "
    "e = spectrum.partial_wave_eigenvalues(1, p, 3, certify=False); "
    "print(BACKEND, time.perf_counter() - t0, e[0].energy)"
)


def _end_to_end():
    print("\nE_{0..2,1} at a^2 = 24:")
    for pure in ("0", "1"):
        env = dict(os.environ, HYPDOT_PURE=pure)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        backend, secs, e0 = out.stdout.split()
        print(f"  {backend:<7} {float(secs):7.2f} s   E_01 = {float(e0):.12g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--inner", type=int, default=200)
    ap.add_argument("--end-to-end", action="store_true", help="also time a full eigenvalue solve")
    args = ap.parse_args()
    print(f"{'kernel':<20} {'python (us)':>12} {'cython (us)':>12} {'speedup':>8} {'max rel diff':>13}")
    for name, inp in _inputs().items():
        tp, op = _time(getattr(py, name), inp, args.repeat, args.inner)
        if cy is None:
            print(f"{name:<20} {tp * 1e6:12.1f} {'-':>12} {'-':>8} {'-':>13}")
            continue
        tc, oc = _time(getattr(cy, name), inp, args.repeat, args.inner)
        print(f"{name:<20} {tp * 1e6:12.1f} {tc * 1e6:12.1f} {tp / tc:8.1f} {_diff(oc, op):13.2e}")
    if args.end_to_end:
        _end_to_end()


if __name__ == "__main__":
    main()
