"""Time the rotor Floquet step for each kernel backend.

Compares the compiled banded kernel, its numpy fallback, and an FFT pass
through the angle grid on a batch of momentum-space trajectories.  Every
route is checked against the compiled result before timing.

    python3 benchmarks/bench_kernels.py --lattice 201 401 801 --trajectories 64
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cohthermo import kernels
from cohthermo.models.rotor import (
    apply_kick_angle,
    bessel_bandwidth,
    kick_coefficients,
    rotor_free_operator,
)


def _fft_step(psi, k, N, free):
    return apply_kick_angle(psi, k, N) * free


def bench_step(N, n_traj, k, T, repeats, rng):
    L = 2 * N + 1
    psi = rng.standard_normal((n_traj, L)) + 1j * rng.standard_normal((n_traj, L))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    coeffs = kick_coefficients(k, bessel_bandwidth(k))
    free = rotor_free_operator(T, N)

    routes = {}
    for name in kernels.available_backends():
        mod = kernels.load_backend(name)
        routes[name] = lambda mod=mod: mod.floquet_step(psi, coeffs, free)
    routes["fft"] = lambda: _fft_step(psi, k, N, free)

    ref = routes["cython" if "cython" in routes else "python"]()
    rows = []
    for name, fn in routes.items():
        err = float(np.max(np.abs(fn() - ref)))
        n = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-6)))
        best = min(timeit.repeat(fn, number=n, repeat=repeats)) / n
        rows.append((name, best, err))
    return rows


def bench_run(n_kicks):
    """Wall time of a full rotor run in a fresh interpreter per backend."""
    code = (
        "import time; from cohthermo.models.rotor import RotorParams, rotor_run;"
        f"t=time.perf_counter(); rotor_run(RotorParams(beta=1.0, n_kicks={n_kicks}));"
        "print(time.perf_counter()-t)"
    )
    out = {}
    for name in kernels.available_backends():
        env = {"COHTHERMO_PURE_PYTHON": "1"} if name == "python" else {}
        res = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=True,
            env={**_base_env(), **env},
        )
        out[name] = float(res.stdout.strip())
    return out


def _base_env():
    env = dict(os.environ)
    env.pop("COHTHERMO_PURE_PYTHON", None)
    return env


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lattice", type=int, nargs="+", default=[100, 200, 400], help="half-widths N")
    ap.add_argument("--trajectories", type=int, default=64)
    ap.add_argument("--k", type=float, default=9.5)
    ap.add_argument("--T", type=float, default=0.25)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--run-kicks", type=int, default=2000, help="0 skips the full-run timing")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(kernels.available_backends())}")
    print(f"{'N':>6} {'route':>8} {'ms/step':>10} {'speedup':>8} {'max dev':>9}")
    for N in args.lattice:
        rows = bench_step(N, args.trajectories, args.k, args.T, args.repeats, rng)
        slow = max(t for _, t, _ in rows)
        for name, t, err in rows:
            print(f"{N:>6} {name:>8} {1e3 * t:>10.3f} {slow / t:>7.1f}x {err:>9.1e}")
    if args.run_kicks:
        print(f"\nfull rotor run, beta=1, {args.run_kicks} kicks:")
        for name, t in bench_run(args.run_kicks).items():
            print(f"  {name:>8} {t:8.2f} s")


if __name__ == "__main__":
    main()
