"""Timing comparison of the two kernel backends.

Runs every hot kernel under both settings of ``NORMHOLO_NUMBA`` and
prints a side-by-side table.  Backend choice is fixed at import time,
so the script re-executes itself in a child process per backend; the
child times the workloads and emits JSON on stdout.

Usage:  python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

_CHILD_FLAG = "NORMHOLO_BENCH_CHILD"


def _workloads():
    from normholo.kernels import jacobi_eigh, matrix_exp
    from normholo.srep import SymmetricPairRep
    from normholo.orbit import build_orbit
    from normholo.transport import OrbitCurve, parallel_transport_normal

    rng = np.random.default_rng(0)
    sym = rng.standard_normal((400, 16, 16))
    sym = sym + sym.transpose(0, 2, 1)
    skew = rng.standard_normal((400, 16, 16))
    skew = 0.1 * (skew - skew.transpose(0, 2, 1))

    rep = SymmetricPairRep.for_size(4)
    point = np.diag([3.0, -1.0, -1.0, -1.0])
    orbit = build_orbit(rep, point)
    c = rng.standard_normal(orbit.dim)
    curve = OrbitCurve.from_tangent_coords(
        orbit, [(c / np.linalg.norm(c), 1.0)], step=2.5e-4)
    xi0 = orbit.nbar_frame[0]

    def run_jacobi():
        for m in sym:
            jacobi_eigh(m)

    def run_expm():
        for m in skew:
            matrix_exp(m)

    def run_transport():
        parallel_transport_normal(curve, xi0)

    return [
        ("jacobi_eigh  16x16 x400", run_jacobi),
        ("matrix_exp   16x16 x400", run_expm),
        ("transport    4000 steps", run_transport),
    ]


def _child(repeats: int) -> None:
    from normholo.kernels import BACKEND

    results = {}
    for name, fn in _workloads():
        fn()                      # warm caches and any JIT compilation
        best = min(_timed(fn) for _ in range(repeats))
        results[name] = best
    json.dump({"backend": BACKEND, "results": results}, sys.stdout)


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _spawn(flag: str, repeats: int) -> dict:
    env = dict(os.environ, NORMHOLO_NUMBA=flag)
    env[_CHILD_FLAG] = "1"
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repeats per kernel, best kept")
    args = parser.parse_args()

    if os.environ.get(_CHILD_FLAG):
        _child(args.repeats)
        return

    jit = _spawn("1", args.repeats)
    ref = _spawn("0", args.repeats)
    if jit["backend"] != "numba":
        print("numba backend unavailable; numpy timings only")
        for name, t in ref["results"].items():
            print(f"  {name}  {t * 1e3:9.2f} ms")
        return

    print(f"{'kernel':<26}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, t_jit in jit["results"].items():
        t_ref = ref["results"][name]
        print(f"{name:<26}{t_jit * 1e3:>10.2f} ms{t_ref * 1e3:>10.2f} ms"
              f"{t_ref / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
