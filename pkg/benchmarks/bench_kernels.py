"""Compare the compiled and numpy jet kernels.

Run ``python3 benchmarks/bench_kernels.py``. Kernel timings use both modules
directly; the end-to-end timing runs the identity suite in a subprocess per
backend (``KENMOTSU_PURE_PYTHON=1`` forces the fallback).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from kenmotsu import _jetkernel_py
from kenmotsu.jet import algebra

try:
    from kenmotsu import _jetkernel
except ImportError:
    _jetkernel = None

PIPELINE = """
import time
from kenmotsu.library import builtin
from kenmotsu.contact import kenmotsu_identity_suite
from kenmotsu.geometry import local_geometry
spec = builtin("kenmotsu5")
pts = spec.sample_points(count={count})
t = time.perf_counter()
kenmotsu_identity_suite(spec, pts)
print(time.perf_counter() - t)
"""


def bench_kernels(dim, order, columns, repeat):
    alg = algebra(dim, order)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((alg.size, columns))
    b = rng.standard_normal((alg.size, columns))
    taylor = rng.standard_normal((order + 1, columns))
    rows = []
    mods = [("python", _jetkernel_py)] + ([("cython", _jetkernel)] if _jetkernel else [])
    ref = None
    for name, mod in mods:
        out = mod.mul(a, b, alg.ia, alg.ib, alg.ic, alg.size)
        if ref is None:
            ref = out
        assert np.allclose(out, ref, rtol=1e-13, atol=1e-13)
        t_mul = min(timeit.repeat(lambda: mod.mul(a, b, alg.ia, alg.ib, alg.ic, alg.size), number=repeat, repeat=3))
        t_cmp = min(timeit.repeat(lambda: mod.compose(a, taylor, alg.ia, alg.ib, alg.ic), number=repeat, repeat=3))
        rows.append((name, 1e6 * t_mul / repeat, 1e6 * t_cmp / repeat))
    return rows


def bench_pipeline(count):
    out = {}
    for name, env in (("python", "1"), ("cython", "0")):
        if name == "cython" and _jetkernel is None:
            continue
        res = subprocess.run(
            [sys.executable, "-c", PIPELINE.format(count=count)],
            env={**os.environ, "KENMOTSU_PURE_PYTHON": env},
            capture_output=True,
            text=True,
            check=True,
        )
        out[name] = float(res.stdout.strip())
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--points", type=int, default=10)
    args = parser.parse_args()
    if _jetkernel is None:
        print("compiled kernel not built; only the numpy fallback is timed")
    print(f"{'dim':>3} {'order':>5} {'cols':>5} {'backend':>8} {'mul [us]':>10} {'compose [us]':>13}")
    for dim, order, cols in ((3, 3, 1), (3, 3, 81), (5, 3, 1), (5, 3, 625)):
        for name, tm, tc in bench_kernels(dim, order, cols, args.repeat):
            print(f"{dim:>3} {order:>5} {cols:>5} {name:>8} {tm:>10.2f} {tc:>13.2f}")
    print()
    for name, secs in bench_pipeline(args.points).items():
        print(f"identity suite, kenmotsu5, {args.points} points, {name}: {secs:.3f} s")


if __name__ == "__main__":
    main()
