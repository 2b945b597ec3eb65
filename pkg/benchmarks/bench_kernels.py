"""Time the compiled and pure-numpy kernels.

Run ``python3 benchmarks/bench_kernels.py``; the script re-executes itself once per backend
(with and without SUPERSOL_DISABLE_NUMBA) and prints a table of best-of-n wall times.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeat):
    fn()  # warm-up: JIT compilation is excluded
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def measure(repeat):
    import numpy as np

    from supersol import _accel, kernels
    from supersol.bounds import ProblemSpec, extremal_profile
    from supersol.nonlinearity import PowerQ

    spec = ProblemSpec(3, 0.25, PowerQ(0.5))
    u = np.random.default_rng(0).normal(size=(65, 65, 65))
    return {
        "backend": _accel.backend(),
        "extremal_dopri": _time(lambda: extremal_profile(spec, 9.0, 9.0, n_out=401), repeat),
        "fd_lap_grad_65^3": _time(lambda: kernels.fd_lap_grad(u, 0.01), repeat),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps(measure(args.repeat)))
        return
    rows = []
    for disable in ("0", "1"):
        env = dict(os.environ, SUPERSOL_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    keys = [k for k in rows[0] if k != "backend"]
    print(f"{'kernel':<20}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speed-up':>12}")
    for k in keys:
        print(f"{k:<20}" + "".join(f"{r[k]:>11.4f}s" for r in rows) + f"{rows[1][k] / rows[0][k]:>11.1f}x")


if __name__ == "__main__":
    main()
