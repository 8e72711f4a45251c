"""Compare the compiled and pure-numpy integration backends.

Builds the same eigenbasis under both backends in fresh subprocesses
(backend selection happens at import time, so each run needs its own
interpreter) and reports wall times.  The first build on the compiled
backend includes JIT compilation; the second shows steady state.
"""

import argparse
import json
import os
import subprocess
import sys

_CHILD = """
import json, time
import distwave as dw

pot = dw.make_preset("sech2", (2.0, 1.0))
grid = dw.GridSpec(-20.0, 20.0, {n_points})
t0 = time.perf_counter()
dw.build_eigenbasis(pot, grid, xi_max={xi_max}, n_xi={n_xi})
t1 = time.perf_counter()
dw.build_eigenbasis(pot, grid, xi_max={xi_max}, n_xi={n_xi})
t2 = time.perf_counter()
print(json.dumps({{"backend": dw.backend_name(),
                   "first_s": t1 - t0, "second_s": t2 - t1}}))
"""


def run_one(pure_numpy, n_points, xi_max, n_xi):
    env = dict(os.environ)
    if pure_numpy:
        env["DISTWAVE_PURE_NUMPY"] = "1"
    else:
        env.pop("DISTWAVE_PURE_NUMPY", None)
    code = _CHILD.format(n_points=n_points, xi_max=xi_max, n_xi=n_xi)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-points", type=int, default=801)
    ap.add_argument("--xi-max", type=float, default=8.0)
    ap.add_argument("--n-xi", type=int, default=64)
    args = ap.parse_args(argv)

    print(f"eigenbasis build: sech2[2,1] on [-20,20]/{args.n_points}, "
          f"{args.n_xi} xi-nodes up to {args.xi_max}")
    rows = []
    for pure in (False, True):
        rows.append(run_one(pure, args.n_points, args.xi_max, args.n_xi))
    print(f"{'backend':<10} {'first [s]':>12} {'second [s]':>12}")
    for r in rows:
        print(f"{r['backend']:<10} {r['first_s']:>12.3f} {r['second_s']:>12.3f}")
    if rows[0]["backend"] != rows[1]["backend"]:
        speedup = rows[1]["second_s"] / rows[0]["second_s"]
        print(f"steady-state speedup ({rows[0]['backend']} over "
              f"{rows[1]['backend']}): {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
