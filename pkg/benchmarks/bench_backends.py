"""Compare the numba and pure-numpy kernel backends on the MLD/SMD benchmark.

Each backend runs in its own interpreter because the backend is fixed at
import time by HURWITZ_PIA_DISABLE_NUMBA.

    python3 benchmarks/bench_backends.py --qs 3,5,7 --trials 50
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_CHILD = r"""
import json, sys
from hurwitz_pia import _accel
from hurwitz_pia.simulation import run_benchmark
qs, n, trials, repeats = json.loads(sys.argv[1])
rows = run_benchmark(qs, n, trials, 0, repeats)
print(json.dumps({"backend": _accel.backend_name(),
                  "rows": [[r.q, r.mld_mean_us, r.smd_mean_us] for r in rows]}))
"""


def run_backend(disable_numba: bool, qs, n, trials, repeats) -> dict:
    env = dict(os.environ)
    env.pop("HURWITZ_PIA_DISABLE_NUMBA", None)
    if disable_numba:
        env["HURWITZ_PIA_DISABLE_NUMBA"] = "1"
    args = json.dumps([qs, n, trials, repeats])
    out = subprocess.run([sys.executable, "-c", _CHILD, args], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qs", default="3,5,7,11")
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--repeats", type=int, default=2)
    args = ap.parse_args(argv)
    qs = [int(v) for v in args.qs.split(",")]

    fast = run_backend(False, qs, args.n, args.trials, args.repeats)
    slow = run_backend(True, qs, args.n, args.trials, args.repeats)
    print("q,decoder,%s_us,%s_us,ratio" % (fast["backend"], slow["backend"]))
    for (q, fm, fs), (_, sm, ss) in zip(fast["rows"], slow["rows"]):
        print(f"{q},mld,{fm:.2f},{sm:.2f},{sm / fm:.2f}")
        print(f"{q},smd,{fs:.2f},{ss:.2f},{ss / fs:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
