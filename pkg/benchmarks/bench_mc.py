"""Time the path simulator under both backends.

Each backend runs in its own interpreter because the selection flag is read
at import time.  Usage: python benchmarks/bench_mc.py [--paths N] [--repeat R]
"""
import argparse
import json
import os
import subprocess
import sys

_WORKER = """
import json, sys, time
from swapgame import ModelParams
from swapgame.mc import McConfig, backend_name, estimate_exit_triple
n, repeat = int(sys.argv[1]), int(sys.argv[2])
m = ModelParams.calibrated(0.03, 0.2, 1.0, 2.0)
cfg = McConfig(n_paths=n)
t = time.perf_counter()
estimate_exit_triple(m, 1.5, 0.5, 2.5, McConfig(n_paths=64))  # warm-up / jit compile
warm = time.perf_counter() - t
times = []
for _ in range(repeat):
    t = time.perf_counter()
    tri = estimate_exit_triple(m, 1.5, 0.5, 2.5, cfg)
    times.append(time.perf_counter() - t)
print(json.dumps({"backend": backend_name(), "warmup": warm, "best": min(times),
                  "means": [e.mean for e in tri]}))
"""


def run(disable: bool, n: int, repeat: int) -> dict:
    env = dict(os.environ)
    env["SWAPGAME_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", _WORKER, str(n), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    fast = run(False, args.paths, args.repeat)
    slow = run(True, args.paths, args.repeat)
    for r in (fast, slow):
        print(f"{r['backend']:>6}: {r['best']:8.3f} s best of {args.repeat}  (warm-up {r['warmup']:.2f} s)")
    print(f"speedup: {slow['best'] / fast['best']:.1f}x")
    print("identical estimates:", fast["means"] == slow["means"])


if __name__ == "__main__":
    main()
