"""Time the numba and numpy kernel backends on the same frames.

Each backend runs in its own interpreter because LEOSD_BACKEND is read at
import time.  Usage:

    python benchmarks/bench_kernels.py [--frames 20] [--json out.json]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

CASES = [
    ("ebch64_30", "osd", (3,)),
    ("ebch64_30", "leosd", (3, 3, 3)),
    ("ebch64_30", "ileosd", (3, 3, 3)),
    ("ebch64_16", "leosd", (5, 12, 12)),
    ("ebch128_85", "leosd", (2, 2, 3)),
]

WORKER = r"""
import json, sys, time
import numpy as np
import leosd
from leosd.channel import n0_from_snr_db, transmit
from leosd.codes import builtin_code, encode
from leosd.ileosd import decode_improved
from leosd.leosd import LeosdParams, decode
from leosd.osd_baseline import decode_osd

cases, frames = json.loads(sys.argv[1]), int(sys.argv[2])
out = []
for name, decoder, p in cases:
    code = builtin_code(name)
    rng = np.random.default_rng(1)
    data = [transmit(encode(code, rng.integers(0, 2, code.k, dtype=np.uint8)), n0_from_snr_db(2.0), rng)
            for _ in range(frames + 1)]
    if decoder == "osd":
        run = lambda f: decode_osd(f, code, p[0])
    elif decoder == "leosd":
        run = lambda f: decode(f, code, LeosdParams(*p))
    else:
        run = lambda f: decode_improved(f, code, LeosdParams(*p))
    run(data[0])  # warm-up (compilation)
    t0 = time.perf_counter()
    words = [run(f).codeword.tolist() for f in data[1:]]
    ms = (time.perf_counter() - t0) * 1e3 / frames
    out.append({"code": name, "decoder": decoder, "params": p, "ms_per_frame": ms,
                "digest": hash(str(words))})
print(json.dumps({"backend": leosd.BACKEND, "results": out}))
"""


def run_backend(backend: str, frames: int) -> dict:
    env = dict(os.environ, LEOSD_BACKEND=backend, PYTHONHASHSEED="0")
    p = subprocess.run([sys.executable, "-c", WORKER, json.dumps(CASES), str(frames)], env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(p.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=20)
    ap.add_argument("--json", help="write the raw timings here")
    args = ap.parse_args(argv)
    res = {b: run_backend(b, args.frames) for b in ("numba", "numpy")}
    print(f"{'code':<11} {'decoder':<7} {'params':<11} {'numba ms':>9} {'numpy ms':>9} {'speedup':>8} same")
    for a, b in zip(res["numba"]["results"], res["numpy"]["results"]):
        same = a["digest"] == b["digest"]
        print(f"{a['code']:<11} {a['decoder']:<7} {str(tuple(a['params'])):<11} {a['ms_per_frame']:9.2f} "
              f"{b['ms_per_frame']:9.2f} {b['ms_per_frame'] / a['ms_per_frame']:7.1f}x {same}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(res, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
