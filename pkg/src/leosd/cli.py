"""Command-line front end: Monte Carlo campaigns, analysis tables, code files.

    leosd simulate --code ebch64_30 --decoder leosd --rho 3 --tau 3 --xi 3 --snr-db 2.0
    leosd analyze teps --n 64 --k 30 --rho 3 --tau 3 --xi 3
    leosd codes build ebch64_30 --out c.txt
    leosd selftest

Every frame f at SNR index s draws its message and noise from
``np.random.SeedSequence([seed, s, f])``, so a campaign's results do not
depend on how frames are split between worker processes.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .analysis import (complexity_leosd, complexity_osd, error_count_pmf_all, expected_estimates,
                       expected_teps, full_rank_prob, m_of_rho, p_est_bound)
from .channel import n0_from_snr_db, transmit
from .codes import BUILTIN_CODES, LinearCode, builtin_code, encode, load_code, random_code, save_code
from .ileosd import ConditionThresholds, decode_improved
from .leosd import LeosdParams, decode
from .osd_baseline import decode_osd

__all__ = ["CSV_COLUMNS", "Campaign", "frame_seed", "main", "resolve_code", "run_analysis",
           "run_campaign", "simulate_frames"]

CSV_COLUMNS = ("snr_db", "frames", "block_errors", "bler", "qt_mean", "qc_mean", "bops_mean",
               "flops_mean", "mu_t_pred", "mu_c_pred", "pest_bound")
DECODERS = ("osd", "leosd", "ileosd")
CHUNK = 32


@dataclass(frozen=True)
class Campaign:
    code: str = "ebch64_30"
    decoder: str = "leosd"
    rho: int = 3
    tau: int = 3
    xi: int = 3
    order: int = 3
    ps: float | None = None
    pd: float | None = None
    snr_db: tuple = (2.0,)
    min_errors: int = 200
    max_frames: int = 1_000_000
    seed: int = 0
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.min_errors < 1:
            raise ValueError("min_errors must be at least 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be at least 1")
        if not len(self.snr_db):
            raise ValueError("SNR list is empty")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if min(self.rho, self.tau, self.xi, self.order) < 0:
            raise ValueError("decoder parameters must be nonnegative")

    @property
    def params(self) -> LeosdParams:
        return LeosdParams(self.rho, self.tau, self.xi)


def resolve_code(spec: str) -> LinearCode:
    """Builtin name, ``random:n,k,seed`` or a path to a code file."""
    if spec in BUILTIN_CODES:
        return builtin_code(spec)
    if spec.startswith("random:"):
        try:
            n, k, seed = (int(v) for v in spec[len("random:"):].split(","))
        except ValueError:
            raise ValueError(f"random code spec must be random:n,k,seed, got {spec!r}") from None
        return random_code(n, k, seed)
    p = Path(spec)
    if not p.exists():
        raise ValueError(f"{spec!r} is neither a builtin code ({', '.join(BUILTIN_CODES)}) nor a file")
    return load_code(p)


def frame_seed(master: int, snr_index: int, frame: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master, snr_index, frame])


def _decode(camp: Campaign, code: LinearCode, frame):
    if camp.decoder == "osd":
        return decode_osd(frame, code, camp.order)
    if camp.decoder == "leosd":
        return decode(frame, code, camp.params)
    policy = ConditionThresholds(ps=camp.ps, pd=camp.pd)
    return decode_improved(frame, code, camp.params, policy)


_CODE_CACHE: dict[str, LinearCode] = {}


def simulate_frames(camp: Campaign, snr_index: int, start: int, stop: int) -> np.ndarray:
    """Decode frames [start, stop) at one SNR point.

    Returns one row per frame: error flag, q_t, q_c, BOPs, FLOPs.
    """
    code = _CODE_CACHE.get(camp.code)
    if code is None:
        code = _CODE_CACHE[camp.code] = resolve_code(camp.code)
    n0 = n0_from_snr_db(camp.snr_db[snr_index])
    out = np.zeros((stop - start, 5))
    for i, f in enumerate(range(start, stop)):
        rng = np.random.default_rng(frame_seed(camp.seed, snr_index, f))
        c = encode(code, rng.integers(0, 2, code.k, dtype=np.uint8))
        res = _decode(camp, code, transmit(c, n0, rng))
        out[i] = (float(not np.array_equal(res.codeword, c)), res.q_t, res.q_c,
                  res.counters.bops, res.counters.flops)
    return out


def predictions(camp: Campaign, code: LinearCode, n0: float) -> dict:
    """Analytical counterparts of the simulated columns (full-rank assumption)."""
    n, k = code.n, code.k
    if camp.decoder == "osd":
        m = min(camp.order, k)
        q = float(sum(math.comb(k, i) for i in range(m + 1)))
        miss = 1.0 - float(error_count_pmf_all(n - k + 1, n, n0)[:m + 1].sum())
        cx = complexity_osd(m, n, k)
        return {"mu_t_pred": q, "mu_c_pred": q, "pest_bound": max(0.0, miss),
                "bops_pred": cx.bops, "flops_pred": cx.flops}
    r = min(k, n - k)
    p = camp.params.clamp(r, n, k)
    cx = complexity_leosd(p, n, k)
    return {"mu_t_pred": expected_teps(p, n, k), "mu_c_pred": expected_estimates(p, n, k),
            "pest_bound": p_est_bound(p, n, k, n0), "bops_pred": cx.bops, "flops_pred": cx.flops}


def _blocks(camp: Campaign, snr_index: int, pool):
    """Per-frame result blocks in frame order, computed CHUNK frames at a time."""
    f = 0
    if pool is None:
        while f < camp.max_frames:
            stop = min(f + CHUNK, camp.max_frames)
            yield simulate_frames(camp, snr_index, f, stop)
            f = stop
        return
    pending = []
    while True:
        while f < camp.max_frames and len(pending) < 2 * camp.workers:
            stop = min(f + CHUNK, camp.max_frames)
            pending.append(pool.submit(simulate_frames, camp, snr_index, f, stop))
            f = stop
        if not pending:
            return
        yield pending.pop(0).result()


def _run_point(camp: Campaign, snr_index: int, pool) -> dict:
    acc = np.zeros(5)
    qmax = np.zeros(2)
    frames = 0
    t0 = time.perf_counter()
    gen = _blocks(camp, snr_index, pool)
    try:
        for block in gen:
            # stop exactly at the frame that reaches min_errors; later frames are dropped
            cum = np.cumsum(block[:, 0]) + acc[0]
            hit = np.flatnonzero(cum >= camp.min_errors)
            if hit.size:
                block = block[:hit[0] + 1]
            acc += block.sum(axis=0)
            qmax = np.maximum(qmax, block[:, 1:3].max(axis=0))
            frames += block.shape[0]
            if hit.size:
                break
    finally:
        gen.close()
    return {"frames": frames, "block_errors": int(acc[0]), "bler": acc[0] / frames,
            "qt_mean": acc[1] / frames, "qc_mean": acc[2] / frames,
            "bops_mean": acc[3] / frames, "flops_mean": acc[4] / frames,
            "qt_max": int(qmax[0]), "qc_max": int(qmax[1]), "zero_errors": acc[0] == 0,
            "seconds": time.perf_counter() - t0}


def run_campaign(camp: Campaign, emit=None) -> list[dict]:
    """Simulate every SNR point; ``emit(row)`` is called as each point completes.

    With ``camp.out`` set, rows are appended to that CSV as they finish and a
    JSON sidecar next to it records the campaign and the extra statistics.
    """
    code = resolve_code(camp.code)
    rows: list[dict] = []
    writer = fh = None
    sidecar = None
    if camp.out:
        path = Path(camp.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        fh = path.open("w", newline="", encoding="utf-8")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        fh.flush()
        sidecar = path.with_suffix(path.suffix + ".json")
    pool = ProcessPoolExecutor(camp.workers) if camp.workers > 1 else None
    try:
        for s, snr in enumerate(camp.snr_db):
            row = {"snr_db": float(snr), **_run_point(camp, s, pool)}
            row.update(predictions(camp, code, n0_from_snr_db(snr)))
            rows.append(row)
            if writer is not None:
                writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
                fh.flush()
                sidecar.write_text(json.dumps(_sidecar(camp, code, rows), indent=2), encoding="utf-8")
            if emit is not None:
                emit(row)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
        if fh is not None:
            fh.close()
    return rows


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _sidecar(camp: Campaign, code: LinearCode, rows: list[dict]) -> dict:
    return {"version": __version__, "backend": BACKEND, "campaign": asdict(camp),
            "code": {"name": code.name, "n": code.n, "k": code.k, "d_min": code.d_min},
            "rows": [{k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in r.items()}
                     for r in rows]}


def run_analysis(kind: str, **kw) -> list[dict]:
    """Tables of analytical quantities; no simulation."""
    if kind == "full-rank":
        n = int(kw.get("n", 64))
        if n < 2:
            raise ValueError("n must be at least 2")
        return [{"n": n, "k": k, "rate": k / n, "full_rank_prob": full_rank_prob(n, k)}
                for k in range(1, n)]
    if kind == "teps":
        n, k = int(kw["n"]), int(kw["k"])
        if not 0 < k < n:
            raise ValueError("need 0 < k < n")
        p = LeosdParams(int(kw["rho"]), int(kw["tau"]), int(kw["xi"])).clamp(min(k, n - k), n, k)
        cx = complexity_leosd(p, n, k)
        return [{"n": n, "k": k, "rho": p.rho, "tau": p.tau, "xi": p.xi,
                 "mu_t": expected_teps(p, n, k), "mu_c": expected_estimates(p, n, k),
                 "bops": cx.bops, "flops": cx.flops, "m_of_rho": m_of_rho(p.rho, n, k)}]
    if kind == "pest":
        n, k = int(kw["n"]), int(kw["k"])
        p = LeosdParams(int(kw["rho"]), int(kw["tau"]), int(kw["xi"]))
        snrs = kw.get("snr_db") or (0.0, 1.0, 2.0, 3.0)
        return [{"snr_db": s, "pest_bound": p_est_bound(p, n, k, n0_from_snr_db(s))} for s in snrs]
    if kind == "osd":
        n, k, m = int(kw["n"]), int(kw["k"]), int(kw["order"])
        cx = complexity_osd(m, n, k)
        return [{"n": n, "k": k, "order": m, "bops": cx.bops, "flops": cx.flops}]
    raise ValueError(f"unknown analysis {kind!r}; choose full-rank, teps, pest or osd")


def _write_table(rows: list[dict], out: str | None) -> None:
    if not rows:
        return
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def _snr_list(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("SNR list is empty")
    return vals


def load_config(path) -> dict:
    """JSON object whose keys mirror Campaign fields."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    known = {f.name for f in fields(Campaign)}
    bad = set(data) - known
    if bad:
        raise ValueError(f"unknown config keys: {sorted(bad)}")
    if "snr_db" in data:
        v = data["snr_db"]
        data["snr_db"] = tuple(v) if isinstance(v, list) else (float(v),)
    return data


def campaign_from_args(args) -> Campaign:
    base = load_config(args.config) if args.config else {}
    for f in fields(Campaign):
        v = getattr(args, f.name, None)
        if v is not None:
            base[f.name] = v
    return Campaign(**base)


def _add_campaign_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with campaign fields (flags override it)")
    p.add_argument("--code", help="builtin name, random:n,k,seed, or code file")
    p.add_argument("--decoder", choices=DECODERS)
    p.add_argument("--rho", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--xi", type=int)
    p.add_argument("--order", type=int, help="OSD order")
    p.add_argument("--ps", type=float, help="override the stopping threshold")
    p.add_argument("--pd", type=float, help="override the discarding threshold")
    p.add_argument("--snr-db", dest="snr_db", type=_snr_list, help="comma separated list")
    p.add_argument("--min-errors", dest="min_errors", type=int)
    p.add_argument("--max-frames", dest="max_frames", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leosd", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo BLER and complexity campaign")
    _add_campaign_flags(sim)

    an = sub.add_parser("analyze", help="analytical tables")
    an.add_argument("kind", choices=("full-rank", "teps", "pest", "osd"))
    an.add_argument("--n", type=int, default=64)
    an.add_argument("--k", type=int, default=30)
    an.add_argument("--rho", type=int, default=3)
    an.add_argument("--tau", type=int, default=3)
    an.add_argument("--xi", type=int, default=3)
    an.add_argument("--order", type=int, default=3)
    an.add_argument("--snr-db", dest="snr_db", type=_snr_list)
    an.add_argument("--out")

    codes = sub.add_parser("codes", help="build or inspect code files")
    csub = codes.add_subparsers(dest="action", required=True)
    b = csub.add_parser("build")
    b.add_argument("spec", help="builtin name or random:n,k,seed")
    b.add_argument("--out", required=True)
    i = csub.add_parser("inspect")
    i.add_argument("spec", help="builtin name, random:n,k,seed or file")

    sub.add_parser("selftest", help="quick consistency check against brute force")
    return ap


def _selftest() -> int:
    from .oracle import ml_decode

    code = random_code(16, 8, 7)
    n0 = n0_from_snr_db(0.0)
    bad = 0
    for f in range(50):
        rng = np.random.default_rng(frame_seed(1, 0, f))
        frame = transmit(encode(code, rng.integers(0, 2, 8, dtype=np.uint8)), n0, rng)
        ml = ml_decode(frame, code)
        le = decode(frame, code, LeosdParams(8, 8, 16))
        ile = decode_improved(frame, code, LeosdParams(8, 8, 16), ConditionThresholds.disabled())
        if abs(ml.whd - le.whd) > 1e-9 or not np.array_equal(le.codeword, ile.codeword):
            bad += 1
    print(f"backend={BACKEND} frames=50 mismatches={bad}")
    return 0 if bad == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "simulate":
            camp = campaign_from_args(args)

            def show(row):
                flag = " (no errors)" if row["zero_errors"] else ""
                print(f"snr={row['snr_db']:g} dB frames={row['frames']} errors={row['block_errors']} "
                      f"bler={row['bler']:.4g} qt={row['qt_mean']:.1f} qc={row['qc_mean']:.1f}{flag}",
                      flush=True)

            rows = run_campaign(camp, emit=show)
            if not camp.out:
                _write_table([{c: r[c] for c in CSV_COLUMNS} for r in rows], None)
        elif args.cmd == "analyze":
            kw = {k: getattr(args, k) for k in ("n", "k", "rho", "tau", "xi", "order", "snr_db")}
            _write_table(run_analysis(args.kind, **kw), args.out)
        elif args.cmd == "codes":
            code = resolve_code(args.spec)
            if args.action == "build":
                save_code(code, args.out)
                print(f"wrote {code.name or 'code'} ({code.n},{code.k}) to {args.out}")
            else:
                from .gf2_core import rank

                info = {"name": code.name, "n": code.n, "k": code.k, "rate": code.k / code.n,
                        "rank_G": rank(code.G), "d_min": code.d_min}
                if code.d_min is None and code.k <= 20:
                    from .codes import min_distance_bruteforce

                    info["d_min"] = min_distance_bruteforce(code)
                print(json.dumps(info, indent=2))
        else:
            return _selftest()
    except (ValueError, KeyError, OSError) as exc:
        print(f"leosd: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
