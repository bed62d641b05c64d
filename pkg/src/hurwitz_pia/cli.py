"""Command-line entry point: ``hurwitz-pia <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import _accel
from .complexity import (
    RINGS,
    combined_rows,
    complexity_table,
    factorize_squarefree,
    find_eisenstein_factor,
    find_gaussian_factor,
    rows_to_csv,
    rows_to_text,
)
from .construction import code_summary, load_code_spec
from .crt import build_crt_context, enumerate_residues, find_irreducible, phi_combine_batch, phi_split_batch
from .quaternion import format_hurwitz
from .selftest import run_selftest
from .simulation import SimConfig, bench_to_csv, records_to_csv, run_benchmark, run_simulation, speedup_increasing


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.replace(" ", ",").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def cmd_factor(args) -> int:
    p = args.prime
    rings = ("hurwitz", "gaussian", "eisenstein") if args.ring == "all" else (args.ring,)
    out = {"p": p}
    for ring in rings:
        if ring == "hurwitz":
            f = find_irreducible(p)
            out["hurwitz"] = {
                "pi": format_hurwitz(f.pi),
                "pi_bar": format_hurwitz(f.pi_bar),
                "pi_doubled": list(f.pi.doubled),
                "norm": f.pi.norm(),
                "gamma": f.gamma,
            }
        else:
            g = find_gaussian_factor(p) if ring == "gaussian" else find_eisenstein_factor(p)
            out[ring] = None if g is None else {"factor": str(g), "conjugate": str(g.conj()), "norm": g.norm()}
    if args.json:
        print(json.dumps(out, indent=2))
        return 0
    for ring in rings:
        v = out[ring]
        if v is None:
            print(f"{ring:<10} p={p}: inert (no factor of norm {p})")
        elif ring == "hurwitz":
            print(f"{ring:<10} p={p}: pi={v['pi']}  pi_bar={v['pi_bar']}  Nrm={v['norm']}  gamma={v['gamma']}")
        else:
            print(f"{ring:<10} p={p}: {v['factor']} * {v['conjugate']}  Nrm={v['norm']}")
    return 0


def cmd_tables(args) -> int:
    rows = combined_rows(args.qs, args.n)
    if args.format == "csv":
        _write_or_print(rows_to_csv(rows), args.out)
    else:
        _write_or_print(rows_to_text(rows) + "\n", args.out)
    flagged = [r for r in rows if r["matches_paper"] == "NO"]
    for r in flagged:
        print(f"note: q={r['q']} {r['ring']} reference factors disagree by norm", file=sys.stderr)
    return 0


def cmd_complexity(args) -> int:
    lines = ["q," + ",".join(f"Cmax_{r},cost_{r}" for r in RINGS)]
    for row in complexity_table(args.qs, args.n):
        cells = [str(row.q)]
        for r in RINGS:
            cells += [str(row.cmax[r]), f"{row.complexity[r]:.6g}"]
        lines.append(",".join(cells))
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def cmd_crtcheck(args) -> int:
    primes = factorize_squarefree(args.q)
    ctx = build_crt_context(primes)
    t0 = time.perf_counter()
    elems = enumerate_residues(ctx.q).elements
    back = phi_combine_batch(phi_split_batch(elems, ctx), ctx)
    bad = np.flatnonzero(~np.all(back == elems, axis=1))
    dt = time.perf_counter() - t0
    print(f"q={ctx.q} primes={list(primes)} residues={len(elems)} failures={len(bad)} time={dt:.2f}s")
    if len(bad):
        print(f"first failure (doubled): {elems[bad[0]].tolist()}")
        return 1
    return 0


def cmd_build(args) -> int:
    code = load_code_spec(args.spec)
    print(json.dumps(code_summary(code), indent=2))
    return 0


def cmd_simulate(args) -> int:
    cfg = SimConfig.load(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    if args.no_timing:
        cfg.record_timing = False
    records = run_simulation(cfg)
    _write_or_print(records_to_csv(records), args.out)
    return 0


def cmd_bench(args) -> int:
    rows = run_benchmark(args.qs, args.n, args.trials, args.seed, args.repeats)
    _write_or_print(bench_to_csv(rows), args.out)
    for r in rows:
        print(
            f"q={r.q:<3} |C|={r.code_size:<7} mld={r.mld_mean_us:10.2f}us smd={r.smd_mean_us:8.2f}us "
            f"speedup={r.speedup:8.2f}",
            file=sys.stderr,
        )
    print(f"backend={_accel.backend_name()} speedup increasing: {speedup_increasing(rows)}", file=sys.stderr)
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{'all suites passed' if ok else 'FAILURES'} (backend={_accel.backend_name()})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hurwitz-pia", description="Multilevel lattice codes over Hurwitz integers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="irreducible factors of an odd prime")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--ring", choices=("hurwitz", "gaussian", "eisenstein", "all"), default="hurwitz")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("tables", help="factorization table with decoding cost per ring")
    p.add_argument("--qs", type=_int_list, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("complexity", help="largest level size and cost per ring")
    p.add_argument("--qs", type=_int_list, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("crtcheck", help="exhaustive split/combine roundtrip modulo q")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_crtcheck)

    p = sub.add_parser("build", help="build a code from a JSON code description")
    p.add_argument("--spec", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="AWGN word-error-rate sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-timing", action="store_true", help="leave mean_decode_us empty (byte-stable output)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="MLD versus SMD timing on rank-1 fixtures")
    p.add_argument("--qs", type=_int_list, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
