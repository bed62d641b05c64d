"""AWGN Monte Carlo harness and decoder timing benchmark."""

from __future__ import annotations

import csv
import gc
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Sequence

import numpy as np

from . import _accel
from .complexity import factorize_squarefree
from .construction import PiACode, code_from_dict, lattice_volume, random_codeword, rank_one_fixture
from .decoders import BARE_DECODERS, DECODERS

CSV_HEADER = (
    "decoder", "q", "n", "sigma", "nvnr_db", "trials", "errors",
    "wer", "wer_lo", "wer_hi", "mean_decode_us", "seed",
)
BENCH_HEADER = ("q", "code_size", "n", "trials", "mld_mean_us", "smd_mean_us", "speedup", "backend")
DECODER_NAMES = ("smd", "mld")


@dataclass
class SimConfig:
    code: dict
    sigmas: list[float]
    trials: int = 1000
    decoder: str = "both"
    seed: int = 0
    translate_box: int = 0
    workers: int = 1
    record_timing: bool = True

    def __post_init__(self) -> None:
        self.sigmas = [float(s) for s in self.sigmas]
        if not self.sigmas or any(not (s > 0 and math.isfinite(s)) for s in self.sigmas):
            raise ValueError("sigmas must be positive and finite")
        if int(self.trials) < 1:
            raise ValueError("trials must be >= 1")
        self.trials = int(self.trials)
        if self.decoder not in ("smd", "mld", "both"):
            raise ValueError("decoder must be smd, mld or both")
        if self.translate_box < 0 or self.workers < 1:
            raise ValueError("translate_box >= 0 and workers >= 1 required")

    @property
    def decoders(self) -> tuple[str, ...]:
        return DECODER_NAMES if self.decoder == "both" else (self.decoder,)

    @classmethod
    def from_dict(cls, doc: dict, base: Path | None = None) -> "SimConfig":
        doc = dict(doc)
        code = doc.pop("code", None)
        if code is None:
            code = {k: doc.pop(k) for k in ("primes", "n", "levels", "factors") if k in doc}
        elif isinstance(code, str):
            path = Path(code)
            if base is not None and not path.is_absolute():
                path = base / path
            code = json.loads(path.read_text())
        if not code:
            raise ValueError("configuration has no code description")
        known = {"sigmas", "trials", "decoder", "seed", "translate_box", "workers", "record_timing"}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown configuration keys: {sorted(extra)}")
        return cls(code=code, **doc)

    @classmethod
    def load(cls, path: str | Path) -> "SimConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base=path.parent)


@dataclass
class SimRecord:
    decoder: str
    q: int
    n: int
    sigma: float
    nvnr_db: float
    trials: int
    errors: int
    wer: float
    wer_lo: float
    wer_hi: float
    mean_decode_us: float | None
    seed: int


def nvnr_db(volume: float, n: int, sigma: float) -> float:
    """Volume-to-noise ratio in dB relative to ``2*pi*e``; ``n`` counts quaternion symbols."""
    return 10.0 * math.log10(volume ** (2.0 / (4 * n)) / (2 * math.pi * math.e * sigma * sigma))


def sigma_for_nvnr(volume: float, n: int, db: float) -> float:
    return math.sqrt(volume ** (2.0 / (4 * n)) / (2 * math.pi * math.e * 10 ** (db / 10.0)))


_Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = errors / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


def trial_rng(seed: int, sigma_idx: int, trial_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(sigma_idx), int(trial_idx)]))


@dataclass
class TrialOutcome:
    transmitted: np.ndarray
    received: np.ndarray
    errors: dict[str, bool] = field(default_factory=dict)
    elapsed: dict[str, float] = field(default_factory=dict)


def awgn_trial(
    code: PiACode,
    sigma: float,
    rng: np.random.Generator,
    decoders: Sequence[str] = DECODER_NAMES,
    translate_box: int = 0,
) -> TrialOutcome:
    """Send one random lattice point through the channel and decode it."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = random_codeword(code, rng, translate_box)
    y = x / 2.0 + rng.normal(0.0, sigma, size=x.shape)
    out = TrialOutcome(x, y)
    for name in decoders:
        res = DECODERS[name](y, code)
        out.errors[name] = not np.array_equal(res.point, x)
        out.elapsed[name] = res.elapsed
    return out


def _run_chunk(args) -> tuple[dict[str, int], dict[str, float]]:
    code, sigma, sigma_idx, seed, lo, hi, decoders, box = args
    errs = {d: 0 for d in decoders}
    secs = {d: 0.0 for d in decoders}
    for t in range(lo, hi):
        o = awgn_trial(code, sigma, trial_rng(seed, sigma_idx, t), decoders, box)
        for d in decoders:
            errs[d] += o.errors[d]
            secs[d] += o.elapsed[d]
    return errs, secs


def _chunks(trials: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, trials))
    edges = np.linspace(0, trials, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _warm(code: PiACode, decoders: Sequence[str]) -> None:
    y = np.zeros((code.n, 4))
    for d in decoders:
        DECODERS[d](y, code)


def run_simulation(config: SimConfig, code: PiACode | None = None) -> list[SimRecord]:
    """Sweep the noise levels; records are sorted by decoder then sigma."""
    code = code_from_dict(config.code) if code is None else code
    vol = lattice_volume(code)
    decs = config.decoders
    _warm(code, decs)
    totals: dict[tuple[str, int], tuple[int, float]] = {}
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for si, sigma in enumerate(config.sigmas):
            jobs = [
                (code, sigma, si, config.seed, lo, hi, decs, config.translate_box)
                for lo, hi in _chunks(config.trials, config.workers)
            ]
            results = list(pool.map(_run_chunk, jobs)) if pool else [_run_chunk(j) for j in jobs]
            for d in decs:
                totals[(d, si)] = (sum(r[0][d] for r in results), sum(r[1][d] for r in results))
    finally:
        if pool:
            pool.shutdown()
    records = []
    for d in decs:
        for si, sigma in enumerate(config.sigmas):
            errs, secs = totals[(d, si)]
            lo, hi = wilson_interval(errs, config.trials)
            records.append(
                SimRecord(
                    d, code.q, code.n, sigma, nvnr_db(vol, code.n, sigma), config.trials, errs,
                    errs / config.trials, lo, hi,
                    secs / config.trials * 1e6 if config.record_timing else None,
                    config.seed,
                )
            )
    records.sort(key=lambda r: (r.decoder, r.sigma))
    return records


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Sequence[SimRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        row = asdict(r)
        w.writerow([_fmt(row[c]) for c in CSV_HEADER])
    return buf.getvalue()


def read_records_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------------------
# timing benchmark


@dataclass
class BenchRow:
    q: int
    code_size: int
    n: int
    trials: int
    mld_mean_us: float
    smd_mean_us: float
    speedup: float
    backend: str
    mismatches: int = 0


def _time_calls(fns, ys: Sequence[np.ndarray], code: PiACode, repeats: int) -> list[float]:
    """Per decoder, the mean over received words of the fastest timed decode.

    Rounds alternate between the decoders so that a slow stretch of machine
    time does not hit every repeat of a single decoder.
    """
    best = np.full((len(fns), len(ys)), math.inf)
    clock = time.perf_counter
    gc_was_on = gc.isenabled()
    gc.disable()  # as timeit does
    try:
        for _ in range(repeats):
            for k, fn in enumerate(fns):
                row = best[k]
                for i, y in enumerate(ys):
                    t0 = clock()
                    fn(y, code)
                    dt = clock() - t0
                    if dt < row[i]:
                        row[i] = dt
    finally:
        if gc_was_on:
            gc.enable()
    return [float(v) for v in best.mean(axis=1)]


def benchmark_code(code: PiACode, trials: int, seed: int = 0, sigma: float = 0.05, repeats: int = 3) -> BenchRow:
    """Mean per-decode time of the bare decoders on ``trials`` noisy codewords.

    Each received word is decoded ``repeats`` times per decoder and its
    fastest time kept, which filters out scheduler noise on a shared CPU.
    """
    rng = np.random.default_rng(seed)
    xs = [random_codeword(code, rng) for _ in range(trials)]
    ys = [np.ascontiguousarray(x / 2.0 + rng.normal(0.0, sigma, size=x.shape)) for x in xs]
    mismatches = 0
    for y in ys:  # warm-up pass that doubles as a consistency check
        _, p_mld = BARE_DECODERS["mld"](y, code)
        _, p_smd, _ = BARE_DECODERS["smd"](y, code)
        mismatches += not np.array_equal(p_mld, p_smd)
    t_mld, t_smd = _time_calls([BARE_DECODERS["mld"], BARE_DECODERS["smd"]], ys, code, repeats)
    return BenchRow(
        code.q, code.size, code.n, trials, t_mld * 1e6, t_smd * 1e6, t_mld / t_smd,
        _accel.backend_name(), mismatches,
    )


def run_benchmark(qs: Sequence[int], n: int = 2, trials: int = 200, seed: int = 0, repeats: int = 3) -> list[BenchRow]:
    """Rank-1 fixture per ``q``; rows carry MLD and SMD mean times and their ratio."""
    rows = []
    for q in qs:
        code = rank_one_fixture(factorize_squarefree(q), n)
        rows.append(benchmark_code(code, trials, seed, repeats=repeats))
    return rows


def bench_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for r in rows:
        w.writerow([r.q, r.code_size, r.n, r.trials, f"{r.mld_mean_us:.3f}", f"{r.smd_mean_us:.3f}", f"{r.speedup:.3f}", r.backend])
    return buf.getvalue()


def speedup_increasing(rows: Sequence[BenchRow]) -> bool:
    s = [r.speedup for r in rows]
    return all(b > a for a, b in zip(s, s[1:]))
