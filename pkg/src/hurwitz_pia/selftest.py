"""Exhaustive invariant suites with a per-suite verdict.

The factor search and the exact quantizer are injectable so that deliberately
broken variants can be fed in to confirm that each suite notices.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .complexity import REFERENCE_QS, complexity_table
from .construction import LevelCodeSpec, build_code, random_codeword, rank_one_fixture
from .crt import (
    CrtContext,
    IrreducibleFactor,
    bezout_zeta,
    find_irreducible,
    hurwitz_box,
    is_odd_prime,
    lex_sort_rows,
)
from .decoders import mld_decode, smd_decode

FactorFinder = Callable[[int], IrreducibleFactor]
Quantizer = Callable[[np.ndarray, int], np.ndarray]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    witness: object = None
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        s = f"{verdict}  {self.name:<20} checked={self.checked:<8} {self.seconds:6.2f}s"
        if not self.passed:
            s += f"  {self.detail}  witness={self.witness}"
        return s


class _Violation(Exception):
    def __init__(self, detail: str, witness) -> None:
        super().__init__(detail)
        self.detail = detail
        self.witness = witness


# ---------------------------------------------------------------------------
# helpers parameterised by the injected quantizer


def _reduce_q(d: np.ndarray, q: int, quantize: Quantizer) -> np.ndarray:
    return d - q * quantize(d, 2 * q)


def _reduce_left(d: np.ndarray, pi: np.ndarray, quantize: Quantizer) -> np.ndarray:
    n = int((pi * pi).sum()) // 4
    h = quantize(kernels.hamilton_raw(d, kernels.conj_doubled(pi)), 4 * n)
    return d - kernels.hamilton_doubled(h, pi)


def _combine(r1, r2, f: IrreducibleFactor, coeff: int) -> np.ndarray:
    pi = np.array(f.pi.doubled, dtype=np.int64)
    pbar = kernels.conj_doubled(pi)
    acc = kernels.hamilton_doubled(r1, pbar) + kernels.hamilton_doubled(r2, pi)
    return coeff * acc


def _context(primes, find_factor: FactorFinder) -> CrtContext:
    nu, zeta = bezout_zeta(sorted(primes))
    return CrtContext(tuple(find_factor(p) for p in sorted(primes)), nu, zeta)


def _first_bad_row(ok: np.ndarray, rows: np.ndarray):
    bad = np.flatnonzero(~ok)
    return None if len(bad) == 0 else rows[bad[0]].tolist()


# ---------------------------------------------------------------------------
# suites


def suite_gamma(find_factor: FactorFinder, quantize: Quantizer) -> int:
    """pi * conj(pi) = p and gamma * (pi + conj(pi)) = 1 modulo pH."""
    checked = 0
    for p in (p for p in range(3, 51) if is_odd_prime(p)):
        f = find_factor(p)
        prod = kernels.hamilton_doubled(np.array(f.pi.doubled), np.array(f.pi_bar.doubled))
        if prod.tolist() != [2 * p, 0, 0, 0]:
            raise _Violation("pi * conj(pi) != p", p)
        s = f.gamma * (np.array(f.pi.doubled) + np.array(f.pi_bar.doubled)) - np.array([2, 0, 0, 0])
        if np.any(_reduce_q(s, p, quantize) != 0):
            raise _Violation("gamma * (pi + conj(pi)) != 1 mod pH", p)
        checked += 1
    return checked


def suite_crt_roundtrip(find_factor: FactorFinder, quantize: Quantizer) -> int:
    checked = 0
    for primes in ([3], [5], [7], [3, 5], [3, 7]):
        ctx = _context(primes, find_factor)
        q = ctx.q
        box = _reduce_q(hurwitz_box(0, 2 * q), q, quantize)
        acc = np.zeros_like(box)
        for j, f in enumerate(ctx.levels):
            pi = np.array(f.pi.doubled, dtype=np.int64)
            r1 = _reduce_left(box, pi, quantize)
            r2 = _reduce_left(box, kernels.conj_doubled(pi), quantize)
            acc = acc + _combine(r1, r2, f, ctx.coefficient(j) % q)
        back = _reduce_q(acc, q, quantize)
        ok = np.all(back == box, axis=1)
        if not ok.all():
            raise _Violation(f"combine(split(x)) != x for q={q}", {"q": q, "x": _first_bad_row(ok, box)})
        checked += len(box)
    return checked


def suite_residue_counts(find_factor: FactorFinder, quantize: Quantizer) -> int:
    checked = 0
    for p in (3, 5, 7, 11, 13):
        pi = np.array(find_factor(p).pi.doubled, dtype=np.int64)
        r = 4 * (int(np.sqrt(p)) + 1)
        got = len(np.unique(_reduce_left(hurwitz_box(-r, r + 1), pi, quantize), axis=0))
        if got != p * p:
            raise _Violation(f"|H/H*pi| = {got} != {p * p}", p)
        checked += 1
    for q in (3, 5):
        got = len(np.unique(_reduce_q(hurwitz_box(0, 4 * q), q, quantize), axis=0))
        if got != q ** 4:
            raise _Violation(f"|H/qH| = {got} != {q ** 4}", q)
        checked += 1
    return checked


def _tie_points() -> np.ndarray:
    # coordinates in {+-1/4, +-3/4} sit midway between an integer and a half-integer point
    vals = (-3, -1, 1, 3)
    return np.array(list(itertools.product(vals, repeat=4)), dtype=np.int64)  # numerators over 4


def suite_idempotence(find_factor: FactorFinder, quantize: Quantizer) -> int:
    """Reductions are idempotent and rounding commutes with Hurwitz translates."""
    checked = 0
    ties = _tie_points()
    shifts = hurwitz_box(-2, 3)
    base = quantize(ties, 4)
    for h in shifts:
        got = quantize(ties + 2 * h, 4)
        ok = np.all(got == base + h, axis=1)
        if not ok.all():
            raise _Violation("round(x + h) != round(x) + h", {"x/4": _first_bad_row(ok, ties), "h": h.tolist()})
        checked += len(ties)
    for q in (3, 5):
        pts = hurwitz_box(-2 * q, 2 * q + 1)
        once = _reduce_q(pts, q, quantize)
        ok = np.all(_reduce_q(once, q, quantize) == once, axis=1)
        if not ok.all():
            raise _Violation(f"mod {q}H not idempotent", _first_bad_row(ok, pts))
        checked += len(pts)
    for p in (3, 5, 7):
        pi = np.array(find_factor(p).pi.doubled, dtype=np.int64)
        pts = hurwitz_box(-3 * p, 3 * p + 1)
        once = _reduce_left(pts, pi, quantize)
        ok = np.all(_reduce_left(once, pi, quantize) == once, axis=1)
        if not ok.all():
            raise _Violation(f"mod H*pi not idempotent for p={p}", _first_bad_row(ok, pts))
        checked += len(pts)
    return checked


def suite_example_code(find_factor: FactorFinder, quantize: Quantizer) -> int:
    ctx = _context([3], find_factor)
    g1 = np.array([[[2, 0, 0, 0], [0, 0, 0, 0]]], dtype=np.int64)
    g2 = np.array([[[2, 0, 0, 0], [2, 0, 0, 0]]], dtype=np.int64)
    code = build_code(ctx, [LevelCodeSpec(0, 0, g1), LevelCodeSpec(0, 1, g2)])
    if code.size != 81 or code.level_sizes != [9, 9]:
        raise _Violation("unexpected code sizes", {"size": code.size, "levels": code.level_sizes})
    # left multiples of (1, -1-i-j) modulo 3H
    scalars = _reduce_q(hurwitz_box(0, 6), 3, quantize)
    gen2 = np.array([-2, -2, -2, 0], dtype=np.int64)
    span = np.stack([scalars, kernels.hamilton_doubled(scalars, gen2)], axis=1)
    span = _reduce_q(span, 3, quantize)
    span = lex_sort_rows(np.unique(span.reshape(-1, 8), axis=0))
    mine = lex_sort_rows(np.unique(code.combined.reshape(-1, 8), axis=0))
    if span.shape != mine.shape or not np.array_equal(span, mine):
        raise _Violation("code differs from the left span of (1, -1-i-j)", len(span))
    return code.size


def suite_decoder_zero_noise(find_factor: FactorFinder, quantize: Quantizer) -> int:
    code = rank_one_fixture([3, 5])
    rng = np.random.default_rng(2024)
    checked = 0
    for t in range(50):
        x = random_codeword(code, rng, translate_box=2)
        for dec in (smd_decode, mld_decode):
            if not np.array_equal(dec(x / 2.0, code).point, x):
                raise _Violation(f"{dec.__name__} missed a noiseless word", x.tolist())
            checked += 1
    return checked


def suite_cost_orderings(find_factor: FactorFinder, quantize: Quantizer) -> int:
    rows = complexity_table(REFERENCE_QS, 1)
    for r in rows:
        if not r.orderings_hold():
            raise _Violation("Hurwitz cost ordering violated", r.q)
    return len(rows)


SUITES: dict[str, Callable[[FactorFinder, Quantizer], int]] = {
    "gamma": suite_gamma,
    "crt_roundtrip": suite_crt_roundtrip,
    "residue_counts": suite_residue_counts,
    "idempotence": suite_idempotence,
    "example_code": suite_example_code,
    "decoder_zero_noise": suite_decoder_zero_noise,
    "cost_orderings": suite_cost_orderings,
}


def run_selftest(
    find_factor: FactorFinder = find_irreducible,
    quantize: Quantizer = kernels.quantize_rational,
    only: list[str] | None = None,
) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES.items():
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            n = fn(find_factor, quantize)
            results.append(SuiteResult(name, True, n, seconds=time.perf_counter() - t0))
        except _Violation as v:
            results.append(SuiteResult(name, False, 0, v.detail, v.witness, time.perf_counter() - t0))
    return results
