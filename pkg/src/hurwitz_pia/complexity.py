"""Cross-ring comparison of multilevel decoding cost.

A modulus ``q = p_1 ... p_r`` (distinct odd primes) is split into levels in one
of four rings.  The dominant decoding cost is driven by the largest level code,
``|C_max|``, and is reported as ``|C_max| * log2 |C_max|``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .crt import find_irreducible, is_odd_prime
from .quaternion import format_hurwitz, parse_hurwitz

RINGS = ("Z", "Gaussian", "Eisenstein", "Hurwitz")
RAMIFIED = {"Gaussian": 2, "Eisenstein": 3}


def factorize_squarefree(q: int) -> tuple[int, ...]:
    """Prime factors of an odd square-free ``q``, ascending."""
    if q < 3 or q % 2 == 0:
        raise ValueError(f"q={q} must be odd and >= 3")
    out, rest, d = [], q, 3
    while d * d <= rest:
        if rest % d == 0:
            rest //= d
            if rest % d == 0:
                raise ValueError(f"q={q} has the repeated factor {d}")
            out.append(d)
        d += 2
    if rest > 1:
        out.append(rest)
    return tuple(out)


def _check_primes(primes: Sequence[int]) -> tuple[int, ...]:
    ps = tuple(int(p) for p in primes)
    if not ps:
        raise ValueError("need at least one prime")
    for p in ps:
        if not is_odd_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    if len(set(ps)) != len(ps):
        raise ValueError("repeated prime factor")
    return tuple(sorted(ps))


@dataclass(frozen=True)
class SplitClass:
    ring: str
    p: int
    splits: bool

    @classmethod
    def of(cls, ring: str, p: int) -> "SplitClass":
        if ring not in RINGS:
            raise ValueError(f"unknown ring {ring!r}")
        if ring == "Z":
            s = False
        elif ring == "Hurwitz":
            s = p % 2 == 1
        elif ring == "Gaussian":
            s = p % 4 == 1
        else:
            s = p % 3 == 1
        return cls(ring, p, s)

    @property
    def label(self) -> str:
        return "splits" if self.splits else "non-splits"


def level_shapes(ring: str, p: int, n: int) -> list[tuple[int, int]]:
    """``(residue size, native length)`` for each level contributed by ``p``.

    ``n`` counts real dimensions in blocks of four.
    """
    native = {"Z": 4 * n, "Gaussian": 2 * n, "Eisenstein": 2 * n, "Hurwitz": n}[ring]
    if SplitClass.of(ring, p).splits:
        size = p * p if ring == "Hurwitz" else p
        return [(size, native), (size, native)]
    size = p if ring == "Z" else p * p
    return [(size, native)]


def max_level_cardinality(
    primes: Sequence[int],
    n: int,
    ring: str,
    ranks: Sequence[int] | None = None,
    native_length: int | None = None,
) -> int:
    """Largest level-code size.

    Default ranks are full.  Explicit ``ranks`` list one entry per level, primes
    ascending and the ``pi`` side before the conjugate side.  ``native_length``
    overrides the per-level code length measured in ring symbols.
    """
    ps = _check_primes(primes)
    if n < 1:
        raise ValueError("n must be >= 1")
    shapes = [s for p in ps for s in level_shapes(ring, p, n)]
    if native_length is not None:
        shapes = [(size, int(native_length)) for size, _ in shapes]
    if ranks is None:
        ranks = [length for _, length in shapes]
    if len(ranks) != len(shapes):
        raise ValueError(f"{ring} with primes {ps} has {len(shapes)} levels, got {len(ranks)} ranks")
    best = 0
    for (size, length), m in zip(shapes, ranks):
        if not 0 <= m <= length:
            raise ValueError(f"rank {m} outside [0, {length}]")
        best = max(best, size ** int(m))
    return best


def complexity_value(cmax: int) -> float:
    return cmax * math.log2(cmax) if cmax > 1 else 0.0


# ---------------------------------------------------------------------------
# factor searches


@dataclass(frozen=True)
class RingFactor:
    """``a + b*u`` with ``u`` = i (Gaussian) or omega (Eisenstein); or a bare prime."""

    ring: str
    a: int
    b: int

    def norm(self) -> int:
        if self.ring == "Gaussian":
            return self.a * self.a + self.b * self.b
        return self.a * self.a - self.a * self.b + self.b * self.b

    def conj(self) -> "RingFactor":
        if self.ring == "Gaussian":
            return RingFactor(self.ring, self.a, -self.b)
        # conj(omega) = -1 - omega
        return RingFactor(self.ring, self.a - self.b, -self.b)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sym = "i" if self.ring == "Gaussian" else "w"
        b = "" if abs(self.b) == 1 else str(abs(self.b))
        if self.a == 0:
            return f"{'-' if self.b < 0 else ''}{b}{sym}"
        return f"{self.a}{'-' if self.b < 0 else '+'}{b}{sym}"


def find_gaussian_factor(p: int) -> RingFactor | None:
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    if p % 4 != 1:
        return None
    for a in range(1, math.isqrt(p) + 1):
        b2 = p - a * a
        b = math.isqrt(b2)
        if b >= a and b * b == b2:
            return RingFactor("Gaussian", a, b)
    raise AssertionError(f"two-square search failed for p={p}")


def find_eisenstein_factor(p: int) -> RingFactor | None:
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    if p % 3 != 1:
        return None
    for a in range(1, math.isqrt(p) + 2):
        # b^2 - a b + a^2 - p = 0
        disc = 4 * p - 3 * a * a
        if disc < 0:
            break
        s = math.isqrt(disc)
        if s * s == disc and (a + s) % 2 == 0:
            b = (a + s) // 2
            if b >= a:
                return RingFactor("Eisenstein", a, b)
    raise AssertionError(f"norm-form search failed for p={p}")


# ---------------------------------------------------------------------------
# factor table

# Reference factorizations as published, one string per factor.
REFERENCE_FACTORS: dict[int, dict[str, list[str]]] = {
    3: {"Hurwitz": ["1+i+j", "1-i-j"]},
    5: {"Gaussian": ["1+2i", "1-2i"], "Hurwitz": ["1+2i", "1-2i"]},
    7: {"Eisenstein": ["1+3w", "-2-3w"], "Hurwitz": ["1+i+j+2k", "1-i-j-2k"]},
    11: {"Hurwitz": ["1+i+3j", "1-i-3j"]},
    13: {
        "Gaussian": ["2+3i", "2-3i"],
        "Eisenstein": ["1+4w", "-3-4w"],
        "Hurwitz": ["1+2i+2j+2k", "1-2i-2j-2k"],
    },
    15: {"Gaussian": ["3", "1+2i", "1-2i"], "Hurwitz": ["1+i+j", "1-i-j", "1+2i", "1-2i"]},
    17: {"Gaussian": ["1+4i", "1-4i"], "Hurwitz": ["1+4i", "1-4i"]},
    19: {"Eisenstein": ["2+5w", "-3-5w"], "Hurwitz": ["1+i+j+4k", "1-i-j-4k"]},
    21: {"Hurwitz": ["1+i+j", "1-i-j", "1+i+j+2k", "1-i-j-2k"]},
    23: {"Hurwitz": ["1+2i+2j+3k", "1-2i-2j-3k"]},
    29: {"Gaussian": ["2+5i", "2-5i"], "Hurwitz": ["2+3i+4j", "2-3i-4j"]},
    31: {"Eisenstein": ["1+6w", "-5-6w"], "Hurwitz": ["1+i+2j+5k", "1-i-2j-5k"]},
    33: {"Hurwitz": ["1+i+j", "1-i-j", "1+i+3j", "1-i-3j"]},
    35: {
        "Gaussian": ["7", "1+2i", "1-2i"],
        "Eisenstein": ["5", "1+3w", "-2-3w"],
        "Hurwitz": ["1+2i", "1-2i", "1+i+j+2k", "1-i-j-2k"],
    },
    37: {
        "Gaussian": ["1+6i", "1-6i"],
        "Eisenstein": ["3+7w", "-4-7w"],
        "Hurwitz": ["1+2i+4j+4k", "1-2i-4j-4k"],
    },
    39: {"Gaussian": ["3", "2+3i", "2-3i"], "Hurwitz": ["1+i+j", "1-i-j", "1+2i+2j+2k", "1-2i-2j-2k"]},
}
REFERENCE_QS = tuple(sorted(REFERENCE_FACTORS))


def reference_norm(ring: str, text: str) -> int:
    """Norm of a stored reference factor in its ring."""
    text = text.strip()
    if ring == "Hurwitz":
        return parse_hurwitz(text).norm()
    sym = "i" if ring == "Gaussian" else "w"
    if sym not in text:
        return int(text) ** 2
    body = text[: text.index(sym)]
    # split "a+b" / "a-b" / "b" at the last sign that is not leading
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut <= 0:
        a, bs = 0, body
    else:
        a, bs = int(body[:cut]), body[cut:]
    b = int(bs) if bs not in ("", "+", "-") else (-1 if bs == "-" else 1)
    return RingFactor(ring, a, b).norm()


@dataclass
class FactorRow:
    q: int
    ring: str
    factors: list[str]
    norms: list[int]
    reference: list[str] | None
    reference_norms: list[int] | None
    matches_reference: bool | None  # None when no reference entry exists

    @property
    def mismatch(self) -> bool:
        return self.matches_reference is False


def ring_available(ring: str, primes: Sequence[int]) -> bool:
    """A ring is listed when some prime factor splits and none ramifies."""
    if ring == "Hurwitz":
        return True
    if ring == "Z":
        return False
    if RAMIFIED[ring] in primes:
        return False
    return any(SplitClass.of(ring, p).splits for p in primes)


def ring_factors(ring: str, primes: Sequence[int]) -> tuple[list[str], list[int]]:
    names: list[str] = []
    norms: list[int] = []
    for p in primes:
        if ring == "Hurwitz":
            pi = find_irreducible(p).pi
            pair = [pi, pi.conj()]
            for x in pair:
                assert x.norm() == p
            names += [format_hurwitz(x) for x in pair]
            norms += [p, p]
            continue
        f = find_gaussian_factor(p) if ring == "Gaussian" else find_eisenstein_factor(p)
        if f is None:
            names.append(str(p))
            norms.append(p * p)
        else:
            pair = [f, f.conj()]
            for x in pair:
                assert x.norm() == p
            names += [str(x) for x in pair]
            norms += [p, p]
    return names, norms


def factor_table(qs: Iterable[int]) -> list[FactorRow]:
    rows = []
    for q in qs:
        primes = factorize_squarefree(q)
        ref_q = REFERENCE_FACTORS.get(q)
        for ring in ("Gaussian", "Eisenstein", "Hurwitz"):
            listed = ref_q is not None and ring in ref_q
            if not ring_available(ring, primes):
                if listed:
                    rows.append(FactorRow(q, ring, [], [], ref_q[ring], [reference_norm(ring, t) for t in ref_q[ring]], False))
                continue
            names, norms = ring_factors(ring, primes)
            ref = ref_q.get(ring) if ref_q else None
            if ref is None:
                match = None if ref_q is None else False
                rows.append(FactorRow(q, ring, names, norms, None, None, match))
                continue
            ref_norms = [reference_norm(ring, t) for t in ref]
            rows.append(FactorRow(q, ring, names, norms, ref, ref_norms, sorted(ref_norms) == sorted(norms)))
    return rows


# ---------------------------------------------------------------------------
# complexity table


@dataclass
class ComplexityRow:
    q: int
    n: int
    cmax: dict[str, int] = field(default_factory=dict)
    complexity: dict[str, float] = field(default_factory=dict)
    available: dict[str, bool] = field(default_factory=dict)

    def orderings_hold(self) -> bool:
        h = self.complexity["Hurwitz"]
        return h < self.complexity["Z"] and h <= self.complexity["Gaussian"] and h <= self.complexity["Eisenstein"]


def complexity_row(q: int, n: int) -> ComplexityRow:
    primes = factorize_squarefree(q)
    row = ComplexityRow(q, n)
    for ring in RINGS:
        c = max_level_cardinality(primes, n, ring)
        row.cmax[ring] = c
        row.complexity[ring] = complexity_value(c)
        row.available[ring] = all(SplitClass.of(ring, p).splits for p in primes)
    if not row.orderings_hold():
        raise AssertionError(f"cost ordering violated at q={q}: {row.cmax}")
    return row


def complexity_table(qs: Iterable[int], n: int = 1) -> list[ComplexityRow]:
    return [complexity_row(q, n) for q in qs]


def equality_report(row: ComplexityRow, ring: str) -> tuple[bool, bool]:
    """``(costs equal, largest prime splits in ring)`` for one row."""
    primes = factorize_squarefree(row.q)
    return row.cmax["Hurwitz"] == row.cmax[ring], SplitClass.of(ring, max(primes)).splits


# ---------------------------------------------------------------------------
# output

CSV_COLUMNS = ("q", "ring", "factors", "norms", "Cmax", "complexity", "matches_paper")


def combined_rows(qs: Sequence[int], n: int = 1) -> list[dict]:
    fac = {(r.q, r.ring): r for r in factor_table(qs)}
    out = []
    for crow in complexity_table(qs, n):
        for ring in RINGS:
            fr = fac.get((crow.q, ring))
            if ring == "Z":
                primes = factorize_squarefree(crow.q)
                factors, norms, match = [str(p) for p in primes], [p for p in primes], None
            elif fr is None:
                continue
            else:
                factors, norms, match = fr.factors, fr.norms, fr.matches_reference
            out.append(
                {
                    "q": crow.q,
                    "ring": ring,
                    "factors": "*".join(f"({f})" for f in factors),
                    "norms": " ".join(str(v) for v in norms),
                    "Cmax": crow.cmax[ring],
                    "complexity": f"{crow.complexity[ring]:.6g}",
                    "matches_paper": "" if match is None else ("yes" if match else "NO"),
                }
            )
    return out


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def rows_to_text(rows: Sequence[dict]) -> str:
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) if rows else len(c) for c in CSV_COLUMNS}
    lines = ["  ".join(c.ljust(widths[c]) for c in CSV_COLUMNS)]
    for r in rows:
        lines.append("  ".join(str(r[c]).ljust(widths[c]) for c in CSV_COLUMNS))
    return "\n".join(lines)
