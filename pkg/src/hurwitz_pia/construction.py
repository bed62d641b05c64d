"""Multilevel codes over Hurwitz residues glued by the CRT, and their lattices.

A level code lives in ``(H/H*m)^n`` where ``m`` is ``pi_j`` or ``conj(pi_j)``.
Generators are stored as ``m`` rows of length ``n``; a message ``u`` encodes
to ``sum_l u_l * g_l`` (message scalars on the left).  The lattice of a code
``C`` is ``C + qH^n``.

Vectors of Hurwitz integers are int64 arrays of shape ``(n, 4)`` holding
doubled coordinates.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .crt import (
    CrtContext,
    ResidueSystem,
    build_crt_context,
    enumerate_residues,
    level_contribution_batch,
    reduce_left_batch,
    reduce_two_sided_batch,
)
from .quaternion import HurwitzInt

SIDES = ("pi", "pibar")


@dataclass(frozen=True, eq=False)
class LevelCodeSpec:
    level: int
    side: int  # 0 -> H*pi_j, 1 -> H*conj(pi_j)
    generator: np.ndarray = field(repr=False)  # (m, n, 4) doubled

    def __post_init__(self) -> None:
        g = np.asarray(self.generator, dtype=np.int64)
        if g.ndim != 3 or g.shape[-1] != 4:
            raise ValueError("generator must have shape (m, n, 4)")
        if g.shape[0] > g.shape[1]:
            raise ValueError(f"rank {g.shape[0]} exceeds block length {g.shape[1]}")
        if side_name(self.side) is None:
            raise ValueError("side must be 0 (pi) or 1 (pibar)")
        object.__setattr__(self, "generator", g)

    @property
    def rank(self) -> int:
        return self.generator.shape[0]

    @property
    def n(self) -> int:
        return self.generator.shape[1]


def side_name(side: int) -> str | None:
    return SIDES[side] if side in (0, 1) else None


def side_modulus(ctx: CrtContext, level: int, side: int) -> HurwitzInt:
    f = ctx.levels[level]
    return f.pi if side == 0 else f.pi_bar


def enumerate_level_code(
    spec: LevelCodeSpec, ctx: CrtContext, residues: ResidueSystem | None = None
) -> np.ndarray:
    """All codewords of a level code as canonical ``(M, n, 4)`` arrays, lex sorted."""
    mod = side_modulus(ctx, spec.level, spec.side)
    if residues is None:
        residues = enumerate_residues(mod)
    gen = reduce_left_batch(spec.generator, mod)
    m, n = spec.rank, spec.n
    if m == 0 or not gen.any():
        return np.zeros((1, n, 4), dtype=np.int64)
    r = residues.elements
    idx = np.array(list(itertools.product(range(len(r)), repeat=m)), dtype=np.int64)
    acc = np.zeros((len(idx), n, 4), dtype=np.int64)
    for l in range(m):
        u = r[idx[:, l]][:, None, :]
        acc += kernels.hamilton_doubled(u, gen[l][None, :, :])
    words = reduce_left_batch(acc, mod)
    return unique_vectors(words)


def unique_vectors(words: np.ndarray) -> np.ndarray:
    flat = words.reshape(len(words), -1)
    flat = np.unique(flat, axis=0)
    order = np.lexsort(flat.T[::-1])
    return flat[order].reshape(-1, *words.shape[1:])


@dataclass(eq=False)
class PiACode:
    ctx: CrtContext
    specs: tuple[LevelCodeSpec, ...]
    n: int
    level_codebooks: tuple[np.ndarray, ...] = field(repr=False)
    combined: np.ndarray = field(repr=False)  # (|C|, n, 4), lex sorted
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def size(self) -> int:
        return len(self.combined)

    @property
    def level_sizes(self) -> list[int]:
        return [len(c) for c in self.level_codebooks]

    @cached_property
    def _lookup(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.combined)}

    def index_of(self, canonical: np.ndarray) -> int | None:
        return self._lookup.get(np.ascontiguousarray(canonical, dtype=np.int64).tobytes())

    def level_contributions(self) -> list[np.ndarray]:
        if "contrib" not in self.cache:
            self.cache["contrib"] = [
                level_contribution_batch(cb, self.ctx, s) for s, cb in enumerate(self.level_codebooks)
            ]
        return self.cache["contrib"]


def build_code(ctx: CrtContext, specs: Sequence[LevelCodeSpec]) -> PiACode:
    """Enumerate every level code and glue them with the CRT combiner."""
    if len(specs) != 2 * ctx.k:
        raise ValueError(f"need {2 * ctx.k} level specs, got {len(specs)}")
    ns = {s.n for s in specs}
    if len(ns) != 1:
        raise ValueError(f"level specs disagree on block length: {sorted(ns)}")
    n = ns.pop()
    ordered = sorted(specs, key=lambda s: (s.level, s.side))
    for pos, s in enumerate(ordered):
        if (s.level, s.side) != divmod(pos, 2):
            raise ValueError("specs must cover every (level, side) exactly once")
    books = tuple(enumerate_level_code(s, ctx) for s in ordered)
    q = ctx.q
    acc = np.zeros((1, n, 4), dtype=np.int64)
    for side, book in enumerate(books):
        contrib = level_contribution_batch(book, ctx, side)
        acc = (acc[:, None] + contrib[None, :]).reshape(-1, n, 4)
        acc = reduce_two_sided_batch(acc, q)
    combined = unique_vectors(acc)
    expected = math.prod(len(b) for b in books)
    if len(combined) != expected:
        raise AssertionError(f"CRT combine not injective: {len(combined)} != {expected}")
    return PiACode(ctx, tuple(ordered), n, books, combined)


# ---------------------------------------------------------------------------
# lattice predicates and metrics


def as_vector(x) -> np.ndarray:
    """Accept an (n, 4) doubled array or a sequence of HurwitzInt."""
    if isinstance(x, np.ndarray):
        arr = x.astype(np.int64, copy=False)
    else:
        arr = np.array([h.doubled if isinstance(h, HurwitzInt) else h for h in x], dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError("lattice vectors have shape (n, 4)")
    if not kernels.hurwitz_parity_ok(arr).all():
        raise ValueError("vector has a non-Hurwitz coordinate")
    return arr


def embed(x: np.ndarray) -> np.ndarray:
    """Real 4n-vector of a doubled Hurwitz vector."""
    return np.asarray(x, dtype=np.float64).reshape(-1) / 2.0


def canonical(x: np.ndarray, q: int) -> np.ndarray:
    return reduce_two_sided_batch(x, q)


def is_lattice_member(x, code: PiACode) -> bool:
    v = as_vector(x)
    if v.shape[0] != code.n:
        raise ValueError("block length mismatch")
    return code.index_of(canonical(v, code.q)) is not None


def lattice_volume_exact(code: PiACode) -> Fraction:
    return Fraction(code.q ** 4, 2) ** code.n / code.size


def lattice_volume(code: PiACode) -> float:
    return float(lattice_volume_exact(code))


@dataclass(frozen=True)
class MinDistance:
    value: float
    norm_sq: Fraction
    certified: bool


def min_distance_estimate(code: PiACode, radius_bound: float | None = None) -> MinDistance:
    """Minimum nonzero lattice norm.

    Canonical codewords are componentwise nearest to the origin inside their
    coset of ``qH^n``, so the shortest vector of each nonzero coset is the
    canonical word itself; the zero coset contributes ``q``.  Only candidates
    within ``radius_bound`` are admitted; the answer is certified when the
    minimum lies inside that radius.
    """
    if radius_bound is not None and radius_bound < 1:
        raise ValueError("radius bound must be >= 1")
    q = code.q
    sq = (code.combined.astype(np.int64) ** 2).sum(axis=(1, 2))  # 4 * norm^2
    nonzero = sq[sq > 0]
    best4 = 4 * q * q
    if len(nonzero):
        best4 = min(best4, int(nonzero.min()))
    norm_sq = Fraction(best4, 4)
    value = math.sqrt(norm_sq)
    if radius_bound is None:
        return MinDistance(value, norm_sq, True)
    if value <= radius_bound:
        return MinDistance(value, norm_sq, True)
    return MinDistance(float(radius_bound), Fraction(radius_bound) ** 2, False)


# ---------------------------------------------------------------------------
# encoding


def _level_residue_systems(code: PiACode) -> list[ResidueSystem]:
    if "residues" not in code.cache:
        code.cache["residues"] = [
            enumerate_residues(side_modulus(code.ctx, s.level, s.side)) for s in code.specs
        ]
    return code.cache["residues"]


def encode(code: PiACode, messages: Sequence[Sequence[int]]) -> np.ndarray:
    """Canonical codeword for per-level message ordinals.

    ``messages[s]`` holds ``rank_s`` indices into the residue system of side
    ``s`` (sides ordered pi_1, pibar_1, pi_2, ...).
    """
    if len(messages) != len(code.specs):
        raise ValueError("one message tuple per level side")
    systems = _level_residue_systems(code)
    acc = np.zeros((code.n, 4), dtype=np.int64)
    for s, (spec, msg, rs) in enumerate(zip(code.specs, messages, systems)):
        if len(msg) != spec.rank:
            raise ValueError(f"level side {s} expects {spec.rank} symbols")
        mod = side_modulus(code.ctx, spec.level, spec.side)
        word = np.zeros((code.n, 4), dtype=np.int64)
        for l, u in enumerate(msg):
            word += kernels.hamilton_doubled(rs.elements[int(u)][None, :], spec.generator[l])
        word = reduce_left_batch(word, mod)
        acc += level_contribution_batch(word, code.ctx, s)
    return canonical(acc, code.q)


def random_hurwitz(rng: np.random.Generator, shape: tuple[int, ...], box: int) -> np.ndarray:
    """Random Hurwitz points (doubled) with coordinates in [-box, box]."""
    parity = rng.integers(0, 2, size=shape[:-1] + (1,))
    half = rng.integers(-box, box + 1 - parity, size=shape)
    return (2 * half + parity).astype(np.int64)


def random_codeword(code: PiACode, rng: np.random.Generator | int, translate_box: int = 0) -> np.ndarray:
    """Uniform codeword (plus an optional random ``qH^n`` translate)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    systems = _level_residue_systems(code)
    messages = [rng.integers(0, len(rs), size=spec.rank) for spec, rs in zip(code.specs, systems)]
    x = encode(code, messages)
    if translate_box > 0:
        x = x + code.q * random_hurwitz(rng, x.shape, translate_box)
    return x


# ---------------------------------------------------------------------------
# code description documents


def spec_from_dict(doc: dict) -> tuple[CrtContext, list[LevelCodeSpec]]:
    primes = [int(p) for p in doc["primes"]]
    n = int(doc["n"])
    factors = None
    if doc.get("factors"):
        factors = {int(p): HurwitzInt.from_doubled(v) for p, v in doc["factors"].items()}
    ctx = build_crt_context(primes, factors)
    order = {p: j for j, p in enumerate(ctx.primes)}
    specs = []
    seen = set()
    for lv in doc["levels"]:
        p = int(lv["prime"])
        if p not in order:
            raise ValueError(f"level prime {p} not among {primes}")
        side = SIDES.index(lv["side"])
        key = (order[p], side)
        if key in seen:
            raise ValueError(f"duplicate level ({p}, {lv['side']})")
        seen.add(key)
        gen = np.array(lv["generator"], dtype=np.int64)
        if gen.size == 0:
            gen = gen.reshape(0, n, 4)
        if gen.shape[1:] != (n, 4):
            raise ValueError(f"generator for ({p}, {lv['side']}) must have rows of {n} quadruples")
        specs.append(LevelCodeSpec(order[p], side, gen))
    if len(specs) != 2 * ctx.k:
        raise ValueError(f"expected {2 * ctx.k} levels, got {len(specs)}")
    return ctx, specs


def load_code_spec(path: str | Path) -> PiACode:
    doc = json.loads(Path(path).read_text())
    return build_code(*spec_from_dict(doc))


def code_from_dict(doc: dict) -> PiACode:
    return build_code(*spec_from_dict(doc))


def rank_one_fixture(q_primes: Sequence[int], n: int = 2) -> PiACode:
    """Every level side uses the all-ones rank-1 generator."""
    ctx = build_crt_context(q_primes)
    one = np.zeros((1, n, 4), dtype=np.int64)
    one[0, :, 0] = 2
    specs = [LevelCodeSpec(j, s, one) for j in range(ctx.k) for s in (0, 1)]
    return build_code(ctx, specs)


def code_summary(code: PiACode) -> dict:
    dm = min_distance_estimate(code)
    return {
        "q": code.q,
        "n": code.n,
        "primes": list(code.ctx.primes),
        "code_size": code.size,
        "level_sizes": code.level_sizes,
        "volume": lattice_volume(code),
        "volume_exact": str(lattice_volume_exact(code)),
        "d_min": dm.value,
        "d_min_sq": str(dm.norm_sq),
        "d_min_certified": dm.certified,
    }
