"""Prime splitting in the Hurwitz order and the CRT maps built on it.

For an odd prime p with an irreducible pi of norm p,

    H/pH  ->  H/H*pi x H/H*conj(pi),     a |-> (a mod H*pi, a mod H*conj(pi))

is inverted by ``gamma * (r1*conj(pi) + r2*pi) mod pH`` where ``gamma`` inverts
``2 Re(pi)`` modulo p.  Coefficients always multiply from the left; that is
the only form that is well defined on cosets of left ideals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .quaternion import HurwitzInt, mod_left_ideal, mod_two_sided


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


@dataclass(frozen=True)
class IrreducibleFactor:
    p: int
    pi: HurwitzInt
    gamma: int

    def __post_init__(self) -> None:
        if self.pi.norm() != self.p:
            raise ValueError(f"Nrm({self.pi}) = {self.pi.norm()} != {self.p}")
        if not 1 <= self.gamma < self.p:
            raise ValueError("gamma must lie in [1, p-1]")

    @property
    def pi_bar(self) -> HurwitzInt:
        return self.pi.conj()

    @property
    def two_re(self) -> int:
        return self.pi.d0

    def gamma_ok(self) -> bool:
        return (self.gamma * self.two_re - 1) % self.p == 0

    def to_dict(self) -> dict:
        return {"p": self.p, "pi": list(self.pi.doubled), "gamma": self.gamma}

    @classmethod
    def from_dict(cls, d: dict) -> "IrreducibleFactor":
        return cls(int(d["p"]), HurwitzInt.from_doubled(d["pi"]), int(d["gamma"]))


def find_irreducible(p: int) -> IrreducibleFactor:
    """Deterministic irreducible of norm ``p`` with ``Re(pi)`` in {1, 2}.

    Re = 1 is preferred; within a real part the imaginary doubled triple is
    scanned in descending lexicographic order, so p = 3 yields 1+i+j.
    """
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    bound = 2 * (math.isqrt(p) + 1)
    for re in (1, 2):
        rest = 4 * (p - re * re)
        if rest < 0:
            continue
        for d1 in range(bound, -bound - 1, -2):
            r1 = rest - d1 * d1
            if r1 < 0:
                continue
            for d2 in range(bound, -bound - 1, -2):
                r2 = r1 - d2 * d2
                if r2 < 0:
                    continue
                d3 = math.isqrt(r2)
                if d3 * d3 == r2 and d3 % 2 == 0:
                    pi = HurwitzInt(2 * re, d1, d2, d3)
                    return IrreducibleFactor(p, pi, pow(2 * re, -1, p))
    raise AssertionError(f"no irreducible with Re in {{1, 2}} found for p={p}")


# ---------------------------------------------------------------------------
# single prime


def psi_split(a: HurwitzInt, f: IrreducibleFactor) -> tuple[HurwitzInt, HurwitzInt]:
    return mod_left_ideal(a, f.pi), mod_left_ideal(a, f.pi_bar)


def psi_combine(r1: HurwitzInt, r2: HurwitzInt, f: IrreducibleFactor) -> HurwitzInt:
    return mod_two_sided(f.gamma * (r1 * f.pi_bar + r2 * f.pi), f.p)


# ---------------------------------------------------------------------------
# several primes


@dataclass(frozen=True)
class CrtContext:
    levels: tuple[IrreducibleFactor, ...]
    nu: tuple[int, ...]
    zeta: tuple[int, ...]

    def __post_init__(self) -> None:
        ps = self.primes
        if len(set(ps)) != len(ps) or any(p % 2 == 0 for p in ps):
            raise ValueError("levels must carry distinct odd primes")
        if sum(n * z for n, z in zip(self.nu, self.zeta)) != 1:
            raise ValueError("sum nu_j * zeta_j must equal 1")
        q = self.q
        if any(n != q // p for n, p in zip(self.nu, ps)):
            raise ValueError("nu_j must equal q / p_j")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(f.p for f in self.levels)

    @property
    def q(self) -> int:
        return math.prod(self.primes)

    @property
    def k(self) -> int:
        return len(self.levels)

    def coefficient(self, j: int) -> int:
        """Central multiplier nu_j * zeta_j * gamma_j of level ``j``."""
        return self.nu[j] * self.zeta[j] * self.levels[j].gamma

    def side_moduli(self) -> list[HurwitzInt]:
        """Generators of the 2k left ideals, in level order (pi_1, pibar_1, ...)."""
        out = []
        for f in self.levels:
            out.extend((f.pi, f.pi_bar))
        return out

    def to_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "levels": [f.to_dict() for f in self.levels],
            "nu": list(self.nu),
            "zeta": list(self.zeta),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CrtContext":
        levels = tuple(IrreducibleFactor.from_dict(x) for x in d["levels"])
        ctx = cls(levels, tuple(int(v) for v in d["nu"]), tuple(int(v) for v in d["zeta"]))
        if "primes" in d and list(ctx.primes) != [int(p) for p in d["primes"]]:
            raise ValueError("primes field disagrees with levels")
        return ctx


def bezout_zeta(primes: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    q = math.prod(primes)
    nu = tuple(q // p for p in primes)
    zeta = [pow(n % p, -1, p) for n, p in zip(nu[:-1], primes[:-1])]
    rest = 1 - sum(n * z for n, z in zip(nu, zeta))
    last, r = divmod(rest, nu[-1])
    assert r == 0
    zeta.append(last)
    return nu, tuple(zeta)


def build_crt_context(
    primes: Iterable[int], factors: dict[int, HurwitzInt] | None = None
) -> CrtContext:
    """CRT context for distinct odd primes, ordered ascending.

    ``factors`` optionally pins the irreducible used for a prime.
    """
    ps = [int(p) for p in primes]
    if not ps:
        raise ValueError("need at least one prime")
    if len(set(ps)) != len(ps):
        raise ValueError(f"repeated prime in {ps}")
    for p in ps:
        if not is_odd_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    ps.sort()
    levels = []
    for p in ps:
        if factors and p in factors:
            pi = factors[p]
            levels.append(IrreducibleFactor(p, pi, pow(pi.d0, -1, p)))
        else:
            levels.append(find_irreducible(p))
    nu, zeta = bezout_zeta(ps)
    return CrtContext(tuple(levels), nu, zeta)


def phi_split(a: HurwitzInt, ctx: CrtContext) -> list[HurwitzInt]:
    out = []
    for f in ctx.levels:
        out.extend(psi_split(a, f))
    return out


def phi_combine(residues: Sequence[HurwitzInt], ctx: CrtContext) -> HurwitzInt:
    if len(residues) != 2 * ctx.k:
        raise ValueError(f"expected {2 * ctx.k} residues, got {len(residues)}")
    acc = HurwitzInt.zero()
    for j, f in enumerate(ctx.levels):
        r1, r2 = residues[2 * j], residues[2 * j + 1]
        acc = acc + ctx.coefficient(j) * (r1 * f.pi_bar + r2 * f.pi)
    return mod_two_sided(acc, ctx.q)


# ---------------------------------------------------------------------------
# batch versions on doubled int64 arrays (..., 4)


def reduce_two_sided_batch(d: np.ndarray, q: int) -> np.ndarray:
    d = np.asarray(d, dtype=np.int64)
    return d - q * kernels.quantize_rational(d, 2 * q)


def reduce_left_batch(d: np.ndarray, pi: HurwitzInt) -> np.ndarray:
    d = np.asarray(d, dtype=np.int64)
    n = pi.norm()
    if n == 0:
        raise ZeroDivisionError("left ideal generated by zero")
    pbar = np.array(pi.conj().doubled, dtype=np.int64)
    h = kernels.quantize_rational(kernels.hamilton_raw(d, pbar), 4 * n)
    return d - kernels.hamilton_doubled(h, np.array(pi.doubled, dtype=np.int64))


def psi_split_batch(d: np.ndarray, f: IrreducibleFactor) -> tuple[np.ndarray, np.ndarray]:
    return reduce_left_batch(d, f.pi), reduce_left_batch(d, f.pi_bar)


def psi_combine_batch(r1: np.ndarray, r2: np.ndarray, f: IrreducibleFactor) -> np.ndarray:
    pi = np.array(f.pi.doubled, dtype=np.int64)
    pbar = np.array(f.pi_bar.doubled, dtype=np.int64)
    acc = kernels.hamilton_doubled(r1, pbar) + kernels.hamilton_doubled(r2, pi)
    return reduce_two_sided_batch(f.gamma * acc, f.p)


def phi_split_batch(d: np.ndarray, ctx: CrtContext) -> list[np.ndarray]:
    out = []
    for f in ctx.levels:
        out.extend(psi_split_batch(d, f))
    return out


def level_contribution_batch(r: np.ndarray, ctx: CrtContext, side: int) -> np.ndarray:
    """Exact ``nu*zeta*gamma * r * conj(modulus)`` for side index ``side`` (0..2k-1)."""
    j, s = divmod(side, 2)
    f = ctx.levels[j]
    right = f.pi_bar if s == 0 else f.pi
    prod = kernels.hamilton_doubled(r, np.array(right.doubled, dtype=np.int64))
    c = ctx.coefficient(j) % ctx.q
    return c * prod


def phi_combine_batch(residues: Sequence[np.ndarray], ctx: CrtContext) -> np.ndarray:
    if len(residues) != 2 * ctx.k:
        raise ValueError(f"expected {2 * ctx.k} residue arrays, got {len(residues)}")
    acc = None
    for side, r in enumerate(residues):
        term = level_contribution_batch(r, ctx, side)
        acc = term if acc is None else acc + term
    return reduce_two_sided_batch(acc, ctx.q)


# ---------------------------------------------------------------------------
# residue systems


@dataclass(frozen=True, eq=False)
class ResidueSystem:
    kind: str  # "two_sided" | "left"
    modulus: int | HurwitzInt
    elements: np.ndarray = field(repr=False)  # (count, 4) doubled, lexicographically sorted

    def __post_init__(self) -> None:
        index = {tuple(int(v) for v in row): i for i, row in enumerate(self.elements)}
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, a: HurwitzInt) -> int:
        return self._index[a.doubled]  # type: ignore[attr-defined]

    def element(self, i: int) -> HurwitzInt:
        return HurwitzInt.from_doubled(self.elements[i])

    def reduce(self, d: np.ndarray) -> np.ndarray:
        if self.kind == "two_sided":
            return reduce_two_sided_batch(d, self.modulus)  # type: ignore[arg-type]
        return reduce_left_batch(d, self.modulus)  # type: ignore[arg-type]

    def to_dict(self) -> dict:
        mod = self.modulus if self.kind == "two_sided" else list(self.modulus.doubled)  # type: ignore[union-attr]
        return {"kind": self.kind, "modulus": mod, "elements": self.elements.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ResidueSystem":
        mod = int(d["modulus"]) if d["kind"] == "two_sided" else HurwitzInt.from_doubled(d["modulus"])
        elems = np.array(d["elements"], dtype=np.int64).reshape(-1, 4)
        rs = cls(d["kind"], mod, elems)
        if not np.array_equal(rs.reduce(elems), elems):
            raise ValueError("residue list contains non-canonical entries")
        return rs


def lex_sort_rows(a: np.ndarray) -> np.ndarray:
    """Sort rows of a 2-D integer array lexicographically (first column major)."""
    if len(a) == 0:
        return a
    order = np.lexsort(a.T[::-1])
    return a[order]


def hurwitz_box(lo: int, hi: int) -> np.ndarray:
    """All doubled quadruples with entries in [lo, hi) sharing one parity."""
    out = []
    for parity in (0, 1):
        start = lo + ((parity - lo) % 2)
        axis = np.arange(start, hi, 2, dtype=np.int64)
        if len(axis) == 0:
            continue
        grid = np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1)
        out.append(grid.reshape(-1, 4))
    return np.concatenate(out) if out else np.empty((0, 4), dtype=np.int64)


def enumerate_residues(modulus: int | HurwitzInt) -> ResidueSystem:
    """Canonical residues modulo ``qH`` (int modulus) or ``H*pi`` (HurwitzInt)."""
    if isinstance(modulus, HurwitzInt):
        p = modulus.norm()
        if p == 0:
            raise ZeroDivisionError("left ideal generated by zero")
        r = 2 * math.isqrt(p)
        if r * r < 4 * p:
            r += 2
        r *= 2
        box = hurwitz_box(-r, r + 1)
        reduced = reduce_left_batch(box, modulus)
        expected = p * p
        kind = "left"
    else:
        q = int(modulus)
        if q < 1:
            raise ValueError("modulus must be positive")
        box = hurwitz_box(0, 2 * q)
        reduced = reduce_two_sided_batch(box, q)
        expected = q ** 4
        kind = "two_sided"
    elems = lex_sort_rows(np.unique(reduced, axis=0))
    if len(elems) != expected:
        raise AssertionError(f"found {len(elems)} residues, expected {expected}")
    return ResidueSystem(kind, modulus, elems)


# ---------------------------------------------------------------------------
# matrix representation H/pH -> M_2(F_p)


@dataclass(frozen=True)
class MatrixRepContext:
    p: int
    a: int
    b: int

    def __post_init__(self) -> None:
        if (self.a * self.a + self.b * self.b + 1) % self.p != 0:
            raise ValueError("a^2 + b^2 + 1 must vanish mod p")

    @classmethod
    def find(cls, p: int) -> "MatrixRepContext":
        for a in range(p):
            for b in range(p):
                if (a * a + b * b + 1) % p == 0:
                    return cls(p, a, b)
        raise AssertionError(f"no solution of a^2+b^2+1=0 mod {p}")


def matrix_rep(x: HurwitzInt, ctx: MatrixRepContext) -> np.ndarray:
    p, a, b = ctx.p, ctx.a, ctx.b
    half = pow(2, -1, p)
    x0, x1, x2, x3 = ((v * half) % p for v in x.doubled)
    m = np.array(
        [
            [x0 + x2 * a - x3 * b, -x1 + x2 * b + x3 * a],
            [x1 + x2 * b + x3 * a, x0 - x2 * a + x3 * b],
        ],
        dtype=np.int64,
    )
    return m % p
