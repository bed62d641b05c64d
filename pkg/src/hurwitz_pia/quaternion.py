"""Exact arithmetic on Hurwitz quaternion integers.

A :class:`HurwitzInt` stores doubled coordinates ``(d0, d1, d2, d3)`` for the
quaternion ``(d0 + d1 i + d2 j + d3 k) / 2``; all four share one parity.
Floating point only enters through :class:`RealQuaternion`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Union

_INT64_MAX = (1 << 63) - 1


def _check_int64(*vals: int) -> None:
    for v in vals:
        if v > _INT64_MAX or v < -_INT64_MAX - 1:
            raise OverflowError(f"value {v} does not fit the 64-bit carrier")


def _hamilton(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


@dataclass(frozen=True, slots=True)
class HurwitzInt:
    d0: int
    d1: int
    d2: int
    d3: int

    def __post_init__(self) -> None:
        for v in self.doubled:
            if not isinstance(v, int):
                raise TypeError("doubled coordinates must be integers")
        _check_int64(*self.doubled)
        p = self.d0 & 1
        if (self.d1 & 1) != p or (self.d2 & 1) != p or (self.d3 & 1) != p:
            raise ValueError(f"mixed parity {self.doubled}: not a Hurwitz integer")

    # -- construction ------------------------------------------------------
    @classmethod
    def from_doubled(cls, d) -> "HurwitzInt":
        return cls(*(int(v) for v in d))

    @classmethod
    def from_coords(cls, a, b=0, c=0, d=0) -> "HurwitzInt":
        """From ordinary coordinates (ints, Fractions or half-integer strings)."""
        out = []
        for v in (a, b, c, d):
            f = Fraction(v) * 2
            if f.denominator != 1:
                raise ValueError(f"coordinate {v} is not an integer or half-integer")
            out.append(int(f))
        return cls(*out)

    @classmethod
    def zero(cls) -> "HurwitzInt":
        return cls(0, 0, 0, 0)

    @classmethod
    def one(cls) -> "HurwitzInt":
        return cls(2, 0, 0, 0)

    # -- views -------------------------------------------------------------
    @property
    def doubled(self) -> tuple[int, int, int, int]:
        return (self.d0, self.d1, self.d2, self.d3)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.doubled)

    @property
    def is_lipschitz(self) -> bool:
        return self.d0 % 2 == 0

    def real(self) -> Fraction:
        return Fraction(self.d0, 2)

    def to_floats(self) -> tuple[float, float, float, float]:
        return tuple(v / 2 for v in self.doubled)  # type: ignore[return-value]

    def is_zero(self) -> bool:
        return self.doubled == (0, 0, 0, 0)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = HurwitzInt(2 * other, 0, 0, 0)
        if not isinstance(other, HurwitzInt):
            return NotImplemented
        return HurwitzInt(*(a + b for a, b in zip(self.doubled, other.doubled)))

    __radd__ = __add__

    def __neg__(self) -> "HurwitzInt":
        return HurwitzInt(-self.d0, -self.d1, -self.d2, -self.d3)

    def __sub__(self, other):
        if isinstance(other, int):
            other = HurwitzInt(2 * other, 0, 0, 0)
        if not isinstance(other, HurwitzInt):
            return NotImplemented
        return HurwitzInt(*(a - b for a, b in zip(self.doubled, other.doubled)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return HurwitzInt(*(other * v for v in self.doubled))
        if not isinstance(other, HurwitzInt):
            return NotImplemented
        return hamilton_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return HurwitzInt(*(other * v for v in self.doubled))
        return NotImplemented

    def conj(self) -> "HurwitzInt":
        return HurwitzInt(self.d0, -self.d1, -self.d2, -self.d3)

    def norm(self) -> int:
        return (self.d0 ** 2 + self.d1 ** 2 + self.d2 ** 2 + self.d3 ** 2) // 4

    def __str__(self) -> str:
        return format_hurwitz(self)


def hamilton_mul(a: HurwitzInt, b: HurwitzInt) -> HurwitzInt:
    """Exact Hamilton product; ``i*j = k = -j*i``."""
    raw = _hamilton(a.doubled, b.doubled)
    if any(v & 1 for v in raw):
        raise ArithmeticError("odd doubled product, operands are not Hurwitz integers")
    return HurwitzInt(*(v >> 1 for v in raw))


def conj_nrm(a: HurwitzInt) -> tuple[HurwitzInt, int]:
    return a.conj(), a.norm()


@lru_cache(maxsize=1)
def units() -> tuple[HurwitzInt, ...]:
    """The 24 Hurwitz units, sorted by doubled quadruple."""
    out = []
    for pos in range(4):
        for s in (2, -2):
            d = [0, 0, 0, 0]
            d[pos] = s
            out.append(HurwitzInt(*d))
    for s0 in (1, -1):
        for s1 in (1, -1):
            for s2 in (1, -1):
                for s3 in (1, -1):
                    out.append(HurwitzInt(s0, s1, s2, s3))
    return tuple(sorted(out, key=lambda u: u.doubled))


def is_unit(a: HurwitzInt) -> bool:
    return a.norm() == 1


# ---------------------------------------------------------------------------
# rational and real carriers


@dataclass(frozen=True, slots=True)
class RationalQuaternion:
    """Exact ``(n0 + n1 i + n2 j + n3 k) / den`` in lowest shared terms."""

    n0: int
    n1: int
    n2: int
    n3: int
    den: int = 1

    def __post_init__(self) -> None:
        if self.den <= 0:
            raise ValueError("den must be positive")
        g = math.gcd(self.n0, self.n1, self.n2, self.n3, self.den)
        if g != 1:
            for name, v in zip(("n0", "n1", "n2", "n3", "den"), self.num + (self.den,)):
                object.__setattr__(self, name, v // g)

    @property
    def num(self) -> tuple[int, int, int, int]:
        return (self.n0, self.n1, self.n2, self.n3)

    @classmethod
    def from_hurwitz(cls, a: HurwitzInt) -> "RationalQuaternion":
        return cls(*a.doubled, den=2)

    def __mul__(self, other: "RationalQuaternion") -> "RationalQuaternion":
        return RationalQuaternion(*_hamilton(self.num, other.num), den=self.den * other.den)

    def scale_down(self, k: int) -> "RationalQuaternion":
        return RationalQuaternion(*self.num, den=self.den * k)

    def to_hurwitz(self) -> HurwitzInt | None:
        """The same value as a Hurwitz integer, or None when it is not one."""
        if 2 % self.den != 0:
            return None
        f = 2 // self.den
        d = tuple(v * f for v in self.num)
        p = d[0] & 1
        if any((v & 1) != p for v in d):
            return None
        return HurwitzInt(*d)


@dataclass(frozen=True, slots=True)
class RealQuaternion:
    x0: float
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.coords):
            raise ValueError("real quaternion coordinates must be finite")

    @property
    def coords(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.x2, self.x3)

    @classmethod
    def from_hurwitz(cls, a: HurwitzInt) -> "RealQuaternion":
        return cls(*a.to_floats())

    def __add__(self, other: "RealQuaternion") -> "RealQuaternion":
        return RealQuaternion(*(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "RealQuaternion") -> "RealQuaternion":
        return RealQuaternion(*(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return RealQuaternion(*(other * v for v in self.coords))
        if isinstance(other, HurwitzInt):
            other = RealQuaternion.from_hurwitz(other)
        return RealQuaternion(*_hamilton(self.coords, other.coords))

    def norm_sq(self) -> float:
        return sum(v * v for v in self.coords)


# ---------------------------------------------------------------------------
# nearest Hurwitz point


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _round_rational(num: tuple[int, ...], den: int) -> HurwitzInt:
    two_den = 2 * den
    k = [_ceil_div(2 * x - den, two_den) for x in num]
    m = [_ceil_div(x - den, den) for x in num]
    s_int = sum((2 * x - kk * two_den) ** 2 for x, kk in zip(num, k))
    s_half = sum((2 * x - (2 * mm + 1) * den) ** 2 for x, mm in zip(num, m))
    d_int = [2 * kk for kk in k]
    d_half = [2 * mm + 1 for mm in m]
    if s_half < s_int or (s_half == s_int and d_half[0] < d_int[0]):
        return HurwitzInt(*d_half)
    return HurwitzInt(*d_int)


def _round_real(x: tuple[float, ...]) -> HurwitzInt:
    c = [math.ceil(v) for v in x]
    k = [cc - 1 if v <= cc - 0.5 else cc for v, cc in zip(x, c)]
    m = [cc - 1 for cc in c]
    s_int = sum((v - kk) ** 2 for v, kk in zip(x, k))
    s_half = sum((v - mm - 0.5) ** 2 for v, mm in zip(x, m))
    d_int = [2 * kk for kk in k]
    d_half = [2 * mm + 1 for mm in m]
    if s_half < s_int or (s_half == s_int and d_half[0] < d_int[0]):
        return HurwitzInt(*d_half)
    return HurwitzInt(*d_int)


def round_to_hurwitz(x: Union[RationalQuaternion, RealQuaternion, HurwitzInt]) -> HurwitzInt:
    """Nearest Hurwitz integer; ties go to the lexicographically smallest doubled quadruple."""
    if isinstance(x, HurwitzInt):
        return x
    if isinstance(x, RationalQuaternion):
        return _round_rational(x.num, x.den)
    if isinstance(x, RealQuaternion):
        return _round_real(x.coords)
    raise TypeError(f"cannot round {type(x).__name__}")


# ---------------------------------------------------------------------------
# reductions


def mod_two_sided(x, q: int):
    """Centered representative of ``x`` modulo ``qH``."""
    if q < 1:
        raise ValueError("modulus must be a positive integer")
    if isinstance(x, HurwitzInt):
        h = _round_rational(x.doubled, 2 * q)
        return x - q * h
    if isinstance(x, RealQuaternion):
        h = _round_real(tuple(v / q for v in x.coords))
        return x - RealQuaternion.from_hurwitz(h) * float(q)
    raise TypeError(f"cannot reduce {type(x).__name__}")


def mod_left_ideal(x, pi: HurwitzInt):
    """Closest-point reduction of ``x`` modulo the left ideal ``H*pi``."""
    n = pi.norm()
    if n == 0:
        raise ZeroDivisionError("left ideal generated by zero")
    if isinstance(x, HurwitzInt):
        h = _round_rational(_hamilton(x.doubled, pi.conj().doubled), 4 * n)
        return x - h * pi
    if isinstance(x, RealQuaternion):
        t = x * RealQuaternion.from_hurwitz(pi.conj()) * (1.0 / n)
        h = _round_real(t.coords)
        return x - RealQuaternion.from_hurwitz(h * pi)
    raise TypeError(f"cannot reduce {type(x).__name__}")


# ---------------------------------------------------------------------------
# divisibility and gcd


def divides(beta: HurwitzInt, alpha: HurwitzInt, side: Literal["left", "right"] = "left"):
    """Whether ``beta`` divides ``alpha`` on ``side``; returns ``(flag, witness)``.

    left:  alpha = beta * gamma
    right: alpha = gamma * beta
    """
    n = beta.norm()
    if n == 0:
        raise ZeroDivisionError("divisor is zero")
    if side == "left":
        raw = _hamilton(beta.conj().doubled, alpha.doubled)
    elif side == "right":
        raw = _hamilton(alpha.doubled, beta.conj().doubled)
    else:
        raise ValueError("side must be 'left' or 'right'")
    gamma = RationalQuaternion(*raw, den=4 * n).to_hurwitz()
    return (gamma is not None), gamma


def normalize_left_associate(delta: HurwitzInt) -> tuple[HurwitzInt, HurwitzInt]:
    """Return ``(eps, eps*delta)`` with the product's doubled quadruple lex-maximal."""
    best = None
    for e in units():
        cand = e * delta
        if best is None or cand.doubled > best[1].doubled:
            best = (e, cand)
    return best  # type: ignore[return-value]


def euclid_step(alpha: HurwitzInt, beta: HurwitzInt) -> tuple[HurwitzInt, HurwitzInt]:
    """``(t, r)`` with ``alpha = t*beta + r`` and ``Nrm(r) <= Nrm(beta)/2``."""
    n = beta.norm()
    t = _round_rational(_hamilton(alpha.doubled, beta.conj().doubled), 4 * n)
    return t, alpha - t * beta


def gcd_bezout(alpha: HurwitzInt, beta: HurwitzInt) -> tuple[HurwitzInt, HurwitzInt, HurwitzInt]:
    """Right gcd with left Bezout coefficients: ``mu*alpha + nu*beta = delta``.

    ``delta`` right-divides both inputs and is normalized to the left associate
    with lexicographically maximal doubled quadruple.
    """
    if alpha.is_zero() and beta.is_zero():
        raise ValueError("gcd of (0, 0) is undefined")
    one, zero = HurwitzInt.one(), HurwitzInt.zero()
    r0, x0, y0 = alpha, one, zero
    r1, x1, y1 = beta, zero, one
    while not r1.is_zero():
        t, r2 = euclid_step(r0, r1)
        if 2 * r2.norm() > r1.norm():
            raise AssertionError("norm-Euclidean descent violated")
        r0, x0, y0, r1, x1, y1 = r1, x1, y1, r2, x0 - t * x1, y0 - t * y1
    eps, delta = normalize_left_associate(r0)
    return delta, eps * x0, eps * y0


# ---------------------------------------------------------------------------
# text forms

_TERM_RE = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*([ijk]?)\s*")


def format_hurwitz(a: HurwitzInt) -> str:
    """Canonical text, e.g. ``3/2-1/2i+5/2j-9/2k`` or ``1+i+j``."""
    parts: list[str] = []
    for v, unit in zip(a.doubled, ("", "i", "j", "k")):
        if v == 0:
            continue
        sign = "-" if v < 0 else "+"
        mag = abs(v)
        if mag % 2 == 0:
            coef = str(mag // 2)
        else:
            coef = f"{mag}/2"
        if unit and coef == "1":
            coef = ""
        parts.append(sign + coef + unit)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def parse_hurwitz(text: str) -> HurwitzInt:
    if re.search(r"[\d/]\s+[\d/]", text):
        raise ValueError(f"cannot parse quaternion text {text!r}")
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty quaternion text")
    acc = {"": Fraction(0), "i": Fraction(0), "j": Fraction(0), "k": Fraction(0)}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"cannot parse quaternion text {text!r}")
        sign, coef, unit = m.groups()
        if not sign and not first:
            raise ValueError(f"missing sign in {text!r}")
        if coef is None and not unit:
            raise ValueError(f"dangling sign in {text!r}")
        val = Fraction(coef) if coef is not None else Fraction(1)
        acc[unit] += -val if sign == "-" else val
        pos = m.end()
        first = False
    return HurwitzInt.from_coords(acc[""], acc["i"], acc["j"], acc["k"])


def to_machine(a: HurwitzInt) -> list[int]:
    return list(a.doubled)


def from_machine(d) -> HurwitzInt:
    if len(d) != 4:
        raise ValueError("machine form is a list of four doubled coordinates")
    return HurwitzInt.from_doubled(d)
