import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Rational
from sympy.algebras.quaternion import Quaternion

from hurwitz_pia.quaternion import (
    HurwitzInt,
    RationalQuaternion,
    RealQuaternion,
    conj_nrm,
    divides,
    euclid_step,
    format_hurwitz,
    from_machine,
    gcd_bezout,
    hamilton_mul,
    is_unit,
    mod_left_ideal,
    mod_two_sided,
    parse_hurwitz,
    round_to_hurwitz,
    to_machine,
    units,
)

from conftest import hurwitz_ints, nonzero_hurwitz

ONE = HurwitzInt(2, 0, 0, 0)
I = HurwitzInt(0, 2, 0, 0)
J = HurwitzInt(0, 0, 2, 0)
K = HurwitzInt(0, 0, 0, 2)
OMEGA = HurwitzInt(1, 1, 1, 1)


def sym(a: HurwitzInt) -> Quaternion:
    return Quaternion(*[Rational(d, 2) for d in a.doubled])


def from_sym(q: Quaternion) -> HurwitzInt:
    vals = [q.a, q.b, q.c, q.d]
    return HurwitzInt(*[int(2 * v) for v in vals])


# -- construction ---------------------------------------------------------


def test_mixed_parity_rejected():
    with pytest.raises(ValueError):
        HurwitzInt(1, 0, 0, 0)
    with pytest.raises(ValueError):
        HurwitzInt(2, 1, 2, 2)


def test_overflow_detected():
    with pytest.raises(OverflowError):
        HurwitzInt(2 ** 64, 0, 0, 0)


def test_from_coords_accepts_halves():
    assert HurwitzInt.from_coords(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)) == OMEGA
    assert HurwitzInt.from_coords(1, 2) == HurwitzInt(2, 4, 0, 0)


# -- products --------------------------------------------------------------


def test_unit_relations():
    assert I * J == K
    assert J * I == -K
    assert J * K == I and K * I == J
    assert I * I == -ONE


def test_omega_squared():
    # frozen from the symbolic oracle: omega^2 = omega - 1
    assert OMEGA * OMEGA == OMEGA - ONE
    assert from_sym(sym(OMEGA) * sym(OMEGA)) == HurwitzInt(-1, 1, 1, 1)


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints(), hurwitz_ints())
def test_product_matches_symbolic_oracle(a, b):
    assert hamilton_mul(a, b) == from_sym(sym(a) * sym(b))


@settings(max_examples=300, deadline=None)
@given(hurwitz_ints(), hurwitz_ints())
def test_norm_multiplicative_and_parity(a, b):
    assert (a * b).norm() == a.norm() * b.norm()
    for v in (a + b, a - b, a * b, a.conj()):
        assert len({d & 1 for d in v.doubled}) == 1


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints())
def test_conj_product_is_norm(a):
    c, n = conj_nrm(a)
    assert a * c == c * a == n * ONE
    assert n == sum(d * d for d in a.doubled) // 4


def test_norm_examples():
    assert HurwitzInt.from_coords(1, 2, 2, 2).norm() == 13
    assert conj_nrm(HurwitzInt(0, 0, 0, 0)) == (HurwitzInt(0, 0, 0, 0), 0)
    assert OMEGA.norm() == 1


def test_identity_multiplication():
    x = HurwitzInt(3, -5, 7, 1)
    assert ONE * x == x == x * ONE


def test_noncommutative():
    a, b = HurwitzInt(2, 2, 0, 0), HurwitzInt(2, 0, 2, 0)
    assert a * b != b * a


# -- units -----------------------------------------------------------------


def test_units():
    us = units()
    assert len(us) == 24 and len(set(us)) == 24
    assert all(u.norm() == 1 for u in us)
    brute = {
        HurwitzInt(*d)
        for d in itertools.product(range(-2, 3), repeat=4)
        if len({x & 1 for x in d}) == 1 and sum(x * x for x in d) == 4
    }
    assert set(us) == brute
    assert is_unit(I) and not is_unit(HurwitzInt(0, 0, 0, 0))


# -- rounding --------------------------------------------------------------


def _brute_round(x, radius: int = 3):
    """Nearest Hurwitz point by exhaustive search; ties to lex-smallest doubled."""
    best = None
    centre = [int(round(2 * float(v))) for v in x]
    for off in itertools.product(range(-radius, radius + 1), repeat=4):
        d = tuple(c + o for c, o in zip(centre, off))
        if len({v & 1 for v in d}) != 1:
            continue
        dist = sum((Fraction(v) - Fraction(di, 2)) ** 2 for v, di in zip(x, d))
        key = (dist, d)
        if best is None or key < best:
            best = key
    return HurwitzInt(*best[1])


def test_rounding_examples():
    assert round_to_hurwitz(RealQuaternion(0.1, 0.1, 0.1, 0.1)) == HurwitzInt(0, 0, 0, 0)
    assert round_to_hurwitz(RealQuaternion(0.4, 0.4, 0.4, 0.4)) == OMEGA
    quarter = RationalQuaternion(1, 1, 1, 1, den=4)
    assert round_to_hurwitz(quarter) == HurwitzInt(0, 0, 0, 0)
    assert round_to_hurwitz(RealQuaternion(0.25, 0.25, 0.25, 0.25)) == HurwitzInt(0, 0, 0, 0)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.integers(-60, 60), min_size=4, max_size=4),
    st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12]),
)
def test_rational_rounding_is_nearest_with_lex_ties(num, den):
    x = [Fraction(v, den) for v in num]
    assert round_to_hurwitz(RationalQuaternion(*num, den=den)) == _brute_round(x)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-20, 20, allow_nan=False), min_size=4, max_size=4))
def test_real_rounding_is_nearest(xs):
    got = round_to_hurwitz(RealQuaternion(*xs))
    ref = _brute_round([Fraction(v) for v in xs])
    if got != ref:
        # only a float-level near tie may separate the two answers
        dist = lambda h: sum((Fraction(v) - Fraction(d, 2)) ** 2 for v, d in zip(xs, h.doubled))
        assert abs(dist(got) - dist(ref)) < 1e-12


def test_rational_and_real_rounding_share_ties():
    for num in itertools.product((-3, -1, 1, 3), repeat=4):
        r = round_to_hurwitz(RationalQuaternion(*num, den=4))
        f = round_to_hurwitz(RealQuaternion(*(v / 4 for v in num)))
        assert r == f


# -- reductions ------------------------------------------------------------


def test_mod_two_sided_examples():
    assert mod_two_sided(HurwitzInt(6, 0, 0, 0), 3) == HurwitzInt(0, 0, 0, 0)
    assert mod_two_sided(5 * OMEGA + ONE, 5) == ONE


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints(80), hurwitz_ints(10), st.sampled_from([1, 3, 5, 7, 15]))
def test_mod_two_sided_properties(x, h, q):
    r = mod_two_sided(x, q)
    assert mod_two_sided(r, q) == r
    assert mod_two_sided(x + q * h, q) == r
    diff = x - r
    assert all(d % q == 0 for d in diff.doubled)
    # centred: no point of qH is closer than 0
    for u in units():
        assert r.norm() <= (r - q * u).norm()


def test_mod_two_sided_real():
    r = mod_two_sided(RealQuaternion(7.2, -3.1, 0.4, 2.6), 3)
    assert max(abs(v) for v in r.coords) <= 1.5 + 1e-12


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints(60), hurwitz_ints(10), nonzero_hurwitz(8))
def test_mod_left_ideal_properties(x, h, pi):
    r = mod_left_ideal(x, pi)
    assert mod_left_ideal(r, pi) == r
    assert mod_left_ideal(x + h * pi, pi) == r
    ok, _ = divides(pi, x - r, "right")
    assert ok
    for u in units():
        assert r.norm() <= (r - u * pi).norm()


def test_mod_left_ideal_examples():
    pi = HurwitzInt(2, 2, 2, 0)
    assert mod_left_ideal(pi, pi).is_zero()
    assert mod_left_ideal(HurwitzInt(2 * pi.norm(), 0, 0, 0), pi).is_zero()


def test_mod_left_ideal_residue_sweep():
    pi = HurwitzInt(2, 2, 2, 0)
    seen = set()
    for d in itertools.product(range(-6, 7), repeat=4):
        if len({v & 1 for v in d}) == 1:
            seen.add(mod_left_ideal(HurwitzInt(*d), pi))
    assert len(seen) == 9


def test_mod_left_ideal_real_agrees_with_exact():
    pi = HurwitzInt(2, 4, 0, 0)
    x = HurwitzInt(7, 3, -5, 9)
    exact = mod_left_ideal(x, pi)
    real = mod_left_ideal(RealQuaternion.from_hurwitz(x), pi)
    assert np.allclose(real.coords, [v / 2 for v in exact.doubled])


def test_zero_modulus_rejected():
    with pytest.raises(ZeroDivisionError):
        mod_left_ideal(ONE, HurwitzInt(0, 0, 0, 0))
    with pytest.raises(ValueError):
        mod_two_sided(ONE, 0)


# -- divisibility ----------------------------------------------------------


def test_divides_examples():
    pi = HurwitzInt(2, 2, 2, 0)
    ok, w = divides(pi, HurwitzInt(6, 0, 0, 0), "left")
    assert ok and pi * w == HurwitzInt(6, 0, 0, 0)
    assert not divides(HurwitzInt(2, 2, 0, 0), ONE, "left")[0]


def test_divides_worked_pair():
    # frozen from an exhaustive witness search: (-i+2j+k) = (1+i-j)(-1+j), no right factorization
    beta = HurwitzInt(2, 2, -2, 0)
    alpha = HurwitzInt(0, -2, 4, 2)
    ok, w = divides(beta, alpha, "left")
    assert ok and w == HurwitzInt(-2, 0, 2, 0)
    assert not divides(beta, alpha, "right")[0]


@settings(max_examples=150, deadline=None)
@given(nonzero_hurwitz(12), hurwitz_ints(12))
def test_divides_finds_constructed_factor(beta, g):
    ok, w = divides(beta, beta * g, "left")
    assert ok and w == g
    ok, w = divides(beta, g * beta, "right")
    assert ok and w == g


def test_divides_zero_rejected():
    with pytest.raises(ZeroDivisionError):
        divides(HurwitzInt(0, 0, 0, 0), ONE)


# -- gcd -------------------------------------------------------------------


def test_gcd_with_zero():
    a = HurwitzInt(6, 2, 0, 0)
    d, mu, nu = gcd_bezout(a, HurwitzInt(0, 0, 0, 0))
    assert mu * a == d
    assert d.norm() == a.norm()


def test_gcd_of_conjugates_is_unit():
    pi = HurwitzInt(2, 2, 2, 0)
    d, mu, nu = gcd_bezout(pi, pi.conj())
    assert is_unit(d) and d == ONE
    assert mu * pi + nu * pi.conj() == d


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints(30), hurwitz_ints(30))
def test_gcd_bezout_identity(a, b):
    if a.is_zero() and b.is_zero():
        return
    d, mu, nu = gcd_bezout(a, b)
    assert mu * a + nu * b == d
    assert divides(d, a, "right")[0] and divides(d, b, "right")[0]
    # normalized: lex-max among left associates
    assert all((u * d).doubled <= d.doubled for u in units())


@settings(max_examples=100, deadline=None)
@given(hurwitz_ints(20), hurwitz_ints(20))
def test_gcd_scaling(a, b):
    if a.is_zero() and b.is_zero():
        return
    d1 = gcd_bezout(a, b)[0]
    d2 = gcd_bezout(2 * a, 2 * b)[0]
    assert d2.norm() == 4 * d1.norm()


@settings(max_examples=200, deadline=None)
@given(hurwitz_ints(40), nonzero_hurwitz(20))
def test_euclid_step_descends(a, b):
    t, r = euclid_step(a, b)
    assert a == t * b + r
    assert 2 * r.norm() <= b.norm()


def test_gcd_rejects_double_zero():
    z = HurwitzInt(0, 0, 0, 0)
    with pytest.raises(ValueError):
        gcd_bezout(z, z)


# -- text forms ------------------------------------------------------------


def test_format_examples():
    assert format_hurwitz(HurwitzInt(3, -1, 5, -9)) == "3/2-1/2i+5/2j-9/2k"
    assert format_hurwitz(HurwitzInt(2, 2, 2, 0)) == "1+i+j"
    assert format_hurwitz(HurwitzInt(0, 0, 0, 0)) == "0"
    assert format_hurwitz(-K) == "-k"


@settings(max_examples=300, deadline=None)
@given(hurwitz_ints(200))
def test_text_and_machine_roundtrip(a):
    assert parse_hurwitz(format_hurwitz(a)) == a
    assert from_machine(to_machine(a)) == a
    assert to_machine(a) == list(a.doubled)


@pytest.mark.parametrize("bad", ["", "1+", "1 2", "1/3", "x"])
def test_parse_rejects_garbage(bad):
    with pytest.raises((ValueError, TypeError)):
        parse_hurwitz(bad)


def test_rational_lowest_terms():
    r = RationalQuaternion(2, 4, 6, 8, den=10)
    assert (r.num, r.den) == ((1, 2, 3, 4), 5)
    with pytest.raises(ValueError):
        RationalQuaternion(1, 0, 0, 0, den=0)


def test_real_quaternion_finite():
    with pytest.raises(ValueError):
        RealQuaternion(float("nan"))
