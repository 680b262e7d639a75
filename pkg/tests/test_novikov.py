import math

from hypothesis import given, settings, strategies as st

from floersurf._rat import Rat
from floersurf.novikov import (
    NovikovScalar,
    QExpPoly,
    format_scalar,
    parse_scalar,
)

ONE = NovikovScalar.one()
ZERO = NovikovScalar.zero()


def q(exp, coeff=1):
    return NovikovScalar.q_power(Rat(*exp) if isinstance(exp, tuple) else exp, coeff)


def test_add_monomials():
    assert q(1) + q(1) == q(1, 2)


def test_additive_identity():
    x = q((1, 2), 3) + q(2, -5)
    assert x + ZERO == x


def test_add_fractions_to_one():
    # 1/(1+q) + q/(1+q) = 1
    den = QExpPoly({0: 1, 1: 1})
    a = NovikovScalar(QExpPoly.monomial(1), den)
    b = NovikovScalar(QExpPoly.monomial(1, 1), den)
    assert a + b == ONE


def test_mul_exponent_addition():
    assert q((1, 2)) * q((1, 3)) == q((5, 6))


def test_mul_identity():
    x = q(3, 7) + q(-1)
    assert x * ONE == x


def test_mul_inverse_pair():
    one_plus_q = ONE + q(1)
    assert one_plus_q * one_plus_q.inverse() == ONE


def test_inverse_examples():
    assert q(2).inverse() == q(-2)
    assert NovikovScalar(2).inverse() == NovikovScalar(QExpPoly.monomial(Rat(1, 2)))
    inv = (ONE + q(1)).inverse()
    assert inv.valuation() == 0
    assert inv * (ONE + q(1)) == ONE


def test_valuation_examples():
    assert (q((1, 2), 2) + q(1)).valuation() == Rat(1, 2)
    assert ZERO.valuation() == math.inf
    # (q + q^2)/q simplifies to 1 + q, valuation 0
    x = NovikovScalar(QExpPoly({1: 1, 2: 1}), QExpPoly.monomial(1, 1))
    assert x.valuation() == 0
    assert x == ONE + q(1)


def test_unitary_iff_valuation_zero():
    assert (ONE + q(1)).is_unitary()
    assert not q(1).is_unitary()
    assert not ZERO.is_unitary()


def test_zero_inverse_raises():
    try:
        ZERO.inverse()
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("expected ZeroDivisionError")


rationals = st.fractions(min_value=-40, max_value=40, max_denominator=6)


@st.composite
def polys(draw, max_terms=3):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    return QExpPoly([(draw(rationals), draw(rationals)) for _ in range(n)])


@st.composite
def scalars(draw):
    num = draw(polys())
    den = draw(polys().filter(lambda p: not p.is_zero()))
    return NovikovScalar(num, den)


@given(scalars(), scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a
    assert a * ONE == a
    assert a + (-a) == ZERO
    if not a.is_zero():
        assert a * a.inverse() == ONE


@given(scalars(), scalars())
@settings(max_examples=60, deadline=None)
def test_valuation_is_nonarchimedean(a, b):
    va, vb = a.valuation(), b.valuation()
    assert (a * b).valuation() == va + vb
    vs = (a + b).valuation()
    assert vs >= min(va, vb)
    if va != vb:
        assert vs == min(va, vb)


@given(scalars())
@settings(max_examples=60, deadline=None)
def test_canonical_form(a):
    # denominator's lowest term is monic with exponent 0
    e, c = a.den.lowest()
    assert e == 0 and c == 1
    # re-canonicalizing is the identity
    again = NovikovScalar(a.num, a.den)
    assert again.num == a.num and again.den == a.den


@given(scalars())
@settings(max_examples=60, deadline=None)
def test_parse_print_roundtrip(a):
    assert parse_scalar(format_scalar(a)) == a
