"""Exact Novikov-field scalars.

Scalars are fractions num/den of finite q-exponent polynomials: finite sums
sum_i a_i * q^{t_i} with rational coefficients a_i and rational exponents t_i.
These form a field (the sub-field of the Novikov field generated by all finite
polygon counts); arithmetic is exact.

Canonical form: the denominator's lowest-order term is monic with exponent 0
(both num and den are divided by the denominator's lowest monomial).  The
valuation of a nonzero scalar is min-exponent(num) - min-exponent(den); the
valuation of 0 is +infinity.  A scalar is unitary iff its valuation is 0.
"""

import math
import re

from ._rat import Rat, rat_from_str, rat_str

_INF = math.inf


class QExpPoly:
    """A finite q-exponent polynomial: ordered (exponent, coefficient) pairs.

    Immutable.  Zero coefficients are never stored; the empty term list is 0.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = terms.items()
        else:
            items = terms
        merged = {}
        for e, c in items:
            e = Rat(e)
            c = Rat(c)
            if e in merged:
                merged[e] += c
            else:
                merged[e] = c
        self.terms = tuple(sorted((e, c) for e, c in merged.items() if c != 0))

    @staticmethod
    def monomial(coeff, exp=0):
        return QExpPoly(((Rat(exp), Rat(coeff)),))

    def is_zero(self):
        return not self.terms

    def min_exp(self):
        if not self.terms:
            raise ValueError("zero polynomial has no minimal exponent")
        return self.terms[0][0]

    def lowest(self):
        """The lowest-order monomial as an (exp, coeff) pair."""
        if not self.terms:
            raise ValueError("zero polynomial has no lowest term")
        return self.terms[0]

    def __add__(self, other):
        d = dict(self.terms)
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return QExpPoly(d)

    def __neg__(self):
        return QExpPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                d[e] = d.get(e, 0) + c1 * c2
        return QExpPoly(d)

    def shift(self, exp, coeff=1):
        """Multiply by the monomial coeff*q^exp."""
        exp = Rat(exp)
        coeff = Rat(coeff)
        return QExpPoly(tuple((e + exp, c * coeff) for e, c in self.terms))

    def __eq__(self, other):
        return isinstance(other, QExpPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return "QExpPoly(%s)" % (format_poly(self),)


class _GcdBudgetExceeded(Exception):
    pass


def _poly_divmod(a, b, budget=None):
    """Euclidean division of q-exponent polynomials by descending exponent.

    Treats the polynomials as ordinary polynomials in q^{1/N} (N a common
    denominator of all exponents); exactness is all that matters here.  An
    optional step budget aborts divisions whose exponent lattice is too fine
    to be worth reducing.
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = a
    quo = QExpPoly()
    be, bc = b.terms[-1]
    while not rem.is_zero() and rem.terms[-1][0] >= be:
        re_, rc = rem.terms[-1]
        if budget is not None:
            budget[0] -= 1
            if (
                budget[0] < 0
                or len(rem.terms) > 64
                or abs(rc.numerator).bit_length() + rc.denominator.bit_length() > 512
            ):
                raise _GcdBudgetExceeded
        mono = QExpPoly.monomial(rc / bc, re_ - be)
        quo = quo + mono
        rem = rem - mono * b
    return quo, rem


_GCD_STEP_BUDGET = 64


def _coeff_size(p):
    return max(
        (abs(c.numerator).bit_length() + c.denominator.bit_length() for _, c in p.terms),
        default=0,
    )


def _reduction_worthwhile(num, den):
    """Gcd reduction is only an optimization; Euclid over Q suffers severe
    coefficient blowup, so attempt it only on small, tame fractions whose
    exponent lattice is coarse enough for Euclid to finish quickly."""
    if len(num.terms) < 2 or len(num.terms) > 8 or len(den.terms) > 8:
        return False
    if _coeff_size(num) > 128 or _coeff_size(den) > 128:
        return False
    lat = 1
    span = 0
    for p in (num, den):
        for e, _ in p.terms:
            lat = lat * e.denominator // math.gcd(lat, int(e.denominator))
            if lat > 24:
                return False
        span = max(span, p.terms[-1][0] - p.terms[0][0])
    return span * lat <= 48


def _poly_gcd(a, b):
    """Monic gcd via the Euclidean algorithm; used to keep fractions small.

    Purely an optimization: when the step budget is exceeded (exponent
    lattices with a fine common refinement make Euclid expensive) we give up
    and report a trivial gcd; callers then keep the unreduced fraction, which
    is still a correct canonical-form representative.
    """
    budget = [_GCD_STEP_BUDGET]
    try:
        while not b.is_zero():
            # keep everything an honest polynomial (min exponent 0): units
            # are monomials, so shifting changes nothing up to units
            b = b.shift(-b.min_exp())
            a, b = b, _poly_divmod(a, b, budget=budget)[1]
    except _GcdBudgetExceeded:
        return QExpPoly.monomial(1)
    if a.is_zero():
        return a
    e, c = a.lowest()
    return a.shift(-e, Rat(1) / c)


class NovikovScalar:
    """An exact element of the Novikov fraction field, in canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, NovikovScalar):
            if den is not None:
                raise TypeError("cannot pass a denominator with a scalar")
            self.num, self.den = num.num, num.den
            return
        if not isinstance(num, QExpPoly):
            num = QExpPoly.monomial(Rat(num))
        if den is None:
            den = QExpPoly.monomial(1)
        elif not isinstance(den, QExpPoly):
            den = QExpPoly.monomial(Rat(den))
        if den.is_zero():
            raise ZeroDivisionError("Novikov scalar with zero denominator")
        if num.is_zero():
            self.num = num
            self.den = QExpPoly.monomial(1)
            return
        if len(den.terms) > 1 and _reduction_worthwhile(num, den):
            ne, de_ = num.min_exp(), den.min_exp()
            num0, den0 = num.shift(-ne), den.shift(-de_)
            g = _poly_gcd(num0, den0)
            if len(g.terms) > 1:
                q1, r1 = _poly_divmod(num0, g)
                q2, r2 = _poly_divmod(den0, g)
                if r1.is_zero() and r2.is_zero():
                    num, den = q1.shift(ne), q2.shift(de_)
        e, c = den.lowest()
        inv = Rat(1) / c
        self.num = num.shift(-e, inv)
        self.den = den.shift(-e, inv)

    # -- constructors -------------------------------------------------

    @staticmethod
    def q_power(exp, coeff=1):
        return NovikovScalar(QExpPoly.monomial(coeff, exp))

    @staticmethod
    def zero():
        return NovikovScalar(QExpPoly())

    @staticmethod
    def one():
        return NovikovScalar(QExpPoly.monomial(1))

    # -- predicates ---------------------------------------------------

    def is_zero(self):
        return self.num.is_zero()

    def valuation(self):
        """min-exponent(num) - min-exponent(den); +inf for 0."""
        if self.num.is_zero():
            return _INF
        return self.num.min_exp() - self.den.min_exp()

    def is_unitary(self):
        return self.valuation() == 0

    def leading_coeff(self):
        """Coefficient of q^valuation in the series expansion."""
        if self.is_zero():
            raise ValueError("zero scalar has no leading coefficient")
        return self.num.lowest()[1] / self.den.lowest()[1]

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, NovikovScalar):
            return other
        if isinstance(other, QExpPoly):
            return NovikovScalar(other)
        return NovikovScalar(QExpPoly.monomial(Rat(other)))

    def __add__(self, other):
        other = self._coerce(other)
        if self.den == other.den:
            return NovikovScalar(self.num + other.num, self.den)
        return NovikovScalar(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        return NovikovScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Novikov scalar")
        return NovikovScalar(self.den, self.num)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if not isinstance(other, (NovikovScalar, QExpPoly, int)):
            return NotImplemented
        other = self._coerce(other)
        # canonical forms make cross-multiplication a plain comparison
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return "NovikovScalar(%s)" % (format_scalar(self),)


# ---------------------------------------------------------------------------
# textual rendering: "c*q^{t} + ..." with an optional "/ (...)" denominator;
# parse/print round-trips exactly.
# ---------------------------------------------------------------------------


def format_poly(p):
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.terms:
        if e == 0:
            parts.append(rat_str(c))
        elif c == 1:
            parts.append("q^{%s}" % rat_str(e))
        else:
            parts.append("%s*q^{%s}" % (rat_str(c), rat_str(e)))
    return " + ".join(parts)


def format_scalar(x):
    if x.den == QExpPoly.monomial(1):
        return format_poly(x.num)
    return "(%s) / (%s)" % (format_poly(x.num), format_poly(x.den))


_TERM_RE = re.compile(
    r"^\s*(?P<coeff>-?\d+(?:/\d+)?)?\s*\*?\s*"
    r"(?:q(?:\^\{(?P<exp>-?\d+(?:/\d+)?)\}|\^(?P<exp2>-?\d+(?:/\d+)?))?)?\s*$"
)


def parse_poly(s):
    s = s.strip()
    if s == "0":
        return QExpPoly()
    terms = []
    for raw in s.replace("- ", "+ -").split("+"):
        raw = raw.strip()
        if not raw:
            continue
        m = _TERM_RE.match(raw)
        if not m or (m.group("coeff") is None and "q" not in raw):
            raise ValueError("cannot parse polynomial term: %r" % raw)
        coeff = m.group("coeff")
        coeff = Rat(1) if coeff is None else rat_from_str(coeff)
        if "q" in raw:
            exp = m.group("exp") or m.group("exp2")
            exp = Rat(1) if exp is None else rat_from_str(exp)
        else:
            exp = Rat(0)
        terms.append((exp, coeff))
    return QExpPoly(terms)


def parse_scalar(s):
    s = s.strip()
    m = re.match(r"^\((?P<num>.*)\)\s*/\s*\((?P<den>.*)\)$", s)
    if m:
        return NovikovScalar(parse_poly(m.group("num")), parse_poly(m.group("den")))
    return NovikovScalar(parse_poly(s))
