"""Exact rational numbers.

Uses gmpy2.mpq when available (noticeably faster for the polygon-enumeration
workloads), falling back to the stdlib Fraction.  Both types expose
``.numerator``/``.denominator`` and print as ``p/q``, which is all the rest of
the package relies on.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)


def rat_from_str(s):
    """Parse 'p', 'p/q' or a decimal like '0.25' into a rational."""
    s = s.strip()
    if "." in s:
        return Rat(Fraction(s))
    if "/" in s:
        p, q = s.split("/")
        return Rat(int(p), int(q))
    return Rat(int(s))


def rat_str(x):
    """Canonical string form, 'p' or 'p/q'."""
    n, d = x.numerator, x.denominator
    if d == 1:
        return str(n)
    return "%d/%d" % (n, d)
