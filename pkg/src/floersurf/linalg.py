"""Small exact linear algebra over the Novikov fraction field.

Matrices are tuples of tuples of NovikovScalar.  Sizes in this package stay
modest (complexes have at most a few hundred generators), so straightforward
Gaussian elimination is plenty; pivots prefer low valuation to keep the
fractions small.
"""

from .novikov import NovikovScalar

ZERO = NovikovScalar.zero()
ONE = NovikovScalar.one()


def scalar(x):
    return x if isinstance(x, NovikovScalar) else NovikovScalar(x)


def identity(n):
    return tuple(
        tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)
    )


def zeros(m, n):
    return tuple(tuple(ZERO for _ in range(n)) for _ in range(m))


def mat_mul(a, b):
    if not a or not b:
        return ()
    n = len(b)
    assert all(len(row) == n for row in a)
    bt = list(zip(*b))
    return tuple(
        tuple(
            sum((x * y for x, y in zip(row, col)), ZERO) for col in bt
        )
        for row in a
    )


def mat_add(a, b):
    return tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(a, b))


def mat_scale(a, c):
    c = scalar(c)
    return tuple(tuple(c * x for x in row) for row in a)


def mat_neg(a):
    return tuple(tuple(-x for x in row) for row in a)


def mat_inv(a):
    """Inverse by Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    aug = [list(row) + list(e) for row, e in zip(a, identity(n))]
    for col in range(n):
        piv = None
        best = None
        for r in range(col, n):
            x = aug[r][col]
            if not x.is_zero():
                v = x.valuation()
                if best is None or v < best:
                    best = v
                    piv = r
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def rank(a):
    """Rank over the Novikov fraction field by Gaussian elimination."""
    if not a or not a[0]:
        return 0
    rows = [list(r) for r in a]
    m, n = len(rows), len(rows[0])
    r = 0
    for col in range(n):
        piv = None
        best = None
        for i in range(r, m):
            x = rows[i][col]
            if not x.is_zero():
                v = x.valuation()
                if best is None or v < best:
                    best = v
                    piv = i
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][col].is_zero():
                c = rows[i][col]
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return r


def kernel_basis(a):
    """Basis of the right kernel of the matrix a (list of column vectors)."""
    if not a:
        return []
    rows = [list(r) for r in a]
    m, n = len(rows), len(rows[0])
    pivots = {}
    r = 0
    for col in range(n):
        piv = None
        best = None
        for i in range(r, m):
            x = rows[i][col]
            if not x.is_zero():
                v = x.valuation()
                if best is None or v < best:
                    best = v
                    piv = i
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and not rows[i][col].is_zero():
                c = rows[i][col]
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[r])]
        pivots[col] = r
        r += 1
        if r == m:
            break
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for fc in free:
        vec = [ZERO] * n
        vec[fc] = ONE
        for pc, pr in pivots.items():
            vec[pc] = -rows[pr][fc]
        basis.append(tuple(vec))
    return basis
