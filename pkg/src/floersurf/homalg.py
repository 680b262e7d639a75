"""Chern characters, the Mukai pairing, orthogonal cocycles, and the
geometrization pipeline for spherical objects.

The Chern character of an object built from curves is the (integral)
homology class of its underlying cycle; the Mukai pairing is the
intersection pairing, and satisfies <ch X, ch Y> = -chi(X, Y).
"""

from math import gcd

from ._rat import Rat
from . import geometry
from .geometry import DegenerateGeometry
from .homology import homology_data, homology_class, smith
from .surface import cocycle_value, check_cocycle
from .curve import CurveError
from .floer import FukayaObject, TwistedComplex, FloerError, hf_ranks, \
    is_spherical
from .moves import reduce_to_embedded, MoveError, _line_key, _split_poly, \
    _interval_on, _proj


class HomalgError(ValueError):
    pass


_DATA_CACHE = {}


def get_homology_data(S):
    """Per-surface memoized homology data (basis curves are expensive)."""
    key = id(S)
    hit = _DATA_CACHE.get(key)
    if hit is not None and hit[0] is S:
        return hit[1]
    data = homology_data(S)
    _DATA_CACHE[key] = (S, data)
    return data


class ChernClass:
    """An integral H_1 class in the basis of the surface's homology data."""

    def __init__(self, data, vector):
        self.data = data
        self.vector = tuple(int(x) for x in vector)
        if len(self.vector) != data.rank:
            raise HomalgError("class length does not match H_1 rank")

    def is_zero(self):
        return all(x == 0 for x in self.vector)

    def __add__(self, other):
        self._check(other)
        return ChernClass(
            self.data,
            [a + b for a, b in zip(self.vector, other.vector)],
        )

    def __neg__(self):
        return ChernClass(self.data, [-a for a in self.vector])

    def scale(self, n):
        return ChernClass(self.data, [n * a for a in self.vector])

    def _check(self, other):
        if self.data is not other.data:
            raise HomalgError("classes live on different surfaces")

    def __eq__(self, other):
        return (
            isinstance(other, ChernClass)
            and self.data is other.data
            and self.vector == other.vector
        )

    def __repr__(self):
        return "ChernClass%r" % (self.vector,)


def chern_character(T, data=None):
    """ch of a Fukaya object or twisted complex: the signed sum of the
    homology classes of the constituent curves, weighted by system rank."""
    if isinstance(T, FukayaObject):
        summands = [T]
    elif isinstance(T, TwistedComplex):
        summands = T.summands
    else:
        raise HomalgError("expected a FukayaObject or TwistedComplex")
    if data is None:
        data = get_homology_data(summands[0].curve.surface)
    total = [0] * data.rank
    for X in summands:
        sign = -1 if X.shift % 2 else 1
        vec = homology_class(X.curve, data)
        r = X.system.rank
        total = [t + sign * r * v for t, v in zip(total, vec)]
    return ChernClass(data, total)


def mukai_pairing(u, v):
    """The intersection pairing of two Chern classes (skew, integral)."""
    u._check(v)
    M = u.data.intersection_matrix
    return sum(
        u.vector[i] * M[i][j] * v.vector[j]
        for i in range(u.data.rank)
        for j in range(u.data.rank)
    )


def _interior_edges(S):
    edges = set()
    for side in S.pairing:
        e, _sign = S.edge_of(side)
        edges.add(e)
    return sorted(edges)


def _cocycle_kernel(S):
    """Integer basis of the edge cochains with vanishing vertex monodromy."""
    edges = _interior_edges(S)
    idx = {e: j for j, e in enumerate(edges)}
    rows = []
    for orbit, boundary in S.vertex_orbits:
        if boundary:
            continue
        r = [0] * len(edges)
        for side in orbit:
            e, sign = S.edge_of(side)
            j = idx.get(e)
            if j is not None:
                r[j] += sign
        rows.append(r)
    if not rows:
        basis = [
            [1 if i == j else 0 for j in range(len(edges))]
            for i in range(len(edges))
        ]
        return edges, basis
    U, D, V = smith(rows)
    m, n = len(rows), len(edges)
    rank = sum(
        1 for t in range(min(m, n)) if D[t][t] != 0
    )
    basis = [[V[i][j] for i in range(n)] for j in range(rank, n)]
    return edges, basis


def _solve_int(A, b):
    """An integer solution x of A x = b, or None."""
    if not A or not A[0]:
        return None if any(b) else []
    U, D, V = smith(A)
    m, n = len(A), len(A[0])
    Ub = [sum(U[i][j] * b[j] for j in range(m)) for i in range(m)]
    z = [0] * n
    for t in range(min(m, n)):
        d = D[t][t]
        if d == 0:
            if Ub[t] != 0:
                return None
        else:
            if Ub[t] % d != 0:
                return None
            z[t] = Ub[t] // d
    for t in range(min(m, n), m):
        if Ub[t] != 0:
            return None
    return [sum(V[i][t] * z[t] for t in range(n)) for i in range(n)]


def class_cocycle(data, coeffs):
    """An integer edge cocycle whose evaluation on the t-th basis curve is
    coeffs[t].  Exists for every integer vector on a closed surface."""
    S = data.surface
    edges, kernel = _cocycle_kernel(S)
    if len(coeffs) != data.rank:
        raise HomalgError("coefficient length does not match H_1 rank")
    # pairing of each kernel vector with each basis curve
    idx = {e: j for j, e in enumerate(edges)}
    P = []
    for cv in data.basis_curves:
        crossings = {}
        for seg in cv.segments:
            e, sign = S.edge_of((seg.face, seg.side_out))
            j = idx.get(e)
            if j is not None:
                crossings[j] = crossings.get(j, 0) + sign
        P.append([
            sum(vec[j] * s for j, s in crossings.items())
            for vec in kernel
        ])
    y = _solve_int(P, list(coeffs))
    if y is None:
        raise HomalgError("no integral cocycle with the requested pairings")
    a = {}
    for k, yk in enumerate(y):
        if yk == 0:
            continue
        for j, e in enumerate(edges):
            if kernel[k][j]:
                a[e] = a.get(e, 0) + yk * kernel[k][j]
    a = {e: v for e, v in a.items() if v != 0}
    if not check_cocycle(S, a):
        raise HomalgError("internal error: solved cochain is not a cocycle")
    return a


def cocycle_pairing(S, cocycle, curve):
    """Evaluation of an edge cocycle on (the class of) a closed curve."""
    return sum(
        cocycle_value(S, cocycle, (seg.face, seg.side_out))
        for seg in curve.segments
    )


def orthogonal_cocycle(X, data=None):
    """A nonzero primitive integral class annihilating ch(X) under the
    intersection pairing.  Returns (coeff vector, edge cocycle)."""
    if isinstance(X, ChernClass):
        ch = X
        if data is None:
            data = ch.data
    else:
        if data is None:
            data = get_homology_data(X.curve.surface)
        ch = chern_character(X, data)
    rank = data.rank
    if rank < 2:
        raise HomalgError("need H_1 rank at least 2")
    # the cocycle built from n evaluates on a class v as the dot product n.v
    w = list(ch.vector)
    if all(x == 0 for x in w):
        n = [0] * rank
        n[0] = 1
    else:
        i = next(k for k in range(rank) if w[k] != 0)
        j = next(k for k in range(rank) if k != i)
        n = [0] * rank
        n[j] = w[i]
        n[i] = -w[j]
        g = gcd(abs(n[i]), abs(n[j]))
        n = [x // g for x in n]
    if sum(n[t] * w[t] for t in range(rank)) != 0:
        raise HomalgError("internal error: cocycle not orthogonal")
    return n, class_cocycle(data, n)


# ---------------------------------------------------------------------------
# side areas of an embedded separating curve
# ---------------------------------------------------------------------------


def separating_side_areas(c):
    """(left area, right area) of the complement of an embedded separating
    curve, labeled by the side a left-offset of the first chord lies on."""
    S = c.surface
    if c.self_crossings():
        raise HomalgError("curve is not embedded")
    by_face = {}
    for k, seg in enumerate(c.segments):
        p0, p1 = c.chord(k)
        by_face.setdefault(seg.face, []).append((p0, p1))

    cells = []
    face_cells = {}
    for f in range(S.num_faces):
        poly = list(S.face_coords(f))
        keys = []
        seen = set()
        for p0, p1 in by_face.get(f, ()):
            key = _line_key(p0, p1)
            if key not in seen:
                seen.add(key)
                keys.append(key)
        polys = [poly]
        for key in keys:
            polys = [q for pl in polys for q in _split_poly(pl, key)]
        fc = []
        for pl in polys:
            fc.append(len(cells))
            cells.append((f, pl))
        face_cells[f] = fc

    # adjacency: cells touching along a glued side are connected; cells
    # separated by a curve chord (full-width line) are not
    adj = [[] for _ in cells]
    for f in range(S.num_faces):
        pts = S.face_coords(f)
        k = S.face_sides[f]
        for i in range(k):
            partner = S.pairing.get((f, i))
            if partner is None:
                continue
            f2, i2 = partner
            if (f2, i2) < (f, i):
                continue
            sa, sb = pts[i], pts[(i + 1) % k]
            key = _line_key(sa, sb)
            mine = []
            for ci in face_cells[f]:
                poly = cells[ci][1]
                n = len(poly)
                for t in range(n):
                    ea, eb = poly[t], poly[(t + 1) % n]
                    if _line_key(ea, eb) == key:
                        ta, tb = _interval_on(sa, sb, ea, eb)
                        if ta < tb:
                            mine.append((ta, tb, ci))
            pts2 = S.face_coords(f2)
            sa2 = pts2[i2]
            sb2 = pts2[(i2 + 1) % S.face_sides[f2]]
            key2 = _line_key(sa2, sb2)
            other = []
            for cj in face_cells[f2]:
                poly = cells[cj][1]
                n = len(poly)
                for t in range(n):
                    ea, eb = poly[t], poly[(t + 1) % n]
                    if _line_key(ea, eb) == key2:
                        ta, tb = _interval_on(sa2, sb2, ea, eb)
                        if ta < tb:
                            other.append((ta, tb, cj))
            for ta, tb, ci in mine:
                for ua, ub, cj in other:
                    if max(ta, 1 - ub) < min(tb, 1 - ua):
                        adj[ci].append(cj)
                        adj[cj].append(ci)

    comp = [None] * len(cells)
    n_comp = 0
    for c0 in range(len(cells)):
        if comp[c0] is not None:
            continue
        stack = [c0]
        comp[c0] = n_comp
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if comp[y] is None:
                    comp[y] = n_comp
                    stack.append(y)
        n_comp += 1
    if n_comp != 2:
        raise HomalgError(
            "curve does not separate: complement has %d components" % n_comp
        )

    areas = [Rat(0), Rat(0)]
    for i, (f, poly) in enumerate(cells):
        areas[comp[i]] += S.density(f) * geometry.shoelace(poly)

    # which component is on the left of the first chord
    f0 = c.segments[0].face
    p0, p1 = c.chord(0)
    mid = ((p0[0] + p1[0]) / 2, (p0[1] + p1[1]) / 2)
    left_comp = None
    for ci in face_cells[f0]:
        poly = cells[ci][1]
        cen = (
            sum(p[0] for p in poly) / len(poly),
            sum(p[1] for p in poly) / len(poly),
        )
        if geometry.cross(geometry.sub(p1, p0),
                          geometry.sub(cen, mid)) > 0:
            left_comp = comp[ci]
            break
    if left_comp is None:
        raise HomalgError("could not locate the left side of the curve")
    return areas[left_comp], areas[1 - left_comp]


# ---------------------------------------------------------------------------
# geometrization
# ---------------------------------------------------------------------------


def geometrize(X, probes):
    """Reduce a spherical rank-1 object to an embedded representative and
    verify its Floer ranks against the probes.

    Returns a report dict.  When the underlying class vanishes, the
    accumulated flux must fit in the area budget of one side of the
    embedded representative (an isotopy can sweep flux only in the open
    interval (-left area, right area)); otherwise the object is spherical
    but not quasi-isomorphic to any unitary embedded curve, and the report
    carries status "obstructed"."""
    if X.system.rank != 1:
        raise HomalgError("geometrization requires a rank-1 local system")
    if not is_spherical(X):
        raise HomalgError("object is not spherical: self-HF is not (1,1)")
    data = get_homology_data(X.curve.surface)
    ch = chern_character(X, data)
    report = {
        "input_segments": len(X.curve.segments),
        "chern": list(ch.vector),
        "steps": [],
        "probe_ranks": [],
        "status": "embedded",
    }
    probe_objs = [
        p if isinstance(p, FukayaObject) else FukayaObject(p)
        for p in probes
    ]
    base = [hf_ranks(X, P) for P in probe_objs]
    try:
        c2, log = reduce_to_embedded(X.curve)
    except MoveError as e:
        report["status"] = "stuck"
        report["diagnostic"] = str(e)
        return report
    report["steps"] = [(m.kind, m.flux) for m in log]
    val = c2.system.holonomy[0][0].valuation()
    report["residual_valuation"] = val
    if ch.is_zero():
        left, right = separating_side_areas(c2)
        report["budget"] = (left, right)
        # realizable sweeps have flux in (-left, right)
        if not (-left < val < right):
            report["status"] = "obstructed"
            report["diagnostic"] = (
                "flux budget exceeded: residual valuation %s outside "
                "(-%s, %s)" % (val, left, right)
            )
            return report
    Y = FukayaObject(c2)
    after = [hf_ranks(Y, P) for P in probe_objs]
    report["probe_ranks"] = [
        {"before": b, "after": a} for b, a in zip(base, after)
    ]
    if base != after:
        report["status"] = "rank-mismatch"
        raise HomalgError("probe ranks changed during reduction: %r" % report)
    report["curve"] = c2
    report["object"] = Y
    return report
