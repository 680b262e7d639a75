"""Arc systems on stopped surfaces, their gentle quiver algebras, twisted
complexes over them, and the string/band decomposition with geometric
replacement.

A full formal arc system is a collection of disjoint embedded arcs with
endpoints on the boundary away from the stops, cutting the surface into
discs that each contain exactly one stop.  The endomorphism algebra of the
arcs is formal: a basis is given by identities and by boundary chords
(positively oriented boundary paths between arc endpoints not passing a
stop), and the only nontrivial products concatenate chords with a common
endpoint.  Twisted complexes over this algebra decompose into strings
(chains, geometrically arcs) and bands (cycles carrying an invertible
holonomy matrix, geometrically closed curves with local systems).
"""

from ._rat import Rat
from . import geometry
from . import linalg
from .surface import build_punctured
from .geometry import DegenerateGeometry
from .novikov import NovikovScalar, format_scalar
from .curve import ImmersedCurve, LocalSystem, CurveError, curve_crossings
from .curveops import push_off
from .moves import _line_key, _split_poly, _interval_on, flux_between
from .homology import realize_face_walk
from .floer import FukayaObject, hf_ranks, _PUSH_FLUX_SIGN


class HKKError(ValueError):
    pass


# ---------------------------------------------------------------------------
# arcs and arc systems
# ---------------------------------------------------------------------------


def realize_boundary_arc(S, start, steps, end, salt=1):
    """An embedded arc from boundary position `start` = (side, param) to
    `end` = (side, param), crossing the interior sides listed in `steps`
    in order (each given as the side crossed outward)."""
    sf, si, s0 = start[0][0], start[0][1], Rat(start[1])
    ef, ei, s1 = end[0][0], end[0][1], Rat(end[1])
    if not S.is_boundary_side((sf, si)) or not S.is_boundary_side((ef, ei)):
        raise HKKError("arc endpoints must lie on boundary sides")
    T = len(steps)
    for attempt in range(6):
        params = [Rat(1, t + 3 + salt + 7 * attempt) for t in range(T)]
        segs = []
        cur_side, cur_param = si, s0
        f = sf
        ok = True
        for t, (cf, ci) in enumerate(steps):
            if cf != f:
                raise HKKError("arc walk steps do not chain")
            if ci == cur_side:
                ok = False
                break
            segs.append((f, cur_side, cur_param, ci, params[t]))
            (f, cur_side), cur_param = S.cross((cf, ci), params[t])
        if not ok:
            continue
        if f != ef or cur_side == ei:
            raise HKKError("arc walk does not reach the end side")
        segs.append((f, cur_side, cur_param, ei, s1))
        try:
            return ImmersedCurve(S, segs, closed=False)
        except (CurveError, DegenerateGeometry):
            continue
    raise HKKError("could not realize arc in general position")


def _arc_endpoints(arc):
    """The two boundary endpoints of an open arc:
    [(side, param, which_end)] with which_end 0 = start, 1 = end."""
    first = arc.segments[0]
    last = arc.segments[-1]
    return [
        ((first.face, first.side_in), first.s_in, 0),
        ((last.face, last.side_out), last.s_out, 1),
    ]


def _complement_cells(S, arcs):
    """Cells of the faces cut along all arc chords, with the component
    label of each cell in the complement of the arcs."""
    by_face = {}
    for arc in arcs:
        for k, seg in enumerate(arc.segments):
            p0, p1 = arc.chord(k)
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
            mine = _cell_intervals(S, cells, face_cells[f], key, sa, sb)
            pts2 = S.face_coords(f2)
            sa2 = pts2[i2]
            sb2 = pts2[(i2 + 1) % S.face_sides[f2]]
            key2 = _line_key(sa2, sb2)
            other = _cell_intervals(S, cells, face_cells[f2], key2, sa2, sb2)
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
    return cells, face_cells, comp, n_comp


def _cell_intervals(S, cells, cell_ids, key, sa, sb):
    out = []
    for ci in cell_ids:
        poly = cells[ci][1]
        n = len(poly)
        for t in range(n):
            ea, eb = poly[t], poly[(t + 1) % n]
            if _line_key(ea, eb) == key:
                ta, tb = _interval_on(sa, sb, ea, eb)
                if ta < tb:
                    out.append((ta, tb, ci))
    return out


def _stop_cell(S, cells, face_cells, side, param):
    """The cell whose boundary contains the stop at (side, param)."""
    f, i = side
    sa, sb = S.side_endpoints(side)
    key = _line_key(sa, sb)
    p = S.side_point(side, param)
    for ta, tb, ci in _cell_intervals(S, cells, face_cells[f], key, sa, sb):
        if ta < param < tb:
            return ci
    raise HKKError("stop at %r, %s lies on an arc endpoint" % (side, param))


class ArcSystem:
    """A validated full formal arc system on a stopped surface."""

    def __init__(self, surface, arcs):
        self.surface = surface
        self.arcs = list(arcs)
        self._validate()
        self._build_intervals()

    def _validate(self):
        S = self.surface
        if not S.stops:
            raise HKKError("surface has no stops")
        for b, cyc in enumerate(S.boundary_cycles):
            if not any(side in S.stops for side in cyc):
                raise HKKError("boundary component %d has no stop" % b)
        stops = []
        for side, params in S.stops.items():
            for x in params:
                stops.append((side, x))
        for a in self.arcs:
            if a.closed:
                raise HKKError("arc system entries must be open arcs")
            if a.surface is not S:
                raise HKKError("arc on the wrong surface")
            if a.self_crossings():
                raise HKKError("arc is not embedded")
            for side, param, _ in _arc_endpoints(a):
                for sside, sparam in stops:
                    if sside == side and sparam == param:
                        raise HKKError("arc endpoint on a stop")
        for i in range(len(self.arcs)):
            for j in range(i + 1, len(self.arcs)):
                if curve_crossings(self.arcs[i], self.arcs[j]):
                    raise HKKError("arcs %d and %d cross" % (i, j))
        # full formal: complement is a disjoint union of discs, one stop
        # in each.  All complement pieces of a cut surface have Euler
        # characteristic at most one, so the count chi(S) + #arcs equals
        # the number of components exactly when every piece is a disc.
        cells, face_cells, comp, n_comp = _complement_cells(S, self.arcs)
        expected = S.euler_characteristic() + len(self.arcs)
        if n_comp != expected:
            raise HKKError(
                "complement has %d components, not %d: not all discs"
                % (n_comp, expected)
            )
        per_comp = [0] * n_comp
        for side, param in stops:
            per_comp[comp[_stop_cell(S, cells, face_cells, side, param)]] += 1
        if n_comp != len(stops) or any(x != 1 for x in per_comp):
            raise HKKError(
                "stops per complementary disc: %r (need exactly one each)"
                % (per_comp,)
            )
        self._cells = (cells, face_cells, comp, n_comp)

    def _build_intervals(self):
        """Boundary intervals (components of the boundary minus the stops)
        with the ordered arc endpoints on each.

        An endpoint record is (arc_index, which_end); which_end doubles as
        the Z/2 grading contribution of a chord ending there."""
        S = self.surface
        ends = {}
        for ai, a in enumerate(self.arcs):
            for side, param, we in _arc_endpoints(a):
                ends.setdefault(side, []).append((param, ai, we))
        intervals = []
        interval_points = []  # (cycle index, cycle position, side, param)
        interval_stops = []  # terminal stop of each run, same format
        for cycle_index, cyc in enumerate(S.boundary_cycles):
            marks = []  # (position in cycle, param, kind, payload)
            for pos, side in enumerate(cyc):
                for x in S.stops.get(side, ()):
                    marks.append((pos, x, "stop", None))
                for param, ai, we in ends.get(side, ()):
                    marks.append((pos, param, "end", (ai, we)))
            marks.sort(key=lambda m: (m[0], m[1]))
            stop_positions = [
                i for i, m in enumerate(marks) if m[2] == "stop"
            ]
            # split the cyclic order at each stop
            for si, i0 in enumerate(stop_positions):
                i1 = stop_positions[(si + 1) % len(stop_positions)]
                run = []
                points = []
                j = (i0 + 1) % len(marks)
                while j != i1:
                    if marks[j][2] == "end":
                        run.append(marks[j][3])
                        points.append((cycle_index, marks[j][0],
                                       cyc[marks[j][0]], marks[j][1]))
                    j = (j + 1) % len(marks)
                intervals.append(tuple(run))
                interval_points.append(tuple(points))
                interval_stops.append((cycle_index, marks[i1][0],
                                       cyc[marks[i1][0]], marks[i1][1]))
        self.intervals = tuple(intervals)
        self.interval_points = tuple(interval_points)
        self.interval_stops = tuple(interval_stops)

    def endpoint_count(self):
        return sum(len(run) for run in self.intervals)


# ---------------------------------------------------------------------------
# the gentle algebra
# ---------------------------------------------------------------------------


class GentleAlgebra:
    """The quiver algebra of a full formal arc system.

    Vertices are the arcs.  Basis chords are triples (iv, i, j) with i < j:
    the positively oriented boundary path on interval iv from endpoint i to
    endpoint j.  Arrows are the chords with j = i + 1.  The Z/2 degree of a
    chord is the sum of the which_end flags at its two endpoints; products
    concatenate chords with a common endpoint and vanish otherwise."""

    def __init__(self, system):
        self.system = system
        self.n_arcs = len(system.arcs)
        self.chords = {}
        for iv, run in enumerate(system.intervals):
            for i in range(len(run)):
                for j in range(i + 1, len(run)):
                    ai, wi = run[i]
                    aj, wj = run[j]
                    self.chords[(iv, i, j)] = {
                        "source": ai,
                        "target": aj,
                        "degree": (wi + wj) % 2,
                        "length": j - i,
                    }

    def arrows(self):
        return sorted(k for k in self.chords if k[2] == k[1] + 1)

    def chord_source(self, key):
        return self.chords[key]["source"]

    def chord_target(self, key):
        return self.chords[key]["target"]

    def chord_degree(self, key):
        return self.chords[key]["degree"]

    def compose(self, later, earlier):
        """The concatenation later * earlier, or None when it vanishes."""
        iv1, i1, j1 = earlier
        iv2, i2, j2 = later
        if iv1 != iv2 or j1 != i2:
            return None
        return (iv1, i1, j2)

    def chords_between(self, src_arc, tgt_arc):
        return sorted(
            k
            for k, d in self.chords.items()
            if d["source"] == src_arc and d["target"] == tgt_arc
        )


# algebra elements: dict chord_key -> NovikovScalar (no identity component)


def el_add(x, y):
    out = dict(x)
    for k, v in y.items():
        w = out.get(k, NovikovScalar.zero()) + v
        if w.is_zero():
            out.pop(k, None)
        else:
            out[k] = w
    return out


def el_scale(x, c):
    c = linalg.scalar(c)
    if c.is_zero():
        return {}
    return {k: v * c for k, v in x.items()}


def el_compose(G, later, earlier):
    out = {}
    for k2, v2 in later.items():
        for k1, v1 in earlier.items():
            k = G.compose(k2, k1)
            if k is None:
                continue
            w = out.get(k, NovikovScalar.zero()) + v2 * v1
            if w.is_zero():
                out.pop(k, None)
            else:
                out[k] = w
    return out


# ---------------------------------------------------------------------------
# twisted complexes
# ---------------------------------------------------------------------------


class TwistedComplexHKK:
    """A twisted complex over the gentle algebra.

    summands: list of (arc_index, Z/2 shift), each a one-dimensional
    multiplicity line.  delta: dict (row, col) -> algebra element mapping
    summand col to summand row.  Entries lie in the chord ideal (no
    identity components), are odd for the total grading, and satisfy
    delta * delta = 0; nilpotency of the chord ideal replaces the usual
    triangularity requirement (bands wrap around)."""

    def __init__(self, algebra, summands, delta, check=True):
        self.algebra = algebra
        self.summands = [(int(a), int(s) % 2) for (a, s) in summands]
        self.delta = {
            k: dict(v) for k, v in delta.items() if v
        }
        if check:
            err = validate_twcx(algebra, self, reason=True)
            if err is not None:
                raise HKKError(err)

    def dimension_vector(self):
        """dims[(arc, degree)] over the summands."""
        out = {}
        for a, s in self.summands:
            out[(a, s)] = out.get((a, s), 0) + 1
        return out

    def to_json(self):
        return {
            "summands": [list(x) for x in self.summands],
            "delta": sorted(
                {
                    "row": r,
                    "col": c,
                    "entry": sorted(
                        [list(k), format_scalar(v)] for k, v in el.items()
                    ),
                }
                for (r, c), el in self.delta.items()
            ),
        }


def validate_twcx(G, T, reason=False):
    """True when T is a valid twisted complex over G: entries supported on
    chords, odd, with delta squared zero in the algebra."""

    def fail(msg):
        if reason:
            return msg
        return False

    n = len(T.summands)
    for (r, c), el in T.delta.items():
        if not (0 <= r < n and 0 <= c < n):
            return fail("delta entry outside the summand range")
        arc_c, s_c = T.summands[c]
        arc_r, s_r = T.summands[r]
        for k, v in el.items():
            if k not in G.chords:
                return fail("unknown chord %r" % (k,))
            if G.chord_source(k) != arc_c or G.chord_target(k) != arc_r:
                return fail("chord %r does not match summand arcs" % (k,))
            if (G.chord_degree(k) + s_c + s_r) % 2 != 1:
                return fail("even delta entry at (%d, %d)" % (r, c))
    for i in range(n):
        for k in range(n):
            acc = {}
            for j in range(n):
                a = T.delta.get((i, j))
                b = T.delta.get((j, k))
                if a and b:
                    acc = el_add(acc, el_compose(G, a, b))
            if acc:
                return fail(
                    "delta squared is nonzero at (%d, %d)" % (i, k)
                )
    return None if reason else True


# ---------------------------------------------------------------------------
# hom complexes over the algebra
# ---------------------------------------------------------------------------


_ID = "id"


def _hom_basis(G, T0, T1):
    """Basis of hom(T0, T1): (col summand of T0, row summand of T1, h) with
    h a chord arc(col) -> arc(row) or the identity for equal arcs."""
    basis = []
    for c, (ac, sc) in enumerate(T0.summands):
        for r, (ar, sr) in enumerate(T1.summands):
            if ac == ar:
                basis.append((c, r, _ID, (sc + sr) % 2))
            for k in G.chords_between(ac, ar):
                basis.append((c, r, k, (G.chord_degree(k) + sc + sr) % 2))
    return basis


def _h_compose(G, later, earlier):
    """Compose basis morphisms (chord keys or identities)."""
    if later == _ID:
        return earlier
    if earlier == _ID:
        return later
    return G.compose(later, earlier)


def hom_complex_hkk(G, T0, T1):
    """(basis, degrees, differential matrix) of hom(T0, T1) with
    d(phi) = delta1 . phi - (-1)^|phi| phi . delta0."""
    basis = _hom_basis(G, T0, T1)
    index = {}
    for i, (c, r, h, d) in enumerate(basis):
        index.setdefault((c, r), []).append((i, h))
    dim = len(basis)
    diff = [
        [NovikovScalar.zero() for _ in range(dim)] for _ in range(dim)
    ]

    def add(c, r, h, coeff):
        if h is None or coeff.is_zero():
            return []
        return [
            (i, coeff) for (i, hh) in index.get((c, r), ()) if hh == h
        ]

    for j, (c, r, h, d) in enumerate(basis):
        sgn = -1 if d % 2 == 0 else 1  # -(-1)^|phi|
        targets = {}
        for (r2, rr), el in T1.delta.items():
            if rr != r:
                continue
            for k, v in el.items():
                for i, coeff in add(c, r2, _h_compose(G, k, h), v):
                    targets[i] = targets.get(i, NovikovScalar.zero()) + coeff
        for (cc, c2), el in T0.delta.items():
            if cc != c:
                continue
            for k, v in el.items():
                for i, coeff in add(
                    c2, r, _h_compose(G, h, k), v * sgn
                ):
                    targets[i] = targets.get(i, NovikovScalar.zero()) + coeff
        for i, coeff in targets.items():
            diff[i][j] = diff[i][j] + coeff
    degrees = [d for (_, _, _, d) in basis]
    return basis, degrees, diff


def hom_ranks_hkk(G, T0, T1):
    """Graded ranks (rank in degree 0, rank in degree 1) of H(hom(T0, T1))."""
    basis, degrees, diff = hom_complex_hkk(G, T0, T1)
    idx0 = [i for i, d in enumerate(degrees) if d == 0]
    idx1 = [i for i, d in enumerate(degrees) if d == 1]

    def block(rows, cols):
        return [[diff[i][j] for j in cols] for i in rows]

    r01 = linalg.rank(block(idx1, idx0)) if idx0 and idx1 else 0
    r10 = linalg.rank(block(idx0, idx1)) if idx0 and idx1 else 0
    return (len(idx0) - r01 - r10, len(idx1) - r01 - r10)


# ---------------------------------------------------------------------------
# string/band decomposition
# ---------------------------------------------------------------------------


class StringBand:
    """An indecomposable piece of a twisted complex.

    walk: tuple alternating ("arc", arc_index, entry_end) and
    ("chord", chord_key, direction) entries; direction +1 when the
    differential runs along the walk direction, -1 against it.  For bands
    the walk is cyclic (starts and ends with an arc entry, with a final
    chord closing up); holonomy is an invertible matrix over the Novikov
    scalars, valuation-normalized, with the swept flux recorded."""

    def __init__(self, kind, walk, shifts, rank=1, holonomy=None, flux=None):
        self.kind = kind
        self.walk = tuple(walk)
        self.shifts = tuple(shifts)
        self.rank = rank
        self.holonomy = holonomy
        self.flux = flux

    def arcs(self):
        return [w[1] for w in self.walk if w[0] == "arc"]

    def dimension_vector(self):
        out = {}
        for w, s in zip(
            [x for x in self.walk if x[0] == "arc"], self.shifts
        ):
            key = (w[1], s)
            out[key] = out.get(key, 0) + self.rank
        return out

    def __repr__(self):
        return "StringBand(%s, rank %d, %r)" % (
            self.kind, self.rank, self.walk,
        )


class _Reduction:
    """Mutable copy of a twisted complex undergoing basis changes."""

    def __init__(self, T):
        self.G = T.algebra
        self.summands = list(T.summands)
        self.delta = {k: dict(v) for k, v in T.delta.items()}
        sysm = self.G.system
        self.port_of = {}  # (arc, which_end) -> (interval, position)
        for iv, run in enumerate(sysm.intervals):
            for pos, (ai, we) in enumerate(run):
                self.port_of[(ai, we)] = (iv, pos)
        self.end_of = {v: k for k, v in self.port_of.items()}

    # -- elementary ops ------------------------------------------------

    def _prune(self, key):
        el = self.delta.get(key)
        if el is not None:
            for k in [k for k, v in el.items() if v.is_zero()]:
                del el[k]
            if not el:
                del self.delta[key]

    def conj(self, a, b, h, nu):
        """Conjugate by id + nu * h * E_{a,b} (h: summand b -> summand a,
        a chord key; nilpotent, so also valid with a == b)."""
        G = self.G
        nu = linalg.scalar(nu)
        delta = self.delta

        def lmul(el):
            out = {}
            for k, v in el.items():
                kk = G.compose(h, k)
                if kk is not None:
                    out[kk] = out.get(kk, NovikovScalar.zero()) + nu * v
            return out

        def rmul(el):
            out = {}
            for k, v in el.items():
                kk = G.compose(k, h)
                if kk is not None:
                    out[kk] = out.get(kk, NovikovScalar.zero()) + nu * v
            return out

        adds = {}

        def accum(key, el):
            if el:
                adds[key] = el_add(adds.get(key, {}), el)

        for (r, c), el in list(delta.items()):
            if r == b:
                accum((a, c), lmul(el))  # N delta
            if c == a:
                accum((r, b), el_scale(rmul(el), -1))  # -delta N
        mid = delta.get((b, a))
        if mid:
            accum((a, b), el_scale(lmul(rmul(mid)), -1))  # -N delta N
        for key, el in adds.items():
            self.delta[key] = el_add(self.delta.get(key, {}), el)
            self._prune(key)

    def transform_group(self, group, C):
        """Basis change on a same-(arc, shift) group of summands:
        new e_j = sum_i C[i][j] old e_i."""
        Cinv = linalg.mat_inv(C)
        delta = self.delta
        g_index = {s: i for i, s in enumerate(group)}
        # columns: delta[.][group] -> delta[.][group] * C
        rows = set(r for (r, c) in delta if c in g_index)
        for r in rows:
            old = [delta.get((r, s), {}) for s in group]
            for j, s in enumerate(group):
                new = {}
                for i in range(len(group)):
                    new = el_add(new, el_scale(old[i], C[i][j]))
                if new:
                    delta[(r, s)] = new
                else:
                    delta.pop((r, s), None)
        # rows: delta[group][.] -> Cinv * delta[group][.]
        cols = set(c for (r, c) in delta if r in g_index)
        for c in cols:
            old = [delta.get((s, c), {}) for s in group]
            for i, s in enumerate(group):
                new = {}
                for j in range(len(group)):
                    new = el_add(new, el_scale(old[j], Cinv[i][j]))
                if new:
                    delta[(s, c)] = new
                else:
                    delta.pop((s, c), None)
        for key in list(delta.keys()):
            self._prune(key)

    # -- phase A: port discipline --------------------------------------

    def placements(self):
        out = []
        for (r, c), el in self.delta.items():
            for k, v in el.items():
                out.append((r, c, k, v))
        return out

    def port_conflicts(self):
        """Ports carrying more than one chord type; chords from a common
        endpoint are nested, so the shorter is a prefix/suffix of the
        longer."""
        by_port = {}
        for r, c, k, v in self.placements():
            iv, i, j = k
            by_port.setdefault(("src", c, (iv, i)), set()).add(k)
            by_port.setdefault(("tgt", r, (iv, j)), set()).add(k)
        return {p: ks for p, ks in by_port.items() if len(ks) > 1}

    def resolve_ports(self, cap=4000):
        G = self.G
        for _ in range(cap):
            conflicts = self.port_conflicts()
            if not conflicts:
                return
            port = sorted(conflicts)[0]
            kinds = sorted(conflicts[port], key=lambda k: k[2] - k[1])
            short, long_ = kinds[0], kinds[-1]
            role, summand, _pt = port
            if role == "src":
                # long = eta . short; kill a long placement using a pivot
                # placement of short at the same source summand
                eta = (short[0], short[2], long_[2])
                pivot = None
                victim = None
                for r, c, k, v in self.placements():
                    if c != summand:
                        continue
                    if k == short and pivot is None:
                        pivot = (r, v)
                    if k == long_ and victim is None:
                        victim = (r, v)
                r1, lam = pivot
                r2, mu = victim
                self.conj(r2, r1, eta, -(mu / lam))
            else:
                # long = short . theta; column op through the target
                theta = (short[0], long_[1], short[1])
                pivot = None
                victim = None
                for r, c, k, v in self.placements():
                    if r != summand:
                        continue
                    if k == short and pivot is None:
                        pivot = (c, v)
                    if k == long_ and victim is None:
                        victim = (c, v)
                c1, lam = pivot
                c2, mu = victim
                self.conj(c1, c2, theta, mu / lam)
        raise HKKError("port resolution did not terminate")

    # -- phase B: junction resolution ----------------------------------

    def junctions(self):
        """Resolved view: dict (chord, source shift) ->
        (sources, targets, matrix rows=targets cols=sources)."""
        out = {}
        for r, c, k, v in self.placements():
            sc = self.summands[c][1]
            key = (k, sc)
            if key not in out:
                out[key] = ([], [], {})
            srcs, tgts, ent = out[key]
            if c not in srcs:
                srcs.append(c)
            if r not in tgts:
                tgts.append(r)
            ent[(r, c)] = v
        resolved = {}
        for key, (srcs, tgts, ent) in out.items():
            srcs.sort()
            tgts.sort()
            M = [
                [
                    ent.get((t, s), NovikovScalar.zero())
                    for s in srcs
                ]
                for t in tgts
            ]
            resolved[key] = (srcs, tgts, M)
        return resolved

    def _gauss_split(self, key, srcs, tgts, M):
        """Two-sided Gaussian for a junction with disjoint source/target
        groups.  A junction is resolved when every support block is square
        and invertible; otherwise transform to [[I, 0], [0, 0]] shape.
        Returns True when a basis change was applied."""
        t, s = len(tgts), len(srcs)
        blocks = _support_blocks(M)
        if all(
            len(ris) == len(cis)
            and linalg.rank([[M[i][j] for j in cis] for i in ris])
            == len(ris)
            for ris, cis in blocks
        ):
            return False
        P = linalg.identity(t)
        Q = linalg.identity(s)
        A = [row[:] for row in M]
        r = 0
        for col in range(s):
            piv = None
            for row in range(r, t):
                if not A[row][col].is_zero():
                    piv = row
                    break
            if piv is None:
                continue
            A[r], A[piv] = A[piv], A[r]
            P[r], P[piv] = P[piv], P[r]
            inv = A[r][col].inverse()
            A[r] = [x * inv for x in A[r]]
            P[r] = [x * inv for x in P[r]]
            for row in range(t):
                if row != r and not A[row][col].is_zero():
                    f = A[row][col]
                    A[row] = [x - f * y for x, y in zip(A[row], A[r])]
                    P[row] = [x - f * y for x, y in zip(P[row], P[r])]
            r += 1
        pivots = []
        for row in range(r):
            col = next(
                j for j in range(s) if not A[row][j].is_zero()
            )
            pivots.append(col)
            for j in range(s):
                if j != col and not A[row][j].is_zero():
                    f = A[row][j]
                    for i in range(t):
                        A[i][j] = A[i][j] - f * A[i][col]
                    for i in range(s):
                        Q[i][j] = Q[i][j] - f * Q[i][col]
        # permute pivot columns to the front
        order = pivots + [j for j in range(s) if j not in pivots]
        Qp = [[Q[i][j] for j in order] for i in range(s)]
        # new source basis: columns of Qp; new target basis: P^{-1}
        self.transform_group(srcs, Qp)
        self.transform_group(tgts, linalg.mat_inv(P))
        return True

    def force_identity(self, group, M):
        """Make a square invertible block the identity by a source-side
        basis change."""
        self.transform_group(group, linalg.mat_inv(M))

    def _fitting_split(self, group, M):
        """Similarity normal form for a self-junction (source and target
        groups overlap): Fitting decomposition into an invertible block
        and a nilpotent part in Jordan form with unit entries.  The no-op
        condition is that every support block of M is square invertible
        (Jordan pairs are 1x1 blocks; the invertible part is a fat
        block)."""
        n = len(group)
        if all(
            len(ris) == len(cis)
            and linalg.rank([[M[i][j] for j in cis] for i in ris])
            == len(ris)
            for ris, cis in _support_blocks(M)
        ):
            return False
        power = linalg.identity(n)
        for _ in range(n):
            power = linalg.mat_mul(power, M)
        ker = linalg.kernel_basis(power)
        k = len(ker)
        if k == 0:
            return False
        if k == n:
            chains = _jordan_chains(M)
            C = _chain_basis(chains, n)
            self.transform_group(group, C)
            return True
        img = _column_space_basis(power)
        if len(img) + k != n:
            raise HKKError("Fitting decomposition failed")
        cols = [list(v) for v in ker] + [list(v) for v in img]
        C0 = [
            [linalg.scalar(cols[j][i]) for j in range(n)]
            for i in range(n)
        ]
        if linalg.rank([row[:] for row in C0]) != n:
            raise HKKError("Fitting basis is degenerate")
        C0inv = linalg.mat_inv(C0)
        M1 = linalg.mat_mul(C0inv, linalg.mat_mul(M, C0))
        for i in range(k):
            for j in range(k, n):
                if not (M1[i][j].is_zero() and M1[j][i].is_zero()):
                    raise HKKError("Fitting blocks do not decouple")
        N = [[M1[i][j] for j in range(k)] for i in range(k)]
        chains = _jordan_chains(N)
        C1 = _chain_basis(chains, k)
        C = [row[:] for row in C0]
        for i in range(n):
            for j in range(k):
                C[i][j] = sum(
                    (C0[i][x] * C1[x][j] for x in range(k)),
                    NovikovScalar.zero(),
                )
        self.transform_group(group, C)
        return True

    def resolve_junctions(self, cap=400):
        for _ in range(cap):
            changed = False
            for key in sorted(self.junctions()):
                junc = self.junctions().get(key)
                if junc is None:
                    continue
                srcs, tgts, M = junc
                if set(srcs) & set(tgts):
                    U = sorted(set(srcs) | set(tgts))
                    pos = {u: x for x, u in enumerate(U)}
                    MU = [
                        [NovikovScalar.zero()] * len(U)
                        for _ in range(len(U))
                    ]
                    for i, tt in enumerate(tgts):
                        for j, ss in enumerate(srcs):
                            MU[pos[tt]][pos[ss]] = M[i][j]
                    if self._fitting_split(U, MU):
                        changed = True
                else:
                    if self._gauss_split(key, srcs, tgts, M):
                        changed = True
                if changed:
                    break
            if not changed:
                return
            self.resolve_ports()
        raise HKKError("junction resolution did not terminate")


def _column_space_basis(M):
    """A basis of the column space, as column vectors."""
    if not M:
        return []
    t = len(M)
    s = len(M[0])
    cols = [[M[i][j] for i in range(t)] for j in range(s)]
    basis = []
    echelon = []
    for vec in cols:
        v = [linalg.scalar(x) for x in vec]
        for e in echelon:
            piv = next(
                (i for i, x in enumerate(e) if not x.is_zero()), None
            )
            if piv is not None and not v[piv].is_zero():
                f = v[piv] / e[piv]
                v = [a - f * b for a, b in zip(v, e)]
        if any(not x.is_zero() for x in v):
            echelon.append(v)
            basis.append([linalg.scalar(x) for x in vec])
    return basis


def _jordan_chains(M):
    """Jordan chains of a nilpotent matrix over the Novikov field:
    list of chains [v, Mv, M^2 v, ...] (nonzero entries), jointly a basis."""
    n = len(M)

    def apply(v):
        return [
            sum(
                (M[i][j] * v[j] for j in range(n)),
                NovikovScalar.zero(),
            )
            for i in range(n)
        ]

    # heights
    powers = [linalg.identity(n)]
    while True:
        nxt = linalg.mat_mul(powers[-1], M)
        powers.append(nxt)
        if all(x.is_zero() for row in nxt for x in row):
            break
    height = len(powers) - 1

    chains = []
    used = []  # echelon basis of spanned vectors

    def reduce_vec(v):
        v = [linalg.scalar(x) for x in v]
        for e in used:
            piv = next(
                (i for i, x in enumerate(e) if not x.is_zero()), None
            )
            if piv is not None and not v[piv].is_zero():
                f = v[piv] / e[piv]
                v = [a - f * b for a, b in zip(v, e)]
        return v

    for h in range(height, 0, -1):
        # vectors of height exactly h extending the current span
        for j in range(n):
            seed = [
                NovikovScalar.one() if i == j else NovikovScalar.zero()
                for i in range(n)
            ]
            top = [
                sum(
                    (powers[h - 1][i][k] * seed[k] for k in range(n)),
                    NovikovScalar.zero(),
                )
                for i in range(n)
            ]
            if all(x.is_zero() for x in top):
                continue
            if all(x.is_zero() for x in reduce_vec(seed)):
                continue
            # candidate chain
            chain = [seed]
            for _ in range(h - 1):
                chain.append(apply(chain[-1]))
            ok = True
            fresh = []
            for vec in chain:
                red = reduce_vec(vec)
                if all(x.is_zero() for x in red):
                    ok = False
                    break
                fresh.append((vec, red))
            if not ok:
                continue
            for vec, red in fresh:
                used.append(red)
            chains.append(chain)
    total = sum(len(c) for c in chains)
    if total != n:
        raise HKKError("Jordan chain extraction failed")
    return chains


def _support_blocks(M):
    """Connected components of the bipartite support graph of a matrix:
    list of (row_indices, col_indices), each sorted, covering all rows and
    columns that carry a nonzero entry."""
    t = len(M)
    s = len(M[0]) if t else 0
    row_comp = [None] * t
    col_comp = [None] * s
    blocks = []
    for i0 in range(t):
        if row_comp[i0] is not None:
            continue
        if all(M[i0][j].is_zero() for j in range(s)):
            continue
        rows, cols = set(), set()
        stack = [("r", i0)]
        row_comp[i0] = len(blocks)
        rows.add(i0)
        while stack:
            kind, x = stack.pop()
            if kind == "r":
                for j in range(s):
                    if not M[x][j].is_zero() and col_comp[j] is None:
                        col_comp[j] = len(blocks)
                        cols.add(j)
                        stack.append(("c", j))
            else:
                for i in range(t):
                    if not M[i][x].is_zero() and row_comp[i] is None:
                        row_comp[i] = len(blocks)
                        rows.add(i)
                        stack.append(("r", i))
        blocks.append((sorted(rows), sorted(cols)))
    return blocks


def _chain_basis(chains, n):
    """Basis-change matrix whose columns are the chain vectors."""
    C = [[NovikovScalar.zero()] * n for _ in range(n)]
    j = 0
    for chain in chains:
        for vec in chain:
            for i in range(n):
                C[i][j] = linalg.scalar(vec[i])
            j += 1
    if j != n or linalg.rank([row[:] for row in C]) != n:
        raise HKKError("Jordan chain basis is degenerate")
    return C


# ---------------------------------------------------------------------------
# component tracing
# ---------------------------------------------------------------------------


class _ForceRequest(Exception):
    """Tracing found a fat block whose groups do not continue coherently;
    carry the block (junction key, source side, matrix) to be forced to
    the identity."""

    def __init__(self, key, srcs, subM, selfy):
        self.key = key
        self.srcs = srcs
        self.subM = subM
        self.selfy = selfy


def _mat_det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    det = NovikovScalar.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [
            [M[i][jj] for jj in range(n) if jj != j]
            for i in range(1, n)
        ]
        term = M[0][j] * _mat_det(minor)
        det = det + (term if j % 2 == 0 else NovikovScalar.zero() - term)
    return det


class _Tracer:
    def __init__(self, red):
        self.red = red
        self.junc = red.junctions()
        self.n = len(red.summands)
        self.ports = {}
        for key, (srcs, tgts, M) in self.junc.items():
            iv, i, j = key[0]
            se = red.end_of[(iv, i)][1]
            te = red.end_of[(iv, j)][1]
            for s in srcs:
                if (s, se) in self.ports:
                    raise HKKError("port %r used twice" % ((s, se),))
                self.ports[(s, se)] = (key, "src")
            for t in tgts:
                if (t, te) in self.ports:
                    raise HKKError("port %r used twice" % ((t, te),))
                self.ports[(t, te)] = (key, "tgt")
        # parallel groups: union over fat support blocks
        self.parent = list(range(self.n))
        self.fat_of = {}
        for key in sorted(self.junc):
            srcs, tgts, M = self.junc[key]
            for ris, cis in _support_blocks(M):
                if len(ris) != len(cis):
                    raise HKKError(
                        "resolution left a non-square block on %r"
                        % (key,)
                    )
                subM = [[M[i][j] for j in cis] for i in ris]
                if linalg.rank([r[:] for r in subM]) != len(ris):
                    raise HKKError(
                        "resolution left a singular block on %r"
                        % (key,)
                    )
                if len(ris) > 1:
                    bs = [srcs[j] for j in cis]
                    bt = [tgts[i] for i in ris]
                    selfy = bool(set(bs) & set(bt))
                    block = (key, bs, subM, selfy)
                    for side in (bs, bt):
                        for m in side[1:]:
                            self._union(side[0], m)
                    for m in set(bs) | set(bt):
                        self.fat_of.setdefault(m, []).append(block)

    def _find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def _union(self, a, b):
        ra, rb = self._find(a), self._find(b)
        if ra != rb:
            self.parent[rb] = ra

    def group_of(self, s):
        r = self._find(s)
        return tuple(sorted(
            m for m in range(self.n) if self._find(m) == r
        ))

    def _force_candidate(self, group):
        for m in group:
            for block in self.fat_of.get(m, ()):
                if not block[3]:
                    raise _ForceRequest(*block)
        raise HKKError("incoherent scalar-level continuation")

    def step(self, group, entry_end):
        """Leave `group` through the end opposite entry_end: either None
        (free) or (chord, dir, factor, next_group, next_entry_end)."""
        exit_end = 1 - entry_end
        hits = [self.ports.get((m, exit_end)) for m in group]
        if all(h is None for h in hits):
            return None
        if any(h is None for h in hits) or len(set(hits)) != 1:
            self._force_candidate(group)
        key, role = hits[0]
        srcs, tgts, M = self.junc[key]
        si = {s: j for j, s in enumerate(srcs)}
        ti = {t: i for i, t in enumerate(tgts)}
        if role == "src":
            cols = [si[m] for m in group]
            rows = sorted(
                i for i in range(len(tgts))
                if any(not M[i][j].is_zero() for j in cols)
            )
            # closure: the far rows must not receive from outside cols
            for i in rows:
                for j in range(len(srcs)):
                    if j not in cols and not M[i][j].is_zero():
                        self._force_junction(key, j)
            far = [tgts[i] for i in rows]
            sub = [[M[i][j] for j in cols] for i in rows]
        else:
            rows = [ti[m] for m in group]
            cols = sorted(
                j for j in range(len(srcs))
                if any(not M[i][j].is_zero() for i in rows)
            )
            for j in cols:
                for i in range(len(tgts)):
                    if i not in rows and not M[i][j].is_zero():
                        self._force_junction(key, j)
            far = [srcs[j] for j in cols]
            sub = [[M[i][j] for j in cols] for i in rows]
        if len(far) != len(group) or                 linalg.rank([r[:] for r in sub]) != len(far):
            self._force_junction(key, None)
        nxt = tuple(sorted(far))
        if set(self.group_of(far[0])) != set(nxt):
            self._force_candidate(nxt)
        iv, i0, j0 = key[0]
        if role == "src":
            factor = _reorder(sub, far, list(group), nxt, list(group))
            nxt_end = self.red.end_of[(iv, j0)][1]
        else:
            factor = linalg.mat_inv(
                _reorder(sub, list(group), far, list(group), None)
            )
            nxt_end = self.red.end_of[(iv, i0)][1]
        return key[0], (1 if role == "src" else -1), factor, nxt, nxt_end

    def _force_junction(self, key, col_hint):
        srcs, tgts, M = self.junc[key]
        for ris, cis in _support_blocks(M):
            if len(ris) > 1 and (col_hint is None or col_hint in cis):
                bs = [srcs[j] for j in cis]
                subM = [[M[i][j] for j in cis] for i in ris]
                selfy = bool(set(bs) & set(tgts[i] for i in ris))
                raise _ForceRequest(key, bs, subM, selfy)
        raise HKKError("incoherent junction %r has no fat block" % (key,))


def _reorder(M, row_names, col_names, row_order, col_order):
    """Reindex a block matrix to the given row/column name orders."""
    ro = list(row_order) if row_order is not None else sorted(row_names)
    co = list(col_order) if col_order is not None else sorted(col_names)
    ti = {t: i for i, t in enumerate(row_names)}
    si = {s: j for j, s in enumerate(col_names)}
    return [[M[ti[t]][si[s]] for s in co] for t in ro]


def _trace(red):
    """Read off the string and band pieces of a resolved complex."""
    tr = _Tracer(red)
    n_sum = tr.n
    arcs_of = [red.summands[k][0] for k in range(n_sum)]
    shift_of = [red.summands[k][1] for k in range(n_sum)]
    visited = [False] * n_sum
    out = []

    def mark(group):
        for m in group:
            if visited[m]:
                raise HKKError("summand traced twice")
            visited[m] = True

    # strings start at free ports
    for s0 in range(n_sum):
        for end in (0, 1):
            if visited[s0]:
                continue
            group = tr.group_of(s0)
            if any((m, end) in tr.ports for m in group):
                continue
            if any(shift_of[m] != shift_of[group[0]] for m in group):
                tr._force_candidate(group)
            walk = [("arc", arcs_of[group[0]], end)]
            shifts = [shift_of[group[0]]]
            mark(group)
            cur, cur_end = group, end
            for _guard in range(2 * n_sum + 2):
                step = tr.step(cur, cur_end)
                if step is None:
                    break
                chord, direction, _f, nxt, nxt_end = step
                walk.append(("chord", chord, direction))
                walk.append(("arc", arcs_of[nxt[0]], nxt_end))
                shifts.append(shift_of[nxt[0]])
                mark(nxt)
                cur, cur_end = nxt, nxt_end
            else:
                raise HKKError("string walk did not terminate")
            w, sh = _canonical_string(walk, shifts)
            for _ in range(len(group)):
                out.append(StringBand("string", w, sh))

    # bands on the rest
    for s0 in range(n_sum):
        if visited[s0]:
            continue
        start = tr.group_of(s0)
        if any(shift_of[m] != shift_of[start[0]] for m in start):
            tr._force_candidate(start)
        start_end = 0
        walk = [("arc", arcs_of[start[0]], start_end)]
        shifts = [shift_of[start[0]]]
        factors = []
        mark(start)
        cur, cur_end = start, start_end
        closed_up = False
        for _guard in range(2 * n_sum + 2):
            step = tr.step(cur, cur_end)
            if step is None:
                raise HKKError("band walk hit a free port")
            chord, direction, factor, nxt, nxt_end = step
            walk.append(("chord", chord, direction))
            factors.append(factor)
            if nxt == start and nxt_end == start_end:
                closed_up = True
                break
            walk.append(("arc", arcs_of[nxt[0]], nxt_end))
            shifts.append(shift_of[nxt[0]])
            mark(nxt)
            cur, cur_end = nxt, nxt_end
        if not closed_up:
            raise HKKError("band walk did not close up")
        out.extend(_make_bands(walk, shifts, factors))

    if not all(visited):
        raise HKKError("tracing missed summands")
    return out


def _canonical_string(walk, shifts):
    """The lexicographically smaller of a string walk and its reversal.
    Each arc is entered through one end and left through the other, so on
    reversal the entry end flips."""
    fwd = (tuple(walk), tuple(shifts))
    arcs = walk[0::2]
    chords = walk[1::2]
    rwalk = []
    for k in range(len(arcs) - 1, -1, -1):
        _, a, e = arcs[k]
        rwalk.append(("arc", a, 1 - e))
        if k > 0:
            _, ch, d = chords[k - 1]
            rwalk.append(("chord", ch, -d))
    rev = (tuple(rwalk), tuple(reversed(shifts)))
    return min(fwd, rev)


def _band_rotations(walk, shifts, factors):
    """All rotations of a cyclic band walk and of its reversal, each with
    the correspondingly reordered holonomy factor sequence (reversal
    inverts the factors)."""
    arcs = walk[0::2]
    chords = walk[1::2]
    L = len(arcs)
    cands = []
    for r in range(L):
        w = []
        for k in range(L):
            w.append(arcs[(r + k) % L])
            w.append(chords[(r + k) % L])
        f = [factors[(r + k) % L] for k in range(L)]
        sh = tuple(shifts[(r + k) % L] for k in range(L))
        cands.append((tuple(w), sh, f))
    rarcs = []
    rchords = []
    rfactors = []
    for k in range(L):
        _, a, e = arcs[-k % L] if False else arcs[(L - k) % L]
        rarcs.append(("arc", a, 1 - e))
        _, ch, d = chords[(L - 1 - k) % L]
        rchords.append(("chord", ch, -d))
        rfactors.append(linalg.mat_inv(
            [row[:] for row in factors[(L - 1 - k) % L]]
        ))
    rshifts = tuple(shifts[(L - k) % L] for k in range(L))
    for r in range(L):
        w = []
        for k in range(L):
            w.append(rarcs[(r + k) % L])
            w.append(rchords[(r + k) % L])
        f = [rfactors[(r + k) % L] for k in range(L)]
        sh = tuple(rshifts[(r + k) % L] for k in range(L))
        # rotate the reversed shifts in step with the arcs
        cands.append((tuple(w), sh, f))
    return cands


def _make_bands(walk, shifts, factors):
    """Canonicalize a traced band: choose the lexicographically least
    rotation/reversal, fold non-primitive walks, normalize the holonomy
    valuation, and split scalar holonomies into rank-one bands."""
    cands = _band_rotations(walk, shifts, factors)
    best = min(cands, key=lambda x: (x[0], x[1]))
    w, sh, fs = best
    n = len(fs[0])
    H = linalg.identity(n)
    for f in fs:
        H = linalg.mat_mul(f, H)

    # fold non-primitive walks (rank one only)
    arcs = w[0::2]
    chords = w[1::2]
    L = len(arcs)
    period = L
    for p in range(1, L):
        if L % p:
            continue
        if all(
            arcs[k] == arcs[k % p]
            and chords[k] == chords[k % p]
            and sh[k] == sh[k % p]
            for k in range(L)
        ):
            period = p
            break
    if period < L:
        if n > 1:
            raise HKKError(
                "non-primitive band of rank > 1 is not supported"
            )
        k = L // period
        lam = H[0][0]
        wp = []
        for t in range(period):
            wp.append(arcs[t])
            wp.append(chords[t])
        w = tuple(wp)
        sh = sh[:period]
        H = [
            [NovikovScalar.zero() for _ in range(k)] for _ in range(k)
        ]
        for t in range(1, k):
            H[t][t - 1] = NovikovScalar.one()
        H[0][k - 1] = lam
        n = k

    det = _mat_det(H)
    if det.is_zero():
        raise HKKError("band holonomy is singular")
    v = det.valuation() / n
    scale = NovikovScalar.q_power(-v)
    H = [[scale * x for x in row] for row in H]

    lam0 = H[0][0]
    if n > 1 and all(
        H[i][j] == (lam0 if i == j else NovikovScalar.zero())
        for i in range(n)
        for j in range(n)
    ):
        return [
            StringBand("band", w, sh, 1, [[lam0]], v) for _ in range(n)
        ]
    if n == 2:
        tr = H[0][0] + H[1][1]
        dt = _mat_det(H)
        zero = NovikovScalar.zero()
        H = [[zero, zero - dt], [NovikovScalar.one(), tr]]
    elif n > 2 and period == len(arcs):
        raise HKKError("band holonomy of rank > 2 is not supported")
    return [StringBand("band", w, sh, n, H, v)]


def charpoly(M):
    """Coefficients [c_0, ..., c_{n-1}] of det(xI - M) = x^n + sum c_k x^k
    (Faddeev-LeVerrier over the Novikov field would need division by
    integers; use direct expansion on the small ranks in play)."""
    n = len(M)
    if n == 1:
        return [NovikovScalar.zero() - M[0][0]]
    if n == 2:
        tr = M[0][0] + M[1][1]
        return [_mat_det(M), NovikovScalar.zero() - tr]
    # interpolation-free expansion via minors of (xI - M) is awkward; for
    # the companion-shaped matrices produced above read off directly
    if all(
        M[i][j]
        == (NovikovScalar.one() if i == j + 1 else M[i][j])
        for i in range(n)
        for j in range(n)
    ) and all(
        M[i][j].is_zero()
        for j in range(n - 1)
        for i in range(n)
        if i != j + 1
    ):
        return [NovikovScalar.zero() - M[i][n - 1] for i in range(n)]
    raise HKKError("characteristic polynomial only for rank <= 2")


def band_invariant(piece):
    """Similarity-class data of a band: canonical walk, shifts, rank, flux
    and the characteristic polynomial of the normalized holonomy."""
    return (
        piece.walk,
        piece.shifts,
        piece.rank,
        piece.flux,
        tuple(format_scalar(c) for c in charpoly(piece.holonomy)),
    )


def piece_key(piece):
    if piece.kind == "string":
        return ("string", piece.walk, piece.shifts)
    return ("band",) + band_invariant(piece)


def decompose(T, max_restarts=80):
    """Decompose a twisted complex into strings and bands.

    Iterated pivoting: resolve port conflicts by unipotent conjugation,
    resolve junction matrices by two-sided elimination (Fitting + Jordan
    for self-junctions), then trace components.  When tracing finds a fat
    block whose groups do not continue coherently, the block is forced to
    the identity (splitting it into scalar edges) and resolution is
    re-run."""
    red = _Reduction(T)
    red.resolve_ports()
    red.resolve_junctions()
    for _ in range(max_restarts):
        try:
            pieces = _trace(red)
        except _ForceRequest as req:
            if req.selfy:
                raise HKKError(
                    "incoherent self-junction block cannot be split"
                )
            red.force_identity(sorted(req.srcs), _reorder(
                req.subM,
                list(range(len(req.srcs))),
                req.srcs,
                None if len(req.srcs) == 1 else list(
                    range(len(req.srcs))
                ),
                sorted(req.srcs),
            ))
            red.resolve_ports()
            red.resolve_junctions()
            continue
        want = {}
        for k, (a, s) in enumerate(T.summands):
            want[(a, s)] = want.get((a, s), 0) + 1
        got = {}
        for p in pieces:
            for key, m in p.dimension_vector().items():
                got[key] = got.get(key, 0) + m
        if want != got:
            raise HKKError(
                "decomposition changed the dimension vector: %r vs %r"
                % (want, got)
            )
        return sorted(pieces, key=piece_key)
    raise HKKError("decomposition did not stabilize")


# ---------------------------------------------------------------------------
# reference models
# ---------------------------------------------------------------------------


def gentle_algebra(system):
    """The gentle quiver algebra of a full formal arc system."""
    return GentleAlgebra(system)


class SurfaceModel:
    """A stopped surface with a chosen full formal arc system and its
    gentle algebra, plus the raw arc walk data used by the geometric
    replacement."""

    def __init__(self, name, surface, arc_specs):
        self.name = name
        self.surface = surface
        self.arc_specs = list(arc_specs)
        arcs = [
            realize_boundary_arc(surface, start, steps, end, salt=salt)
            for (start, steps, end, salt) in arc_specs
        ]
        self.system = ArcSystem(surface, arcs)
        self.algebra = GentleAlgebra(self.system)
        self._canonical_curves = {}
        self._grading = None

    @property
    def arcs(self):
        return self.system.arcs


def annulus_model():
    S = build_punctured(0, 2, stops=[1, 1])
    return SurfaceModel("annulus", S, [
        (((1, 1), Rat(3, 4)), [(1, 2), (2, 2), (3, 2)],
         ((4, 1), Rat(5, 8)), 2),
        (((1, 1), Rat(1, 4)), [(1, 0), (0, 0), (5, 0)],
         ((4, 1), Rat(7, 8)), 5),
    ])


def punctured_torus_model():
    S = build_punctured(1, 1, stops=[1])
    return SurfaceModel("punctured-torus", S, [
        (((5, 1), Rat(3, 8)),
         [(5, 0), (4, 0), (3, 0), (2, 0), (1, 1), (3, 2), (4, 2)],
         ((5, 1), Rat(1, 8)), 5),
        (((5, 1), Rat(1, 4)),
         [(5, 0), (4, 0), (3, 0), (2, 1), (0, 0), (6, 0)],
         ((5, 1), Rat(5, 8)), 2),
    ])


def pants_model():
    S = build_punctured(0, 3, stops=[1, 1, 1])
    return SurfaceModel("pants", S, [
        (((1, 1), Rat(1, 4)), [(1, 2), (2, 2), (3, 2)],
         ((4, 1), Rat(1, 4)), 3),
        (((4, 1), Rat(3, 4)), [(4, 2), (5, 2), (6, 2)],
         ((7, 1), Rat(1, 4)), 5),
        (((7, 1), Rat(3, 4)), [(7, 2), (8, 2), (0, 2)],
         ((1, 1), Rat(1, 8)), 7),
        (((1, 1), Rat(3, 16)), [(1, 0), (0, 0), (8, 0)],
         ((7, 1), Rat(5, 16)), 2),
    ])


def all_models():
    return [annulus_model(), punctured_torus_model(), pants_model()]


# ---------------------------------------------------------------------------
# geometric replacement
# ---------------------------------------------------------------------------


def _vertex_fan(S, side):
    """The interior sides crossed when rotating around the vertex at the
    far end of a boundary side, from that side's face to the face of the
    next boundary side in the cycle.  Returns (fan, next_boundary_side)."""
    f, i = side
    cur = (f, (i + 1) % S.face_sides[f])
    fan = []
    while cur in S.pairing:
        fan.append(cur)
        f2, j2 = S.pairing[cur]
        cur = (f2, (j2 + 1) % S.face_sides[f2])
        if len(fan) > 8 * S.num_faces:
            raise HKKError("vertex fan does not close up")
    return fan, cur


def _boundary_steps(S, ci, cpos_a, par_a, cpos_b, par_b):
    """Interior sides crossed by the boundary-hugging path from position
    (cpos_a, par_a) to (cpos_b, par_b) on boundary cycle ci, travelling
    in the positive boundary direction."""
    cyc = S.boundary_cycles[ci]
    L = len(cyc)
    nwrap = (cpos_b - cpos_a) % L
    if nwrap == 0 and par_b <= par_a:
        nwrap = L
    steps = []
    for t in range(nwrap):
        side_t = cyc[(cpos_a + t) % L]
        fan, nxt = _vertex_fan(S, side_t)
        if nxt != cyc[(cpos_a + t + 1) % L]:
            raise HKKError("vertex fan left the boundary cycle")
        steps.extend(fan)
    return steps


def _connector_steps(system, iv, pos_a, pos_b):
    """Interior sides crossed by the boundary-hugging path from mark
    pos_a to mark pos_b (positively oriented) on interval iv."""
    pts = system.interval_points[iv]
    ci, cpos_a, _side_a, par_a = pts[pos_a]
    _ci2, cpos_b, _side_b, par_b = pts[pos_b]
    return _boundary_steps(system.surface, ci, cpos_a, par_a, cpos_b, par_b)


def _cancel_backtracks(S, steps):
    out = []
    for s in steps:
        if out and S.pairing.get(out[-1]) == s:
            out.pop()
        else:
            out.append(s)
    return out


class _WalkGeometry:
    """Side itineraries and endpoint data of a model's arcs, in both
    orientations, for building composite replacement curves."""

    def __init__(self, model):
        self.model = model
        S = model.surface
        self.endpoint_pos = {}  # (arc, which_end) -> (iv, pos)
        for iv, run in enumerate(model.system.intervals):
            for pos, mark in enumerate(run):
                self.endpoint_pos[mark] = (iv, pos)
        self.itins = []
        self.endpoints = []
        for (start, steps, end, _salt) in model.arc_specs:
            rev = [S.pairing[s] for s in reversed(steps)]
            self.itins.append({0: list(steps), 1: rev})
            self.endpoints.append({0: start, 1: end})

    def composite(self, walk, closed):
        """The interior side itinerary of the composite curve of a walk,
        plus (for open walks) its free boundary endpoints."""
        S = self.model.surface
        arcs = walk[0::2]
        chords = walk[1::2]
        steps = []
        for k, (_, a, e) in enumerate(arcs):
            steps.extend(self.itins[a][e])
            is_last = k == len(arcs) - 1
            if is_last and not closed:
                break
            _, ch, _d = chords[k]
            iv, i, j = ch
            # the walk leaves arc a at its far end and hugs the boundary
            # along the chord, from the chord's lower mark to the upper
            exit_mark = (a, 1 - e)
            nk = arcs[(k + 1) % len(arcs)]
            enter_mark = (nk[1], nk[2])
            run = self.model.system.intervals[iv]
            if {run[i], run[j]} != {exit_mark, enter_mark}:
                raise HKKError(
                    "walk chord %r does not join %r -> %r"
                    % (ch, exit_mark, enter_mark)
                )
            if run[i] == exit_mark:
                steps.extend(_connector_steps(
                    self.model.system, iv, i, j
                ))
            else:
                # traversed against the chord: the same boundary stretch
                # backwards crosses the same sides in reverse, each from
                # the other face
                fwd = _connector_steps(self.model.system, iv, i, j)
                steps.extend(S.pairing[s] for s in reversed(fwd))
        steps = _cancel_backtracks(S, steps)
        if closed:
            return steps, None, None
        a0, e0 = arcs[0][1], arcs[0][2]
        al, el = arcs[-1][1], arcs[-1][2]
        return steps, self.endpoints[a0][e0], self.endpoints[al][1 - el]


def _walk_geometry(model):
    geo = getattr(model, "_geo", None)
    if geo is None:
        geo = _WalkGeometry(model)
        model._geo = geo
    return geo


def _stop_tail(model, mark):
    """(fan steps, stop side, low param, stop param) for the positive
    boundary path from an arc-end mark to just before the next stop."""
    geo = _walk_geometry(model)
    iv, pos = geo.endpoint_pos[mark]
    ci, cp, _side, par = model.system.interval_points[iv][pos]
    sci, scp, sside, spar = model.system.interval_stops[iv]
    steps = _boundary_steps(model.surface, ci, cp, par, scp, spar)
    lo = Rat(0)
    for pts in model.system.interval_points:
        for (_c, _p, side2, par2) in pts:
            if side2 == sside and par2 < spar and par2 > lo:
                lo = par2
    for par2 in model.surface.stops.get(sside, ()):
        if par2 < spar and par2 > lo:
            lo = Rat(par2)
    return steps, sside, lo, spar


def _wrap_param(lo, hi, k):
    """A parameter in (lo, hi) close to hi, distinct for each k >= 0."""
    return hi - (hi - lo) / (k + 2)


def _realize_string(model, walk, wrapped=False, salt=11, k=0):
    """An embedded arc realizing a string walk.  When `wrapped`, both free
    endpoints are additionally pushed positively along the boundary to
    just before the next stop (the perturbation under which morphisms out
    of the arc appear as honest crossings)."""
    S = model.surface
    geo = _walk_geometry(model)
    steps, start, end = geo.composite(walk, closed=False)
    if wrapped:
        arcs = walk[0::2]
        m0 = (arcs[0][1], arcs[0][2])
        m1 = (arcs[-1][1], 1 - arcs[-1][2])
        t0, side0, lo0, hi0 = _stop_tail(model, m0)
        t1, side1, lo1, hi1 = _stop_tail(model, m1)
        pre = [S.pairing[s] for s in reversed(t0)]
        steps = pre + steps + t1
        start = (side0, _wrap_param(lo0, hi0, 2 * k))
        end = (side1, _wrap_param(lo1, hi1, 2 * k + 1))
    steps = _cancel_backtracks(S, steps)
    return realize_boundary_arc(S, start, steps, end, salt=salt)


def canonical_band_curve(model, walk):
    """The closed curve realizing a band walk; cached per canonical walk
    so that every object on the same band cycle lives on the very same
    representative."""
    c = model._canonical_curves.get(walk)
    if c is not None:
        return c
    S = model.surface
    geo = _walk_geometry(model)
    steps, _x, _y = geo.composite(walk, closed=True)
    steps = _cancel_backtracks(S, steps)
    while len(steps) >= 2 and S.pairing.get(steps[-1]) == steps[0]:
        steps = steps[1:-1]
    if not steps:
        raise HKKError("band walk realizes a null-homotopic curve")
    salt0 = 17 * (len(model._canonical_curves) + 1)
    last = None
    for attempt in range(8):
        try:
            c = realize_face_walk(S, steps, salt=salt0 + 5 * attempt)
            break
        except (ValueError, DegenerateGeometry, CurveError) as e:
            last = e
    else:
        raise HKKError("could not realize band walk: %s" % last)
    model._canonical_curves[walk] = c
    return c


def _band_system(piece):
    H = piece.holonomy
    if H is None:
        H = ((NovikovScalar.one(),),)
    sys = LocalSystem(piece.rank, H)
    if piece.flux:
        sys = sys.scaled(Rat(piece.flux))
    return sys


def replace(model, piece, probe=False, salt=11, k=0):
    """The geometric avatar of a string or band piece: an arc, or a closed
    curve with a local system, as a Fukaya object.  Probe avatars are
    perturbed representatives of the same object (wrapped arcs, pushed-off
    band curves) transverse to the unperturbed ones."""
    grading, gshift = model_grading(model)
    a0 = piece.walk[0][1]
    shift = (piece.shifts[0] + grading[a0] + (gshift if probe else 0)) % 2
    if piece.kind == "string":
        c = _realize_string(model, piece.walk, wrapped=probe, salt=salt, k=k)
        return FukayaObject(c, shift, check=False)
    base = canonical_band_curve(model, piece.walk)
    sys = _band_system(piece)
    if not probe:
        return FukayaObject(base.with_system(sys), shift, check=False)
    c2 = push_off(base, eps=Rat(1, 23 + 6 * k))
    f = flux_between(base, c2)
    c2 = c2.with_system(sys.scaled(Rat(_PUSH_FLUX_SIGN) * f))
    return FukayaObject(c2, shift, check=False)


def _single_arc_piece(a):
    return StringBand("string", (("arc", a, 0),), (0,))


def _calibration_band(model, lam):
    """A two-arc band complex from a pair of parallel chords of the same
    degree joining the same two arcs (exists in every model here)."""
    G = model.algebra
    system = model.system
    by_pair = {}
    for h in sorted(G.chords):
        iv, i, j = h
        src = system.intervals[iv][i][0]
        tgt = system.intervals[iv][j][0]
        if src == tgt:
            continue
        key = (src, tgt, G.chord_degree(h))
        by_pair.setdefault(key, []).append(h)
    for (src, tgt, d), hs in sorted(by_pair.items()):
        if len(hs) >= 2:
            h1, h2 = hs[0], hs[1]
            return TwistedComplexHKK(
                G,
                [(src, 0), (tgt, (1 + d) % 2)],
                {(1, 0): {h1: NovikovScalar.one(), h2: lam}},
            )
    raise HKKError("model has no two-chord band for calibration")


def model_grading(model):
    """Per-arc shift corrections aligning the algebra grading with the
    geometric one, plus a global probe parity; calibrated once per model
    from arc/arc and arc/band comparisons and cached."""
    if model._grading is not None:
        return model._grading
    G = model.algebra
    n = len(model.arcs)
    arc_twcx = [TwistedComplexHKK(G, [(a, 0)], {}) for a in range(n)]
    arc_pieces = [_single_arc_piece(a) for a in range(n)]
    probes = []
    reps = []
    for a in range(n):
        probes.append(_realize_string(
            model, arc_pieces[a].walk, wrapped=True, salt=29 + 3 * a, k=a
        ))
        reps.append(_realize_string(
            model, arc_pieces[a].walk, wrapped=False, salt=41 + 3 * a
        ))
    B = _calibration_band(model, NovikovScalar.q_power(0, 2))
    band_piece = [p for p in decompose(B) if p.kind == "band"]
    if len(band_piece) != 1:
        raise HKKError("calibration band does not decompose into one band")
    band_piece = band_piece[0]
    base = canonical_band_curve(model, band_piece.walk)
    band_obj = FukayaObject(
        base.with_system(_band_system(band_piece)), 0, check=False
    )
    comparisons = []  # (arc a, other-arc index or None, alg, geo at shift 0)
    for a in range(n):
        Pa = FukayaObject(probes[a], 0, check=False)
        for b in range(n):
            alg = hom_ranks_hkk(G, arc_twcx[a], arc_twcx[b])
            geo = hf_ranks(Pa, FukayaObject(reps[b], 0, check=False))
            comparisons.append((a, b, alg, geo))
        alg = hom_ranks_hkk(G, arc_twcx[a], B)
        geo = hf_ranks(Pa, band_obj)
        comparisons.append(
            (a, ("band", band_piece.walk[0][1], band_piece.shifts[0]),
             alg, geo)
        )
    best = None
    for mask in range(1 << n):
        eps = [(mask >> i) & 1 for i in range(n)]
        if eps[0] != 0:
            continue
        for g in (0, 1):
            ok = True
            for (a, b, alg, geo) in comparisons:
                if isinstance(b, tuple):
                    flip = (eps[a] + g + b[2] + eps[b[1]]) % 2
                else:
                    flip = (eps[a] + g + eps[b]) % 2
                want = alg if flip == 0 else (alg[1], alg[0])
                if want != geo:
                    ok = False
                    break
            if ok and best is None:
                best = (tuple(eps), g)
    if best is None:
        raise HKKError(
            "no consistent grading calibration for model %r" % model.name
        )
    model._grading = best
    return best


# ---------------------------------------------------------------------------
# crosscheck and the random corpus
# ---------------------------------------------------------------------------


def walk_shifts(G, walk, start_shift=0):
    """Summand shifts along a walk (each chord changes the shift by
    1 + its degree); for cyclic walks the closing step must be
    consistent, else None is returned."""
    shifts = [start_shift % 2]
    chords = walk[1::2]
    n_arcs = len(walk[0::2])
    for t, (_, h, _d) in enumerate(chords):
        nxt = (shifts[-1] + 1 + G.chord_degree(h)) % 2
        if t == len(chords) - 1 and len(chords) == n_arcs:
            if nxt != shifts[0]:
                return None  # cyclic walk is not gradeable
        else:
            shifts.append(nxt)
    return shifts


def string_complex(G, walk, start_shift=0):
    """The twisted complex of a string walk."""
    shifts = walk_shifts(G, walk, start_shift)
    arcs = walk[0::2]
    chords = walk[1::2]
    summands = [(a, s) for (_, a, _e), s in zip(arcs, shifts)]
    delta = {}
    for t, (_, h, d) in enumerate(chords):
        key = (t + 1, t) if d == 1 else (t, t + 1)
        delta[key] = {h: NovikovScalar.one()}
    return TwistedComplexHKK(G, summands, delta)


def band_complex(G, walk, H, start_shift=0):
    """The twisted complex of a cyclic band walk carrying the holonomy
    matrix H on the closing chord and identities elsewhere."""
    shifts = walk_shifts(G, walk, start_shift)
    if shifts is None:
        raise HKKError("band walk is not gradeable")
    arcs = walk[0::2]
    chords = walk[1::2]
    L = len(arcs)
    r = len(H)
    summands = []
    for (_, a, _e), s in zip(arcs, shifts):
        summands.extend([(a, s)] * r)
    one = NovikovScalar.one()
    I = [[one if i == j else NovikovScalar.zero() for j in range(r)]
         for i in range(r)]
    delta = {}
    for t, (_, h, d) in enumerate(chords):
        t2 = (t + 1) % L
        M = H if t == L - 1 else I
        for m in range(r):
            for m2 in range(r):
                x = linalg.scalar(M[m2][m])
                if x.is_zero():
                    continue
                if d == 1:
                    key = (t2 * r + m2, t * r + m)
                else:
                    key = (t * r + m, t2 * r + m2)
                delta.setdefault(key, {})[h] = x
    return TwistedComplexHKK(G, summands, delta)


def _incident_chords(model, mark):
    """(chord, dir, other mark) for chords with one end at `mark`."""
    system = model.system
    out = []
    for h in sorted(model.algebra.chords):
        iv, i, j = h
        run = system.intervals[iv]
        if run[i] == mark:
            out.append((h, 1, run[j]))
        if run[j] == mark:
            out.append((h, -1, run[i]))
    return out


def random_walk(model, rng, closed, max_arcs):
    """A random string walk, or a random gradeable cyclic band walk (None
    when the attempt fails to close up)."""
    n = len(model.arcs)
    a0, e0 = rng.randrange(n), rng.randrange(2)
    walk = [("arc", a0, e0)]
    target = rng.randint(1, max_arcs)
    while True:
        _, a, e = walk[-1]
        options = _incident_chords(model, (a, 1 - e))
        if closed and len(walk) // 2 + 1 >= 1:
            closing = [o for o in options if o[2] == (a0, e0)]
            if closing and (len(walk) // 2 + 1 >= target or not options):
                h, d, _ = rng.choice(closing)
                cand = tuple(walk + [("chord", h, d)])
                if walk_shifts(model.algebra, cand) is not None:
                    return cand
                return None
        if len(walk) // 2 + 1 >= target or not options:
            if closed:
                return None
            return tuple(walk)
        h, d, (b, eb) = rng.choice(options)
        walk.extend([("chord", h, d), ("arc", b, eb)])


def _random_scalar(rng, allow_val=True):
    c = rng.choice([1, 2, 3, 5, -1, -2])
    e = rng.choice([0, 0, 0, 1, -1, Rat(1, 2)]) if allow_val else 0
    return NovikovScalar.q_power(e, c)


def _random_holonomy(rng, rank):
    lam = _random_scalar(rng)
    if rank == 1:
        return [[lam]]
    zero = NovikovScalar.zero()
    shape = rng.choice(["scalar", "diag", "jordan"])
    if shape == "scalar":
        return [[lam, zero], [zero, lam]]
    if shape == "diag":
        mu = _random_scalar(rng)
        return [[lam, zero], [zero, mu]]
    return [[lam, NovikovScalar.one()], [zero, lam]]


def random_complex(model, rng, max_pieces=3, max_arcs=4, conj_ops=6):
    """A random direct sum of strings and bands, with the summand order
    shuffled and the presentation scrambled by random triangular basis
    changes.  Returns (complex, clean complex)."""
    G = model.algebra
    parts = []
    n_pieces = rng.randint(1, max_pieces)
    while len(parts) < n_pieces:
        if rng.random() < 0.5:
            walk = random_walk(model, rng, closed=False, max_arcs=max_arcs)
            parts.append(string_complex(G, walk, rng.randrange(2)))
        else:
            walk = random_walk(model, rng, closed=True, max_arcs=max_arcs)
            if walk is None:
                continue
            rank = 2 if rng.random() < 0.3 else 1
            H = _random_holonomy(rng, rank)
            parts.append(band_complex(G, walk, H, rng.randrange(2)))
    summands = []
    delta = {}
    for part in parts:
        off = len(summands)
        summands.extend(part.summands)
        for (r, c), el in part.delta.items():
            delta[(r + off, c + off)] = dict(el)
    clean = TwistedComplexHKK(G, summands, delta)
    # shuffle the summand order
    perm = list(range(len(summands)))
    rng.shuffle(perm)  # perm[new] = old
    inv = {old: new for new, old in enumerate(perm)}
    summands = [summands[old] for old in perm]
    delta = {
        (inv[r], inv[c]): dict(el) for (r, c), el in delta.items()
    }
    T = TwistedComplexHKK(G, summands, delta)
    # scramble by conjugations
    red = _Reduction(T)
    done = 0
    for _ in range(40 * conj_ops):
        if done >= conj_ops:
            break
        a, b = rng.randrange(len(summands)), rng.randrange(len(summands))
        if a == b:
            continue
        A, sa = red.summands[a]
        B, sb = red.summands[b]
        cands = [
            h for h in sorted(G.chords)
            if red.end_of[(h[0], h[2])][0] == A
            and red.end_of[(h[0], h[1])][0] == B
            and (G.chord_degree(h) + sa + sb) % 2 == 0
        ]
        if not cands:
            continue
        red.conj(a, b, rng.choice(cands), _random_scalar(rng))
        done += 1
    T = TwistedComplexHKK(G, red.summands, red.delta)
    err = validate_twcx(G, T)
    if err:
        raise HKKError("random complex is invalid: %s" % err)
    return T, clean


def default_probes(model, T=None, count=3):
    """(name, probe complex) pairs: single arcs plus one two-chord band,
    with the band's parameter matched to a band piece of T when one has
    the same cycle."""
    G = model.algebra
    probes = []
    for a in range(min(2, len(model.arcs))):
        probes.append(("arc%d" % a, TwistedComplexHKK(G, [(a, 0)], {})))
    lam = NovikovScalar.q_power(0, 2)
    B = _calibration_band(model, lam)
    cal_walk = next(p for p in decompose(B) if p.kind == "band").walk
    if T is not None:
        for p in decompose(T):
            if p.kind == "band" and p.walk == cal_walk and p.rank == 1:
                lam2 = p.holonomy[0][0]
                if p.flux:
                    lam2 = lam2 * NovikovScalar.q_power(Rat(p.flux))
                B = _calibration_band(model, lam2)
                break
    probes.append(("band", B))
    return probes[:count]


def crosscheck(model, T, probes=None):
    """Compare algebraic hom ranks against geometric Floer ranks of the
    replacement, probe by probe; exact equality or a hard report."""
    G = model.algebra
    pieces = decompose(T)
    reps = [
        replace(model, p, salt=53 + 7 * i) for i, p in enumerate(pieces)
    ]
    if probes is None:
        probes = default_probes(model, T)
    rows = []
    kctr = 9
    for name, P in probes:
        ppieces = decompose(P)
        if len(ppieces) != 1:
            raise HKKError("probe %r is not indecomposable" % name)
        alg = hom_ranks_hkk(G, P, T)
        geo = None
        last = None
        for _attempt in range(6):
            kctr += 1
            try:
                pobj = replace(
                    model, ppieces[0], probe=True, k=kctr,
                    salt=61 + 5 * kctr,
                )
                tot = (0, 0)
                for r in reps:
                    h = hf_ranks(pobj, r)
                    tot = (tot[0] + h[0], tot[1] + h[1])
                geo = tot
                break
            except (CurveError, DegenerateGeometry, HKKError) as e:
                last = e
        if geo is None:
            raise HKKError(
                "could not realize probe %r transversally: %s" % (name, last)
            )
        rows.append(
            {"probe": name, "algebra": alg, "geometric": geo,
             "equal": alg == geo}
        )
    return {
        "model": model.name,
        "pieces": [
            {"kind": p.kind, "rank": p.rank, "arcs": len(p.walk) // 2 + (0 if p.kind == "band" else 1)}
            for p in pieces
        ],
        "probes": rows,
        "all_equal": all(r["equal"] for r in rows),
    }
