"""Unobstructedness, teardrops, bigons, and combinatorial push-offs.

All disc detection runs in a patch of the universal cover (see discs.py);
the operations here translate between curves on the surface and their lifts.
"""

from collections import namedtuple

from ._rat import Rat
from . import geometry
from .curve import CurveError, ImmersedCurve, Segment
from .discs import (
    Patch,
    PatchError,
    find_disc,
    lift_curve,
    loop_pieces,
    path_crossings,
    self_path_crossings,
)

DEFAULT_PERIODS = 3


class NullHomotopic(CurveError):
    pass


def _lift_periods(c, periods):
    """One lift of the closed curve c through `periods` periods each way."""
    patch = Patch(c.surface)
    pf0 = patch.new_face(c.segments[0].face)
    n = len(c.segments)
    if c.closed:
        path = lift_curve(patch, c, pf0, 0, periods * n, periods * n)
    else:
        path = lift_curve(patch, c, pf0, 0, 0, n - 1)
    return patch, path


def _check_nontrivial(c, path):
    if not c.closed:
        return
    n = len(c.segments)
    for j in range(len(path) - n):
        if path.seg_index(j) == path.seg_index(j + n) and path.pface(
            j
        ) == path.pface(j + n):
            raise NullHomotopic("curve is null-homotopic")


def lift_is_embedded(c, periods=DEFAULT_PERIODS):
    """Whether the universal-cover lift of c is embedded (within the
    developed window of `periods` periods each way)."""
    patch, path = _lift_periods(c, periods)
    _check_nontrivial(c, path)
    return len(self_path_crossings(path)) == 0


def _chords_by_pface(paths):
    chords = {}
    for path in paths:
        for j in range(len(path)):
            chords.setdefault(path.pface(j), []).append(path.chord(j))
    return chords


def _try_disc(patch, paths, pieces):
    """Disc for the loop, trying both orientations; returns
    (region, orientation) with orientation +1 for the loop as given."""
    for orient, pcs in ((1, pieces), (-1, _reverse_pieces(pieces))):
        region = find_disc(patch, _chords_by_pface(paths), pcs)
        if region is not None:
            return region, orient
    return None, 0


def _reverse_pieces(pieces):
    out = []
    for pc in reversed(pieces):
        q = type(pc)(pc.pface, pc.p0, pc.p1, pc.a, pc.b, not pc.forward)
        out.append(q)
    return out


def _corner_convex(patch, region, pface, point):
    """1 if the disc occupies one quadrant at the corner, 0 if three."""
    count = 0
    pface = patch.canon(pface)
    for cell in region.cells:
        if cell.pface == pface and point in cell.poly:
            count += 1
    if count not in (1, 3):
        raise PatchError("corner of disc touches %d quadrants" % count)
    return 1 if count == 1 else 0


class Teardrop:
    """An embedded teardrop disc with its single corner."""

    def __init__(self, corner_face, corner_point, area, convex):
        self.corner_face = corner_face
        self.corner_point = corner_point
        self.area = area
        self.convex = bool(convex)

    def __repr__(self):
        return "Teardrop(face=%d, area=%s, convex=%s)" % (
            self.corner_face,
            self.area,
            self.convex,
        )


def teardrops(c, periods=DEFAULT_PERIODS):
    """All embedded teardrop discs bounded by the closed curve c.

    Empty iff the universal-cover lift is embedded (the test suite checks
    this equivalence on a corpus)."""
    patch, path = _lift_periods(c, periods)
    _check_nontrivial(c, path)
    found = []
    seen = set()
    for (i, t, j, u, p, sign) in self_path_crossings(path):
        # the portion of the lift between the two visits of the crossing
        pieces = loop_pieces(path, i, t, j, u, True)
        region, orient = _try_disc(patch, [path], pieces)
        if region is None:
            continue
        convex = _corner_convex(patch, region, path.pface(i), p)
        bf = c.segments[path.seg_index(i)].face
        key = (
            bf,
            p,
            region.area,
            tuple(sorted((f, pts) for f, pts in region.base_cells)),
        )
        if key in seen:
            continue
        seen.add(key)
        found.append(Teardrop(bf, p, region.area, convex))
    found.sort(key=lambda d: (d.corner_face, d.corner_point, d.area))
    return found


def is_unobstructed(c, periods=DEFAULT_PERIODS):
    return len(teardrops(c, periods)) == 0


BigonArc = namedtuple(
    "BigonArc", "curve forward segs t_start t_end p_start p_end"
)
"""One boundary arc of a bigon on the underlying surface.

curve: index of the curve carrying the arc; forward: whether the arc runs
along the curve's orientation; segs: base segment indices in traversal
order; t_start/t_end: chord parameters at the two corners; p_start/p_end:
the corners as (face, point)."""


def _mk_arc(curve_idx, path, pos0, pos1, pt0, pt1):
    (i0, t0), (i1, t1) = pos0, pos1
    fwd = pos1 > pos0
    if fwd:
        segs = tuple(path.seg_index(j) for j in range(i0, i1 + 1))
    else:
        segs = tuple(path.seg_index(j) for j in range(i0, i1 - 1, -1))
    f0 = path.curve.segments[path.seg_index(i0)].face
    f1 = path.curve.segments[path.seg_index(i1)].face
    return BigonArc(curve_idx, fwd, segs, t0, t1, (f0, pt0), (f1, pt1))


class Bigon:
    """An embedded disc with two corners on curve crossings."""

    def __init__(
        self,
        corners,
        area,
        convex_at,
        empty,
        region,
        arcs,
    ):
        self.corners = corners  # ((face, point), (face, point))
        self.area = area
        self.convex_at = convex_at  # (flag at start corner, at end corner)
        self.empty = bool(empty)
        self.region = region  # DiscRegion
        self.arcs = arcs  # (BigonArc, BigonArc)

    def __repr__(self):
        return "Bigon(area=%s, empty=%s, convex=%s)" % (
            self.area,
            self.empty,
            self.convex_at,
        )


def _region_is_empty(region, curves):
    """No strand of any of the curves meets the open region."""
    for bf, poly in region.base_cells:
        for cv in curves:
            for k, s in enumerate(cv.segments):
                if s.face != bf:
                    continue
                p0, p1 = cv.chord(k)
                if _chord_cuts_cell(p0, p1, poly):
                    return False
    return True


def _chord_cuts_cell(p0, p1, poly):
    """Whether the full-width chord meets the open convex cell (the chord
    spans the whole face, so this is a strict line-separation test)."""
    d = geometry.sub(p1, p0)
    has_pos = has_neg = False
    for v in poly:
        s = geometry.cross(d, geometry.sub(v, p0))
        if s > 0:
            has_pos = True
        elif s < 0:
            has_neg = True
    return has_pos and has_neg


def _pair_bigons_from(patch, path1, path2, anchor_pos, curves,
                      arc_curves=(0, 1)):
    """Bigons whose one corner is the anchored crossing of the two paths."""
    out = []
    crossings = path_crossings(path1, path2)
    x = None
    for cr in crossings:
        if (cr[0], cr[2]) == anchor_pos:
            x = cr
            break
    if x is None:
        raise PatchError("anchored crossing not found in the lift")
    i1, t1 = x[0], x[1]
    j1, u1 = x[2], x[3]
    for y in crossings:
        if y is x:
            continue
        i2, t2, j2, u2, py, sy = y
        fwd1 = (i2, t2) > (i1, t1)
        fwd2 = (j1, u1) > (j2, u2)
        try:
            pieces = loop_pieces(path1, i1, t1, i2, t2, fwd1) + loop_pieces(
                path2, j2, u2, j1, u1, fwd2
            )
        except PatchError:
            continue
        region, orient = _try_disc(patch, [path1, path2], pieces)
        if region is None:
            continue
        cx1 = _corner_convex(patch, region, path1.pface(i1), x[4])
        cx2 = _corner_convex(patch, region, path1.pface(i2), py)
        empty = _region_is_empty(region, curves)
        f1 = path1.curve.segments[path1.seg_index(i1)].face
        f2 = path1.curve.segments[path1.seg_index(i2)].face
        out.append(
            Bigon(
                ((f1, x[4]), (f2, py)),
                region.area,
                (cx1, cx2),
                empty,
                region,
                (
                    _mk_arc(arc_curves[0], path1, (i1, t1), (i2, t2),
                            x[4], py),
                    _mk_arc(arc_curves[1], path2, (j2, u2), (j1, u1),
                            py, x[4]),
                ),
            )
        )
    return out


def embedded_bigons(c1, c2=None, periods=2):
    """All embedded bigons bounded by the pair (c1, c2), or the self-bigons
    of c1 when c2 is omitted; each is marked empty when no strand of the
    input curves meets its interior."""
    if c2 is None:
        return _self_bigons(c1, periods)
    from .curve import curve_crossings

    seen = set()
    out = []
    for cr in curve_crossings(c1, c2):
        patch = Patch(c1.surface)
        pf0 = patch.new_face(cr.face)
        n1, n2 = len(c1.segments), len(c2.segments)
        b1, f1 = (periods * n1,) * 2 if c1.closed else (cr.seg_a, n1 - 1 - cr.seg_a)
        b2, f2 = (periods * n2,) * 2 if c2.closed else (cr.seg_b, n2 - 1 - cr.seg_b)
        path1 = lift_curve(patch, c1, pf0, cr.seg_a, b1, f1)
        path2 = lift_curve(patch, c2, pf0, cr.seg_b, b2, f2)
        for b in _pair_bigons_from(
            patch, path1, path2, (path1.anchor, path2.anchor), [c1, c2]
        ):
            key = (
                frozenset(b.corners),
                b.area,
                tuple(sorted(b.region.base_cells)),
            )
            if key in seen:
                continue
            seen.add(key)
            out.append(b)
    out.sort(key=lambda b: (sorted(b.corners), b.area))
    return out


def _self_bigons(c, periods=DEFAULT_PERIODS):
    patch, path = _lift_periods(c, periods)
    _check_nontrivial(c, path)
    crossings = self_path_crossings(path)
    seen = set()
    out = []
    for a in range(len(crossings)):
        for b in range(len(crossings)):
            if a == b:
                continue
            i1, t1, j1, u1, p1, s1 = crossings[a]
            i2, t2, j2, u2, p2, s2 = crossings[b]
            # boundary arcs: disjoint portions of the path joining the two
            # crossing points; try both ways of matching up endpoints
            for (q1, q2) in (((i2, t2), (j2, u2)), ((j2, u2), (i2, t2))):
                lo1, hi1 = sorted([(i1, t1), q1])
                lo2, hi2 = sorted([(j1, u1), q2])
                if not (hi1 <= lo2 or hi2 <= lo1):
                    continue  # overlapping portions cannot bound a disc
                try:
                    pieces = loop_pieces(
                        path, i1, t1, q1[0], q1[1], q1 > (i1, t1)
                    ) + loop_pieces(
                        path, q2[0], q2[1], j1, u1, (j1, u1) > q2
                    )
                except PatchError:
                    continue
                region, orient = _try_disc(patch, [path], pieces)
                if region is None:
                    continue
                cx1 = _corner_convex(patch, region, path.pface(i1), p1)
                cx2 = _corner_convex(patch, region, path.pface(i2), p2)
                empty = _region_is_empty(region, [c])
                f1 = c.segments[path.seg_index(i1)].face
                f2 = c.segments[path.seg_index(i2)].face
                key = (
                    frozenset([(f1, p1), (f2, p2)]),
                    region.area,
                    tuple(sorted(region.base_cells)),
                )
                if key in seen:
                    continue
                seen.add(key)
                out.append(
                    Bigon(
                        ((f1, p1), (f2, p2)),
                        region.area,
                        (cx1, cx2),
                        empty,
                        region,
                        (
                            _mk_arc(0, path, (i1, t1), q1, p1, p2),
                            _mk_arc(0, path, q2, (j1, u1), p2, p1),
                        ),
                    )
                )
    # bigons whose corners are crossings between two distinct lifts of the
    # curve: anchor a separate lift on each branch of a base self-crossing
    n = len(c.segments)
    for cr in c.self_crossings():
        patch2 = Patch(c.surface)
        pf0 = patch2.new_face(cr.face)
        b1, f1 = (periods * n,) * 2 if c.closed else (
            cr.seg_a, n - 1 - cr.seg_a
        )
        b2, f2 = (periods * n,) * 2 if c.closed else (
            cr.seg_b, n - 1 - cr.seg_b
        )
        path1 = lift_curve(patch2, c, pf0, cr.seg_a, b1, f1)
        path2 = lift_curve(patch2, c, pf0, cr.seg_b, b2, f2)
        for bg in _pair_bigons_from(
            patch2,
            path1,
            path2,
            (path1.anchor, path2.anchor),
            [c],
            arc_curves=(0, 0),
        ):
            key = (
                frozenset(bg.corners),
                bg.area,
                tuple(sorted(bg.region.base_cells)),
            )
            if key in seen:
                continue
            seen.add(key)
            out.append(bg)
    out.sort(key=lambda b: (sorted(b.corners), b.area))
    return out


# ---------------------------------------------------------------------------
# combinatorial push-off
# ---------------------------------------------------------------------------


def push_off(c, fingers=None, eps=None):
    """A parallel copy of the closed curve c, crossing it exactly twice.

    The copy runs at parameter offset ±eps from c; the offset sign is
    propagated along the itinerary so the copy stays on one side, except at
    the two `fingers` segments (default: segments 0 and n//2), where it is
    forced across, creating the two Morse-type crossings of a Hamiltonian
    push-off."""
    if not c.closed:
        raise CurveError("push_off needs a closed curve")
    n = len(c.segments)
    if n < 2:
        raise CurveError("need at least two segments")
    if fingers is None:
        fingers = (0, n // 2)
    if len(set(fingers)) != 2:
        raise CurveError("need two distinct finger segments")
    S = c.surface
    # side-sign data per segment: u = side of entry motion, v = of exit
    uv = []
    for k, s in enumerate(c.segments):
        p0, p1 = c.chord(k)
        d = geometry.sub(p1, p0)
        a_in, b_in = S.side_endpoints((s.face, s.side_in))
        a_out, b_out = S.side_endpoints((s.face, s.side_out))
        u = geometry.cross(d, geometry.sub(b_in, a_in))
        v = geometry.cross(d, geometry.sub(b_out, a_out))
        if u == 0 or v == 0:
            raise CurveError("chord parallel to a side")
        uv.append((1 if u > 0 else -1, 1 if v > 0 else -1))
    # propagate offset signs: entry e_k, exit x_k with e_{k+1} = -x_k;
    # x_k = e_k*u*v for no crossing in face k, flipped at the fingers
    e = [0] * n
    x = [0] * n
    e[0] = 1
    for k in range(n):
        sigma = -1 if k in fingers else 1
        x[k] = e[k] * uv[k][0] * uv[k][1] * sigma
        if k + 1 < n:
            e[k + 1] = -x[k]
    if e[0] != -x[n - 1]:
        raise CurveError(
            "push-off signs do not close up (non-orientable gluing?)"
        )
    if eps is None:
        eps = _safe_eps(c)
    # the copy meets c at the two fingers plus twice per self-crossing
    expected = 2 + 2 * len(c.self_crossings())
    for _ in range(8):
        segs = [
            Segment(
                s.face,
                s.side_in,
                s.s_in + e[k] * eps,
                s.side_out,
                s.s_out + x[k] * eps,
            )
            for k, s in enumerate(c.segments)
        ]
        try:
            pushed = ImmersedCurve(
                S,
                segs,
                closed=True,
                spin_marker=c.spin_marker,
                system=c.system,
            )
            from .curve import curve_crossings

            if len(curve_crossings(c, pushed)) == expected:
                return pushed
        except (CurveError, geometry.DegenerateGeometry):
            pass
        eps = eps / 2
    raise CurveError("could not find a valid push-off offset")


def _safe_eps(c):
    """An offset smaller than every parameter gap used by the curve."""
    per_side = {}
    for s in c.segments:
        per_side.setdefault((s.face, s.side_in), []).append(s.s_in)
        per_side.setdefault((s.face, s.side_out), []).append(s.s_out)
    gap = Rat(1)
    for params in per_side.values():
        vals = sorted(set(params) | {Rat(0), Rat(1)})
        for a, b in zip(vals, vals[1:]):
            if b - a < gap:
                gap = b - a
    return gap / 8
