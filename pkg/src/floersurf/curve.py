"""Immersed curves (and arcs) on surface complexes, with local systems.

A curve is a cyclic itinerary of face segments; each segment crosses one face
as a straight chord from an entry edge point to an exit edge point.
Consecutive segments match across the glued edge.  All intersections are
transverse by validation (geometry is exact, so tangencies and triple points
are detected, not approximated).

Holonomy and spin data live on segment *transitions*: the local system's
holonomy matrix is applied when the curve is traversed forward across the
transition into segment ``base_index``, and the spin marker contributes a
factor -1 each time a polygon boundary arc crosses the transition into the
marked segment (this models the nontrivial spin structure).
"""

from collections import namedtuple

from ._rat import Rat, rat_from_str, rat_str
from . import geometry, linalg
from .geometry import DegenerateGeometry
from .novikov import NovikovScalar, format_scalar, parse_scalar


class CurveError(ValueError):
    pass


Segment = namedtuple("Segment", "face side_in s_in side_out s_out")


Crossing = namedtuple("Crossing", "face seg_a t_a seg_b t_b point sign")
"""A transverse crossing between chord seg_a of curve A (at chord parameter
t_a) and chord seg_b of curve B; sign = +1 when (dir_A, dir_B) is a positively
oriented frame."""


class LocalSystem:
    """Rank-r flat system given by a holonomy matrix at one transition."""

    def __init__(self, rank=1, holonomy=None, base_index=0):
        self.rank = int(rank)
        if holonomy is None:
            holonomy = linalg.identity(self.rank)
        self.holonomy = tuple(
            tuple(linalg.scalar(x) for x in row) for row in holonomy
        )
        if len(self.holonomy) != self.rank or any(
            len(row) != self.rank for row in self.holonomy
        ):
            raise CurveError("holonomy matrix has wrong shape")
        self.base_index = int(base_index)
        self._inverse = None

    def holonomy_inverse(self):
        if self._inverse is None:
            self._inverse = linalg.mat_inv(self.holonomy)
        return self._inverse

    def is_unitary(self):
        consts = []
        for row in self.holonomy:
            crow = []
            for x in row:
                v = x.valuation()
                if v < 0:
                    return False
                crow.append(x.leading_coeff() if v == 0 else Rat(0))
            consts.append(crow)
        return _rat_det(consts) != 0

    def is_invertible(self):
        try:
            self.holonomy_inverse()
        except ValueError:
            return False
        return True

    def scaled(self, flux):
        """Rescale holonomy by q^flux (the effect of sweeping area flux)."""
        factor = NovikovScalar.q_power(flux)
        return LocalSystem(
            self.rank,
            tuple(tuple(factor * x for x in row) for row in self.holonomy),
            self.base_index,
        )

    def to_json(self):
        return {
            "rank": self.rank,
            "holonomy": [[format_scalar(x) for x in row] for row in self.holonomy],
            "base_index": self.base_index,
        }

    @staticmethod
    def from_json(data):
        return LocalSystem(
            data["rank"],
            [[parse_scalar(x) for x in row] for row in data["holonomy"]],
            data.get("base_index", 0),
        )


def _rat_det(rows):
    rows = [list(r) for r in rows]
    n = len(rows)
    det = Rat(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c] != 0), None)
        if piv is None:
            return Rat(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        inv = Rat(1) / rows[c][c]
        for r in range(c + 1, n):
            if rows[r][c] != 0:
                factor = rows[r][c] * inv
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[c])]
    return det


class ImmersedCurve:
    """An immersed closed curve (or arc, if closed=False) in normal position."""

    def __init__(
        self,
        surface,
        segments,
        closed=True,
        spin_marker=None,
        system=None,
        orientation=1,
        validate=True,
    ):
        self.surface = surface
        segs = [
            Segment(int(f), int(si), Rat(pi), int(so), Rat(po))
            for (f, si, pi, so, po) in (
                (s.face, s.side_in, s.s_in, s.side_out, s.s_out)
                if isinstance(s, Segment)
                else s
                for s in segments
            )
        ]
        if orientation not in (1, -1):
            raise CurveError("orientation must be +-1")
        if orientation == -1:
            segs = [
                Segment(s.face, s.side_out, s.s_out, s.side_in, s.s_in)
                for s in reversed(segs)
            ]
            if spin_marker is not None:
                spin_marker = (len(segs) - spin_marker) % max(len(segs), 1)
            if system is not None:
                system = LocalSystem(
                    system.rank,
                    system.holonomy_inverse(),
                    (len(segs) - system.base_index) % max(len(segs), 1),
                )
        self.segments = tuple(segs)
        self.closed = bool(closed)
        self.spin_marker = spin_marker if spin_marker is None else int(spin_marker)
        self.system = system or LocalSystem()
        self.orientation = 1
        self._chords = None
        self._self_crossings = None
        if validate:
            self.validate()

    # -- geometry ------------------------------------------------------

    def __len__(self):
        return len(self.segments)

    def chord(self, k):
        if self._chords is None:
            S = self.surface
            self._chords = tuple(
                (
                    S.side_point((s.face, s.side_in), s.s_in),
                    S.side_point((s.face, s.side_out), s.s_out),
                )
                for s in self.segments
            )
        return self._chords[k]

    def transitions(self):
        """Indices k such that segment k-1 exits through a glued edge into
        segment k; for closed curves every k, for arcs k >= 1."""
        n = len(self.segments)
        return range(n) if self.closed else range(1, n)

    def exit_side(self, k):
        s = self.segments[k]
        return (s.face, s.side_out)

    # -- validation ----------------------------------------------------

    def validate(self):
        S = self.surface
        n = len(self.segments)
        if n == 0:
            raise CurveError("empty itinerary")
        for k, s in enumerate(self.segments):
            if not (0 <= s.face < S.num_faces):
                raise CurveError("segment %d: missing face" % k)
            kf = S.face_sides[s.face]
            if not (0 <= s.side_in < kf and 0 <= s.side_out < kf):
                raise CurveError("segment %d: bad side index" % k)
            if not (0 < s.s_in < 1 and 0 < s.s_out < 1):
                raise CurveError("segment %d: edge parameter out of range" % k)
            a, b = self.chord(k)
            if a == b:
                raise CurveError("segment %d: degenerate chord" % k)
        for k in self.transitions():
            prev = self.segments[k - 1]
            cur = self.segments[k]
            out_side = (prev.face, prev.side_out)
            if S.is_boundary_side(out_side):
                raise CurveError(
                    "segment %d exits through the surface boundary" % (k - 1)
                )
            other, sp = S.cross(out_side, prev.s_out)
            if other != (cur.face, cur.side_in) or sp != cur.s_in:
                raise CurveError("segments %d -> %d do not match" % (k - 1, k))
        if not self.closed:
            first, last = self.segments[0], self.segments[-1]
            if not S.is_boundary_side((first.face, first.side_in)):
                raise CurveError("arc must start on a boundary side")
            if not S.is_boundary_side((last.face, last.side_out)):
                raise CurveError("arc must end on a boundary side")
        if self.spin_marker is not None and self.spin_marker not in self.transitions():
            raise CurveError("spin marker is not a transition index")
        if self.closed and self.system.base_index not in self.transitions():
            raise CurveError("local system base is not a transition index")
        if not self.system.is_invertible():
            raise CurveError("holonomy matrix is singular")
        # distinct edge points per (face, side), except matched transitions
        per_side = {}
        for k, s in enumerate(self.segments):
            per_side.setdefault((s.face, s.side_in), []).append(s.s_in)
            per_side.setdefault((s.face, s.side_out), []).append(s.s_out)
        for side, params in per_side.items():
            if len(params) != len(set(params)):
                raise CurveError("repeated edge point on side %r" % (side,))
        # normal position: chords connect distinct sides (a chord with both
        # endpoints on one side would lie along that side)
        for k, s in enumerate(self.segments):
            if s.side_in == s.side_out:
                raise CurveError(
                    "segment %d enters and exits side %d" % (k, s.side_in)
                )
        # transversality and no triple points, via exact chord crossings
        self.self_crossings()

    # -- crossings -----------------------------------------------------

    def self_crossings(self):
        if self._self_crossings is None:
            crossings = []
            by_face = {}
            for k, s in enumerate(self.segments):
                by_face.setdefault(s.face, []).append(k)
            for face, idxs in by_face.items():
                pts = []
                for x in range(len(idxs)):
                    for y in range(x + 1, len(idxs)):
                        ka, kb = idxs[x], idxs[y]
                        hit = geometry.segment_intersection(
                            *self.chord(ka), *self.chord(kb)
                        )
                        if hit is not None:
                            t, u, p = hit
                            da = geometry.sub(self.chord(ka)[1], self.chord(ka)[0])
                            db = geometry.sub(self.chord(kb)[1], self.chord(kb)[0])
                            sign = 1 if geometry.cross(da, db) > 0 else -1
                            pts.append(p)
                            crossings.append(
                                Crossing(face, ka, t, kb, u, p, sign)
                            )
                if len(pts) != len(set(pts)):
                    raise DegenerateGeometry("triple point in face %d" % face)
            crossings.sort(key=lambda c: (c.seg_a, c.t_a, c.seg_b))
            self._self_crossings = tuple(crossings)
        return self._self_crossings

    # -- homology pairing ----------------------------------------------

    def cocycle_pairing(self, a):
        """Sum of the cocycle over the curve's oriented edge crossings."""
        from .surface import cocycle_value

        total = 0
        for k in self.transitions():
            prev = self.segments[k - 1]
            total += cocycle_value(self.surface, a, (prev.face, prev.side_out))
        return total

    def crossing_cocycle(self):
        """Edge cocycle representing the Poincare dual of this closed curve.

        The curve is homotoped into the edge skeleton: each edge crossing is
        pushed to the far endpoint of the exit side, and inside each face the
        chord is replaced by the counterclockwise boundary path between the
        pushed endpoints.  The coefficients of the resulting cellular cycle,
        read through edge co-orientations, form a cocycle: its monodromy
        around every vertex vanishes, pairings with closed curves are homotopy
        invariant, and the associated cyclic covers are unbranched."""
        a = {}
        S = self.surface
        for s in self.segments:
            kf = S.face_sides[s.face]
            v = s.side_in
            v_out = (s.side_out + 1) % kf
            while v != v_out:
                edge, sign = S.edge_of((s.face, v))
                a[edge] = a.get(edge, 0) + sign
                v = (v + 1) % kf
        return {e: c for e, c in a.items() if c}

    # -- transforms ----------------------------------------------------

    def reversed(self):
        return ImmersedCurve(
            self.surface,
            self.segments,
            closed=self.closed,
            spin_marker=self.spin_marker,
            system=self.system,
            orientation=-1,
        )

    def with_system(self, system):
        return ImmersedCurve(
            self.surface,
            self.segments,
            closed=self.closed,
            spin_marker=self.spin_marker,
            system=system,
            validate=False,
        )

    def rotated(self, shift):
        """Start the cyclic itinerary at segment `shift` (closed curves)."""
        if not self.closed:
            raise CurveError("cannot rotate an arc")
        n = len(self.segments)
        shift %= n
        segs = self.segments[shift:] + self.segments[:shift]
        remap = lambda k: (k - shift) % n
        sys = LocalSystem(
            self.system.rank, self.system.holonomy, remap(self.system.base_index)
        )
        return ImmersedCurve(
            self.surface,
            segs,
            closed=True,
            spin_marker=None if self.spin_marker is None else remap(self.spin_marker),
            system=sys,
            validate=False,
        )

    # -- serialization -------------------------------------------------

    def to_json(self):
        return {
            "segments": [
                [s.face, [s.side_in, rat_str(s.s_in)], [s.side_out, rat_str(s.s_out)]]
                for s in self.segments
            ],
            "closed": self.closed,
            "orientation": 1,
            "spin": self.spin_marker,
            "local_system": self.system.to_json(),
        }

    @staticmethod
    def from_json(surface, data):
        segs = [
            (f, si, rat_from_str(pi), so, rat_from_str(po))
            for f, (si, pi), (so, po) in data["segments"]
        ]
        return ImmersedCurve(
            surface,
            segs,
            closed=data.get("closed", True),
            spin_marker=data.get("spin"),
            system=LocalSystem.from_json(data["local_system"])
            if data.get("local_system")
            else None,
            orientation=data.get("orientation", 1),
        )


def curve_crossings(c1, c2):
    """All transverse crossings between two distinct curves, sorted."""
    crossings = []
    by_face = {}
    for k, s in enumerate(c2.segments):
        by_face.setdefault(s.face, []).append(k)
    seen_points = {}
    for ka, sa in enumerate(c1.segments):
        for kb in by_face.get(sa.face, ()):
            hit = geometry.segment_intersection(*c1.chord(ka), *c2.chord(kb))
            if hit is None:
                continue
            t, u, p = hit
            da = geometry.sub(c1.chord(ka)[1], c1.chord(ka)[0])
            db = geometry.sub(c2.chord(kb)[1], c2.chord(kb)[0])
            sign = 1 if geometry.cross(da, db) > 0 else -1
            key = (sa.face, p)
            if key in seen_points:
                raise DegenerateGeometry("triple point between curves")
            seen_points[key] = True
            crossings.append(Crossing(sa.face, ka, t, kb, u, p, sign))
    crossings.sort(key=lambda c: (c.seg_a, c.t_a, c.seg_b))
    return crossings


def algebraic_intersection(c1, c2):
    return sum(c.sign for c in curve_crossings(c1, c2))
