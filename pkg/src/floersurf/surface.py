"""Combinatorial oriented surfaces with rational area weights.

A SurfaceComplex is a collection of convex polygonal faces (each realized with
exact rational coordinates, see geometry.py) together with an
orientation-reversing pairing of face sides.  Unpaired sides form the boundary;
boundary sides may carry stops.

Sides are addressed as (face, i); side i of a k-gon runs from face-vertex i to
face-vertex i+1 (counterclockwise).  Gluing identifies the point at parameter s
on a side with the point at parameter 1-s on its partner, so the glued surface
is oriented.
"""

from ._rat import Rat, rat_from_str, rat_str
from . import geometry


class SurfaceError(ValueError):
    pass


class SurfaceComplex:
    """Immutable oriented polygonal surface with rational face areas."""

    def __init__(self, face_sides, pairing, areas, stops=None, model=None):
        self.face_sides = tuple(int(k) for k in face_sides)
        pairs = {}
        for a, b in pairing.items():
            a = (int(a[0]), int(a[1]))
            b = (int(b[0]), int(b[1]))
            pairs[a] = b
            pairs[b] = a
        self.pairing = pairs
        self.areas = tuple(Rat(x) for x in areas)
        self.stops = {
            (int(s[0]), int(s[1])): tuple(sorted(Rat(x) for x in params))
            for s, params in (stops or {}).items()
            if params
        }
        self.model = model
        self._homology = None
        self._validate()
        self._build_cells()

    # -- basic accessors ---------------------------------------------

    @property
    def num_faces(self):
        return len(self.face_sides)

    def sides(self):
        for f, k in enumerate(self.face_sides):
            for i in range(k):
                yield (f, i)

    def opposite(self, side):
        return self.pairing.get(side)

    def is_boundary_side(self, side):
        return side not in self.pairing

    def face_coords(self, f):
        cache = getattr(self, "_face_coords_cache", None)
        if cache is None:
            cache = {}
            self._face_coords_cache = cache
        pts = cache.get(f)
        if pts is None:
            pts = geometry.convex_position(self.face_sides[f])
            cache[f] = pts
        return pts

    def side_endpoints(self, side):
        f, i = side
        pts = self.face_coords(f)
        return pts[i], pts[(i + 1) % self.face_sides[f]]

    def side_point(self, side, s):
        a, b = self.side_endpoints(side)
        return geometry.lerp(a, b, s)

    def euclid_area(self, f):
        return geometry.shoelace(self.face_coords(f))

    def density(self, f):
        """Measure of a Euclidean-area-1 region inside face f."""
        return self.areas[f] / self.euclid_area(f)

    def total_area(self):
        return sum(self.areas, Rat(0))

    def cross(self, side, s):
        """Cross an interior edge: (other side, matching parameter)."""
        other = self.pairing.get(side)
        if other is None:
            raise SurfaceError("cannot cross boundary side %r" % (side,))
        return other, 1 - s

    # -- canonical edges ----------------------------------------------

    def edge_of(self, side):
        """(canonical edge key, orientation sign of `side` in the edge)."""
        other = self.pairing.get(side)
        if other is None:
            return ("b",) + side, 1
        rep = min(side, other)
        return ("i",) + rep, (1 if side == rep else -1)

    def edges(self):
        return sorted(set(self.edge_of(s)[0] for s in self.sides()))

    # -- derived cell structure ---------------------------------------

    def _next_corner(self, corner):
        """Rotate one step around the vertex at face-corner (f, i)."""
        p = self.pairing.get(corner)
        if p is None:
            return None
        f2, i2 = p
        return (f2, (i2 + 1) % self.face_sides[f2])

    def _prev_corner(self, corner):
        f, i = corner
        side = (f, (i - 1) % self.face_sides[f])
        return self.pairing.get(side)

    def _build_cells(self):
        corners = [(f, i) for f, k in enumerate(self.face_sides) for i in range(k)]
        seen = {}
        verts = []
        for c0 in corners:
            if c0 in seen:
                continue
            orbit = [c0]
            seen[c0] = len(verts)
            boundary_vertex = False
            c = self._next_corner(c0)
            while c is not None and c != c0:
                orbit.append(c)
                seen[c] = len(verts)
                c = self._next_corner(c)
            if c is None:
                boundary_vertex = True
                c = self._prev_corner(c0)
                while c is not None:
                    orbit.insert(0, c)
                    seen[c] = len(verts)
                    c = self._prev_corner(c)
            verts.append((tuple(orbit), boundary_vertex))
        self.vertex_orbits = tuple(verts)
        self.corner_vertex = seen

        bsides = [s for s in self.sides() if s not in self.pairing]
        unvisited = set(bsides)
        cycles = []
        while unvisited:
            start = min(unvisited)
            cyc = []
            s = start
            while True:
                cyc.append(s)
                unvisited.discard(s)
                f, i = s
                c = (f, (i + 1) % self.face_sides[f])
                while self.pairing.get(c) is not None:
                    f2, i2 = self.pairing[c]
                    c = (f2, (i2 + 1) % self.face_sides[f2])
                s = c
                if s == start:
                    break
            cycles.append(tuple(cyc))
        self.boundary_cycles = tuple(sorted(cycles))

    def euler_characteristic(self):
        V = len(self.vertex_orbits)
        E = len(self.edges())
        F = self.num_faces
        return V - E + F

    def genus_and_boundary(self):
        b = len(self.boundary_cycles)
        chi = self.euler_characteristic()
        g2 = 2 - chi - b
        if g2 % 2:
            raise SurfaceError("odd 2g: not a connected orientable surface?")
        return g2 // 2, b

    # -- validation ---------------------------------------------------

    def _validate(self):
        n = self.num_faces
        if n == 0:
            raise SurfaceError("no faces")
        if len(self.areas) != n:
            raise SurfaceError("need one area per face")
        for a in self.areas:
            if a <= 0:
                raise SurfaceError("face areas must be positive")
        for k in self.face_sides:
            if k < 2:
                raise SurfaceError("faces need at least 2 sides")
        for a, b in self.pairing.items():
            f, i = a
            if not (0 <= f < n and 0 <= i < self.face_sides[f]):
                raise SurfaceError("pairing references missing side %r" % (a,))
            if a == b:
                raise SurfaceError("side %r glued to itself" % (a,))
        for s, params in self.stops.items():
            if s in self.pairing:
                raise SurfaceError("stop on interior side %r" % (s,))
            f, i = s
            if not (0 <= f < n and 0 <= i < self.face_sides[f]):
                raise SurfaceError("stop on missing side %r" % (s,))
            for x in params:
                if not (0 < x < 1):
                    raise SurfaceError("stop parameter out of range")
        # connectivity
        seen = {0}
        stack = [0]
        while stack:
            f = stack.pop()
            for i in range(self.face_sides[f]):
                p = self.pairing.get((f, i))
                if p is not None and p[0] not in seen:
                    seen.add(p[0])
                    stack.append(p[0])
        if len(seen) != n:
            raise SurfaceError("surface is not connected")

    # -- serialization ------------------------------------------------

    def to_json(self):
        pairs = sorted(
            [list(a), list(b)] for a, b in self.pairing.items() if a < b
        )
        return {
            "faces": list(self.face_sides),
            "pairings": pairs,
            "areas": [rat_str(a) for a in self.areas],
            "stops": sorted(
                [list(s), [rat_str(x) for x in params]]
                for s, params in self.stops.items()
            ),
            "model": self.model,
        }

    @staticmethod
    def from_json(data):
        pairing = {tuple(a): tuple(b) for a, b in data.get("pairings", [])}
        stops = {
            tuple(s): [rat_from_str(x) for x in params]
            for s, params in data.get("stops", [])
        }
        return SurfaceComplex(
            data["faces"],
            pairing,
            [rat_from_str(a) for a in data["areas"]],
            stops=stops,
            model=data.get("model"),
        )


# ---------------------------------------------------------------------------
# standard constructors: fan-triangulated polygon models
# ---------------------------------------------------------------------------


def _fan_complex(n_outer, outer_pairing, areas, stops=None, model=None):
    """n_outer triangles around a central vertex; outer edge j is side 1 of
    face j; spokes are glued consecutively."""
    pairing = {}
    for j in range(n_outer):
        pairing[(j, 2)] = ((j + 1) % n_outer, 0)
    for j, k in outer_pairing.items():
        pairing[(j, 1)] = (k, 1)
    if areas is None:
        total = Rat(1)
        areas = [total / n_outer] * n_outer
    if len(areas) != n_outer:
        raise SurfaceError("need %d areas" % n_outer)
    return SurfaceComplex([3] * n_outer, pairing, areas, stops=stops, model=model)


def build_closed(g, areas=None):
    """One-vertex 4g-gon with word a1 b1 a1' b1' ..., fan-triangulated.

    Face j is the triangle over polygon edge j; its outer side is (j, 1).
    """
    if g < 1:
        raise SurfaceError("need genus >= 1")
    n = 4 * g
    outer = {}
    for i in range(g):
        outer[4 * i] = 4 * i + 2
        outer[4 * i + 2] = 4 * i
        outer[4 * i + 1] = 4 * i + 3
        outer[4 * i + 3] = 4 * i + 1
    model = {
        "kind": "closed",
        "g": g,
        "b": 0,
        "outer": [[j, 1] for j in range(n)],
    }
    S = _fan_complex(n, outer, areas, model=model)
    if S.euler_characteristic() != 2 - 2 * g:
        raise SurfaceError("internal error: wrong Euler characteristic")
    return S


def build_punctured(g, b, stops=None, areas=None):
    """Genus g with b boundary circles: polygon word
    prod [a_i, b_i] * prod (t_j u_j t_j') with the u_j unglued (boundary).

    `stops` is a list of per-boundary stop counts or parameter lists.
    """
    if b < 1:
        raise SurfaceError("need at least one boundary component")
    n = 4 * g + 3 * b
    outer = {}
    for i in range(g):
        outer[4 * i] = 4 * i + 2
        outer[4 * i + 2] = 4 * i
        outer[4 * i + 1] = 4 * i + 3
        outer[4 * i + 3] = 4 * i + 1
    boundary_sides = []
    for j in range(b):
        base = 4 * g + 3 * j
        outer[base] = base + 2
        outer[base + 2] = base
        boundary_sides.append((base + 1, 1))
    stop_map = {}
    if stops:
        if len(stops) != b:
            raise SurfaceError("need stop data for each boundary")
        for side, spec_j in zip(boundary_sides, stops):
            if isinstance(spec_j, int):
                params = [Rat(i + 1, spec_j + 1) for i in range(spec_j)]
            else:
                params = [Rat(x) for x in spec_j]
            if params:
                stop_map[side] = params
    model = {
        "kind": "punctured",
        "g": g,
        "b": b,
        "outer": [[j, 1] for j in range(n)],
        "boundary_sides": [list(s) for s in boundary_sides],
    }
    S = _fan_complex(n, outer, areas, stops=stop_map, model=model)
    if S.euler_characteristic() != 2 - 2 * g - b:
        raise SurfaceError("internal error: wrong Euler characteristic")
    if len(S.boundary_cycles) != b:
        raise SurfaceError("internal error: wrong boundary count")
    return S


# ---------------------------------------------------------------------------
# cyclic covers
# ---------------------------------------------------------------------------


class CoverData:
    """A degree-p cyclic cover with its deck generator and defining cocycle."""

    def __init__(self, base, total, p, cocycle):
        self.base = base
        self.total = total
        self.p = p
        self.cocycle = cocycle  # dict side -> int, antisymmetric under pairing

    def project_face(self, f):
        return f % self.base.num_faces

    def sheet(self, f):
        return f // self.base.num_faces

    def lift_face(self, f, sheet):
        return f + (sheet % self.p) * self.base.num_faces

    def deck_face(self, f, power=1):
        n = self.base.num_faces
        return f % n + ((f // n + power) % self.p) * n

    def components(self):
        n = self.total.num_faces
        seen = [False] * n
        comps = []
        for f0 in range(n):
            if seen[f0]:
                continue
            comp = []
            stack = [f0]
            seen[f0] = True
            while stack:
                f = stack.pop()
                comp.append(f)
                for i in range(self.total.face_sides[f]):
                    p = self.total.pairing.get((f, i))
                    if p is not None and not seen[p[0]]:
                        seen[p[0]] = True
                        stack.append(p[0])
            comps.append(sorted(comp))
        return comps


def cocycle_value(S, a, side):
    """Oriented value of the edge cocycle `a` (stored on canonical sides)
    when crossing out through `side`."""
    edge, sign = S.edge_of(side)
    return sign * a.get(edge, 0)


def check_cocycle(S, a):
    """True when the monodromy of `a` around every interior vertex vanishes.

    This is the condition for the cochain to pair invariantly with free
    homotopy classes and for the associated cyclic covers to be unbranched."""
    for orbit, boundary in S.vertex_orbits:
        if boundary:
            continue
        if sum(cocycle_value(S, a, c) for c in orbit) != 0:
            return False
    return True


def cyclic_cover(S, a, p):
    """Degree-p cyclic cover attached to the integer edge cocycle `a` mod p.

    The cover's face f + k*n (n faces downstairs) is sheet k over face f;
    crossing a side shifts the sheet by the cocycle value.
    """
    if p < 1:
        raise SurfaceError("cover degree must be >= 1")
    if not check_cocycle(S, a):
        raise SurfaceError("not a cocycle: face coboundary does not vanish")
    n = S.num_faces
    face_sides = list(S.face_sides) * p
    areas = list(S.areas) * p
    pairing = {}
    for (f, i), (f2, i2) in S.pairing.items():
        shift = cocycle_value(S, a, (f, i))
        for k in range(p):
            k2 = (k + shift) % p
            pairing[(f + k * n, i)] = (f2 + k2 * n, i2)
    stops = {}
    for (f, i), params in S.stops.items():
        for k in range(p):
            stops[(f + k * n, i)] = params
    total = SurfaceComplex.__new__(SurfaceComplex)
    # the cover may be disconnected when a is degenerate mod p; build without
    # the connectivity check and let callers inspect components()
    total.face_sides = tuple(face_sides)
    pairs = {}
    for x, y in pairing.items():
        pairs[x] = y
        pairs[y] = x
    total.pairing = pairs
    total.areas = tuple(areas)
    total.stops = {s: tuple(v) for s, v in stops.items()}
    total.model = None
    total._homology = None
    total._build_cells()
    cover = CoverData(S, total, p, dict(a))
    return cover
