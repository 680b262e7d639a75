"""Exact planar geometry inside convex faces.

Every face of a surface complex is realized as a convex polygon with rational
vertex coordinates (points on the unit circle through the rational
parametrization t -> ((1-t^2)/(1+t^2), 2t/(1+t^2))).  Curves restrict to
straight chords inside faces, so intersections, convexity of corners and areas
are all decided by exact rational arithmetic.

The area form of the surface is Lebesgue measure on each face rescaled so the
face has its declared rational area; polygon areas and swept fluxes computed
here are exact rationals.
"""

from ._rat import Rat

_ZERO = Rat(0)
_TWO = Rat(2)

_coords_cache = {}


def convex_position(k):
    """k points in convex position, counterclockwise, rational coordinates."""
    if k < 2:
        raise ValueError("need at least 2 vertices")
    pts = _coords_cache.get(k)
    if pts is None:
        pts = []
        for j in range(k):
            # increasing rational circle parameters in (-1, 1)
            t = Rat(2 * j - (k - 1), k)
            d = 1 + t * t
            pts.append(((1 - t * t) / d, _TWO * t / d))
        pts = tuple(pts)
        _coords_cache[k] = pts
    return pts


def lerp(a, b, s):
    return (a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s)


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def orient(a, b, c):
    """Sign of the signed area of triangle abc: +1 ccw, -1 cw, 0 collinear."""
    x = cross(sub(b, a), sub(c, a))
    return (x > 0) - (x < 0)


def shoelace(points):
    """Twice the signed area is summed exactly; returns the signed area."""
    total = _ZERO
    n = len(points)
    for i in range(n):
        total += cross(points[i], points[(i + 1) % n])
    return total / _TWO


def segment_intersection(p1, p2, p3, p4):
    """Proper transversal crossing of open segments p1p2 and p3p4.

    Returns (t, u, point) with the crossing at p1+t*(p2-p1) = p3+u*(p4-p3),
    0<t<1, 0<u<1, or None if the open segments do not cross.  Touching
    configurations (endpoint on the other segment, collinear overlap) raise
    DegenerateGeometry: curves are required to be in general position.
    """
    shared = (p1 == p3) + (p1 == p4) + (p2 == p3) + (p2 == p4)
    if shared:
        if shared > 1:
            raise DegenerateGeometry("coincident segments")
        # consecutive chords may legitimately share one endpoint; any other
        # contact is checked below
        d1 = sub(p2, p1)
        d2 = sub(p4, p3)
        if cross(d1, d2) == 0 and cross(d1, sub(p3, p1)) == 0:
            raise DegenerateGeometry("collinear segments with shared endpoint")
        return None
    d1 = sub(p2, p1)
    d2 = sub(p4, p3)
    denom = cross(d1, d2)
    w = sub(p3, p1)
    if denom == 0:
        if cross(d1, w) == 0:
            # collinear: overlap would be a tangency
            s0 = _project_param(p1, d1, p3)
            s1 = _project_param(p1, d1, p4)
            lo, hi = min(s0, s1), max(s0, s1)
            if hi > 0 and lo < 1:
                raise DegenerateGeometry("collinear overlapping segments")
        return None
    t = cross(w, d2) / denom
    u = cross(w, d1) / denom
    if t <= 0 or t >= 1 or u <= 0 or u >= 1:
        if (0 <= t <= 1 and 0 <= u <= 1) and (
            t in (0, 1) or u in (0, 1)
        ):
            raise DegenerateGeometry("segments touch at an endpoint")
        return None
    return t, u, (p1[0] + t * d1[0], p1[1] + t * d1[1])


def _project_param(origin, direction, p):
    if direction[0] != 0:
        return (p[0] - origin[0]) / direction[0]
    return (p[1] - origin[1]) / direction[1]


def point_in_convex(poly, p):
    """1 if p strictly inside the ccw convex polygon, 0 on boundary, -1 outside."""
    on_edge = False
    n = len(poly)
    for i in range(n):
        s = orient(poly[i], poly[(i + 1) % n], p)
        if s < 0:
            return -1
        if s == 0:
            on_edge = True
    return 0 if on_edge else 1


class DegenerateGeometry(Exception):
    """Raised when curves are tangent, share points, or hit cell vertices."""
