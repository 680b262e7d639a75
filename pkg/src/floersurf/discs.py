"""Unfolded patches of the universal cover and embedded-disc detection.

A Patch is a finite, simply-connected union of lifted faces.  It is grown
lazily: new lifts are attached across glued sides, and after every attachment
vertex fans are closed — when all corners around an interior vertex are
present, the missing gluing is added (identifying two existing faces if the
fan closes onto a face we already created).  This keeps the patch an honest
subcomplex of the universal cover.

Curves lift to paths of chords in patch faces.  A candidate polygon is a
closed loop of (partial) lifted chords; it is accepted when it bounds an
embedded disc inside the patch.  The disc is found exactly: each patch face
is cut into convex cells by the chords running through it (every chord spans
boundary to boundary, so cutting by full lines is exact), and the winding
number of the loop is integrated over the cell adjacency graph, anchored at
zero on the patch frontier.  The loop bounds an embedded disc iff the winding
function is 0/1-valued, the 1-region is connected, and its boundary lies on
the loop alone; the disc's area is the density-weighted cell area.
"""

from ._rat import Rat
from . import geometry
from .geometry import DegenerateGeometry

_HALF = Rat(1, 2)


class PatchError(RuntimeError):
    pass


class Patch:
    """Growing simply-connected unfolding of a surface complex."""

    def __init__(self, base):
        self.base = base
        self.face_base = []  # base face per patch face
        self.parent = []  # union-find for merged lifts
        self.glue = {}  # (pface, i) -> (pface, i), canonical ids
        self._dirty = set()  # faces whose vertex fans may newly close

    def canon(self, pf):
        while self.parent[pf] != pf:
            self.parent[pf] = self.parent[self.parent[pf]]
            pf = self.parent[pf]
        return pf

    def faces(self):
        return [p for p in range(len(self.face_base)) if self.canon(p) == p]

    def sides_of(self, pf):
        return self.base.face_sides[self.face_base[pf]]

    def new_face(self, bf):
        self.face_base.append(bf)
        self.parent.append(len(self.face_base) - 1)
        return len(self.face_base) - 1

    def glued(self, pf, i):
        g = self.glue.get((self.canon(pf), i))
        if g is None:
            return None
        return (self.canon(g[0]), g[1])

    def is_frontier(self, pf, i):
        """Unglued patch side over a glued (interior) base side."""
        pf = self.canon(pf)
        if (pf, i) in self.glue:
            return False
        return (self.face_base[pf], i) in self.base.pairing

    def _set_glue(self, a, b):
        a = (self.canon(a[0]), a[1])
        b = (self.canon(b[0]), b[1])
        ga = self.glue.get(a)
        gb = self.glue.get(b)
        if ga is not None:
            ga = (self.canon(ga[0]), ga[1])
            if ga != b:
                self._merge(ga[0], b[0], ga[1], b[1])
                return
        if gb is not None:
            gb = (self.canon(gb[0]), gb[1])
            if gb != a:
                self._merge(gb[0], a[0], gb[1], a[1])
                return
        self.glue[a] = b
        self.glue[b] = a
        self._dirty.add(a[0])
        self._dirty.add(b[0])

    def _merge(self, pa, pb, ia=None, ib=None):
        """Identify patch faces pa and pb (the same universal-cover face)."""
        pa, pb = self.canon(pa), self.canon(pb)
        if pa == pb:
            return
        if self.face_base[pa] != self.face_base[pb]:
            raise PatchError("inconsistent unfolding: merge across base faces")
        if ia is not None and ia != ib:
            raise PatchError("inconsistent unfolding: side mismatch on merge")
        self.parent[pb] = pa
        self._dirty.add(pa)
        # re-point pb's gluings onto pa, merging recursively on conflicts
        k = self.sides_of(pa)
        for i in range(k):
            g = self.glue.pop((pb, i), None)
            if g is None:
                continue
            g = (self.canon(g[0]), g[1])
            if self.glue.get(g) == (pb, i):
                del self.glue[g]
            self._set_glue((pa, i), g)

    # -- vertex closing ----------------------------------------------

    def _next_corner(self, pf, i):
        g = self.glued(pf, i)
        if g is None:
            return None
        pf2, i2 = g
        return (pf2, (i2 + 1) % self.sides_of(pf2))

    def _prev_corner(self, pf, i):
        k = self.sides_of(pf)
        g = self.glued(pf, (i - 1) % k)
        return g

    def close(self):
        """Close complete vertex fans until nothing changes.

        Incremental: only faces touched by a new gluing or merge since the
        last call are rescanned; every closure event involves a vertex of a
        fresh gluing, whose fans all contain a corner of one of the two
        glued faces."""
        while self._dirty:
            pf = self.canon(self._dirty.pop())
            k = self.sides_of(pf)
            for i in range(k):
                if self._close_corner(pf, i):
                    self._dirty.add(pf)
                    break

    def _close_corner(self, pf, i):
        bf = self.face_base[self.canon(pf)]
        orbit, boundary = self.base.vertex_orbits[
            self.base.corner_vertex[(bf, i)]
        ]
        if boundary:
            return False
        m = len(orbit)
        # walk forward
        fwd = [(self.canon(pf), i)]
        while len(fwd) <= m:
            nxt = self._next_corner(*fwd[-1])
            if nxt is None or nxt == fwd[0]:
                break
            fwd.append(nxt)
        if len(fwd) > m:
            # wrapped past a full fan: the face after m steps coincides
            over = self._next_corner(*fwd[m - 1])
            if over is not None and over != fwd[0]:
                self._merge(over[0], fwd[0][0])
                return True
            return False
        if self._next_corner(*fwd[-1]) == fwd[0]:
            return False  # already closed
        # walk backward
        bwd = []
        cur = (self.canon(pf), i)
        while len(fwd) + len(bwd) < m:
            prv = self._prev_corner(*cur)
            if prv is None:
                break
            cur = prv
            if cur in fwd or cur in bwd:
                break
            bwd.append(cur)
        if len(fwd) + len(bwd) == m:
            # all corners present; glue the two stuck sides
            end_pf, end_i = fwd[-1]
            start = bwd[-1] if bwd else fwd[0]
            st_pf, st_i = start
            st_k = self.sides_of(st_pf)
            side_a = (end_pf, end_i)
            side_b = (st_pf, (st_i - 1) % st_k)
            ea, _ = self.base.edge_of((self.face_base[end_pf], end_i))
            eb, _ = self.base.edge_of(
                (self.face_base[st_pf], (st_i - 1) % st_k)
            )
            if ea != eb:
                raise PatchError("fan closes onto mismatched edges")
            self._set_glue(side_a, side_b)
            return True
        return False

    # -- growth -------------------------------------------------------

    def add_across(self, pf, i):
        """Attach the lift across patch side (pf, i); returns the new face."""
        pf = self.canon(pf)
        g = self.glued(pf, i)
        if g is not None:
            return g[0]
        bf = self.face_base[pf]
        partner = self.base.pairing.get((bf, i))
        if partner is None:
            raise PatchError("cannot unfold across a boundary side")
        nf = self.new_face(partner[0])
        self._set_glue((pf, i), (nf, partner[1]))
        self.close()
        return self.canon(nf)

    def euler_characteristic(self):
        faces = self.faces()
        corners = set()
        edges = set()
        for pf in faces:
            k = self.sides_of(pf)
            for i in range(k):
                g = self.glued(pf, i)
                if g is None:
                    edges.add(("b", pf, i))
                else:
                    edges.add(("i",) + min((pf, i), g))
        # vertices: corner orbits in the patch
        seen = set()
        nv = 0
        for pf in faces:
            for i in range(self.sides_of(pf)):
                if (pf, i) in seen:
                    continue
                nv += 1
                orbit = [(pf, i)]
                seen.add((pf, i))
                c = self._next_corner(pf, i)
                while c is not None and c != (pf, i):
                    orbit.append(c)
                    seen.add(c)
                    c = self._next_corner(*c)
                if c is None:
                    c = self._prev_corner(pf, i)
                    while c is not None and c not in seen:
                        orbit.append(c)
                        seen.add(c)
                        c = self._prev_corner(*c)
        return nv - len(edges) + len(faces)


def unfold(S, seed, radius):
    """BFS patch of all faces within combinatorial distance radius of seed."""
    patch = Patch(S)
    root = patch.new_face(seed)
    frontier = [root]
    for _ in range(radius):
        nxt = []
        for pf in frontier:
            pf = patch.canon(pf)
            for i in range(patch.sides_of(pf)):
                if patch.is_frontier(pf, i):
                    nxt.append(patch.add_across(pf, i))
        frontier = nxt
    return patch


class LiftedPath:
    """A lift of (part of) a curve: a chain of chords in patch faces.

    steps[j] = (patch face at creation time, base segment index); faces are
    canonicalized through the patch on access.  anchor is the step index that
    lifts the curve's segment  anchor_seg."""

    def __init__(self, patch, curve, steps, anchor, anchor_seg):
        self.patch = patch
        self.curve = curve
        self.steps = steps
        self.anchor = anchor
        self.anchor_seg = anchor_seg

    def __len__(self):
        return len(self.steps)

    def pface(self, j):
        return self.patch.canon(self.steps[j][0])

    def seg_index(self, j):
        return self.steps[j][1]

    def chord(self, j):
        return self.curve.chord(self.steps[j][1])


def lift_curve(patch, curve, pface0, seg0, back, forward):
    """Lift `curve` into the patch: segment seg0 into patch face pface0,
    extended `back` segments backward and `forward` segments forward
    (following the cyclic itinerary for closed curves, clamped for arcs)."""
    n = len(curve.segments)
    segs = curve.segments
    if not curve.closed:
        back = min(back, seg0)
        forward = min(forward, n - 1 - seg0)
    steps = [(patch.canon(pface0), seg0)]
    # forward
    pf, k = steps[0]
    for _ in range(forward):
        s = segs[k]
        g = patch.glued(pf, s.side_out)
        if g is None:
            nf = patch.add_across(pf, s.side_out)
            g = patch.glued(pf, s.side_out)
        k2 = (k + 1) % n
        if g[1] != segs[k2].side_in:
            raise PatchError("lift does not match curve transition")
        pf, k = g[0], k2
        steps.append((pf, k))
    anchor = 0
    # backward
    pf, k = steps[0]
    for _ in range(back):
        k2 = (k - 1) % n
        s2 = segs[k2]
        # enter the previous face across our entry side
        side_in = segs[k].side_in
        g = patch.glued(pf, side_in)
        if g is None:
            patch.add_across(pf, side_in)
            g = patch.glued(pf, side_in)
        if g[1] != s2.side_out:
            raise PatchError("lift does not match curve transition")
        pf, k = g[0], k2
        steps.insert(0, (pf, k))
        anchor += 1
    return LiftedPath(patch, curve, steps, anchor, seg0)


def path_crossings(pa, pb):
    """Transverse crossings between two lifted paths: list of
    (step_a, t_a, step_b, t_b, point, sign), grouped exactly."""
    patch = pa.patch
    by_face = {}
    for j in range(len(pb)):
        by_face.setdefault(pb.pface(j), []).append(j)
    out = []
    for i in range(len(pa)):
        pf = pa.pface(i)
        for j in by_face.get(pf, ()):
            if pa.curve is pb.curve and pa.steps[i] == pb.steps[j]:
                continue  # identical chord (same lift): not a crossing
            hit = geometry.segment_intersection(*pa.chord(i), *pb.chord(j))
            if hit is None:
                continue
            t, u, p = hit
            da = geometry.sub(pa.chord(i)[1], pa.chord(i)[0])
            db = geometry.sub(pb.chord(j)[1], pb.chord(j)[0])
            sign = 1 if geometry.cross(da, db) > 0 else -1
            out.append((i, t, j, u, p, sign))
    out.sort(key=lambda c: (c[0], c[1], c[2]))
    return out


def self_path_crossings(path):
    """Self-crossings of one lifted path (crossings of the lift with itself)."""
    patch = path.patch
    by_face = {}
    for j in range(len(path)):
        by_face.setdefault(path.pface(j), []).append(j)
    out = []
    for pf, idxs in by_face.items():
        for x in range(len(idxs)):
            for y in range(x + 1, len(idxs)):
                i, j = idxs[x], idxs[y]
                if abs(i - j) <= 1:
                    continue  # consecutive chords share an endpoint
                hit = geometry.segment_intersection(
                    *path.chord(i), *path.chord(j)
                )
                if hit is None:
                    continue
                t, u, p = hit
                da = geometry.sub(path.chord(i)[1], path.chord(i)[0])
                db = geometry.sub(path.chord(j)[1], path.chord(j)[0])
                sign = 1 if geometry.cross(da, db) > 0 else -1
                out.append((i, t, j, u, p, sign))
    out.sort(key=lambda c: (c[0], c[1], c[2]))
    return out


# ---------------------------------------------------------------------------
# boundary loops and disc detection
# ---------------------------------------------------------------------------


class LoopPiece:
    """An oriented sub-chord of a lifted path inside one patch face."""

    def __init__(self, pface, p0, p1, a, b, forward):
        self.pface = pface
        self.p0 = p0  # full chord endpoints (face coordinates)
        self.p1 = p1
        self.a = a  # traversed parameter interval along the chord
        self.b = b  # (a < b always; `forward` records direction)
        self.forward = forward


def loop_pieces(path, j0, t0, j1, t1, forward):
    """Pieces of `path` from point (step j0, param t0) to (j1, t1), walking
    forward (increasing steps) or backward."""
    pieces = []
    patch = path.patch
    if forward:
        if (j0, t0) >= (j1, t1):
            raise PatchError("empty or reversed loop arc")
        j = j0
        while j <= j1:
            a = t0 if j == j0 else Rat(0)
            b = t1 if j == j1 else Rat(1)
            if a < b:
                p0, p1 = path.chord(j)
                pieces.append(LoopPiece(path.pface(j), p0, p1, a, b, True))
            j += 1
    else:
        if (j0, t0) <= (j1, t1):
            raise PatchError("empty or reversed loop arc")
        j = j0
        while j >= j1:
            b = t0 if j == j0 else Rat(1)
            a = t1 if j == j1 else Rat(0)
            if a < b:
                p0, p1 = path.chord(j)
                pieces.append(LoopPiece(path.pface(j), p0, p1, a, b, False))
            j -= 1
    return pieces


def _line_key(p0, p1):
    """Canonical key of the line through p0, p1 (rational normal form)."""
    a = p1[1] - p0[1]
    b = p0[0] - p1[0]
    c = -(a * p0[0] + b * p0[1])
    for v in (a, b, c):
        if v != 0:
            a, b, c = a / v, b / v, c / v
            break
    return (a, b, c)


class _Cell:
    __slots__ = ("pface", "poly", "w", "index")

    def __init__(self, pface, poly):
        self.pface = pface
        self.poly = poly
        self.w = None
        self.index = None

    def centroid(self):
        n = len(self.poly)
        sx = sum(p[0] for p in self.poly)
        sy = sum(p[1] for p in self.poly)
        return (sx / n, sy / n)

    def area(self):
        return geometry.shoelace(self.poly)


def _split_poly(poly, key):
    """Split a convex polygon by the line a*x+b*y+c=0; returns 1 or 2 polys."""
    a, b, c = key
    vals = [a * p[0] + b * p[1] + c for p in poly]
    if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
        return [poly]
    pos, neg = [], []
    n = len(poly)
    for i in range(n):
        p, vp = poly[i], vals[i]
        q, vq = poly[(i + 1) % n], vals[(i + 1) % n]
        if vp >= 0:
            pos.append(p)
        if vp <= 0:
            neg.append(p)
        if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
            t = vp / (vp - vq)
            x = (p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)
            pos.append(x)
            neg.append(x)
    return [pos, neg]


def _on_segment_interval(p0, p1, a, b):
    """Parameter interval of segment ab along the chord p0p1 (assumes both
    endpoints on the chord's line)."""
    d = geometry.sub(p1, p0)
    if d[0] != 0:
        ta = (a[0] - p0[0]) / d[0]
        tb = (b[0] - p0[0]) / d[0]
    else:
        ta = (a[1] - p0[1]) / d[1]
        tb = (b[1] - p0[1]) / d[1]
    return (ta, tb) if ta <= tb else (tb, ta)


class DiscRegion:
    """An embedded disc found for a boundary loop."""

    def __init__(self, cells, area, base_cells):
        self.cells = cells  # list of _Cell in the region
        self.area = area  # exact, density-weighted
        self.base_cells = base_cells  # list of (base face, polygon)


def find_disc(patch, chords_by_pface, pieces, grow_budget=400, faces=None):
    """Decide whether the loop bounds an embedded disc in the patch.

    chords_by_pface: pface -> list of (p0, p1) full chords (must include the
    chords underlying the loop pieces).  Returns a DiscRegion or None.  Grows
    the patch across frontier sides the winding region leaks through, up to
    grow_budget new faces.

    faces, when given, restricts the search to that set of patch faces
    (sides leading out of the set count as frontier, and the set is grown on
    leaks); winding is anchored at zero outside the loop either way."""
    budget = [grow_budget]
    face_set = None if faces is None else set(faces)
    while True:
        result = _find_disc_once(
            patch, chords_by_pface, pieces, budget, face_set
        )
        if result is not _GROWN:
            return result


_GROWN = object()


def _find_disc_once(patch, chords_by_pface, pieces, budget, face_set=None):
    piece_map = {}
    for pc in pieces:
        pf = patch.canon(pc.pface)
        piece_map.setdefault(pf, []).append(pc)

    if face_set is None:
        faces = patch.faces()
        in_set = None
    else:
        face_set |= set(piece_map)
        canonical = {patch.canon(pf) for pf in face_set}
        face_set.clear()
        face_set |= canonical
        faces = sorted(face_set)
        in_set = face_set
    cells = []
    by_face = {}
    for pf in faces:
        bf = patch.face_base[pf]
        poly = list(patch.base.face_coords(bf))
        chords = [
            (p0, p1) for (p0, p1) in chords_by_pface.get(pf, ())
        ]
        lines = []
        seen = set()
        for p0, p1 in chords:
            key = _line_key(p0, p1)
            if key not in seen:
                seen.add(key)
                lines.append(key)
        polys = [poly]
        for key in lines:
            nxt = []
            for pl in polys:
                nxt.extend(_split_poly(pl, key))
            polys = nxt
        fcells = []
        for pl in polys:
            c = _Cell(pf, pl)
            c.index = len(cells)
            cells.append(c)
            fcells.append(c)
        by_face[pf] = fcells

    # adjacency with winding jumps
    adj = [[] for _ in cells]  # (other index, jump)
    frontier_touch = [False] * len(cells)
    boundary_touch = [False] * len(cells)

    for pf in faces:
        fcells = by_face[pf]
        # edges along chord lines between cells of this face
        edges = {}  # (line key) -> list of (interval, cell, left_of_line)
        for c in fcells:
            n = len(c.poly)
            for i in range(n):
                a, b2 = c.poly[i], c.poly[(i + 1) % n]
                key = _line_key(a, b2)
                edges.setdefault(key, []).append((a, b2, c))
        handled = set()
        for key, lst in edges.items():
            for x in range(len(lst)):
                for y in range(x + 1, len(lst)):
                    a1, b1, c1 = lst[x]
                    a2, b2, c2 = lst[y]
                    if c1 is c2:
                        continue
                    lo1, hi1 = sorted(
                        [_proj(key, a1), _proj(key, b1)]
                    )
                    lo2, hi2 = sorted(
                        [_proj(key, a2), _proj(key, b2)]
                    )
                    lo, hi = max(lo1, lo2), min(hi1, hi2)
                    if lo >= hi:
                        continue
                    jump = _edge_jump(
                        patch, pf, key, lo, hi, c1, c2, piece_map
                    )
                    adj[c1.index].append((c2.index, jump))
                    adj[c2.index].append((c1.index, -jump))
        # face sides: cross-face adjacency / frontier
        bf = patch.face_base[pf]
        k = patch.base.face_sides[bf]
        pts = patch.base.face_coords(bf)
        for i in range(k):
            sa, sb = pts[i], pts[(i + 1) % k]
            key = _line_key(sa, sb)
            side_cells = []
            for c in fcells:
                n = len(c.poly)
                for t in range(n):
                    a, b2 = c.poly[t], c.poly[(t + 1) % n]
                    if _line_key(a, b2) == key:
                        ta, tb = _on_segment_interval(sa, sb, a, b2)
                        if ta < tb:
                            side_cells.append((ta, tb, c))
            g = patch.glued(pf, i)
            if g is None:
                interior = (bf, i) in patch.base.pairing
                for ta, tb, c in side_cells:
                    if interior:
                        frontier_touch[c.index] = True
                    else:
                        boundary_touch[c.index] = True
                continue
            if in_set is not None and g[0] not in in_set:
                # neighbor exists but lies outside the restricted search set
                for ta, tb, c in side_cells:
                    frontier_touch[c.index] = True
                continue
            pf2, i2 = g
            bf2 = patch.face_base[pf2]
            pts2 = patch.base.face_coords(bf2)
            k2 = patch.base.face_sides[bf2]
            sa2, sb2 = pts2[i2], pts2[(i2 + 1) % k2]
            key2 = _line_key(sa2, sb2)
            if (pf, i) in handled or (pf2, i2) in handled:
                continue
            handled.add((pf, i))
            handled.add((pf2, i2))
            other_cells = []
            for c in by_face[pf2]:
                n = len(c.poly)
                for t in range(n):
                    a, b2 = c.poly[t], c.poly[(t + 1) % n]
                    if _line_key(a, b2) == key2:
                        ta, tb = _on_segment_interval(sa2, sb2, a, b2)
                        if ta < tb:
                            other_cells.append((ta, tb, c))
            for ta, tb, c in side_cells:
                for ua, ub, c2 in other_cells:
                    # parameter s here matches 1-s there
                    lo, hi = max(ta, 1 - ub), min(tb, 1 - ua)
                    if lo < hi:
                        adj[c.index].append((c2.index, 0))
                        adj[c2.index].append((c.index, 0))

    # integrate winding from a frontier cell (winding 0 outside the loop)
    start = next(
        (c.index for c in cells if frontier_touch[c.index]), None
    )
    if start is None:
        start = 0
    w = [None] * len(cells)
    w[start] = 0
    stack = [start]
    while stack:
        i = stack.pop()
        for j, jump in adj[i]:
            val = w[i] + jump
            if w[j] is None:
                w[j] = val
                stack.append(j)
            elif w[j] != val:
                raise PatchError("inconsistent winding (patch not simply "
                                 "connected or loop not closed)")
    if any(x is None for x in w):
        raise PatchError("disconnected cell graph")

    if any(x not in (0, 1) for x in w):
        return None
    region = [c for c in cells if w[c.index] == 1]
    if not region:
        return None
    # leak through the frontier: grow and retry
    leaks = [
        c for c in region if frontier_touch[c.index]
    ]
    if leaks:
        grown = False
        for c in leaks:
            pf = c.pface
            bf = patch.face_base[pf]
            for i in range(patch.base.face_sides[bf]):
                g = patch.glued(pf, i)
                if g is not None:
                    if in_set is not None and g[0] not in in_set:
                        in_set.add(g[0])
                        grown = True
                    continue
                if patch.is_frontier(pf, i):
                    if budget[0] <= 0:
                        raise PatchError("disc search exceeded growth budget")
                    budget[0] -= 1
                    nf = patch.add_across(pf, i)
                    if in_set is not None:
                        in_set.add(patch.canon(nf))
                    grown = True
        if not grown:
            raise PatchError("winding region stuck at frontier")
        return _GROWN
    if any(boundary_touch[c.index] for c in region):
        return None  # leans on the surface boundary: not an interior disc
    # connectivity of the region
    ridx = {c.index for c in region}
    seen = {region[0].index}
    stack = [region[0].index]
    while stack:
        i = stack.pop()
        for j, jump in adj[i]:
            if j in ridx and j not in seen:
                seen.add(j)
                stack.append(j)
    if seen != ridx:
        return None
    area = Rat(0)
    base_cells = []
    for c in region:
        bf = patch.face_base[c.pface]
        area += patch.base.density(bf) * c.area()
        base_cells.append((bf, tuple(c.poly)))
    return DiscRegion(region, area, base_cells)


def _proj(key, p):
    """1-d coordinate of a point along the line with the given key."""
    a, b, c = key
    # direction (-b, a)
    return -b * p[0] + a * p[1]


def _edge_jump(patch, pf, key, lo, hi, c1, c2, piece_map):
    """Winding jump from cell c1 to cell c2 across the common edge on `key`
    with projected interval (lo, hi)."""
    total = 0
    mid = (lo + hi) / 2
    for pc in piece_map.get(pf, ()):
        if _line_key(pc.p0, pc.p1) != key:
            continue
        # interval of the traversed sub-chord in line coordinates
        d0 = _proj(key, pc.p0)
        d1 = _proj(key, pc.p1)
        qa = d0 + (d1 - d0) * pc.a
        qb = d0 + (d1 - d0) * pc.b
        qlo, qhi = (qa, qb) if qa <= qb else (qb, qa)
        if not (qlo <= mid <= qhi):
            continue
        if mid == qlo or mid == qhi:
            raise DegenerateGeometry("loop corner on a cell edge interior")
        # direction of traversal along the line coordinate
        going_up = (d1 > d0) == pc.forward
        # the positive side of a*x+b*y+c lies to the right of the direction
        # (-b, a) of increasing line coordinate
        a, b, c = key
        cen = c1.centroid()
        side1_pos = a * cen[0] + b * cen[1] + c > 0
        left_is_c1 = side1_pos != going_up
        # w is one higher on the left of the strand than on the right
        total += -1 if left_is_c1 else 1
    return total
