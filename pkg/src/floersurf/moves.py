"""Regular-homotopy moves on immersed curves.

Empty-bigon cancellation, triple-point moves, minimal position against an
embedded curve, Dehn twists, and the reduction-to-embedded pipeline.  Every
move that deforms a curve reports the exact signed area (flux) swept, found
by solving for the 2-chain bounded by the old and new curves.
"""

from collections import namedtuple

from ._rat import Rat
from . import geometry
from .curve import (
    CurveError,
    ImmersedCurve,
    LocalSystem,
    Segment,
    curve_crossings,
)
from .curveops import _chord_cuts_cell, _safe_eps, embedded_bigons


class MoveError(RuntimeError):
    pass


MoveLog = namedtuple("MoveLog", "kind flux")


# ---------------------------------------------------------------------------
# flux: the exact signed area between two homologous curves
# ---------------------------------------------------------------------------


def _line_key(p0, p1):
    a = p1[1] - p0[1]
    b = p0[0] - p1[0]
    c = -(a * p0[0] + b * p0[1])
    for v in (a, b, c):
        if v != 0:
            a, b, c = a / v, b / v, c / v
            break
    return (a, b, c)


def _split_poly(poly, key):
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


def _proj(key, p):
    a, b, _ = key
    return -b * p[0] + a * p[1]


def _interval_on(sa, sb, a, b):
    d = geometry.sub(sb, sa)
    if d[0] != 0:
        ta = (a[0] - sa[0]) / d[0]
        tb = (b[0] - sa[0]) / d[0]
    else:
        ta = (a[1] - sa[1]) / d[1]
        tb = (b[1] - sa[1]) / d[1]
    return (ta, tb) if ta <= tb else (tb, ta)


def _centroid(poly):
    n = len(poly)
    return (
        sum(p[0] for p in poly) / n,
        sum(p[1] for p in poly) / n,
    )


def flux_between(c_old, c_new):
    """Signed area of the 2-chain D with boundary c_new - c_old, normalized
    so the chain has minimal area-weighted total multiplicity (the localized
    homotopy).  Raises MoveError if the curves are not homologous."""
    S = c_old.surface
    strands = []  # (face, p0, p1, weight)
    for k in range(len(c_new.segments)):
        p0, p1 = c_new.chord(k)
        strands.append((c_new.segments[k].face, p0, p1, 1))
    for k in range(len(c_old.segments)):
        p0, p1 = c_old.chord(k)
        strands.append((c_old.segments[k].face, p0, p1, -1))

    by_face = {}
    for f, p0, p1, wgt in strands:
        by_face.setdefault(f, []).append((p0, p1, wgt))

    cells = []
    face_cells = {}
    for f in range(S.num_faces):
        poly = list(S.face_coords(f))
        keys = []
        seen = set()
        for p0, p1, wgt in by_face.get(f, ()):
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
        fc = face_cells[f]
        edges = {}
        for ci in fc:
            poly = cells[ci][1]
            n = len(poly)
            for i in range(n):
                ea, eb = poly[i], poly[(i + 1) % n]
                edges.setdefault(_line_key(ea, eb), []).append((ea, eb, ci))
        strand_keys = {}
        for p0, p1, wgt in by_face.get(f, ()):
            strand_keys.setdefault(_line_key(p0, p1), []).append(
                (p0, p1, wgt)
            )
        for key, lst in edges.items():
            for x in range(len(lst)):
                for y in range(x + 1, len(lst)):
                    a1, b1, ci = lst[x]
                    a2, b2, cj = lst[y]
                    if ci == cj:
                        continue
                    lo1, hi1 = sorted([_proj(key, a1), _proj(key, b1)])
                    lo2, hi2 = sorted([_proj(key, a2), _proj(key, b2)])
                    if max(lo1, lo2) >= min(hi1, hi2):
                        continue
                    jump = 0
                    cen = _centroid(cells[ci][1])
                    ka, kb, kc = key
                    side_pos = ka * cen[0] + kb * cen[1] + kc > 0
                    for p0, p1, wgt in strand_keys.get(key, ()):
                        # curve chords span the whole face on their line
                        going_up = _proj(key, p1) > _proj(key, p0)
                        left_is_ci = side_pos != going_up
                        # multiplicity rises by wgt on the strand's left
                        jump += wgt if left_is_ci else -wgt
                    adj[ci].append((cj, -jump))
                    adj[cj].append((ci, jump))
        # gluing across interior sides
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
            for ci in fc:
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
                        adj[ci].append((cj, 0))
                        adj[cj].append((ci, 0))

    w = [None] * len(cells)
    w[0] = 0
    stack = [0]
    while stack:
        i = stack.pop()
        for j, jump in adj[i]:
            val = w[i] + jump
            if w[j] is None:
                w[j] = val
                stack.append(j)
            elif w[j] != val:
                raise MoveError("curves are not homologous (flux undefined)")
    if any(x is None for x in w):
        raise MoveError("disconnected surface in flux computation")

    # localize: subtract the area-weighted median multiplicity
    weighted = sorted(
        (w[i], S.density(f) * geometry.shoelace(poly))
        for i, (f, poly) in enumerate(cells)
    )
    total = sum(a for _, a in weighted)
    run = Rat(0)
    k0 = weighted[-1][0]
    for val, area in weighted:
        run += area
        if 2 * run >= total:
            k0 = val
            break
    flux = Rat(0)
    for i, (f, poly) in enumerate(cells):
        if w[i] != k0:
            flux += (w[i] - k0) * S.density(f) * geometry.shoelace(poly)
    return flux


# ---------------------------------------------------------------------------
# parallel replacement: the shared splice used by the sliding moves
# ---------------------------------------------------------------------------


def _dirsegs(c, segs, forward):
    """Directed segments for a traversal-ordered list of base indices;
    forward tells whether each is walked along the curve's orientation."""
    if forward:
        return [c.segments[k] for k in segs]
    return [
        Segment(s.face, s.side_out, s.s_out, s.side_in, s.s_in)
        for s in (c.segments[k] for k in segs)
    ]


def _seg_chord(S, d):
    return (
        S.side_point((d.face, d.side_in), d.s_in),
        S.side_point((d.face, d.side_out), d.s_out),
    )


def _uv_signs(S, d):
    p0, p1 = _seg_chord(S, d)
    dd = geometry.sub(p1, p0)
    a_in, b_in = S.side_endpoints((d.face, d.side_in))
    a_out, b_out = S.side_endpoints((d.face, d.side_out))
    u = geometry.cross(dd, geometry.sub(b_in, a_in))
    v = geometry.cross(dd, geometry.sub(b_out, a_out))
    if u == 0 or v == 0:
        raise MoveError("chord parallel to a face side")
    return (1 if u > 0 else -1), (1 if v > 0 else -1)


def _side_of(p, a, b):
    s = geometry.cross(geometry.sub(b, a), geometry.sub(p, a))
    if s == 0:
        raise MoveError("point on chord line")
    return 1 if s > 0 else -1


def parallel_replacement(S, entry, exit_, pieces, sides, eps):
    """Segments replacing a curve arc by a path parallel to a rail.

    entry/exit_: (face, side, param) kept from the replaced arc's ends;
    pieces: rail sub-arcs as lists of directed Segments, consecutive pieces
    meeting at a corner inside a shared face; sides[i]: the offset side
    (relative to each rail chord's direction) the new path runs on."""
    flat = []
    piece_of = []
    first_flags = []
    last_flags = []
    for pi, piece in enumerate(pieces):
        for t, d in enumerate(piece):
            flat.append(d)
            piece_of.append(pi)
            first_flags.append(t == 0)
            last_flags.append(t == len(piece) - 1)
    if not flat:
        raise MoveError("empty rail")

    # propagated exit-offset signs
    xs = [None] * len(flat)
    for t, d in enumerate(flat):
        u, v = _uv_signs(S, d)
        if first_flags[t]:
            xs[t] = sides[piece_of[t]] * v
        else:
            xs[t] = -xs[t - 1] * u * v

    # the replaced arc must start and end on the offset side
    p0, p1 = _seg_chord(S, flat[0])
    ep = S.side_point((entry[0], entry[1]), entry[2])
    if _side_of(ep, p0, p1) != sides[0]:
        raise MoveError("replaced arc enters on the swept side")
    q0, q1 = _seg_chord(S, flat[-1])
    xp = S.side_point((exit_[0], exit_[1]), exit_[2])
    if _side_of(xp, q0, q1) != sides[-1]:
        raise MoveError("replaced arc exits on the swept side")
    if flat[0].face != entry[0] or flat[-1].face != exit_[0]:
        raise MoveError("rail ends in the wrong faces")

    segs = []
    cur = (entry[0], entry[1], entry[2])
    for t, d in enumerate(flat):
        if t > 0 and first_flags[t] and d.face != cur[0]:
            raise MoveError("rail corner faces do not match")
        if t == len(flat) - 1:
            out_side, out_par = exit_[1], exit_[2]
        elif last_flags[t]:
            continue  # exit supplied by the next piece's first segment
        else:
            out_side = d.side_out
            out_par = d.s_out + xs[t] * eps
            if not (0 < out_par < 1):
                raise MoveError("offset parameter out of range")
        segs.append((cur[0], cur[1], cur[2], out_side, out_par))
        if t < len(flat) - 1:
            nxt, par = S.cross((cur[0], out_side), out_par)
            cur = (nxt[0], nxt[1], par)
    return segs


def _remap_marker(marker, n_old, ka, m, n_repl):
    """Transition index in the new itinerary (replacement first, suffix
    after) of an old transition; markers inside the replaced arc are parked
    on the first suffix transition."""
    if marker is None:
        return None
    n_new = n_repl + n_old - m
    if (marker - ka) % n_old < m:
        return n_repl % n_new
    return (n_repl + (marker - (ka + m)) % n_old) % n_new


def _splice(c, ka, m, repl_segs):
    n = len(c.segments)
    suffix = [tuple(c.segments[(ka + m + i) % n]) for i in range(n - m)]
    segs = list(repl_segs) + suffix
    spin = _remap_marker(c.spin_marker, n, ka, m, len(repl_segs))
    base = _remap_marker(c.system.base_index, n, ka, m, len(repl_segs))
    sys = LocalSystem(c.system.rank, c.system.holonomy, base)
    return ImmersedCurve(c.surface, segs, closed=True, spin_marker=spin,
                         system=sys)


# ---------------------------------------------------------------------------
# bigon cancellation
# ---------------------------------------------------------------------------


def _arc_along(c, arc):
    """Ascending segments along c's orientation plus the corners at the
    arc's start and end in that direction (each a (face, point) pair)."""
    if arc.forward:
        return list(arc.segs), arc.p_start, arc.p_end
    return list(reversed(arc.segs)), arc.p_end, arc.p_start


def _region_side(bigon, face, corner_point, rail_chord):
    """Side of the bigon's interior relative to the directed rail chord at
    the given corner."""
    sides = set()
    for bf, poly in bigon.region.base_cells:
        if bf != face or corner_point not in poly:
            continue
        try:
            sides.add(_side_of(_centroid(poly), *rail_chord))
        except MoveError:
            continue
    if len(sides) != 1:
        raise MoveError("ambiguous bigon side at corner")
    return sides.pop()


def cancel_empty_bigon(c, b):
    """Cancel an empty embedded self-bigon: returns (c', flux) where c' has
    exactly two fewer self-intersections and flux is the area swept."""
    if not b.empty:
        raise MoveError("bigon is not empty")
    if b.convex_at != (1, 1):
        raise MoveError("bigon has a concave corner")
    arcs = sorted(b.arcs, key=lambda a: len(a.segs))
    last_err = None
    for move, rail in ((arcs[0], arcs[1]), (arcs[1], arcs[0])):
        try:
            return _cancel_with(c, c, b, move, rail, check_self=True)
        except MoveError as err:
            last_err = err
    raise last_err


def _cancel_with(c_move, c_rail, b, move, rail, check_self):
    S = c_move.surface
    move_segs, mstart, mend = _arc_along(c_move, move)
    if len(move_segs) >= len(c_move.segments):
        raise MoveError("bigon arc wraps the whole curve")
    if mstart == mend:
        raise MoveError("degenerate bigon corners")
    # direct the rail from the move arc's start corner to its end corner
    if rail.p_start == mstart and rail.p_end == mend:
        rail_dir = _dirsegs(c_rail, rail.segs, rail.forward)
    elif rail.p_end == mstart and rail.p_start == mend:
        rail_dir = _dirsegs(
            c_rail, list(reversed(rail.segs)), not rail.forward
        )
    else:
        raise MoveError("bigon arcs do not share corners")

    ka = move_segs[0]
    m = len(move_segs)
    first = c_move.segments[ka]
    last = c_move.segments[move_segs[-1]]
    entry = (first.face, first.side_in, first.s_in)
    exit_ = (last.face, last.side_out, last.s_out)
    rail_chord0 = _seg_chord(S, rail_dir[0])
    side = -_region_side(b, mstart[0], mstart[1], rail_chord0)

    eps = min(_safe_eps(c_move), _safe_eps(c_rail))
    old_self = len(c_move.self_crossings())
    old_pair = (
        None if c_move is c_rail else len(curve_crossings(c_move, c_rail))
    )
    for _ in range(10):
        try:
            repl = parallel_replacement(
                S, entry, exit_, [rail_dir], [side], eps
            )
            c2 = _splice(c_move, ka, m, repl)
        except (CurveError, MoveError, geometry.DegenerateGeometry):
            eps = eps / 2
            continue
        if check_self and len(c2.self_crossings()) != old_self - 2:
            eps = eps / 2
            continue
        if old_pair is not None and (
            len(curve_crossings(c2, c_rail)) != old_pair - 2
        ):
            eps = eps / 2
            continue
        return c2, flux_between(c_move, c2)
    raise MoveError("could not realize bigon cancellation")


# ---------------------------------------------------------------------------
# triple-point move (single-face triangles)
# ---------------------------------------------------------------------------


Triangle = namedtuple("Triangle", "face move_curve move_seg other_chords z")
"""A single-face empty triangle: chord move_seg of curve move_curve slides
across z, the crossing point of the two other chords."""


def find_empty_triangles(curves):
    """All single-face empty triangles formed by three pairwise-crossing
    chords of the given curves, one Triangle per choice of sliding chord."""
    chords = []  # (face, p0, p1, curve index, seg index)
    for ci, c in enumerate(curves):
        for k, s in enumerate(c.segments):
            p0, p1 = c.chord(k)
            chords.append((s.face, p0, p1, ci, k))
    by_face = {}
    for ch in chords:
        by_face.setdefault(ch[0], []).append(ch)
    out = []
    for f, lst in sorted(by_face.items()):
        for x in range(len(lst)):
            for y in range(x + 1, len(lst)):
                for z in range(y + 1, len(lst)):
                    out.extend(_triangles_of(f, lst[x], lst[y], lst[z], lst))
    return out


def _triangles_of(f, cha, chb, chc, all_chords):
    trio = (cha, chb, chc)
    pts = {}
    for (u, v) in ((0, 1), (0, 2), (1, 2)):
        try:
            hit = geometry.segment_intersection(
                trio[u][1], trio[u][2], trio[v][1], trio[v][2]
            )
        except geometry.DegenerateGeometry:
            return []
        if hit is None:
            return []
        pts[(u, v)] = hit[2]
    poly = [pts[(0, 1)], pts[(0, 2)], pts[(1, 2)]]
    if geometry.shoelace(poly) == 0:
        return []
    if geometry.shoelace(poly) < 0:
        poly.reverse()
    for ch in all_chords:
        if ch in trio:
            continue
        if _chord_cuts_cell(ch[1], ch[2], poly):
            return []
    out = []
    for mi in range(3):
        oi = [t for t in range(3) if t != mi]
        out.append(
            Triangle(
                f,
                trio[mi][3],
                trio[mi][4],
                (trio[oi[0]][1:3], trio[oi[1]][1:3]),
                pts[(oi[0], oi[1])],
            )
        )
    return out


def _param_on_side(ends, point, direction):
    """Parameter where the line through `point` along `direction` meets the
    side with the given endpoints."""
    a, b = ends
    e = geometry.sub(b, a)
    den = geometry.cross(e, direction)
    if den == 0:
        raise MoveError("chord parallel to side")
    t = geometry.cross(geometry.sub(point, a), direction) / den
    if not (0 < t < 1):
        raise MoveError("slid chord leaves the side")
    return t


def _crossing_profile(curves):
    prof = [len(c.self_crossings()) for c in curves]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            prof.append(len(curve_crossings(curves[i], curves[j])))
    return prof


def triple_point_move(curves, tri):
    """Slide the designated chord across the opposite crossing point of an
    empty triangle.  Returns (new curve list, flux of the moved curve)."""
    c = curves[tri.move_curve]
    S = c.surface
    s = c.segments[tri.move_seg]
    p0, p1 = c.chord(tri.move_seg)
    d = geometry.sub(p1, p0)
    z = tri.z
    # foot of the perpendicular from z onto the chord line
    tq = (d[0] * (z[0] - p0[0]) + d[1] * (z[1] - p0[1])) / (
        d[0] * d[0] + d[1] * d[1]
    )
    q = (p0[0] + tq * d[0], p0[1] + tq * d[1])
    in_ends = S.side_endpoints((s.face, s.side_in))
    out_ends = S.side_endpoints((s.face, s.side_out))
    counts = _crossing_profile(curves)
    scale = Rat(1)
    for _ in range(12):
        zp = (z[0] + scale * (z[0] - q[0]), z[1] + scale * (z[1] - q[1]))
        try:
            new_in = _param_on_side(in_ends, zp, d)
            new_out = _param_on_side(out_ends, zp, d)
            segs = [list(x) for x in c.segments]
            segs[tri.move_seg] = [s.face, s.side_in, new_in,
                                  s.side_out, new_out]
            n = len(segs)
            km1 = (tri.move_seg - 1) % n
            kp1 = (tri.move_seg + 1) % n
            segs[km1][4] = 1 - new_in
            segs[kp1][2] = 1 - new_out
            segs = [tuple(x) for x in segs]
            c2 = ImmersedCurve(
                S, segs, closed=c.closed, spin_marker=c.spin_marker,
                system=c.system,
            )
        except (CurveError, MoveError, geometry.DegenerateGeometry):
            scale = scale / 2
            continue
        new_curves = list(curves)
        new_curves[tri.move_curve] = c2
        if _crossing_profile(new_curves) != counts:
            scale = scale / 2
            continue
        return new_curves, flux_between(c, c2)
    raise MoveError("could not realize triple-point move")


# ---------------------------------------------------------------------------
# reduction pipelines
# ---------------------------------------------------------------------------


class NoBigon:
    def __repr__(self):
        return "NoBigon"


NO_BIGON = NoBigon()


def _blocking_count(c_list, b):
    n = 0
    for bf, poly in b.region.base_cells:
        for cv in c_list:
            for k, s in enumerate(cv.segments):
                if s.face != bf:
                    continue
                p0, p1 = cv.chord(k)
                if _chord_cuts_cell(p0, p1, poly):
                    n += 1
    return n


def _good(b, curves):
    """Empty, convex at both corners, and actually cancellable: neither
    boundary arc wraps its whole curve."""
    return (
        b.empty
        and b.convex_at == (1, 1)
        and all(
            len(a.segs) < len(curves[a.curve].segments) for a in b.arcs
        )
    )


def steinitz_reduce(c, max_moves=20):
    """Find an empty embedded self-bigon, applying triple-point moves while
    every bigon is blocked.

    Returns (possibly moved curve, bigon, move log); the bigon is NO_BIGON
    when the curve bounds no embedded bigon at all."""
    log = []
    cur = c
    for _ in range(max_moves + 1):
        bigons = embedded_bigons(cur)
        if not bigons:
            if log:
                raise MoveError("bigon vanished during emptying moves")
            return c, NO_BIGON, []
        empties = [b for b in bigons if _good(b, [cur])]
        if empties:
            best = min(empties, key=lambda b: (b.area, sorted(b.corners)))
            return cur, best, log
        score = min(_blocking_count([cur], b) for b in bigons)
        progressed = False
        for tri in find_empty_triangles([cur]):
            try:
                new_curves, flux = triple_point_move([cur], tri)
            except MoveError:
                continue
            c2 = new_curves[0]
            nb = embedded_bigons(c2)
            if not nb:
                continue
            ns = min(_blocking_count([c2], b) for b in nb)
            if ns < score or any(_good(b, [c2]) for b in nb):
                cur = c2
                log.append(MoveLog("triple-point", flux))
                progressed = True
                break
        if not progressed:
            raise MoveError("blocked bigon: no productive triple-point move")
    raise MoveError("triple-point move budget exhausted")


def minimal_position(c, sigma, max_moves=60):
    """Remove all bigons between c and the embedded curve sigma, isotoping
    c only.  Returns (c', move log)."""
    cur = c
    log = []
    for _ in range(max_moves + 1):
        bigons = embedded_bigons(cur, sigma)
        if not bigons:
            return cur, log
        empties = [b for b in bigons if _good(b, [cur, sigma])]
        if empties:
            b = min(empties, key=lambda x: (x.area, sorted(x.corners)))
            move = next(a for a in b.arcs if a.curve == 0)
            rail = next(a for a in b.arcs if a.curve == 1)
            cur, flux = _cancel_with(cur, sigma, b, move, rail,
                                     check_self=False)
            log.append(MoveLog("bigon-cancel", flux))
            continue
        score = min(_blocking_count([cur, sigma], b) for b in bigons)
        progressed = False
        for tri in find_empty_triangles([cur, sigma]):
            if tri.move_curve != 0:
                continue
            try:
                new_curves, flux = triple_point_move([cur, sigma], tri)
            except MoveError:
                continue
            c2 = new_curves[0]
            nb = embedded_bigons(c2, sigma)
            if not nb:
                continue
            ns = min(_blocking_count([c2, sigma], b) for b in nb)
            if ns < score or any(_good(b, [c2, sigma]) for b in nb):
                cur = c2
                log.append(MoveLog("triple-point", flux))
                progressed = True
                break
        if not progressed:
            raise MoveError("minimal position: no productive move")
    raise MoveError("minimal position: move budget exhausted")


def geometric_intersection_number(c1, c2):
    """Number of crossings after isotoping c1 to minimal position."""
    cur, _ = minimal_position(c1, c2)
    return len(curve_crossings(cur, c2))


def reduce_to_embedded(c, flux_sign=1, max_steps=30):
    """Repeatedly cancel empty bigons until the curve is embedded.

    Returns (embedded curve with flux-corrected local system, move log).
    Raises MoveError reporting NoBigon when the curve self-intersects but
    bounds no embedded bigon: it is not homotopic to a simple closed
    curve."""
    cur = c
    log = []
    for _ in range(max_steps):
        if not cur.self_crossings():
            return cur, log
        cur2, b, mlog = steinitz_reduce(cur)
        if b is NO_BIGON:
            raise MoveError(
                "NoBigon: curve is not homotopic to an embedded curve"
            )
        log.extend(mlog)
        cur3, flux = cancel_empty_bigon(cur2, b)
        cur = cur3.with_system(cur3.system.scaled(flux_sign * flux))
        log.append(MoveLog("bigon-cancel", flux))
    raise MoveError("reduction budget exhausted")


# ---------------------------------------------------------------------------
# Dehn twists
# ---------------------------------------------------------------------------


def dehn_twist(sigma, c, power=1):
    """The Dehn twist of c along the embedded closed curve sigma.

    power > 0 is the right-handed twist.  The result is a transverse
    representative of the twisted free homotopy class; it need not be in
    minimal position."""
    if power == 0:
        return c
    if sigma.self_crossings():
        raise MoveError("twisting curve must be embedded")
    if not sigma.closed or not c.closed:
        raise MoveError("Dehn twist needs closed curves")
    if tuple(c.segments) == tuple(sigma.segments):
        return c  # twisting a curve along itself is an isotopy
    S = c.surface
    crossings = curve_crossings(c, sigma)
    if not crossings:
        return c
    by_seg = {}
    for cr in crossings:
        by_seg.setdefault(cr.seg_a, []).append(cr)
    for lst in by_seg.values():
        lst.sort(key=lambda cr: cr.t_a)
    total = len(crossings)
    eps0 = _joint_safe_eps(c, sigma)
    for attempt in range(8):
        eps = eps0 / (2 ** attempt)
        try:
            # the new curve as a cyclic list of edge-crossing events
            events = []
            detour_no = 0
            for k, s in enumerate(c.segments):
                for cr in by_seg.get(k, ()):
                    detour_no += 1
                    # right twist: follow sigma backward at a positive
                    # crossing of (c, sigma), forward at a negative one
                    forward = (cr.sign < 0) == (power > 0)
                    scale = eps * Rat(detour_no, total + 1)
                    events.extend(
                        _detour_events(sigma, cr, forward, abs(power),
                                       scale)
                    )
                events.append((s.face, s.side_out, s.s_out))
            segs = _curve_from_events(S, events)
            spin = 0 if c.spin_marker is not None else None
            return ImmersedCurve(
                S, segs, closed=True, spin_marker=spin,
                system=LocalSystem(c.system.rank, c.system.holonomy, 0),
            )
        except (CurveError, MoveError, geometry.DegenerateGeometry):
            continue
    raise MoveError("could not realize Dehn twist")


def _joint_safe_eps(c1, c2):
    """An offset smaller than every parameter gap in the union of the two
    curves' side parameters."""
    per_side = {}
    for cv in (c1, c2):
        for s in cv.segments:
            per_side.setdefault((s.face, s.side_in), set()).add(s.s_in)
            per_side.setdefault((s.face, s.side_out), set()).add(s.s_out)
    gap = Rat(1)
    for params in per_side.values():
        vals = sorted(params | {Rat(0), Rat(1)})
        for a, b in zip(vals, vals[1:]):
            if b - a < gap:
                gap = b - a
    return gap / 8


def _detour_events(sigma, cr, forward, loops, scale):
    """Edge-crossing events for one parallel copy of sigma inserted at the
    crossing cr, spiralling inward for higher powers."""
    S = sigma.surface
    nsig = len(sigma.segments)

    def dirseg(j):
        s = sigma.segments[j % nsig]
        if forward:
            return s
        return Segment(s.face, s.side_out, s.s_out, s.side_in, s.s_in)

    step = 1 if forward else -1
    # travel chords: the crossing chord (cut), then full copies around
    chords = [dirseg(cr.seg_b + step * t) for t in range(loops * nsig)]
    mags = [scale * Rat(loops - j, loops) for j in range(loops)]
    events = []
    x = 1
    mag = mags[0]
    for t, d in enumerate(chords):
        if t > 0:
            u, v = _uv_signs(S, d)
            x = -x * u * v
        if t % nsig == 0 and t > 0:
            # stepping inward as the copy passes its starting chord again
            mag = mags[t // nsig]
        events.append((d.face, d.side_out, d.s_out + x * mag))
    return events


def _curve_from_events(S, events):
    """Segments of the closed curve crossing the given (face, side, param)
    events in cyclic order; U-turn pairs (a chord entering and leaving a
    face through one side) are cancelled by sliding across that side."""
    events = list(events)
    for _ in range(len(events) + 1):
        if len(events) < 2:
            raise MoveError("twisted curve collapsed")
        cancelled = False
        n = len(events)
        for i in range(n):
            prev = events[i - 1]
            (f2, i2), _par = S.cross((prev[0], prev[1]), prev[2])
            if f2 != events[i][0]:
                raise MoveError("event chain broken")
            if i2 == events[i][1]:
                # U-turn through side i2: slide the finger across it
                for j in sorted({(i - 1) % n, i}, reverse=True):
                    del events[j]
                cancelled = True
                break
        if not cancelled:
            break
    else:
        raise MoveError("event cancellation did not terminate")
    segs = []
    for i, ev in enumerate(events):
        prev = events[i - 1]
        (f2, i2), par = S.cross((prev[0], prev[1]), prev[2])
        segs.append((ev[0], i2, par, ev[1], ev[2]))
    return segs


def homology_transvection(data, sigma, c, power=1):
    """The expected homology class of dehn_twist(sigma, c, power)."""
    from .homology import homology_class

    u = homology_class(sigma, data)
    v = homology_class(c, data)
    M = data.intersection_matrix
    pair = sum(
        u[a] * M[a][b] * v[b]
        for a in range(data.rank)
        for b in range(data.rank)
    )
    return tuple(v[j] + power * pair * u[j] for j in range(data.rank))
