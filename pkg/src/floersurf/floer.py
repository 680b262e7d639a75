"""Z/2-graded Floer complexes and A-infinity products for immersed curves.

Generators of CF(X0, X1) are the transverse crossings of the two curves,
with fiber Hom(xi0, xi1) at each point.  The differential and the higher
products count immersed convex polygons: a candidate polygon is a cyclic
chain of boundary arcs on lifts of the curves in a patch of the universal
cover, accepted when the chain bounds an embedded disc there with all
corners convex.  Each polygon is weighted by q^area, a holonomy transport
along every boundary arc, a factor -1 per crossing of a spin marker, and a
Koszul-type sign.

The sign rule is fixed by audit, not by fiat: the constants in _SIGN_RULE
are the unique assignment (within the natural family built from arc
reversals and corner degrees) under which d^2 = 0 and the A-infinity
relations hold exactly on the calibration corpus; a_infty_audit re-verifies
the relations on any given object set.

Self-Floer complexes use a combinatorial Hamiltonian push-off: the parallel
copy crosses the curve at two extra Morse-type points (min/max) and twice
near each self-crossing, and its holonomy is rescaled by q^flux so that the
copy represents the same object (the two Morse strips then cancel exactly).
"""

from collections import namedtuple

from ._rat import Rat
from . import geometry, linalg
from .curve import (
    CurveError,
    ImmersedCurve,
    algebraic_intersection,
    curve_crossings,
)
from .curveops import is_unobstructed, push_off
from .discs import (
    Patch,
    PatchError,
    find_disc,
    lift_curve,
    loop_pieces,
    path_crossings,
)
from .geometry import DegenerateGeometry
from .moves import flux_between
from .novikov import NovikovScalar, format_scalar


class FloerError(ValueError):
    pass


class FukayaObject:
    """An unobstructed curve with local system and a Z/2 shift."""

    def __init__(self, curve, shift=0, check=True):
        self.curve = curve
        self.system = curve.system
        self.shift = int(shift) % 2
        if check and not is_unobstructed(curve):
            raise FloerError("curve bounds a teardrop: obstructed object")

    def shifted(self, n=1):
        return FukayaObject(self.curve, self.shift + n, check=False)

    def __repr__(self):
        return "FukayaObject(rank=%d, shift=%d, %d segments)" % (
            self.system.rank,
            self.shift,
            len(self.curve.segments),
        )


# ---------------------------------------------------------------------------
# polygon enumeration
# ---------------------------------------------------------------------------


_Arc = namedtuple("_Arc", "level rev base_count spin_parity")
"""Boundary arc on curve `level` of a polygon: rev is True when traversed
against the curve's orientation; base_count / spin_parity count passages of
the local-system base transition and the spin marker."""


_Polygon = namedtuple("_Polygon", "corners output area arcs transports")
"""corners: generator index of x_i in CF(X_{i-1}, X_i) for i = 1..k;
output: generator index of y in CF(X_0, X_k); arcs: _Arc per boundary arc
0..k (arc i runs from corner i to corner i+1 in the cyclic order
y, x_1, ..., x_k); transports: holonomy transport matrix per arc."""


def _travel_dir(path, j, direction):
    p0, p1 = path.chord(j)
    d = geometry.sub(p1, p0)
    return d if direction == 1 else (-d[0], -d[1])


class _LiftCache:
    """Lifts of curves into one patch, keyed by an anchor (face, segment)."""

    def __init__(self, patch, window):
        self.patch = patch
        self.window = window
        self.entries = []  # (curve, pface, seg, path)

    def get(self, curve, pface, seg):
        pface = self.patch.canon(pface)
        for cv, pf, sg, path in self.entries:
            if cv is curve and sg == seg and self.patch.canon(pf) == pface:
                return path
        path = lift_curve(
            self.patch, curve, pface, seg, self.window, self.window
        )
        self.entries.append((curve, pface, seg, path))
        return path


def _arc_data(path, pos_a, pos_b, level, curve):
    """(_Arc, pieces) for the boundary arc of `path` from pos_a to pos_b."""
    forward = pos_b > pos_a
    pieces = loop_pieces(path, pos_a[0], pos_a[1], pos_b[0], pos_b[1], forward)
    lo, hi = (pos_a[0], pos_b[0]) if forward else (pos_b[0], pos_a[0])
    transitions = [path.seg_index(j) for j in range(lo + 1, hi + 1)]
    base = curve.system.base_index
    base_count = sum(1 for t in transitions if t == base)
    if not forward:
        base_count = -base_count
    spin = 0
    if curve.spin_marker is not None:
        spin = sum(1 for t in transitions if t == curve.spin_marker) % 2
    return _Arc(level, not forward, base_count, spin), pieces


def _mat_power(curve, n):
    H = curve.system.holonomy
    if n == 0:
        return linalg.identity(curve.system.rank)
    M = H if n > 0 else curve.system.holonomy_inverse()
    out = M
    for _ in range(abs(n) - 1):
        out = linalg.mat_mul(M, out)
    return out


def enumerate_polygons(curves):
    """All immersed (k+1)-gons with convex corners bounded by the ordered
    tuple of curves (c_0, ..., c_k), with corners x_i on c_{i-1} x c_i and
    the output corner on c_0 x c_k; consecutive curves must be distinct and
    transverse, as must (c_0, c_k)."""
    k = len(curves) - 1
    if k < 1:
        raise FloerError("need at least two curves")
    S = curves[0].surface
    W = sum(len(c.segments) for c in curves)
    pair_cross = [curve_crossings(curves[i], curves[i + 1]) for i in range(k)]
    out_list = (
        pair_cross[0] if k == 1 else curve_crossings(curves[0], curves[k])
    )
    out_map = {(cr.face, cr.point): idx for idx, cr in enumerate(out_list)}
    by_seg = [dict() for _ in range(k)]
    for i in range(1, k):
        for idx, cr in enumerate(pair_cross[i]):
            by_seg[i].setdefault(cr.seg_a, []).append((idx, cr))

    polys = []
    seen = set()

    for idx0, cr0 in enumerate(pair_cross[0]):
        patch = Patch(S)
        pf0 = patch.new_face(cr0.face)
        lifts = _LiftCache(patch, W)
        path0 = lifts.get(curves[0], pf0, cr0.seg_a)
        path1 = lifts.get(curves[1], patch.canon(pf0), cr0.seg_b)
        pos_x1_0 = (path0.anchor, cr0.t_a)
        pos_x1_1 = (path1.anchor, cr0.t_b)

        def close_chain(chain, dir0):
            """chain: list over levels 1..k of
            (corner idx, path, pos on own path, dir, pos on previous path)."""
            path_k = chain[-1][1]
            pos_k = chain[-1][2]
            dir_k = chain[-1][3]
            for (i, t, j, u, p, sgn) in path_crossings(path_k, path0):
                y_on_k = (i, t)
                y_on_0 = (j, u)
                if dir_k == 1 and y_on_k <= pos_k:
                    continue
                if dir_k == -1 and y_on_k >= pos_k:
                    continue
                if dir0 == 1 and y_on_0 >= pos_x1_0:
                    continue
                if dir0 == -1 and y_on_0 <= pos_x1_0:
                    continue
                uk = _travel_dir(path_k, i, dir_k)
                w0 = _travel_dir(path0, j, dir0)
                if geometry.cross(uk, w0) <= 0:
                    continue
                bface = curves[0].segments[path0.seg_index(j)].face
                out_idx = out_map.get((bface, p))
                if out_idx is None:
                    raise FloerError("lifted crossing misses a base crossing")
                _emit(chain, dir0, y_on_0, y_on_k, p, out_idx)

        def _emit(chain, dir0, y_on_0, y_on_k, y_point, out_idx):
            try:
                arcs = []
                all_pieces = []
                arc0, pieces0 = _arc_data(
                    path0, y_on_0, pos_x1_0, 0, curves[0]
                )
                arcs.append(arc0)
                all_pieces.extend(pieces0)
                paths_used = [path0]
                for lev in range(1, k + 1):
                    path = chain[lev - 1][1]
                    pos_a = chain[lev - 1][2]
                    pos_b = chain[lev][4] if lev < k else y_on_k
                    arc, pieces = _arc_data(
                        path, pos_a, pos_b, lev, curves[lev]
                    )
                    arcs.append(arc)
                    all_pieces.extend(pieces)
                    paths_used.append(path)
                # only the chords carrying boundary pieces matter: the
                # winding jumps happen across those, and extra chords only
                # refine the cell decomposition needlessly
                chords = {}
                for pc in all_pieces:
                    lst = chords.setdefault(patch.canon(pc.pface), [])
                    if (pc.p0, pc.p1) not in lst:
                        lst.append((pc.p0, pc.p1))
                region = find_disc(
                    patch, chords, all_pieces, faces=set(chords)
                )
            except (PatchError, DegenerateGeometry):
                return
            if region is None:
                return
            # all corners must be convex (one quadrant each)
            corner_pts = [(path0.pface(pos_x1_0[0]), cr0.point)]
            for lev in range(2, k + 1):
                pos = chain[lev - 1][2]
                cr = pair_cross[lev - 1][chain[lev - 1][0]]
                corner_pts.append((chain[lev - 1][1].pface(pos[0]), cr.point))
            corner_pts.append((path0.pface(y_on_0[0]), y_point))
            from .curveops import _corner_convex

            try:
                if any(
                    _corner_convex(patch, region, pf, pt) != 1
                    for pf, pt in corner_pts
                ):
                    return
            except PatchError:
                return
            corners = tuple(entry[0] for entry in chain)
            key = (
                corners,
                out_idx,
                region.area,
                tuple(sorted(region.base_cells)),
            )
            if key in seen:
                return
            seen.add(key)
            transports = tuple(
                _mat_power(curves[a.level], a.base_count) for a in arcs
            )
            polys.append(
                _Polygon(corners, out_idx, region.area, tuple(arcs),
                         transports)
            )

        def extend(level, chain, dir0):
            """chain holds levels 1..level; find corner x_{level+1} (or close)."""
            cur_path = chain[-1][1]
            cur_pos = chain[-1][2]
            cur_dir = chain[-1][3]
            if level == k:
                close_chain(chain, dir0)
                return
            rng = (
                range(cur_pos[0], len(cur_path))
                if cur_dir == 1
                else range(cur_pos[0], -1, -1)
            )
            for j in rng:
                seg = cur_path.seg_index(j)
                for idx, cr in by_seg[level].get(seg, ()):
                    cand = (j, cr.t_a)
                    if cur_dir == 1 and cand <= cur_pos:
                        continue
                    if cur_dir == -1 and cand >= cur_pos:
                        continue
                    u = _travel_dir(cur_path, j, cur_dir)
                    try:
                        nxt_path = lifts.get(
                            curves[level + 1], cur_path.pface(j), cr.seg_b
                        )
                    except PatchError:
                        continue
                    nxt_pos = (nxt_path.anchor, cr.t_b)
                    d = _travel_dir(nxt_path, nxt_pos[0], 1)
                    s = geometry.cross(u, d)
                    if s == 0:
                        continue
                    nxt_dir = 1 if s > 0 else -1
                    extend(
                        level + 1,
                        chain + [(idx, nxt_path, nxt_pos, nxt_dir, cand)],
                        dir0,
                    )

        for dir0 in (1, -1):
            u = _travel_dir(path0, pos_x1_0[0], dir0)
            d1 = _travel_dir(path1, pos_x1_1[0], 1)
            s = geometry.cross(u, d1)
            if s == 0:
                continue
            dir1 = 1 if s > 0 else -1
            extend(1, [(idx0, path1, pos_x1_1, dir1, pos_x1_0)], dir0)

    return polys


_POLY_CACHE = {}


def polygon_table(curves):
    key = tuple(id(c) for c in curves)
    hit = _POLY_CACHE.get(key)
    if hit is not None and all(a is b for a, b in zip(hit[0], curves)):
        return hit[1]
    polys = enumerate_polygons(curves)
    _POLY_CACHE[key] = (tuple(curves), polys)
    return polys


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------


# Calibrated by a_infty_audit over the calibration corpus (see tests): a
# reversed boundary arc contributes -1 per the degree of the corner at its
# end, and nothing else.  Mutated only by the audit's negative control.
_SIGN_RULE = {
    "rev_const": 0,
    "rev_start": 0,
    "rev_end": 1,
    "cross": 0,
    "pos": 0,
    "out": 0,
    "total": 0,
}


def _polygon_sign(poly, degs, outdeg, rule=None):
    """(-1)-exponent for a polygon: spin crossings plus the Koszul part.

    degs: Z/2 degrees of x_1..x_k; outdeg: degree of y."""
    r = rule or _SIGN_RULE
    k = len(degs)
    corner_deg = [outdeg] + list(degs) + [outdeg]  # cyclic: y, x_1..x_k, y
    e = sum(a.spin_parity for a in poly.arcs)
    for i, a in enumerate(poly.arcs):
        if a.rev:
            e += (
                r["rev_const"]
                + r["rev_start"] * corner_deg[i]
                + r["rev_end"] * corner_deg[i + 1]
            )
    e += r["cross"] * sum(
        degs[i] * degs[j] for i in range(k) for j in range(i + 1, k)
    )
    e += r["pos"] * sum((i + 1) * degs[i] for i in range(k))
    e += r["out"] * outdeg
    e += r["total"] * sum(degs)
    return (-1) ** (e % 2)


# ---------------------------------------------------------------------------
# complexes
# ---------------------------------------------------------------------------


Generator = namedtuple(
    "Generator", "index face point degree r0 r1 crossing morse"
)


_GEN_CACHE = {}


def _pair_generators(X0, X1):
    key = (id(X0.curve), id(X1.curve), X0.shift, X1.shift)
    hit = _GEN_CACHE.get(key)
    if hit is not None and hit[0] is X0.curve and hit[1] is X1.curve:
        return hit[2]
    gens = []
    for idx, cr in enumerate(curve_crossings(X0.curve, X1.curve)):
        deg = (1 if cr.sign > 0 else 0) + X0.shift + X1.shift
        morse = cr.seg_a == cr.seg_b
        gens.append(
            Generator(
                idx,
                cr.face,
                cr.point,
                deg % 2,
                X0.system.rank,
                X1.system.rank,
                cr,
                morse,
            )
        )
    _GEN_CACHE[key] = (X0.curve, X1.curve, gens)
    return gens


class FloerComplex:
    """CF(X0, X1): flat basis (generator, fiber row, fiber column)."""

    def __init__(self, X0, X1, gens, diff, provenance):
        self.X0 = X0
        self.X1 = X1
        self.generators = gens
        self.diff = diff  # dense matrix, diff[i][j] = coeff of e_i in d(e_j)
        self.provenance = provenance  # (gen_to, gen_from) -> polygon notes
        self.basis = []
        self.offsets = []
        off = 0
        for g in gens:
            self.offsets.append(off)
            for a in range(g.r1):
                for b in range(g.r0):
                    self.basis.append((g.index, a, b))
            off += g.r1 * g.r0
        self.dim = off
        self.degrees = [gens[g].degree for (g, a, b) in self.basis]

    def flat(self, gen_index, a, b):
        g = self.generators[gen_index]
        return self.offsets[gen_index] + a * g.r0 + b

    def cochain_to_vector(self, cochain):
        v = [NovikovScalar.zero()] * self.dim
        for gi, mat in cochain.items():
            for a, row in enumerate(mat):
                for b, x in enumerate(row):
                    v[self.flat(gi, a, b)] = linalg.scalar(x)
        return v

    def vector_to_cochain(self, v):
        out = {}
        for i, x in enumerate(v):
            x = linalg.scalar(x)
            if x.is_zero():
                continue
            gi, a, b = self.basis[i]
            g = self.generators[gi]
            if gi not in out:
                out[gi] = [
                    [NovikovScalar.zero()] * g.r0 for _ in range(g.r1)
                ]
            out[gi][a][b] = x
        return out

    def apply_d(self, v):
        return [
            _dot(self.diff[i], v) for i in range(self.dim)
        ]

    def d_squared_is_zero(self):
        for j in range(self.dim):
            col = [self.diff[i][j] for i in range(self.dim)]
            if any(not x.is_zero() for x in self.apply_d(col)):
                return False
        return True

    def euler_characteristic(self):
        return sum(1 if d == 0 else -1 for d in self.degrees)

    def to_json(self):
        return {
            "generators": [
                {
                    "index": g.index,
                    "face": g.face,
                    "degree": g.degree,
                    "fiber": [g.r0, g.r1],
                    "morse": g.morse,
                }
                for g in self.generators
            ],
            "differential": [
                [format_scalar(x) for x in row] for row in self.diff
            ],
            "provenance": {
                "%d,%d" % k: [
                    {"area": str(area), "sign": sgn}
                    for (area, sgn) in notes
                ]
                for k, notes in self.provenance.items()
            },
        }


def _dot(row, v):
    acc = NovikovScalar.zero()
    for x, y in zip(row, v):
        if not x.is_zero() and not y.is_zero():
            acc = acc + x * y
    return acc


def _zeros_matrix(n):
    return [[NovikovScalar.zero() for _ in range(n)] for _ in range(n)]


def floer_complex(X0, X1=None):
    """CF(X0, X1); with X1 omitted (or equal to X0), the self-Floer complex
    via the flux-corrected combinatorial push-off."""
    if X1 is None or X1 is X0 or tuple(X1.curve.segments) == tuple(
        X0.curve.segments
    ):
        X1 = hamiltonian_copy(X0)
    c0, c1 = X0.curve, X1.curve
    gens = _pair_generators(X0, X1)
    polys = polygon_table((c0, c1))
    diff = _zeros_matrix(sum(g.r0 * g.r1 for g in gens))
    C = FloerComplex(X0, X1, gens, diff, {})
    prov = {}
    for poly in polys:
        gx = gens[poly.corners[0]]
        gy = gens[poly.output]
        if (gx.degree + 1) % 2 != gy.degree:
            raise FloerError(
                "polygon violates the degree convention "
                "(corner degrees %d -> %d)" % (gx.degree, gy.degree)
            )
        sgn = _polygon_sign(poly, [gx.degree], gy.degree)
        coeff = NovikovScalar.q_power(poly.area, sgn)
        T0, T1 = poly.transports
        # d(x) = coeff * T1 * x * T0 on the fiber block
        for a in range(gy.r1):
            for b in range(gy.r0):
                for aa in range(gx.r1):
                    for bb in range(gx.r0):
                        w = coeff * T1[a][aa] * T0[bb][b]
                        if w.is_zero():
                            continue
                        i = C.flat(gy.index, a, b)
                        j = C.flat(gx.index, aa, bb)
                        diff[i][j] = diff[i][j] + w
        prov.setdefault((poly.output, poly.corners[0]), []).append(
            (poly.area, sgn)
        )
    C.provenance = prov
    return C


# push-off flux correction: the holonomy of the parallel copy is rescaled
# by q^(s * flux(c -> copy)) with s calibrated so that the two Morse strips
# of an embedded curve cancel exactly (see tests).
_PUSH_FLUX_SIGN = -1


def hamiltonian_copy(X, fingers=None, eps=None):
    """A transverse representative of the same object: push-off with the
    q^flux holonomy correction."""
    c = X.curve
    c2 = push_off(c, fingers=fingers, eps=eps)
    f = flux_between(c, c2)
    c2 = c2.with_system(c2.system.scaled(Rat(_PUSH_FLUX_SIGN) * f))
    return FukayaObject(c2, X.shift, check=False)


def unit_cochain(C):
    """The cohomological unit of a self-Floer complex: the degree-0 Morse
    generator, with the identity of the fiber."""
    cands = [g for g in C.generators if g.morse and g.degree == 0]
    if len(cands) != 1:
        raise FloerError(
            "expected exactly one degree-0 Morse generator, found %d"
            % len(cands)
        )
    g = cands[0]
    return {g.index: linalg.identity(g.r0)}


# ---------------------------------------------------------------------------
# A-infinity products
# ---------------------------------------------------------------------------


def mu(objects, inputs, rule=None):
    """mu^k evaluated on cochains: objects = [X_0..X_k], inputs =
    [x_1..x_k] with x_i a cochain (dict generator -> fiber matrix) in
    CF(X_{i-1}, X_i); returns a cochain in CF(X_0, X_k)."""
    k = len(inputs)
    if len(objects) != k + 1:
        raise FloerError("object/input count mismatch")
    curves = tuple(o.curve for o in objects)
    gens_pairs = [
        _pair_generators(objects[i], objects[i + 1]) for i in range(k)
    ]
    gens_out = _pair_generators(objects[0], objects[k])
    polys = polygon_table(curves)
    out = {}
    for poly in polys:
        mats = []
        degs = []
        ok = True
        for i in range(k):
            m = inputs[i].get(poly.corners[i])
            if m is None:
                ok = False
                break
            mats.append(m)
            degs.append(gens_pairs[i][poly.corners[i]].degree)
        if not ok:
            continue
        outdeg = gens_out[poly.output].degree
        if (sum(degs) + k) % 2 != outdeg:
            raise FloerError("polygon violates the degree convention")
        sgn = _polygon_sign(poly, degs, outdeg, rule)
        coeff = NovikovScalar.q_power(poly.area, sgn)
        # Y = T_k X_k T_{k-1} ... X_1 T_0
        M = poly.transports[0]
        for i in range(k):
            M = linalg.mat_mul(mats[i], M)
            M = linalg.mat_mul(poly.transports[i + 1], M)
        M = [[coeff * x for x in row] for row in M]
        g = gens_out[poly.output]
        acc = out.get(poly.output)
        if acc is None:
            out[poly.output] = M
        else:
            out[poly.output] = linalg.mat_add(acc, M)
    return {
        gi: m
        for gi, m in out.items()
        if any(not linalg.scalar(x).is_zero() for row in m for x in row)
    }


def mu_k(objects, inputs):
    return mu(objects, inputs)


def _basis_cochains(X0, X1):
    out = []
    for g in _pair_generators(X0, X1):
        for a in range(g.r1):
            for b in range(g.r0):
                m = [
                    [NovikovScalar.zero()] * g.r0 for _ in range(g.r1)
                ]
                m[a][b] = NovikovScalar.one()
                out.append((g, {g.index: m}))
    return out


def a_infty_audit(objects, max_arity=4, rule=None, sign_flip=False):
    """Verify the A-infinity relations, exactly, on every composable chain
    of basis morphisms drawn from injectively chosen objects, for total
    arity <= max_arity.  Returns a report: list of violations (empty =
    pass).  sign_flip negates one Koszul constant as a negative control."""
    r = dict(rule or _SIGN_RULE)
    if sign_flip:
        r["rev_end"] ^= 1
    report = []
    n = len(objects)
    idxs = list(range(n))

    def tuples(m):
        # injective ordered (m+1)-tuples
        def rec(prefix):
            if len(prefix) == m + 1:
                yield tuple(prefix)
                return
            for i in idxs:
                if i in prefix:
                    continue
                yield from rec(prefix + [i])

        yield from rec([])

    for m in range(1, max_arity + 1):
        if m + 1 > n:
            break
        for tup in tuples(m):
            objs = [objects[i] for i in tup]
            bases = [
                _basis_cochains(objs[i], objs[i + 1]) for i in range(m)
            ]
            if any(not b for b in bases):
                continue

            def combos(i):
                if i == m:
                    yield []
                    return
                for choice in bases[i]:
                    for rest in combos(i + 1):
                        yield [choice] + rest

            for chain in combos(0):
                degs = [g.degree for g, _ in chain]
                xs = [c for _, c in chain]
                total = {}
                for mm in range(1, m + 1):
                    for nn in range(0, m - mm + 1):
                        inner_objs = objs[nn : nn + mm + 1]
                        inner = mu(inner_objs, xs[nn : nn + mm], rule=r)
                        outer_objs = objs[: nn + 1] + objs[nn + mm :]
                        outer_in = (
                            xs[:nn] + [inner] + xs[nn + mm :]
                        )
                        res = mu(outer_objs, outer_in, rule=r)
                        # maltese sign on the inputs to the right
                        sgn = (-1) ** (
                            sum(d + 1 for d in degs[:nn]) % 2
                        )
                        for gi, mat in res.items():
                            mat = (
                                mat
                                if sgn == 1
                                else linalg.mat_neg(mat)
                            )
                            if gi in total:
                                total[gi] = linalg.mat_add(total[gi], mat)
                            else:
                                total[gi] = mat
                bad = {
                    gi: mat
                    for gi, mat in total.items()
                    if any(
                        not linalg.scalar(x).is_zero()
                        for row in mat
                        for x in row
                    )
                }
                if bad:
                    report.append(
                        {
                            "objects": tup,
                            "inputs": [g.index for g, _ in chain],
                            "defect": {
                                gi: [
                                    [format_scalar(linalg.scalar(x)) for x in row]
                                    for row in mat
                                ]
                                for gi, mat in bad.items()
                            },
                        }
                    )
    return report


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


def _min_valuation_pivot(rows, used_rows, col_order, used_cols):
    best = None
    for i, row in enumerate(rows):
        if i in used_rows:
            continue
        for j in col_order:
            if j in used_cols:
                continue
            x = row[j]
            if x.is_zero():
                continue
            v = x.valuation()
            if best is None or v < best[0]:
                best = (v, i, j)
    return best


def _rank_and_kernel(matrix, ncols):
    """Exact Gaussian elimination with lowest-valuation pivots (keeps the
    q-exponent fractions small); returns (rank, kernel basis vectors)."""
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    used_rows = set()
    used_cols = set()
    pivots = []  # (row, col)
    col_order = list(range(ncols))
    while True:
        best = _min_valuation_pivot(rows, used_rows, col_order, used_cols)
        if best is None:
            break
        _, pi, pj = best
        used_rows.add(pi)
        used_cols.add(pj)
        pivots.append((pi, pj))
        inv = rows[pi][pj].inverse()
        for i in range(nrows):
            if i == pi or rows[i][pj].is_zero():
                continue
            f = rows[i][pj] * inv
            rows[i] = [
                x - f * y for x, y in zip(rows[i], rows[pi])
            ]
    rank = len(pivots)
    # kernel: free columns give basis vectors
    kernel = []
    free = [j for j in range(ncols) if j not in used_cols]
    for j in free:
        v = [NovikovScalar.zero()] * ncols
        v[j] = NovikovScalar.one()
        for pi, pj in pivots:
            # rows[pi] . v must vanish: v[pj] = -row[j]/row[pj]
            v[pj] = -(rows[pi][j] * rows[pi][pj].inverse())
        kernel.append(v)
    return rank, kernel


def hf(C):
    """Homology of a Floer complex over the Novikov field: graded ranks and
    representative cycles."""
    idx0 = [i for i in range(C.dim) if C.degrees[i] == 0]
    idx1 = [i for i in range(C.dim) if C.degrees[i] == 1]

    def block(rows_idx, cols_idx):
        return [
            [C.diff[i][j] for j in cols_idx] for i in rows_idx
        ]

    d0 = block(idx1, idx0)  # deg 0 -> deg 1
    d1 = block(idx0, idx1)
    r0, ker0 = _rank_and_kernel(d0, len(idx0))
    r1, ker1 = _rank_and_kernel(d1, len(idx1))
    h0 = len(idx0) - r0 - r1
    h1 = len(idx1) - r1 - r0
    reps = {0: [], 1: []}
    for deg, (idx, ker, dother) in (
        (0, (idx0, ker0, d1)),
        (1, (idx1, ker1, d0)),
    ):
        # boundaries: columns of the other differential; keep the cycles
        # that enlarge the span of (boundaries + chosen cycles)
        img = []
        for j in range(len(dother[0]) if dother and dother[0] else 0):
            img.append([row[j] for row in dother])
        chosen = []
        cur = list(img)
        cur_rank = _rank_of_vectors(cur, len(idx))
        for v in ker:
            r = _rank_of_vectors(cur + [v], len(idx))
            if r > cur_rank:
                cur.append(v)
                cur_rank = r
                chosen.append(v)
        for v in chosen:
            full = [NovikovScalar.zero()] * C.dim
            for pos, i in enumerate(idx):
                full[i] = v[pos]
            reps[deg].append(C.vector_to_cochain(full))
        if len(chosen) != (h0 if deg == 0 else h1):
            raise FloerError("homology representative count mismatch")
    return {"ranks": (h0, h1), "basis": reps}


def _rank_of_vectors(vectors, dim):
    if not vectors:
        return 0
    matrix = [[v[i] for v in vectors] for i in range(dim)]
    rank, _ = _rank_and_kernel(matrix, len(vectors))
    return rank


def hf_ranks(X0, X1=None):
    return hf(floer_complex(X0, X1))["ranks"]


def euler_char(X0, X1=None):
    """rank_0 - rank_1 of CF(X0, X1), computed from generator degrees."""
    if X1 is None or X1 is X0 or tuple(X1.curve.segments) == tuple(
        X0.curve.segments
    ):
        X1 = hamiltonian_copy(X0)
    gens = _pair_generators(X0, X1)
    return sum(
        (1 if g.degree == 0 else -1) * g.r0 * g.r1 for g in gens
    )


def is_spherical(X):
    """Whether HF(X, X) has graded ranks (1, 1)."""
    if isinstance(X, TwistedComplex):
        raise FloerError(
            "sphericality of twisted complexes is outside the supported "
            "scope (self-hom of a twisted complex needs consistently "
            "perturbed summands)"
        )
    return hf_ranks(X) == (1, 1)


# ---------------------------------------------------------------------------
# twisted complexes
# ---------------------------------------------------------------------------


class TwistedComplex:
    """Summands with a strictly lower-triangular odd differential delta;
    delta[(i, j)] for i > j is a cochain in CF(X_j, X_i)."""

    def __init__(self, summands, delta, check=True):
        self.summands = list(summands)
        self.delta = dict(delta)
        for (i, j) in self.delta:
            if not i > j:
                raise FloerError("delta must be strictly lower triangular")
        if check:
            bad = self.maurer_cartan_defect()
            if bad:
                raise FloerError("Maurer-Cartan equation fails: %r" % bad)

    def maurer_cartan_defect(self):
        """Sum over chains of delta insertions of mu^m(delta, ..., delta);
        nonzero blocks are returned."""
        n = len(self.summands)
        defects = {}
        for j0 in range(n):
            for jm in range(j0 + 1, n):
                total = {}
                for path in _paths(self.delta, j0, jm):
                    objs = [self.summands[t] for t in path]
                    ins = [
                        self.delta[(path[t + 1], path[t])]
                        for t in range(len(path) - 1)
                    ]
                    res = mu(objs, ins)
                    for gi, mat in res.items():
                        if gi in total:
                            total[gi] = linalg.mat_add(total[gi], mat)
                        else:
                            total[gi] = mat
                bad = {
                    gi: mat
                    for gi, mat in total.items()
                    if any(
                        not linalg.scalar(x).is_zero()
                        for row in mat
                        for x in row
                    )
                }
                if bad:
                    defects[(j0, jm)] = bad
        return defects


def _paths(delta, j0, jm):
    """Ascending index paths j0 -> jm through keys of delta."""
    out = []

    def rec(cur, path):
        if cur == jm:
            if len(path) > 1:
                out.append(list(path))
            return
        for (i, j) in delta:
            if j == cur and i <= jm:
                rec(i, path + [i])

    rec(j0, [j0])
    return out


def cone(f, X0, X1):
    """Mapping cone of a closed degree-0 morphism f: X0 -> X1."""
    C = floer_complex(X0, X1)
    v = C.cochain_to_vector(f)
    for i, x in enumerate(v):
        if not x.is_zero() and C.degrees[i] != 0:
            raise FloerError("cone input must have degree 0")
    if any(not x.is_zero() for x in C.apply_d(v)):
        raise FloerError("cone input is not closed (mu^1(f) != 0)")
    return TwistedComplex([X0.shifted(1), X1], {(1, 0): f})


def hom_complex(T0, T1):
    """The hom complex between twisted complexes, assembled from mu with
    delta insertions; returns (generators, degrees, differential matrix,
    block index) over the flat basis."""
    if isinstance(T0, FukayaObject):
        T0 = TwistedComplex([T0], {}, check=False)
    if isinstance(T1, FukayaObject):
        T1 = TwistedComplex([T1], {}, check=False)
    blocks = []  # (i, j, FloerComplex-like basis data)
    offsets = {}
    degrees = []
    basis = []  # (i, j, gen_index, a, b)
    off = 0
    pair_gens = {}
    for i, Xi in enumerate(T0.summands):
        for j, Yj in enumerate(T1.summands):
            gens = _pair_generators(Xi, Yj)
            pair_gens[(i, j)] = gens
            offsets[(i, j)] = off
            for g in gens:
                for a in range(g.r1):
                    for b in range(g.r0):
                        basis.append((i, j, g.index, a, b))
                        degrees.append(g.degree)
                        off += 1
    dim = off

    def flat(i, j, gen_index, a, b):
        gens = pair_gens[(i, j)]
        pos = offsets[(i, j)]
        for g in gens:
            if g.index == gen_index:
                return pos + a * g.r0 + b
            pos += g.r1 * g.r0
        raise FloerError("generator not found")

    D = [[NovikovScalar.zero() for _ in range(dim)] for _ in range(dim)]
    for col in range(dim):
        i, j, gi, a, b = basis[col]
        g = next(
            gg for gg in pair_gens[(i, j)] if gg.index == gi
        )
        m = [[NovikovScalar.zero()] * g.r0 for _ in range(g.r1)]
        m[a][b] = NovikovScalar.one()
        cochain = {gi: m}
        # D(g) = sum mu(delta1^m, g, delta0^n) over delta chains
        for i2 in range(0, i + 1):
            for path0 in _paths_with_empty(T0.delta, i2, i):
                for j2 in range(j, len(T1.summands)):
                    for path1 in _paths_with_empty(T1.delta, j, j2):
                        objs = (
                            [T0.summands[t] for t in path0]
                            + [T1.summands[t] for t in path1[1:]]
                        )
                        ins = [
                            T0.delta[(path0[t + 1], path0[t])]
                            for t in range(len(path0) - 1)
                        ] + [cochain] + [
                            T1.delta[(path1[t + 1], path1[t])]
                            for t in range(len(path1) - 1)
                        ]
                        res = mu(objs, ins)
                        for go, mat in res.items():
                            gens_out = pair_gens[(i2, j2)]
                            gg = next(
                                x for x in gens_out if x.index == go
                            )
                            for aa in range(gg.r1):
                                for bb in range(gg.r0):
                                    x = linalg.scalar(mat[aa][bb])
                                    if x.is_zero():
                                        continue
                                    row = flat(i2, j2, go, aa, bb)
                                    D[row][col] = D[row][col] + x
    return {
        "dim": dim,
        "degrees": degrees,
        "differential": D,
        "basis": basis,
    }


def _paths_with_empty(delta, j0, jm):
    if j0 == jm:
        return [[j0]]
    return _paths(delta, j0, jm)


def hom_ranks(T0, T1):
    """Graded homology ranks of the hom complex between twisted complexes
    (or plain objects)."""
    data = hom_complex(T0, T1)
    D = data["differential"]
    degs = data["degrees"]
    dim = data["dim"]
    idx0 = [i for i in range(dim) if degs[i] == 0]
    idx1 = [i for i in range(dim) if degs[i] == 1]
    d0 = [[D[i][j] for j in idx0] for i in idx1]
    d1 = [[D[i][j] for j in idx1] for i in idx0]
    r0, _ = _rank_and_kernel(d0, len(idx0))
    r1, _ = _rank_and_kernel(d1, len(idx1))
    return (len(idx0) - r0 - r1, len(idx1) - r0 - r1)
