"""The Floer-theoretic Schmutz graph: vertices are isotopy classes of
non-separating simple closed curves, with an edge whenever the Floer
cohomology between two vertices has total rank one (equivalently, whenever
their geometric intersection number is one; the two criteria are computed
independently and any disagreement is a hard error).
"""

import json

from .curve import ImmersedCurve, curve_crossings, CurveError
from .geometry import DegenerateGeometry
from .homology import realize_face_walk, homology_class
from .homalg import get_homology_data
from .floer import FukayaObject, hf_ranks
from .moves import (
    dehn_twist,
    geometric_intersection_number,
    reduce_to_embedded,
    MoveError,
)


class SchmutzError(RuntimeError):
    pass


def _norm_class(vec):
    """Sign-normalize an integer class (unoriented curves)."""
    for x in vec:
        if x > 0:
            return tuple(vec)
        if x < 0:
            return tuple(-y for y in vec)
    return tuple(vec)


def reference_family(S):
    """The fixed reference curves canonical keys are measured against."""
    data = get_homology_data(S)
    return list(data.basis_curves)


def canonical_key(c, refs):
    """Isotopy-class proxy: the sign-normalized homology class together
    with the HF ranks against the fixed reference family (both isotopy
    invariants; sound by invariance, complete on the bounded corpus)."""
    data = get_homology_data(c.surface)
    cls = _norm_class(homology_class(c, data))
    X = FukayaObject(c, check=False)
    ranks = []
    for r in refs:
        h = hf_ranks(X, FukayaObject(r, check=False))
        ranks.append(h[0] + h[1])
    return (cls, tuple(ranks))


def _closed_walks(S, max_len):
    """Non-backtracking closed dual walks up to length max_len, one
    representative per rotation/reversal class."""
    seen = set()
    walks = []

    sides = [
        (f, i)
        for f in range(S.num_faces)
        for i in range(S.face_sides[f])
        if (f, i) in S.pairing
    ]

    def canon(steps):
        n = len(steps)
        rev = []
        for s in reversed(steps):
            rev.append(S.pairing[s])
        cands = []
        for seq in (steps, rev):
            for r in range(n):
                cands.append(tuple(seq[r:] + seq[:r]))
        return min(cands)

    def extend(steps, cur_face, cur_entry, start):
        if len(steps) >= 2 and cur_face == start[0]:
            # try to close: next exit would be start side, and the walk
            # must not backtrack through the closing corner
            if cur_entry != start[1]:
                key = canon(steps)
                if key not in seen:
                    seen.add(key)
                    walks.append(list(steps))
        if len(steps) >= max_len:
            return
        for i in range(S.face_sides[cur_face]):
            if i == cur_entry:
                continue
            side = (cur_face, i)
            if side not in S.pairing:
                continue
            f2, i2 = S.pairing[side]
            extend(steps + [side], f2, i2, start)

    for f0, i0 in sides:
        f1, i1 = S.pairing[(f0, i0)]
        extend([(f0, i0)], f1, i1, (f0, i0))
    return walks


def enumerate_scc(S, max_len, refs=None):
    """Embedded non-separating curves with itinerary length <= max_len, one
    representative per canonical key."""
    data = get_homology_data(S)
    if refs is None:
        refs = reference_family(S)
    out = {}
    salt_counter = [0]

    def transverse_to_kept(c):
        for other in out.values():
            curve_crossings(c, other)  # raises on coincident chords
        return True

    for walk in sorted(_closed_walks(S, max_len), key=len):
        c = None
        for _try in range(8):
            salt_counter[0] += 1
            try:
                cand = realize_face_walk(S, walk, salt=13 * salt_counter[0])
                cand.self_crossings()
                transverse_to_kept(cand)
                c = cand
                break
            except (ValueError, DegenerateGeometry, CurveError):
                continue
        if c is None:
            continue
        if c.self_crossings():
            continue
        cls = homology_class(c, data)
        if all(x == 0 for x in cls):
            continue
        try:
            key = canonical_key(c, refs)
        except DegenerateGeometry:
            continue
        if key not in out:
            out[key] = c
    return [out[k] for k in sorted(out, key=lambda k: (k[0], k[1]))]


class SchmutzGraph:
    """Vertices: canonical scc representatives; edges: HF rank one."""

    def __init__(self, vertices, edges, classes, keys):
        self.vertices = list(vertices)
        self.edges = set(edges)
        self.classes = list(classes)
        self.keys = list(keys)

    def has_edge(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def to_json(self):
        return json.dumps(
            {
                "vertices": [
                    {
                        "index": i,
                        "class": list(self.classes[i]),
                        "length": len(self.vertices[i].segments),
                    }
                    for i in range(len(self.vertices))
                ],
                "edges": sorted(self.edges),
            },
            indent=2,
            sort_keys=True,
        )

    def to_dot(self):
        lines = ["graph schmutz {"]
        for i in range(len(self.vertices)):
            lines.append(
                '  v%d [label="%s"];' % (i, list(self.classes[i]))
            )
        for i, j in sorted(self.edges):
            lines.append("  v%d -- v%d;" % (i, j))
        lines.append("}")
        return "\n".join(lines)


def build_graph(curves):
    """The Schmutz graph on the given canonical curves, with the double
    edge criterion (HF rank one vs geometric intersection one); any
    disagreement between the criteria raises."""
    if not curves:
        raise SchmutzError("no curves")
    S = curves[0].surface
    data = get_homology_data(S)
    refs = reference_family(S)
    keys = [canonical_key(c, refs) for c in curves]
    classes = [_norm_class(homology_class(c, data)) for c in curves]
    objs = [FukayaObject(c, check=False) for c in curves]
    edges = set()
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            h = hf_ranks(objs[i], objs[j])
            rank = h[0] + h[1]
            gin = geometric_intersection_number(curves[i], curves[j])
            if (rank == 1) != (gin == 1):
                raise SchmutzError(
                    "edge criteria disagree on pair (%d, %d): "
                    "HF rank %d, geometric intersection %d"
                    % (i, j, rank, gin)
                )
            if rank != gin:
                raise SchmutzError(
                    "HF rank %d != geometric intersection %d on pair "
                    "(%d, %d)" % (rank, gin, i, j)
                )
            if rank == 1:
                edges.add((i, j))
    return SchmutzGraph(curves, edges, classes, keys)


def act(twist_word, G):
    """Apply a composite of Dehn twists to every vertex and report the
    induced vertex map; adjacency must be preserved wherever both images
    remain within the enumerated range."""
    S = G.vertices[0].surface
    refs = reference_family(S)
    key_to_idx = {k: i for i, k in enumerate(G.keys)}
    vertex_map = {}
    out_of_range = []
    for i, v in enumerate(G.vertices):
        w = v
        try:
            for sigma, power in twist_word:
                if not curve_crossings(w, sigma):
                    continue
                w = dehn_twist(sigma, w, power)
                if w.self_crossings():
                    w, _log = reduce_to_embedded(w)
            key = canonical_key(w, refs)
        except (MoveError, DegenerateGeometry) as e:
            raise SchmutzError(
                "twist action failed on vertex %d: %s" % (i, e)
            )
        j = key_to_idx.get(key)
        if j is None:
            out_of_range.append(i)
        else:
            vertex_map[i] = j
    preserved = True
    broken = []
    for (i, j) in G.edges:
        if i in vertex_map and j in vertex_map:
            if not G.has_edge(vertex_map[i], vertex_map[j]):
                preserved = False
                broken.append((i, j))
    return {
        "vertex_map": vertex_map,
        "out_of_range": out_of_range,
        "preserved": preserved,
        "broken_edges": broken,
    }
