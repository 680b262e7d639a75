"""First homology of surface complexes via the dual graph.

A transverse curve is a closed walk in the dual graph (faces are dual
vertices, interior edges dual edges), so H1 is computed from the dual
complex: cycles of the dual graph modulo the boundaries of dual 2-cells
(one per interior vertex).  This gives an integer class vector per oriented
interior edge; a curve's class is the signed sum over its edge crossings.
"""

from ._rat import Rat
from .curve import ImmersedCurve, algebraic_intersection


def smith(rows):
    """Smith normal form over the integers: returns (U, D, V) with
    U*A*V = D diagonal, U and V unimodular; A given as list of rows."""
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for r in A:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]

    t = 0
    while t < m and t < n:
        # find a pivot
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0:
                    if piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]]):
                        piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                    done = False
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                    done = False
            if done:
                break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


class HomologyData:
    """H1 basis, intersection matrix, and the per-edge class map."""

    def __init__(self, surface, rank, edge_to_class, basis_curves,
                 intersection_matrix):
        self.surface = surface
        self.rank = rank
        self.edge_to_class = edge_to_class  # edge key -> tuple of ints
        self.basis_curves = basis_curves  # realized ImmersedCurve per class
        self.intersection_matrix = intersection_matrix

    def curve_class(self, c):
        return homology_class(c, self)


def _dual_graph(S):
    """Spanning tree of the dual graph: returns (tree_adj, cotree_edges,
    edge_dir) where edge_dir maps an edge key to its positively-crossed
    side (f, i)."""
    edge_sides = {}
    for f in range(S.num_faces):
        for i in range(S.face_sides[f]):
            if (f, i) not in S.pairing:
                continue
            e, sign = S.edge_of((f, i))
            if sign > 0:
                edge_sides[e] = (f, i)
    # BFS tree over faces
    tree_parent = {0: None}  # face -> (parent face, edge key crossed, sign)
    order = [0]
    queue = [0]
    in_tree = set()
    while queue:
        f = queue.pop(0)
        for i in range(S.face_sides[f]):
            p = S.pairing.get((f, i))
            if p is None:
                continue
            f2 = p[0]
            if f2 in tree_parent:
                continue
            e, sign = S.edge_of((f, i))
            tree_parent[f2] = (f, e, sign)
            in_tree.add(e)
            order.append(f2)
            queue.append(f2)
    if len(tree_parent) != S.num_faces:
        raise ValueError("surface complex is not connected")
    cotree = [e for e in sorted(edge_sides) if e not in in_tree]
    return tree_parent, cotree, edge_sides


def homology_data(S):
    tree_parent, cotree, edge_sides = _dual_graph(S)
    idx = {e: j for j, e in enumerate(cotree)}
    L = len(cotree)

    # relations: boundary of the dual 2-cell around each interior vertex
    relations = []
    for orbit, boundary in S.vertex_orbits:
        if boundary:
            continue
        r = [0] * L
        for (f, i) in orbit:
            e, sign = S.edge_of((f, i))
            j = idx.get(e)
            if j is not None:
                r[j] += sign
        relations.append(r)
    # columns of R are the relation vectors
    if relations:
        R = [[rel[i] for rel in relations] for i in range(L)]
    else:
        R = [[] for _ in range(L)]
    U, D, V = smith(R)
    r = sum(
        1
        for t in range(min(L, len(relations)))
        if D[t][t] != 0
    )
    for t in range(r):
        if abs(D[t][t]) != 1:
            raise ValueError("torsion in H1 of a surface complex")
    rank = L - r

    edge_to_class = {}
    for e, j in idx.items():
        vec = tuple(U[t][j] for t in range(r, L))
        edge_to_class[e] = vec

    # basis curves: invert U to express quotient basis vectors in loop terms
    Uinv = _int_inverse(U)
    basis_curves = []
    for t in range(r, L):
        coeffs = [Uinv[j][t] for j in range(L)]
        walk = _combined_walk(S, tree_parent, cotree, coeffs)
        basis_curves.append(
            realize_face_walk(S, walk, salt=17 * (t - r + 1))
        )
    M = [
        [
            algebraic_intersection(a, b) if ia != ib else 0
            for ib, b in enumerate(basis_curves)
        ]
        for ia, a in enumerate(basis_curves)
    ]
    return HomologyData(S, rank, edge_to_class, basis_curves, M)


def _int_inverse(U):
    n = len(U)
    A = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(U)]
    A = [[Rat(x) for x in row] for row in A]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = Rat(1) / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    out = []
    for row in A:
        vals = row[n:]
        ints = []
        for v in vals:
            if v.denominator != 1:
                raise ValueError("matrix not unimodular")
            ints.append(int(v))
        out.append(ints)
    return out


def _tree_path(S, tree_parent, f):
    """Faces and crossings from the root face to f along the tree: list of
    (face_from, side crossed) realized later; here: list of faces root..f."""
    path = []
    cur = f
    while tree_parent[cur] is not None:
        path.append(cur)
        cur = tree_parent[cur][0]
    path.append(cur)
    path.reverse()
    return path


def _combined_walk(S, tree_parent, cotree, coeffs):
    """A closed face walk (list of face-to-face side crossings) representing
    the integer combination of cotree loops, with backtracking removed.

    Returns a list of sides (f, i): the walk crosses out through each in
    turn; consecutive crossings share a face."""
    steps = []  # sides crossed, in order

    def side_for(f, target_face, edge):
        for i in range(S.face_sides[f]):
            p = S.pairing.get((f, i))
            if p is not None and p[0] == target_face and S.edge_of((f, i))[0] == edge:
                return (f, i)
        raise AssertionError("tree edge side not found")

    def tree_steps(path):
        out = []
        for a, b in zip(path, path[1:]):
            edge = tree_parent[b][1]
            out.append(side_for(a, b, edge))
        return out

    for e, n in zip(cotree, coeffs):
        if n == 0:
            continue
        # the loop: root -> f, cross e, f2 -> root
        # positively crossed side of e
        side = None
        for f in range(S.num_faces):
            for i in range(S.face_sides[f]):
                if (f, i) in S.pairing and S.edge_of((f, i)) == (e, 1):
                    side = (f, i)
        f, i = side
        f2 = S.pairing[(f, i)][0]
        up = _tree_path(S, tree_parent, f)
        down = _tree_path(S, tree_parent, f2)
        loop = tree_steps(up) + [side] + [
            _reverse_side(S, s) for s in reversed(tree_steps(down))
        ]
        if n < 0:
            loop = [_reverse_side(S, s) for s in reversed(loop)]
        steps.extend(loop * abs(n))
    # remove backtracking
    changed = True
    while changed:
        changed = False
        out = []
        for s in steps:
            if out and out[-1] == _reverse_side(S, s):
                out.pop()
                changed = True
            else:
                out.append(s)
        # cyclic cleanup
        while len(out) >= 2 and out[0] == _reverse_side(S, out[-1]):
            out = out[1:-1]
            changed = True
        steps = out
    return steps


def _reverse_side(S, side):
    return S.pairing[side]


def realize_face_walk(S, steps, salt=1):
    """A transverse curve realizing a closed dual-graph walk.

    steps: sides crossed outward, consecutive crossings sharing a face."""
    if not steps:
        raise ValueError("null-homotopic walk")
    T = len(steps)
    for attempt in range(6):
        params = [Rat(1, t + 3 + salt + 7 * attempt) for t in range(T)]
        segs = []
        ok = True
        for t, (f, i) in enumerate(steps):
            prev = steps[t - 1]
            pf, pi = S.pairing[prev]
            if pf != f:
                raise ValueError("walk steps do not chain")
            entry = S.cross(prev, params[t - 1])[1]
            if pi == i:
                ok = False  # same-side chord; needs a different walk form
                break
            segs.append((f, pi, entry, i, params[t]))
        if not ok:
            raise ValueError("walk backtracks through a single edge")
        try:
            return ImmersedCurve(S, segs, closed=True)
        except Exception:
            continue
    raise ValueError("could not realize walk in general position")


def homology_class(c, data):
    """Integer H1 class of a closed curve in the basis of `data`."""
    vec = [0] * data.rank
    S = c.surface
    for k in c.transitions():
        prev = c.segments[k - 1]
        e, sign = S.edge_of((prev.face, prev.side_out))
        cls = data.edge_to_class.get(e)
        if cls is None:
            continue
        for j in range(data.rank):
            vec[j] += sign * cls[j]
    return tuple(vec)
