"""Standard curves in the fan-triangulated polygon models.

The constructors in surface.py realize a surface as n triangles T_0..T_{n-1}
around a central vertex; T_j has side 0 = spoke from the center, side 1 =
outer polygon edge j, side 2 = spoke back to the center.  The helpers here
build curves as chains of chords running through consecutive triangles.
"""

from ._rat import Rat
from .curve import CurveError, ImmersedCurve


def fan_path(S, j, s_from, k, s_to, level, direction=0):
    """Segments from the point at parameter s_from on outer edge j to the
    point at parameter s_to on outer edge k, crossing the spokes in between
    at parameter `level`.

    direction +1 walks counterclockwise (T_j, T_{j+1}, ...), -1 clockwise;
    0 picks the shorter way (ties counterclockwise).  Returns raw segment
    tuples; the path enters on side (j,1) and leaves on side (k,1)."""
    n = S.num_faces
    level = Rat(level)
    if j == k:
        return [(j, 1, Rat(s_from), 1, Rat(s_to))]
    if direction == 0:
        ccw = (k - j) % n
        cw = (j - k) % n
        direction = 1 if ccw <= cw else -1
    segs = []
    if direction > 0:
        # leave T_m through side 2 (spoke m+1), enter T_{m+1} through side 0
        segs.append((j, 1, Rat(s_from), 2, level))
        m = (j + 1) % n
        while m != k:
            segs.append((m, 0, 1 - level, 2, level))
            m = (m + 1) % n
        segs.append((k, 0, 1 - level, 1, Rat(s_to)))
    else:
        # leave T_m through side 0 (spoke m), enter T_{m-1} through side 2
        segs.append((j, 1, Rat(s_from), 0, 1 - level))
        m = (j - 1) % n
        while m != k:
            segs.append((m, 2, level, 0, 1 - level))
            m = (m - 1) % n
        segs.append((k, 2, level, 1, Rat(s_to)))
    return segs


def edge_loop(S, edge_seq, level, spin=True, system=None, directions=None):
    """Closed curve crossing the listed outer edge pairs in order.

    edge_seq lists polygon edge indices j; the curve crosses outer edge pair
    {j, partner(j)} (entering the partner face) and runs on to the next
    listed edge.  `level` fixes the spoke-crossing and entry parameters, so
    curves built at distinct levels share no edge points."""
    level = Rat(level)
    segs = []
    m = len(edge_seq)
    for idx in range(m):
        j = edge_seq[idx]
        nxt = edge_seq[(idx + 1) % m]
        pj = S.pairing.get((j, 1))
        if pj is None:
            raise CurveError("outer edge %d is a boundary edge" % j)
        direction = directions[idx] if directions else 0
        segs.extend(
            fan_path(S, pj[0], 1 - level, nxt, level, level, direction)
        )
    return ImmersedCurve(
        S,
        segs,
        closed=True,
        spin_marker=0 if spin else None,
        system=system,
    )


def dual_loop(S, j, level, spin=True, system=None, direction=0):
    """The loop crossing the glued outer edge pair {j, partner(j)} once."""
    return edge_loop(S, [j], level, spin=spin, system=system,
                     directions=[direction] if direction else None)


def zeta_chain(S, levels=None):
    """An A_{2g}-chain of 2g curves on a closed genus-g fan model:
    consecutive curves meet once, all other pairs are disjoint
    (verified by the test suite for the shipped levels).

    Classes follow the standard chain a_1, b_1, a_1+a_2, b_2, a_2+a_3, ...
    realized as dual loops of the polygon edge pairs."""
    g = (S.model or {}).get("g", 0)
    if not g or S.model.get("kind") != "closed":
        raise CurveError("zeta_chain needs a closed fan model")
    m = 2 * g
    if levels is None:
        # interleaved order keeps consecutive curves crossing exactly once
        # and the rest disjoint (checked by the test suite for g = 2)
        order = [2, 3, 1, 4] if g == 2 else list(range(1, m + 1))
        levels = [Rat(k, m + 2) for k in order]
    chain = [
        dual_loop(S, 1, levels[0]),
        dual_loop(S, 0, levels[1]),
    ]
    for i in range(1, g):
        chain.append(edge_loop(S, [4 * (i - 1) + 1, 4 * i + 1], levels[2 * i]))
        chain.append(dual_loop(S, 4 * i, levels[2 * i + 1]))
    return chain


def basis_loops(S, spin=True):
    """(u_i, v_i) loop pairs for the fan models: u_i crosses the b_i polygon
    edge pair once (class ~ a_i), v_i crosses the a_i pair once (~ b_i)."""
    g = (S.model or {}).get("g", 0)
    loops = []
    denom = 4 * g + 4
    for i in range(g):
        u = dual_loop(S, 4 * i + 1, Rat(2 * i + 1, denom), spin=spin)
        v = dual_loop(S, 4 * i, Rat(2 * i + 2, denom), spin=spin)
        loops.append((u, v))
    return loops
