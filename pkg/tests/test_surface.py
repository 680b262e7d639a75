"""Surface complexes: constructors, combinatorics, covers."""

from fractions import Fraction

import pytest

from floersurf._rat import Rat
from floersurf.surface import (
    SurfaceComplex,
    build_closed,
    build_punctured,
    check_cocycle,
    cyclic_cover,
)


def test_closed_euler_characteristics():
    for g in (1, 2, 3):
        S = build_closed(g)
        assert S.euler_characteristic() == 2 - 2 * g
        assert S.genus_and_boundary() == (g, 0)
        assert S.boundary_cycles == ()


def test_punctured_euler_characteristics():
    cases = [(0, 1, 1), (0, 2, 0), (0, 3, -1), (1, 1, -1), (1, 2, -2)]
    for g, b, chi in cases:
        S = build_punctured(g, b, stops=[1] * b)
        assert S.euler_characteristic() == chi
        assert S.genus_and_boundary() == (g, b)
        assert len(S.boundary_cycles) == b


def test_total_area_is_one_by_default():
    S = build_closed(2)
    assert sum(S.areas) == 1


def test_stops_land_on_boundary():
    S = build_punctured(0, 2, stops=[2, 2])
    total = 0
    for (f, i), params in S.stops.items():
        assert (f, i) not in S.pairing
        total += len(params)
    assert total == 4


def test_density_rescales_area():
    S = build_closed(1)
    from floersurf.geometry import convex_position, shoelace

    for f in range(S.num_faces):
        poly = convex_position(S.face_sides[f])
        assert S.density(f) * shoelace(list(poly)) == S.areas[f]


def test_json_roundtrip():
    S = build_punctured(1, 1, stops=[[Rat(1, 3)]])
    T = SurfaceComplex.from_json(S.to_json())
    assert T.face_sides == S.face_sides
    assert T.pairing == S.pairing
    assert T.areas == S.areas
    assert T.stops == S.stops


def test_invalid_pairing_rejected():
    S = build_closed(1)
    bad = dict(S.pairing)
    bad[(0, 0)] = (0, 0)
    with pytest.raises(Exception):
        SurfaceComplex(S.face_sides, bad, S.areas, S.stops)


def test_cyclic_cover_euler_multiplicative():
    S = build_closed(2)
    from floersurf.factories import dual_loop

    a = dual_loop(S, 0, Fraction(1, 3)).crossing_cocycle()
    assert check_cocycle(S, a)
    for p in (2, 3):
        cover = cyclic_cover(S, a, p)
        total = cover.total
        assert total.num_faces == p * S.num_faces
        assert total.euler_characteristic() == p * S.euler_characteristic()
        assert cover.project_face(cover.lift_face(3, 1)) == 3


def test_cyclic_cover_trivial_cocycle_disconnects():
    S = build_closed(2)
    a = {}
    cover = cyclic_cover(S, a, 2)
    assert len(cover.components()) == 2
