from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tropscatter.geometry import (
    Cone, CurveClass, Seed, angle_sort_key, build_fan, grid_points, is_refinement, parallel_transport,
    star_subdivide,
)

P2 = Seed(((1, 0), (0, 1), (-1, -1)), (1, 1, 1))
CUBIC = Seed(((1, 0), (0, 1), (-1, -1)), (-1, -1, -1))
SQUARE = Seed(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, 0, 0))


def sympy_monodromy(seed):
    """Compose the kink matrices with sympy: K_i fixes d_i, sends d_{i+1} to -k d_i - d_{i-1}."""
    n = len(seed.rays)
    ks = []
    for i in range(n):
        d, nxt, prev = (sympy.Matrix(seed.rays[j % n]) for j in (i, i + 1, i - 1))
        src = sympy.Matrix.hstack(d, nxt)
        dst = sympy.Matrix.hstack(d, -seed.kinks[i] * d - prev)
        ks.append(dst * src.inv())
    m = sympy.eye(2)
    for i in list(range(1, n)) + [0]:
        m = ks[i].inv() * m
    return tuple(tuple(int(x) for x in m.row(r)) for r in range(2))


def test_p2_fan_is_toric():
    fan = build_fan(P2)
    assert fan.n == 3
    assert all(k == ((1, 0), (0, 1)) for k in fan.gluings)
    assert fan.is_trivial_monodromy()
    assert P2.is_toric()


def test_two_rays_rejected():
    with pytest.raises(ValueError):
        build_fan(Seed(((1, 0), (-1, 0)), (0, 0)))


def test_cubic_seed_has_nontrivial_monodromy():
    fan = build_fan(CUBIC)
    m = fan.monodromy()
    assert m != ((1, 0), (0, 1))
    assert m == sympy_monodromy(CUBIC)
    assert m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1


def test_misoriented_rays_rejected():
    with pytest.raises(ValueError):
        build_fan(Seed(((0, 1), (1, 0), (-1, -1)), (1, 1, 1)))


def test_parallel_transport_examples():
    fan = build_fan(CUBIC)
    assert parallel_transport((2, 3), [], fan) == (2, 3)
    # one counterclockwise crossing is the inverse gluing
    k = sympy.Matrix(fan.gluings[1]).inv()
    assert parallel_transport((1, 1), [1], fan) == tuple(int(x) for x in k * sympy.Matrix([1, 1]))
    toric = build_fan(SQUARE)
    assert parallel_transport((3, -2), [1, 2, 3, 0], toric) == (3, -2)
    with pytest.raises(ValueError):
        parallel_transport((1, 0), [0, 2], toric)


def test_full_loop_equals_monodromy():
    fan = build_fan(CUBIC)
    m = fan.monodromy()
    for v in [(1, 0), (0, 1), (2, -3)]:
        expected = (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1])
        assert parallel_transport(v, [1, 2, 0], fan) == expected


def test_star_subdivision_examples():
    fan = build_fan(SQUARE)
    fine = star_subdivide(fan, (1, 1))
    assert fine.chamber(0).generators == ((1, 0), (1, 1))
    assert fine.chamber(1).generators == ((1, 1), (0, 1))
    with pytest.raises(ValueError):
        star_subdivide(fan, (1, 0))
    twice = star_subdivide(star_subdivide(fan, (2, 1)), (1, 1))
    assert twice.rays[:4] == ((1, 0), (2, 1), (1, 1), (0, 1))
    assert is_refinement(twice, fan) and not is_refinement(fan, twice)


def test_exceptional_ray_has_self_intersection_minus_one():
    fine = star_subdivide(build_fan(SQUARE), (1, 1))
    assert fine.kinks[1] == -1


@settings(max_examples=30, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5))
def test_star_subdivision_preserves_support(a, b):
    from math import gcd
    if gcd(a, b) != 1:
        return
    fan = build_fan(SQUARE)
    if any(r == (a, b) for r in fan.rays) or fan.cone_of((a, b)) in [(i,) for i in range(4)]:
        return
    fine = star_subdivide(fan, (a, b))
    for p in grid_points(2, 3):
        assert fine.contains(p) == fan.contains(p)
        assert fine.contains(p)


def test_build_fan_is_deterministic():
    assert build_fan(CUBIC) == build_fan(CUBIC)


def test_cone_membership_is_exact():
    c = Cone(((1, 0), (1, 3)))
    assert c.contains((Fraction(1), Fraction(3)))
    assert not c.contains((Fraction(1), Fraction(3) + Fraction(1, 10**9)))
    assert c.contains((2, 1), relative_interior=True)
    assert not c.contains((1, 0), relative_interior=True)
    with pytest.raises(ValueError):
        Cone(((1, 3), (1, 0)))


def test_curve_class_degree():
    assert CurveClass((1, 2)).degree == 3
    assert CurveClass.zero(2).degree == 0
    with pytest.raises(ValueError):
        CurveClass((-1, 0))


def test_angle_sort():
    vs = [(0, -1), (-1, 0), (1, 1), (1, 0), (0, 1)]
    assert sorted(vs, key=angle_sort_key) == [(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)]
