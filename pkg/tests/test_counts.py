import random
from fractions import Fraction as F

import pytest
import sympy

from oracles import from_sympy, partition_count, symbols, to_sympy, truncated
from tropscatter.counts import (
    InconsistentDiagramError, NonGenericError, assemble_cylinder_count, build_f_an, build_f_log,
    check_birational_invariance, check_splitting_identity, gluing_count, integrality_warnings, multinomial_count,
    theta_function, theta_product, trace_broken_lines, verify_exponential_formula,
)
from tropscatter.geometry import Seed, star_subdivide
from tropscatter.scattering import (
    CoefficientTable, ScatteringDiagram, Wall, complete_to_consistency, extract_coefficients, gps_diagram,
)
from tropscatter.series import TruncatedSeries
from tropscatter.tropical import (
    DecoratedType, branched_cylinder_spine, branched_cylinder_type, cylinder_multiplicity, decorate, split_cylinder,
)

SQUARE = Seed(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, 0, 0), curve_rank=1)
SQUARE2 = Seed(SQUARE.rays, SQUARE.kinks, curve_rank=2)


def random_table(rng, line, rank=2):
    entries = {}
    for _ in range(rng.randint(0, 4)):
        d = line if rng.random() < 0.5 else (-line[0], -line[1])
        a = tuple(rng.randint(0, 2) for _ in range(rank))
        if not any(a):
            a = (1,) + a[1:]
        v = F(rng.randint(-3, 3), rng.choice((1, 2)))
        entries[(d, rng.randint(1, 2), a)] = v
    return CoefficientTable(entries)


def oracle_entries(table):
    return [((-j * d[0], -j * d[1]), a, v) for (d, j, a), v in table.entries]


# -- multinomial formula --------------------------------------------------------

def test_empty_table_counts():
    empty = CoefficientTable({})
    assert multinomial_count(empty, (1, 0), (0, 0), (0,)) == 1
    assert multinomial_count(empty, (1, 0), (2, 0), (1,)) == 0
    assert build_f_an(empty, (1, 0), 3) == TruncatedSeries.one(3, 1)
    assert build_f_log(empty, (1, 0), 3) == TruncatedSeries.one(3, 1)
    assert verify_exponential_formula(empty, (1, 0), 3) == (True, None)


@pytest.mark.parametrize("c,k", [(F(3), 1), (F(-2), 3), (F(1, 2), 4)])
def test_single_entry_power(c, k):
    table = CoefficientTable({((0, 1), 1, (2,)): c})
    assert multinomial_count(table, (0, 1), (0, -k), (2 * k,)) == c ** k / sympy.factorial(k)


def test_single_entry_series_closed_form():
    c = F(3)
    table = CoefficientTable({((1, 1), 1, (1,)): c})
    f = build_f_an(table, (1, 1), 4)
    expected = {((k,), (-k, -k)): c ** k / int(sympy.factorial(k)) for k in range(5)}
    assert f.as_dict() == expected
    assert f == build_f_log(table, (1, 1), 4)


def test_normal_component_is_rejected():
    with pytest.raises(ValueError):
        multinomial_count(CoefficientTable({}), (1, 0), (0, 1), (0,))


def test_multinomial_matches_partition_oracle():
    rng = random.Random(7)
    for _ in range(30):
        line = rng.choice([(1, 0), (0, 1), (1, 1), (2, -1)])
        table = random_table(rng, line)
        entries = oracle_entries(table)
        for j in range(-4, 5):
            for a in [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 3)]:
                w = (j * line[0], j * line[1])
                assert multinomial_count(table, line, w, a) == partition_count(entries, w, a)


def test_exponential_formula_against_sympy_exp():
    rng = random.Random(11)
    t1, t2 = symbols(2)[0]
    for _ in range(10):
        table = random_table(rng, (1, 0))
        g = to_sympy({(a, u): v for u, a, v in oracle_entries(table)}, 2)
        series = sum(g ** n / sympy.factorial(n) for n in range(5))
        assert build_f_log(table, (1, 0), 4, 2).as_dict() == from_sympy(truncated(series, 2, 4), 2, 4)
        assert verify_exponential_formula(table, (1, 0), 4, 2)[0]


def test_log_side_of_a_consistent_diagram():
    done = complete_to_consistency(gps_diagram(order=3))
    table = extract_coefficients(done)
    central = [w for w in done.walls if w.direction == (1, 1)][0]
    assert build_f_log(table.restrict_to_line((1, 1)), (1, 1), 3, 2) == central.function


def test_integrality_lint():
    table = CoefficientTable({((1, 0), 1, (1,)): F(1, 2)})
    assert integrality_warnings(build_f_an(table, (1, 0), 2))
    assert integrality_warnings(build_f_an(CoefficientTable({((1, 0), 1, (1,)): 2}), (1, 0), 2)) == []


# -- broken lines and theta functions ------------------------------------------

def one_wall():
    w = Wall((1, 0), TruncatedSeries({((0,), (0, 0)): 1, ((1,), (-1, 0)): 1}, 2, 1))
    return ScatteringDiagram(SQUARE, (w,), 2)


def test_empty_diagram_has_one_straight_line():
    lines = trace_broken_lines(ScatteringDiagram(SQUARE, (), 3), (2, -1), (F(1, 3), F(2, 7)))
    assert len(lines) == 1 and lines[0].final_monomial == (1, (0,), (2, -1)) and lines[0].bends == 0


def test_one_wall_gives_straight_and_bent_line():
    lines = trace_broken_lines(one_wall(), (0, 1), (1, F(-1, 2)))
    assert [bl.final_monomial for bl in lines] == [(1, (0,), (0, 1)), (1, (1,), (-1, 1))]
    bent = lines[1]
    assert bent.segments[0].end == (F(1, 2), 0)


def test_bends_follow_binomial_expansion():
    # [DERIVED] z^(0,2) crossing 1 + t z^(-1,0) picks terms of y^2 (1 + t/x)^2
    t = symbols(1)[0][0]
    x, y = sympy.symbols("x y")
    expected = from_sympy(sympy.expand(y ** 2 * (1 + t / x) ** 2), 1, 2)
    assert theta_function(one_wall(), (0, 2), (1, F(-1, 3))).as_dict() == expected


def test_tangent_direction_does_not_bend():
    assert len(trace_broken_lines(one_wall(), (1, 0), (1, F(-1, 2)))) == 1


def test_endpoint_on_wall_is_rejected():
    with pytest.raises(NonGenericError):
        trace_broken_lines(one_wall(), (0, 1), (2, 0))


@pytest.mark.parametrize("p,q", [((1, 0), (0, 1)), ((2, -1), (-3, 3)), ((1, 1), (-1, -1))])
def test_toric_theta_products(p, q):
    out = theta_product(ScatteringDiagram(SQUARE, (), 3), p, q)
    r = (p[0] + q[0], p[1] + q[1])
    assert out == {r: TruncatedSeries.one(3, 1)} if r != (0, 0) else out == {(0, 0): TruncatedSeries.one(3, 1)}


def test_basepoint_within_chamber_does_not_matter():
    d = one_wall()
    a = theta_product(d, (1, 0), (0, 1), basepoints=[(F(1), F(1))])
    b = theta_product(d, (1, 0), (0, 1), basepoints=[(F(3), F(1, 5))])
    assert a == b


GPS3 = complete_to_consistency(gps_diagram(order=3))


def test_gps_theta_golden():
    # [DERIVED] hand enumeration of broken lines in the completed diagram
    out = theta_product(GPS3, (1, 0), (0, 1))
    assert out == {(0, 0): TruncatedSeries({((1, 1), (0, 0)): 1}, 3, 2), (1, 1): TruncatedSeries.one(3, 2)}
    out = theta_product(GPS3, (1, 0), (-1, 0))
    assert out == {(0, 0): TruncatedSeries.one(3, 2), (0, -1): TruncatedSeries({((0, 1), (0, 0)): 1}, 3, 2)}


def test_theta_products_commute():
    assert theta_product(GPS3, (1, 0), (0, 1)) == theta_product(GPS3, (0, 1), (1, 0))


def test_inconsistent_diagram_detected():
    with pytest.raises(InconsistentDiagramError):
        theta_product(gps_diagram(order=3), (1, 0), (0, 1))


# -- cylinder counts ------------------------------------------------------------

def test_assemble_empty_is_zero():
    assert assemble_cylinder_count(branched_cylinder_spine(1, 1, 1, 1), []) == 0


def test_assemble_single_unit_type():
    t = decorate(branched_cylinder_type(1, 1, 1, 1), rank=1)
    assert cylinder_multiplicity(t.base) == 1
    assert assemble_cylinder_count(branched_cylinder_spine(1, 1, 1, 1), [(t, 3)]) == 3


def test_assemble_checks_split_form():
    t = decorate(branched_cylinder_type(2, 1, 1, 2), rank=1)
    spine = branched_cylinder_spine(2, 1, 1, 2)
    k = cylinder_multiplicity(t.base)
    n_tau = check_splitting_identity(t, 1, 3).n_tau
    assert assemble_cylinder_count(spine, [(t, n_tau)], [(1, 3)]) == k * n_tau
    with pytest.raises(InconsistentDiagramError):
        assemble_cylinder_count(spine, [(t, n_tau + 1)], [(1, 3)])


def test_assemble_rejects_other_spines():
    t = decorate(branched_cylinder_type(1, 1, 1, 1), rank=1)
    with pytest.raises(ValueError):
        assemble_cylinder_count(branched_cylinder_spine(1, 1, 2, 1), [(t, 1)])


def test_assemble_matches_multinomial_side():
    # one spine, decorated by every curve class reachable from the table; each
    # type's N is its multinomial weight divided by k_tau
    table = CoefficientTable({((1, 1), 1, (1,)): F(2), ((1, 1), 2, (1,)): F(-1, 2), ((1, 1), 2, (2,)): F(3)})
    base = branched_cylinder_type(2, 1, 1, 2)
    k = cylinder_multiplicity(base)
    w = (-2, -2)
    items, expected = [], F(0)
    for a in range(1, 4):
        value = multinomial_count(table, (1, 1), w, (a,))
        expected += value
        curves = [(0,), (a,), (0,), (0,), (0,)]
        items.append((DecoratedType(base, tuple(curves)), value / k))
    assert expected == F(2) ** 2 / 2 - F(1, 2) + 3
    assert assemble_cylinder_count(branched_cylinder_spine(2, 1, 1, 2), items) == expected


def test_gluing_count_is_index_times_product():
    t = decorate(branched_cylinder_type(2, 2, 1, 1), rank=1)
    o1, o2, _ = split_cylinder(t)
    # the two outgoing images are 2Z x Z and Z x 2Z style lattices whose sum is Z^2
    assert gluing_count(o1, o2, 1, 1) in (1, 2, 4)
    check = check_splitting_identity(t, F(1, 2), 5)
    assert check.holds and check.k_tau * check.n_tau == check.k_omega1 * check.k_omega2 * F(5, 2)


# -- birational invariance ------------------------------------------------------

def refine(diagram, ray):
    fine = star_subdivide(diagram.fan, ray)
    seed = Seed(fine.rays, tuple(fine.kinks), diagram.seed.curve_rank, diagram.order)
    lines = tuple(w for w in diagram.walls if w.line)
    return complete_to_consistency(ScatteringDiagram(seed, lines, diagram.order)), fine


def test_toric_refinement_keeps_empty_tables():
    d = ScatteringDiagram(SQUARE2, (), 3)
    refined, fine = refine(d, (1, 1))
    assert refined.walls == ()
    assert check_birational_invariance(CoefficientTable({}), CoefficientTable({}), (fine, d.fan), 3)


@pytest.mark.parametrize("ray", [(1, -1), (1, 1)])
def test_gps_refinement_keeps_tables(ray):
    refined, fine = refine(GPS3, ray)
    old, new = extract_coefficients(GPS3), extract_coefficients(refined)
    assert old.totals_by_direction() == new.totals_by_direction()
    assert check_birational_invariance(old, new, (fine, GPS3.fan), 3)


def test_birational_check_detects_change():
    old = extract_coefficients(GPS3)
    changed = CoefficientTable(dict(old.entries) | {((1, 1), 1, (1, 1)): F(2)})
    assert not check_birational_invariance(old, changed, None, 3)
