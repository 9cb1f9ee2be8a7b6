from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import from_sympy, sym_exp, sym_log, to_sympy
from tropscatter.series import SeriesError, TruncatedSeries, exp_series, inverse, log_series, mul, pow_series

R = 2
Z = (0, 0)
T1, T2, T11 = (1, 0), (0, 1), (1, 1)


def S(terms, order=3, rank=R):
    return TruncatedSeries(terms, order, rank)


def one(order=3):
    return TruncatedSeries.one(order, R)


coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=3)
curves = st.tuples(st.integers(0, 2), st.integers(0, 2))
dirs = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


def series_strategy(order, allow_constant=True):
    key = st.tuples(curves, dirs)
    if not allow_constant:
        key = key.filter(lambda k: any(k[0]))
    return st.dictionaries(key, coeffs, max_size=4).map(lambda d: S(d, order))


def unit_strategy(order):
    return series_strategy(order, allow_constant=False).map(lambda f: f + 1)


# -- examples -----------------------------------------------------------------

def test_unit_is_neutral():
    f = S({(T1, (1, 0)): 2, (T2, (0, -1)): Fraction(1, 3)})
    assert one() * f == f


def test_difference_of_squares():
    u = (1, 2)
    a = S({(Z, Z): 1, ((1, 0), u): 1}, 2)
    b = S({(Z, Z): 1, ((1, 0), u): -1}, 2)
    assert mul(a, b) == S({(Z, Z): 1, ((2, 0), (2, 4)): -1}, 2)


def test_cross_term_truncated():
    a = S({(Z, Z): 1, (T1, (1, 0)): 1}, 1)
    b = S({(Z, Z): 1, (T2, (0, 1)): 1}, 1)
    assert mul(a, b) == S({(Z, Z): 1, (T1, (1, 0)): 1, (T2, (0, 1)): 1}, 1)


def test_mismatched_orders_rejected():
    with pytest.raises(SeriesError):
        mul(one(2), one(3))


def test_exp_examples():
    assert exp_series(TruncatedSeries.zero(3, R)) == one()
    c = Fraction(5, 2)
    g = S({(T1, (1, 1)): c}, 3)
    expected = S({(Z, Z): 1, (T1, (1, 1)): c, ((2, 0), (2, 2)): c ** 2 / 2, ((3, 0), (3, 3)): c ** 3 / 6}, 3)
    assert exp_series(g) == expected
    mixed = exp_series(S({(T1, (1, 0)): 1, (T2, (0, 1)): 1}, 2))
    assert mixed.coefficient(T11, (1, 1)) == 1
    with pytest.raises(SeriesError):
        exp_series(one())


def test_log_examples():
    assert log_series(one()).is_zero()
    g = S({(T1, (1, 0)): 1, ((2, 0), (-1, 0)): 2}, 4)
    assert log_series(exp_series(g)) == g
    f = S({(Z, Z): 1, (T1, (1, 0)): 1}, 3)
    assert log_series(f) == S({(T1, (1, 0)): 1, ((2, 0), (2, 0)): Fraction(-1, 2), ((3, 0), (3, 0)): Fraction(1, 3)}, 3)
    with pytest.raises(SeriesError):
        log_series(f * 2)


def test_pow_examples():
    f = S({(Z, Z): 1, (T1, (1, 0)): 1}, 2)
    assert f ** 0 == one(2)
    assert f ** 2 == S({(Z, Z): 1, (T1, (1, 0)): 2, ((2, 0), (2, 0)): 1}, 2)
    assert f ** -1 == S({(Z, Z): 1, (T1, (1, 0)): -1, ((2, 0), (2, 0)): 1}, 2)
    with pytest.raises(SeriesError):
        pow_series(S({(T1, (1, 0)): 1}, 2), -1)


def test_invariants_of_storage():
    f = S({(T1, (1, 0)): 0, ((2, 2), Z): 1, (T2, (0, 1)): 1}, 3)
    assert f.terms == (((T2, (0, 1)), Fraction(1)),)
    assert f == S({(T2, (0, 1)): 1}, 3)
    assert hash(f) == hash(S({(T2, (0, 1)): 1}, 3))
    with pytest.raises(SeriesError):
        S({((1,), Z): 1})


def test_inverse_of_monomial_unit():
    f = S({(Z, (1, 0)): 2, (T1, Z): 1}, 2)
    assert mul(f, inverse(f)) == one(2)


# -- sympy oracle ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(series_strategy(3), series_strategy(3))
def test_product_matches_sympy(a, b):
    expected = from_sympy(to_sympy(a.as_dict(), R) * to_sympy(b.as_dict(), R), R, 3)
    assert mul(a, b).as_dict() == expected


@settings(max_examples=25, deadline=None)
@given(series_strategy(3, allow_constant=False))
def test_exp_and_log_match_sympy(g):
    e = exp_series(g)
    assert e.as_dict() == from_sympy(sym_exp(to_sympy(g.as_dict(), R), R, 3), R, 3)
    f = g + 1
    assert log_series(f).as_dict() == from_sympy(sym_log(to_sympy(f.as_dict(), R), R, 3), R, 3)


# -- ring properties --------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(series_strategy(4), series_strategy(4), series_strategy(4))
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=30, deadline=None)
@given(unit_strategy(5), series_strategy(5, allow_constant=False))
def test_exp_log_roundtrip(f, g):
    assert exp_series(log_series(f)) == f
    assert log_series(exp_series(g)) == g


@settings(max_examples=30, deadline=None)
@given(series_strategy(5, allow_constant=False), series_strategy(5, allow_constant=False))
def test_exp_is_a_homomorphism(a, b):
    assert exp_series(a + b) == exp_series(a) * exp_series(b)


@settings(max_examples=30, deadline=None)
@given(series_strategy(4), series_strategy(4), st.integers(0, 4))
def test_truncation_is_a_ring_map(a, b, j):
    assert (a * b).truncate(j) == a.truncate(j) * b.truncate(j)


@settings(max_examples=20, deadline=None)
@given(unit_strategy(3), st.integers(-3, 3))
def test_negative_powers_invert(f, e):
    assert pow_series(f, e) * pow_series(f, -e) == one()
