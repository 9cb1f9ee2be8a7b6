"""Broken lines, theta functions and the cylinder-count identities.

Broken lines are traced backwards from their endpoint in developed
coordinates. A line carrying ``c t^A z^m`` travels with velocity ``-m``;
crossing a ray with function ``f`` it may pick any term of
``z^m f^{|<n, m>|}``.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .geometry import Fan, angle_sort_key, ccw_normal, det, dot, is_refinement
from .lattice import INFINITE, cokernel_order
from .scattering import CoefficientTable, MonodromyError, ScatteringDiagram, ScatteringError
from .series import TruncatedSeries, exp_series, pow_series
from .tropical import (
    DecoratedType, Spine, broken_line_multiplicity, canonical_form, cylinder_multiplicity, leg_map, spine_of_type,
    split_cylinder, type_of_spine, validate_type,
)

Vector = tuple[int, int]
Point = tuple[Fraction, Fraction]


class NonGenericError(ValueError):
    """The chosen endpoint or a traced segment meets a wall or the origin."""


class InconsistentDiagramError(ScatteringError):
    pass


@dataclass(frozen=True)
class Segment:
    coeff: Fraction
    curve: tuple[int, ...]
    exponent: Vector
    start: Point | None  # None for the unbounded initial segment
    end: Point


@dataclass(frozen=True)
class BrokenLine:
    """Segments in forward order; the first carries ``z^p`` with coefficient 1."""

    p: Vector
    endpoint: Point
    segments: tuple[Segment, ...]

    @property
    def final_monomial(self) -> tuple[Fraction, tuple[int, ...], Vector]:
        s = self.segments[-1]
        return s.coeff, s.curve, s.exponent

    @property
    def bends(self) -> int:
        return len(self.segments) - 1


def _frac_point(q: Sequence) -> Point:
    return (Fraction(q[0]), Fraction(q[1]))


def _ray_hits(x: Point, m: Vector, rays) -> tuple[list, bool]:
    """Points ``x + s m`` with ``s > 0`` meeting the given rays, nearest first.

    The ray is cut at the origin; the flag says whether it got there.
    """
    through_origin = det(x, m) == 0 and dot(x, m) < 0
    s_origin = Fraction(-dot(x, m), dot(m, m)) if through_origin else None
    hits = []
    for r, f in rays:
        dm = det(m, r)
        if dm == 0:
            if det(x, r) == 0 and dot(x, r) > 0:
                raise NonGenericError(f"segment from {x} runs along the wall {r}")
            continue
        s = Fraction(-det(x, r)) / dm
        if s <= 0 or (s_origin is not None and s >= s_origin):
            continue
        lam = Fraction(det(x, m)) / det(r, m)
        if lam <= 0:
            continue
        hits.append((s, (x[0] + s * m[0], x[1] + s * m[1]), r, f))
    hits.sort(key=lambda h: h[0])
    return hits, through_origin


def _require_developable(diagram: ScatteringDiagram) -> None:
    if not diagram.fan.is_trivial_monodromy():
        raise MonodromyError("broken lines are traced in developed coordinates and need trivial monodromy")


def on_some_wall(diagram: ScatteringDiagram, q: Sequence) -> bool:
    q = _frac_point(q)
    if q == (0, 0):
        return True
    return any(det(q, r) == 0 and dot(q, r) > 0 for r, _ in diagram.ray_functions())


def trace_broken_lines(diagram: ScatteringDiagram, p: Sequence[int], endpoint: Sequence, order: int | None = None) -> list[BrokenLine]:
    """All broken lines with initial monomial ``z^p`` ending at ``endpoint``."""
    _require_developable(diagram)
    p = (int(p[0]), int(p[1]))
    if p == (0, 0):
        raise ValueError("broken lines need a nonzero asymptotic direction")
    k = diagram.order if order is None else order
    d = diagram if k == diagram.order else diagram.with_order(k)
    q = _frac_point(endpoint)
    if on_some_wall(d, q):
        raise NonGenericError(f"endpoint {q} lies on a wall")
    rays = d.ray_functions()
    rank = d.curve_rank
    zero = (0,) * rank
    powers: dict = {}

    def terms_of(r, f, a):
        key = (r, a)
        if key not in powers:
            powers[key] = [(curve, v, c) for (curve, v), c in pow_series(f, a).terms if v != (0, 0)]
        return powers[key]

    # candidate final exponents: p plus wall-term exponents within the degree budget
    steps = [(v, sum(curve)) for _, f in rays for (curve, v), _c in f.terms if v != (0, 0)]
    frontier = {(p, 0)}
    seen = set(frontier)
    while frontier:
        nxt = set()
        for m, deg in frontier:
            for v, dv in steps:
                for mult in range(1, (k - deg) // dv + 1):
                    item = ((m[0] + mult * v[0], m[1] + mult * v[1]), deg + mult * dv)
                    if item not in seen:
                        seen.add(item)
                        nxt.add(item)
        frontier = nxt
    finals = sorted({m for m, _ in seen if m != (0, 0)})

    found: list[BrokenLine] = []

    def explore(x: Point, m: Vector, coeff: Fraction, curve, chain):
        # chain holds (bend point, exponent after bend, coeff after, curve after) backwards
        hits, through_origin = _ray_hits(x, m, rays)
        if through_origin and m == p:
            raise NonGenericError(f"a broken line for {p} ending at {q} passes through the origin")
        deg = sum(curve)
        for _, y, r, f in hits:
            a = abs(dot(ccw_normal(r), m))
            if a == 0:
                continue
            for b, v, c in terms_of(r, f, a):
                if deg + sum(b) > k:
                    continue
                prev = (m[0] - v[0], m[1] - v[1])
                if prev == (0, 0):
                    continue
                explore(y, prev, coeff * c, tuple(u + w for u, w in zip(curve, b)),
                        chain + [(y, m, b, c)])
        if m == p:
            found.append(_assemble(p, q, chain, rank))

    for mf in finals:
        explore(q, mf, Fraction(1), zero, [])
    found.sort(key=lambda bl: (bl.bends, bl.segments[-1].curve, bl.segments[-1].exponent,
                                tuple((s.end, s.exponent) for s in bl.segments)))
    return found


def _assemble(p, q, chain, rank) -> BrokenLine:
    # chain is ordered from the endpoint backwards
    coeff = Fraction(1)
    curve = (0,) * rank
    exponent = p
    start = None
    segs = []
    for y, m_after, b, c in reversed(chain):
        segs.append(Segment(coeff, curve, exponent, start, y))
        coeff *= c
        curve = tuple(u + w for u, w in zip(curve, b))
        exponent = m_after
        start = y
    segs.append(Segment(coeff, curve, exponent, start, q))
    return BrokenLine(p, q, tuple(segs))


def theta_function(diagram: ScatteringDiagram, p: Sequence[int], endpoint: Sequence, order: int | None = None) -> TruncatedSeries:
    """Local expression of the theta function ``theta_p`` at ``endpoint``."""
    k = diagram.order if order is None else order
    rank = diagram.curve_rank
    p = (int(p[0]), int(p[1]))
    if p == (0, 0):
        return TruncatedSeries.one(k, rank)
    data = defaultdict(Fraction)
    for bl in trace_broken_lines(diagram, p, endpoint, k):
        c, curve, m = bl.final_monomial
        data[(curve, m)] += c
    return TruncatedSeries(data, k, rank)


def _sector(diagram: ScatteringDiagram, q: Point) -> int:
    rays = [r for r, _ in diagram.ray_functions()]
    return sum(1 for r in rays if angle_sort_key(r) < angle_sort_key(q))


def generic_basepoints(diagram: ScatteringDiagram, count: int = 2, seed: int = 0) -> list[Point]:
    """Deterministic points off every wall, in pairwise distinct sectors when possible."""
    rng = random.Random(seed)
    nsectors = max(1, len(diagram.ray_functions()))
    wanted = min(count, nsectors)
    chosen: list[Point] = []
    sectors: set[int] = set()
    for _ in range(10000):
        q = (Fraction(rng.randint(-99991, 99991), 10007), Fraction(rng.randint(-99991, 99991), 10009))
        if on_some_wall(diagram, q):
            continue
        sec = _sector(diagram, q)
        if len(chosen) < wanted and sec in sectors:
            continue
        chosen.append(q)
        sectors.add(sec)
        if len(chosen) == count:
            return chosen
    raise NonGenericError("could not sample generic basepoints")


def _decompose(product: TruncatedSeries, thetas) -> dict[Vector, TruncatedSeries]:
    k, rank = product.order, product.rank
    result: dict[Vector, dict] = defaultdict(dict)
    rest = product
    while not rest.is_zero():
        low = min(sum(curve) for (curve, _), _ in rest.terms)
        layer = [((curve, r), c) for (curve, r), c in rest.terms if sum(curve) == low]
        for (curve, r), c in layer:
            result[r][(curve, (0, 0))] = result[r].get((curve, (0, 0)), Fraction(0)) + c
            rest = rest - thetas(r).shift(curve, (0, 0), c)
    return {r: TruncatedSeries(d, k, rank) for r, d in sorted(result.items()) if any(d.values())}


def theta_product(diagram: ScatteringDiagram, p: Sequence[int], q: Sequence[int], order: int | None = None,
                  basepoints: Sequence | None = None) -> dict[Vector, TruncatedSeries]:
    """Structure constants of ``theta_p * theta_q = sum_r c_r(t) theta_r``.

    The expansion is carried out at each basepoint (two generic ones in
    different sectors by default) and the results must agree.
    """
    k = diagram.order if order is None else order
    d = diagram if k == diagram.order else diagram.with_order(k)
    p = (int(p[0]), int(p[1]))
    q = (int(q[0]), int(q[1]))
    if basepoints is None:
        basepoints = generic_basepoints(d, 2)
    outcome = None
    for bp in basepoints:
        cache: dict[Vector, TruncatedSeries] = {}

        def theta(r, _bp=bp, _cache=cache):
            if r not in _cache:
                _cache[r] = theta_function(d, r, _bp, k)
            return _cache[r]

        res = _decompose(theta(p) * theta(q), theta)
        if outcome is None:
            outcome = res
        elif res != outcome:
            a, b = basepoints[0], bp
            raise InconsistentDiagramError(
                f"structure constants depend on the basepoint ({a[0]}, {a[1]}) vs ({b[0]}, {b[1]})")
    return outcome


# -- multinomial formula ------------------------------------------------------

def _line_entries(table: CoefficientTable, line: Vector):
    out = []
    for (d, j, a), v in table.entries:
        if det(d, line) != 0:
            raise ValueError(f"table entry direction {d} is not on the line {line}")
        out.append(((-j * d[0], -j * d[1]), a, v))
    return out


def _mu_vectors(entries, budget: int):
    """All multiplicity vectors with total curve degree at most ``budget``."""
    degs = [sum(a) for _, a, _ in entries]

    def rec(i, left):
        if i == len(entries):
            yield ()
            return
        for mu in range(left // degs[i] + 1):
            for rest in rec(i + 1, left - mu * degs[i]):
                yield (mu,) + rest

    yield from rec(0, budget)


def _mu_weight(entries, mus) -> Fraction:
    val = Fraction(1)
    for (_, _, c), mu in zip(entries, mus):
        val *= Fraction(c) ** mu / math.factorial(mu)
    return val


def multinomial_count(table: CoefficientTable, line: Sequence[int], w: Sequence[int], A: Sequence[int]) -> Fraction:
    """``sum prod (k W)^mu / mu!`` over multiplicities with ``sum mu u = w`` and ``sum mu A = A``."""
    line = (int(line[0]), int(line[1]))
    w = (int(w[0]), int(w[1]))
    A = tuple(int(a) for a in A)
    if dot(ccw_normal(line), w) != 0:
        raise ValueError(f"w = {w} is not tangent to the line {line}")
    entries = _line_entries(table, line)
    total = Fraction(0)
    target_deg = sum(A)

    def rec(i, rem_w, rem_a, acc):
        nonlocal total
        if i == len(entries):
            if rem_w == (0, 0) and not any(rem_a):
                total += acc
            return
        u, a, c = entries[i]
        mu = 0
        cur_w, cur_a, cur = rem_w, rem_a, acc
        while all(x >= 0 for x in cur_a):
            rec(i + 1, cur_w, cur_a, cur)
            mu += 1
            cur_w = (cur_w[0] - u[0], cur_w[1] - u[1])
            cur_a = tuple(x - y for x, y in zip(cur_a, a))
            cur = cur * Fraction(c) / mu

    if entries or (w == (0, 0) and target_deg == 0):
        rec(0, w, A, Fraction(1))
    return total


def build_f_an(table: CoefficientTable, line: Sequence[int], order: int, rank: int | None = None) -> TruncatedSeries:
    """Generating series of the multinomial counts along ``line``."""
    line = (int(line[0]), int(line[1]))
    entries = _line_entries(table, line)
    if rank is None:
        rank = len(entries[0][1]) if entries else 1
    keys = set()
    for mus in _mu_vectors(entries, order):
        w = (sum(mu * u[0] for mu, (u, _, _) in zip(mus, entries)), sum(mu * u[1] for mu, (u, _, _) in zip(mus, entries)))
        a = tuple(sum(mu * e[1][i] for mu, e in zip(mus, entries)) for i in range(rank))
        keys.add((a, w))
    data = {(a, w): multinomial_count(table, line, w, a) for a, w in keys}
    return TruncatedSeries(data, order, rank)


def build_f_log(table: CoefficientTable, line: Sequence[int], order: int, rank: int | None = None) -> TruncatedSeries:
    """``exp(sum value * t^A z^{-j m_d})`` along ``line``."""
    line = (int(line[0]), int(line[1]))
    entries = _line_entries(table, line)
    if rank is None:
        rank = len(entries[0][1]) if entries else 1
    g = TruncatedSeries({(a, u): c for u, a, c in entries}, order, rank)
    return exp_series(g)


def verify_exponential_formula(table: CoefficientTable, line: Sequence[int], order: int, rank: int | None = None):
    """``(True, None)`` when both sides agree, else ``(False, (curve, dir, an, log))`` at the first difference."""
    an = build_f_an(table, line, order, rank).as_dict()
    lg = build_f_log(table, line, order, rank).as_dict()
    for key in sorted(set(an) | set(lg)):
        x, y = an.get(key, Fraction(0)), lg.get(key, Fraction(0))
        if x != y:
            return False, (key[0], key[1], x, y)
    return True, None


def integrality_warnings(series: TruncatedSeries) -> list[str]:
    """Coefficients that are not integers; geometric tables should produce none."""
    return [f"non-integral count {c} at t^{curve} z^{m}" for (curve, m), c in series.terms if c.denominator != 1]


def canonical_line(d: Vector) -> Vector:
    """Representative of ``{d, -d}`` with the smaller polar angle."""
    neg = (-d[0], -d[1])
    return d if angle_sort_key(d) < angle_sort_key(neg) else neg


def check_birational_invariance(table_old: CoefficientTable, table_new: CoefficientTable,
                                subdivision: tuple[Fan, Fan] | None, order: int, rank: int | None = None) -> bool:
    """``build_f_an`` agrees on every line carrying walls in either table."""
    if subdivision is not None:
        fine, coarse = subdivision
        if not is_refinement(fine, coarse):
            raise ValueError("the second fan is not refined by the first")
    lines = {canonical_line(d) for d in table_old.directions()} | {canonical_line(d) for d in table_new.directions()}
    for line in sorted(lines):
        a = build_f_an(table_old.restrict_to_line(line), line, order, rank)
        b = build_f_an(table_new.restrict_to_line(line), line, order, rank)
        if a != b:
            return False
    return True


# -- cylinder counts ----------------------------------------------------------

def _out_image(omega: DecoratedType) -> list[list[int]]:
    return leg_map(omega.base, "L_out")


def gluing_count(omega1: DecoratedType, omega2: DecoratedType, n1, n2) -> Fraction:
    """Cylinder count obtained by gluing two broken line types along their ``L_out`` legs.

    The fibre product of the two evaluation maps has degree equal to the
    index of ``I1 + I2`` in ``Z^2``, with ``I_i`` the image of the
    outgoing-leg lattice of ``omega_i``.
    """
    m1, m2 = _out_image(omega1), _out_image(omega2)
    joined = [r1 + r2 for r1, r2 in zip(m1, m2)]
    index = cokernel_order(joined)
    if index == INFINITE:
        raise ValueError("the outgoing legs do not span a full-rank lattice")
    return index * Fraction(n1) * Fraction(n2)


class SplittingCheck(NamedTuple):
    holds: bool
    k_tau: int
    k_omega1: int
    k_omega2: int
    n_tau: Fraction
    lhs: Fraction
    rhs: Fraction


def check_splitting_identity(t: DecoratedType, n1, n2) -> SplittingCheck:
    """Compare ``k_tau N_tau`` with ``k_omega1 k_omega2 N_omega1 N_omega2``.

    ``N_tau`` comes from :func:`gluing_count`; ``k_tau`` is read off the
    cylinder type's own lattice, so agreement is a genuine lattice identity.
    """
    omega1, omega2, _ = split_cylinder(t)
    k_tau = cylinder_multiplicity(t.base)
    k1 = broken_line_multiplicity(omega1.base)
    k2 = broken_line_multiplicity(omega2.base)
    if INFINITE in (k_tau, k1, k2):
        raise ValueError("a multiplicity is infinite; the type is not rigid enough")
    n_tau = gluing_count(omega1, omega2, n1, n2)
    lhs = k_tau * n_tau
    rhs = k1 * k2 * Fraction(n1) * Fraction(n2)
    return SplittingCheck(lhs == rhs, k_tau, k1, k2, n_tau, lhs, rhs)


def assemble_cylinder_count(spine: Spine, types: Sequence[tuple[DecoratedType, object]],
                            split_values: Sequence[tuple[object, object] | None] | None = None) -> Fraction:
    """``sum k_tau N_tau`` over cylinder types sharing the spine's type.

    ``types`` pairs each decorated type with its invariant ``N`` (already
    divided by automorphisms). When ``split_values[i] = (N1, N2)`` is given,
    ``k_tau N_tau`` is checked against the split form.
    """
    target = canonical_form(spine_of_type(type_of_spine(spine)))
    total = Fraction(0)
    for i, (t, n) in enumerate(types):
        verdict = validate_type(t.base, "cylinder")
        if not verdict.ok:
            raise ValueError(f"type {i} is not a cylinder type: {verdict.reason}")
        if canonical_form(spine_of_type(t.base)) != target:
            raise ValueError(f"type {i} has a different spine")
        k = cylinder_multiplicity(t.base)
        if k == INFINITE:
            raise ValueError(f"type {i} has infinite multiplicity")
        contribution = k * Fraction(n)
        if split_values is not None and split_values[i] is not None:
            omega1, omega2, _ = split_cylinder(t)
            n1, n2 = split_values[i]
            split = (broken_line_multiplicity(omega1.base) * broken_line_multiplicity(omega2.base)
                     * Fraction(n1) * Fraction(n2))
            if split != contribution:
                raise InconsistentDiagramError(f"type {i}: k_tau N_tau = {contribution} but the split form gives {split}")
        total += contribution
    return total
