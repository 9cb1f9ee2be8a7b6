"""Walls, wall-crossing automorphisms and order-by-order consistency.

Conventions
-----------
All wall data lives in developed coordinates: the chart obtained by
unrolling the seed's gluings counterclockwise from chamber 0. A wall with
primitive direction ``m_d`` carries a function ``1 + sum c t^A z^{-j m_d}``.
Its normal is ``n_d = ccw_normal(m_d)``.

Crossing the ray ``R>=0 r`` counterclockwise sends
``z^m -> z^m f^{-<ccw_normal(r), m>}``. For a wall that is a ray this is
``cross_wall(w, mono, -1)``. The two halves of a line wall use sign ``-1``
(the half along ``m_d``) and ``+1`` (the half along ``-m_d``).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import Fan, Seed, angle_sort_key, build_fan, ccw_normal, det, dot, is_primitive, primitive
from .lattice import identity, mat_vec
from .series import TruncatedSeries, log_series, pow_series

Vector = tuple[int, int]


class ScatteringError(ValueError):
    pass


class MonodromyError(ScatteringError):
    """Raised when an operation needs a seed whose developing map closes up."""


@dataclass(frozen=True)
class Monomial:
    """``coeff * t^curve * z^direction``."""

    curve: tuple[int, ...]
    direction: Vector
    coeff: Fraction = Fraction(1)

    def to_series(self, order: int) -> TruncatedSeries:
        return TruncatedSeries.monomial(self.curve, self.direction, order, self.coeff)


def _as_series(mono, order: int | None = None) -> TruncatedSeries:
    if isinstance(mono, TruncatedSeries):
        return mono
    if isinstance(mono, Monomial):
        if order is None:
            raise ScatteringError("an order is needed to expand a bare monomial")
        return mono.to_series(order)
    raise TypeError(f"expected a Monomial or TruncatedSeries, got {type(mono).__name__}")


@dataclass(frozen=True)
class Wall:
    """A ray ``R>=0 m_d`` (or the line ``R m_d`` when ``line``) with its function."""

    direction: Vector
    function: TruncatedSeries
    line: bool = False

    def __post_init__(self):
        d = (int(self.direction[0]), int(self.direction[1]))
        object.__setattr__(self, "direction", d)
        if not is_primitive(d):
            raise ScatteringError(f"wall direction {d} is not primitive")
        f = self.function
        zero = (0,) * f.rank
        if f.constant_term() != 1:
            raise ScatteringError("wall function must have constant term 1")
        for (curve, m), _ in f.terms:
            if curve == zero:
                if m != (0, 0):
                    raise ScatteringError("non-constant wall terms need a nonzero curve class")
                continue
            if det(m, d) != 0 or dot(m, d) >= 0:
                raise ScatteringError(f"term z^{m} is not a negative multiple of the direction {d}")

    @property
    def normal(self) -> Vector:
        return ccw_normal(self.direction)

    @property
    def order(self) -> int:
        return self.function.order

    def halves(self) -> list[tuple[Vector, int]]:
        """Ray supports with the sign used for a counterclockwise crossing."""
        d = self.direction
        if self.line:
            return [(d, -1), ((-d[0], -d[1]), 1)]
        return [(d, -1)]

    def with_order(self, k: int) -> "Wall":
        return Wall(self.direction, self.function.with_order(k), self.line)


def wall_sort_key(w: Wall):
    return (angle_sort_key(w.direction), w.line)


@dataclass(frozen=True)
class ScatteringDiagram:
    seed: Seed
    walls: tuple[Wall, ...] = ()
    order: int = 4
    _fan: Fan | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        merged: dict[tuple[Vector, bool], TruncatedSeries] = {}
        for w in self.walls:
            if w.function.order != self.order:
                w = w.with_order(self.order)
            key = (w.direction, w.line)
            merged[key] = merged[key] * w.function if key in merged else w.function
        walls = [Wall(d, f, line) for (d, line), f in merged.items() if not (f - 1).is_zero()]
        walls.sort(key=wall_sort_key)
        object.__setattr__(self, "walls", tuple(walls))
        if self._fan is None:
            object.__setattr__(self, "_fan", build_fan(self.seed))

    @property
    def fan(self) -> Fan:
        return self._fan

    @property
    def curve_rank(self) -> int:
        return self.seed.curve_rank

    def with_walls(self, walls: Iterable[Wall]) -> "ScatteringDiagram":
        return ScatteringDiagram(self.seed, tuple(walls), self.order, self.fan)

    def with_order(self, k: int) -> "ScatteringDiagram":
        return ScatteringDiagram(self.seed, tuple(w.with_order(k) for w in self.walls), k, self.fan)

    def new_walls(self, initial: "ScatteringDiagram") -> list[Wall]:
        """Walls of ``self`` that are absent from (or changed relative to) ``initial``."""
        old = {(w.direction, w.line): w.function for w in initial.with_order(self.order).walls}
        return [w for w in self.walls if old.get((w.direction, w.line)) != w.function]

    def ray_functions(self) -> list[tuple[Vector, TruncatedSeries]]:
        """Every ray support with the product of the functions living on it."""
        out: dict[Vector, TruncatedSeries] = {}
        for w in self.walls:
            for r, _ in w.halves():
                out[r] = out[r] * w.function if r in out else w.function
        return sorted(out.items(), key=lambda item: angle_sort_key(item[0]))


def cross_wall(w: Wall, mono, crossing_sign: int, order: int | None = None) -> TruncatedSeries:
    """``t^A z^m -> t^A z^m f^{sign * <n_w, m>}``, extended additively to series."""
    if crossing_sign not in (1, -1):
        raise ScatteringError("crossing sign must be +1 or -1")
    series = _as_series(mono, w.order if order is None else order)
    return _cross(series, w.function, w.normal, crossing_sign, {})


def _cross(series: TruncatedSeries, f: TruncatedSeries, normal: Vector, sign: int, cache: dict) -> TruncatedSeries:
    if series.order != f.order:
        f = f.with_order(series.order)
    out = TruncatedSeries.zero(series.order, series.rank)
    plain = []
    for (curve, m), c in series.terms:
        e = sign * dot(normal, m)
        if e == 0:
            plain.append(((curve, m), c))
            continue
        if e not in cache:
            cache[e] = pow_series(f, e)
        out = out + cache[e].shift(curve, m, c)
    if plain:
        out = out + TruncatedSeries(plain, series.order, series.rank)
    return out


def apply_linear(series: TruncatedSeries, matrix) -> TruncatedSeries:
    """Change the z-exponents of a series by an integral matrix."""
    if matrix == identity(2):
        return series
    return TruncatedSeries((((a, tuple(int(x) for x in mat_vec(matrix, m))), c) for (a, m), c in series.terms),
                           series.order, series.rank)


def _position_in_chamber(fan: Fan, c: int, r: Vector) -> Fraction:
    """Angular parameter in [0, 1) of developed direction ``r`` inside chamber ``c``."""
    chart = fan.chart(c)
    a = mat_vec(chart, fan.rays[c])
    b = mat_vec(chart, fan.rays[(c + 1) % fan.n])
    alpha = Fraction(det(r, b), det(a, b))
    beta = Fraction(det(a, r), det(a, b))
    return beta / (alpha + beta)


def crossing_events(diagram: ScatteringDiagram, start_chamber: int = 0):
    """Ordered ray crossings of a counterclockwise loop starting just after ray ``start_chamber``.

    Returns a list whose items are either ``("wall", r, f)`` or ``("cut", M)``;
    the cut applies the monodromy when the loop re-enters chamber 0.
    """
    fan = diagram.fan
    n = fan.n
    s = start_chamber % n
    keyed = []
    for r, f in diagram.ray_functions():
        c = fan.developed_chamber_of_direction(r)
        pos = _position_in_chamber(fan, c, r)
        seq = (c - s) % n
        if seq == 0 and pos == 0:
            seq = n  # lies on the starting ray, crossed last
        keyed.append(((seq, pos), r, f))
    keyed.sort(key=lambda item: item[0])
    mono = fan.monodromy()
    cut_at = (n - s) % n or n  # sequence index of chamber 0
    events = []
    cut_done = mono == identity(2)
    for (seq, _), r, f in keyed:
        if not cut_done and seq >= cut_at:
            events.append(("cut", mono))
            cut_done = True
        events.append(("wall", r, f))
    if not cut_done:
        events.append(("cut", mono))
    return events


def path_ordered_product(diagram: ScatteringDiagram, start_chamber: int, mono) -> TruncatedSeries:
    """Transport ``mono`` once around the origin counterclockwise."""
    series = _as_series(mono, diagram.order)
    if series.order != diagram.order:
        series = series.with_order(diagram.order)
    caches: dict[Vector, dict] = defaultdict(dict)
    for event in crossing_events(diagram, start_chamber):
        if event[0] == "cut":
            series = apply_linear(series, event[1])
            continue
        _, r, f = event
        series = _cross(series, f, ccw_normal(r), -1, caches[r])
    return series


def _is_consistent_at(diagram: ScatteringDiagram, probes: Sequence[Vector]) -> dict[Vector, TruncatedSeries]:
    out = {}
    for m in probes:
        start = TruncatedSeries.monomial((0,) * diagram.curve_rank, m, diagram.order)
        out[m] = path_ordered_product(diagram, 0, start) - start
    return out


def consistency_defect(diagram: ScatteringDiagram, probes: Sequence[Vector] = ((1, 0), (0, 1))) -> dict[Vector, TruncatedSeries]:
    """``path_ordered_product(z^m) - z^m`` for each probe exponent."""
    return _is_consistent_at(diagram, probes)


def is_consistent(diagram: ScatteringDiagram, radius: int = 1) -> bool:
    probes = [(x, y) for x in range(-radius, radius + 1) for y in range(-radius, radius + 1) if (x, y) != (0, 0)]
    return all(d.is_zero() for d in _is_consistent_at(diagram, probes).values())


def complete_to_consistency(initial: ScatteringDiagram) -> ScatteringDiagram:
    """Add outgoing rays order by order until the loop product is trivial.

    At curve degree ``k`` the defect of the loop product is central, so it
    is a derivation ``z^q -> sum a_{A,m} <n_m, q> t^A z^{q+m}`` with
    ``n_m = ccw_normal(m) / gcd(m)``. It is cancelled by the ray
    ``R>=0 (-m)`` carrying ``1 - a_{A,m} t^A z^m``.
    """
    fan = initial.fan
    if not fan.is_trivial_monodromy():
        raise MonodromyError("consistency completion needs a seed with trivial monodromy")
    order = initial.order
    rank = initial.curve_rank
    zero = (0,) * rank
    walls = list(initial.walls)
    probes = ((1, 0), (0, 1))
    for k in range(1, order + 1):
        diagram_k = ScatteringDiagram(initial.seed, tuple(w.with_order(k) for w in walls), k, fan)
        defects = _is_consistent_at(diagram_k, probes)
        coeffs: dict[tuple[tuple[int, ...], Vector], dict[Vector, Fraction]] = defaultdict(dict)
        for q, d in defects.items():
            low = [key for key, _ in d.terms if sum(key[0]) < k]
            if low:
                raise ScatteringError(f"defect below order {k}; completion is inconsistent")
            for (curve, exp), c in d.terms:
                m = (exp[0] - q[0], exp[1] - q[1])
                coeffs[(curve, m)][q] = c
        additions = []
        for (curve, m), by_probe in sorted(coeffs.items()):
            if m == (0, 0):
                raise ScatteringError(f"defect t^{curve} with zero direction cannot be cancelled by a wall")
            g = math.gcd(*m)
            n_m = (-m[1] // g, m[0] // g)
            a = None
            for q in probes:
                c = by_probe.get(q, Fraction(0))
                pairing = dot(n_m, q)
                if pairing == 0:
                    if c != 0:
                        raise ScatteringError(f"defect at t^{curve} z^{m} is not a derivation")
                    continue
                val = c / pairing
                if a is None:
                    a = val
                elif a != val:
                    raise ScatteringError(f"defect at t^{curve} z^{m} is not a derivation")
            if not a:
                continue
            f = TruncatedSeries({(zero, (0, 0)): 1, (curve, m): -a}, order, rank)
            additions.append(Wall(primitive((-m[0], -m[1])), f, False))
        walls.extend(w for w in additions)
        # merge eagerly so the next order sees one function per support
        walls = list(ScatteringDiagram(initial.seed, tuple(walls), order, fan).walls)
    return ScatteringDiagram(initial.seed, tuple(walls), order, fan)


@dataclass(frozen=True)
class CoefficientTable:
    """``(m_d, j, A) -> k_tau W_tau``; terms ``value * t^A z^{-j m_d}``."""

    entries: tuple[tuple[tuple[Vector, int, tuple[int, ...]], Fraction], ...] = ()

    def __post_init__(self):
        acc: dict = defaultdict(Fraction)
        for (d, j, a), v in (self.entries.items() if isinstance(self.entries, dict) else self.entries):
            d = (int(d[0]), int(d[1]))
            if not is_primitive(d):
                raise ScatteringError(f"table direction {d} is not primitive")
            if int(j) < 1:
                raise ScatteringError("contact multiple j must be positive")
            a = tuple(int(x) for x in a)
            if not any(a):
                raise ScatteringError("table curve classes must be nonzero")
            acc[(d, int(j), a)] += Fraction(v)
        object.__setattr__(self, "entries", tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    def as_dict(self) -> dict:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def directions(self) -> list[Vector]:
        return sorted({d for (d, _, _), _ in self.entries}, key=angle_sort_key)

    def restrict_to_line(self, line: Vector) -> "CoefficientTable":
        return CoefficientTable(tuple(((d, j, a), v) for (d, j, a), v in self.entries if det(d, line) == 0))

    def totals_by_direction(self) -> dict[Vector, dict[tuple[int, tuple[int, ...]], Fraction]]:
        out: dict = defaultdict(dict)
        for (d, j, a), v in self.entries:
            out[d][(j, a)] = v
        return dict(out)


def extract_coefficients(diagram: ScatteringDiagram) -> CoefficientTable:
    """Log of every wall function, split into ``(direction, multiple, class)`` entries."""
    acc: dict = defaultdict(Fraction)
    for w in diagram.walls:
        for (curve, m), c in log_series(w.function).terms:
            d = w.direction
            j = -dot(m, d) // dot(d, d)
            acc[(d, j, curve)] += c
    return CoefficientTable(tuple(acc.items()))


def line_wall(direction: Sequence[int], terms: dict, order: int, rank: int) -> Wall:
    """Line wall ``R m_d`` with function ``1 + sum c t^A z^{-j m_d}`` from ``{(j, A): c}``."""
    d = (int(direction[0]), int(direction[1]))
    data = {((0,) * rank, (0, 0)): Fraction(1)}
    for (j, a), c in terms.items():
        data[(tuple(a), (-j * d[0], -j * d[1]))] = Fraction(c)
    return Wall(d, TruncatedSeries(data, order, rank), True)


def gps_diagram(seed: Seed | None = None, order: int = 2, power: int = 1) -> ScatteringDiagram:
    """Two lines along ``e1`` and ``e2`` with ``(1 + t_i z^{-e_i})^power``."""
    if seed is None:
        seed = Seed(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, 0, 0), curve_rank=2, order=order)
    walls = []
    for i, e in enumerate(((1, 0), (0, 1))):
        a = tuple(int(i == k) for k in range(2))
        f = pow_series(TruncatedSeries({((0, 0), (0, 0)): 1, (a, (-e[0], -e[1])): 1}, order, 2), power)
        walls.append(Wall(e, f, True))
    return ScatteringDiagram(seed, tuple(walls), order)
