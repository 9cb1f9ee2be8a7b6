"""Rank-2 lattices, cones, and the pseudo-fan of a Looijenga pair.

Points of the skeleton are written in *seed coordinates*: the piecewise
linear identification of the support with R^2 in which ray ``i`` sits at
``seed.rays[i]``. Inside a single cone seed coordinates are honest linear
coordinates; tangent vectors change chart when they cross a ray.

The gluing matrix ``K_i`` of ray ``i`` maps chamber-``i`` coordinates to the
chart of chamber ``i-1`` extended across the ray. It fixes ``d_i`` and sends
``d_{i+1}`` to ``-(D_i^2) d_i - d_{i-1}``. Composing the gluings gives the
developing map, whose failure to close up is the monodromy around the
origin.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .lattice import INFINITE, Matrix, cokernel_order, identity, integralize, inverse_2x2, is_integral, mat_mul, mat_vec

Vector = tuple[int, int]
Point = tuple[Fraction, Fraction]

__all__ = [
    "INFINITE", "Vector", "Cone", "Seed", "Fan", "CurveClass",
    "cokernel_order", "build_fan", "parallel_transport", "star_subdivide",
    "primitive", "det", "dot", "ccw_normal", "angle_cmp", "angle_sort_key",
]


def det(a: Sequence, b: Sequence):
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Sequence, b: Sequence):
    return a[0] * b[0] + a[1] * b[1]


def primitive(v: Sequence[int]) -> Vector:
    g = math.gcd(int(v[0]), int(v[1]))
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return (int(v[0]) // g, int(v[1]) // g)


def is_primitive(v: Sequence[int]) -> bool:
    return math.gcd(int(v[0]), int(v[1])) == 1


def ccw_normal(v: Sequence[int]) -> Vector:
    """Normal ``n`` with ``<n, v> = 0`` and ``<n, .> > 0`` just counterclockwise of ``v``."""
    return (-v[1], v[0])


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_cmp(a: Sequence, b: Sequence) -> int:
    """Exact comparison of polar angles in [0, 2pi)."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = det(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


angle_sort_key = functools.cmp_to_key(angle_cmp)


def same_direction(a: Sequence, b: Sequence) -> bool:
    return det(a, b) == 0 and dot(a, b) > 0


def as_point(p: Sequence) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


@dataclass(frozen=True)
class CurveClass:
    """Element of the free curve-class monoid N^r."""

    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if any(x < 0 for x in self.multiplicities):
            raise ValueError("curve classes are effective")

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def __add__(self, other: "CurveClass") -> "CurveClass":
        return CurveClass(tuple(a + b for a, b in zip(self.multiplicities, other.multiplicities)))

    @classmethod
    def zero(cls, rank: int) -> "CurveClass":
        return cls((0,) * rank)


@dataclass(frozen=True)
class Cone:
    """Strictly convex rational cone with 0, 1 or 2 primitive generators."""

    generators: tuple[Vector, ...] = ()

    def __post_init__(self):
        if len(self.generators) > 2:
            raise ValueError("cones in a rank-2 lattice have at most two generators")
        for g in self.generators:
            if not is_primitive(g):
                raise ValueError(f"generator {g} is not primitive")
        if len(self.generators) == 2 and det(*self.generators) <= 0:
            raise ValueError("2-cone generators must be positively oriented and independent")

    @property
    def dim(self) -> int:
        return len(self.generators)

    def coordinates(self, p: Sequence) -> tuple[Fraction, ...]:
        """Coefficients of ``p`` in the generators (2-cones only)."""
        g1, g2 = self.generators
        d = det(g1, g2)
        return (Fraction(det(p, g2)) / d, Fraction(det(g1, p)) / d)

    def contains(self, p: Sequence, relative_interior: bool = False) -> bool:
        if self.dim == 0:
            return p[0] == 0 and p[1] == 0
        if self.dim == 1:
            g = self.generators[0]
            if det(g, p) != 0:
                return False
            s = dot(g, p)
            return s > 0 if relative_interior else s >= 0
        a, b = self.coordinates(p)
        if relative_interior:
            return a > 0 and b > 0
        return a >= 0 and b >= 0


@dataclass(frozen=True)
class Seed:
    """Cyclic ray list with boundary self-intersections and curve-class rank."""

    rays: tuple[Vector, ...]
    kinks: tuple[int, ...]
    curve_rank: int = 1
    order: int = 4

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple((int(x), int(y)) for x, y in self.rays))
        object.__setattr__(self, "kinks", tuple(int(k) for k in self.kinks))

    @property
    def n(self) -> int:
        return len(self.rays)

    def kink_relation_holds(self) -> bool:
        n = self.n
        for i in range(n):
            lhs = (self.rays[i - 1][0] + self.rays[(i + 1) % n][0], self.rays[i - 1][1] + self.rays[(i + 1) % n][1])
            rhs = (-self.kinks[i] * self.rays[i][0], -self.kinks[i] * self.rays[i][1])
            if lhs != rhs:
                return False
        return True

    def is_toric(self) -> bool:
        return self.kink_relation_holds() and build_fan(self).monodromy() == identity(2)


ConeId = tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    """Complete simplicial fan with gluing data across each ray.

    ``gluings[i]`` maps chamber-``i`` coordinates into the chart of chamber
    ``i-1`` extended across ray ``i``. Chamber ``i`` is ``Cone(rays[i], rays[i+1])``.
    """

    rays: tuple[Vector, ...]
    gluings: tuple[Matrix, ...]
    kinks: tuple[int | None, ...]
    curve_rank: int = 1
    _charts: tuple = field(default=(), compare=False, repr=False)
    _monodromy: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        charts = [identity(2)]
        for i in range(1, len(self.rays)):
            charts.append(integralize(mat_mul(charts[-1], self.gluings[i])))
        object.__setattr__(self, "_charts", tuple(charts))
        m = identity(2)
        for i in list(range(1, len(self.rays))) + [0]:
            m = integralize(mat_mul(inverse_2x2(self.gluings[i]), m))
        object.__setattr__(self, "_monodromy", m)

    @property
    def n(self) -> int:
        return len(self.rays)

    def chamber(self, i: int) -> Cone:
        i %= self.n
        return Cone((self.rays[i], self.rays[(i + 1) % self.n]))

    def chambers(self) -> list[Cone]:
        return [self.chamber(i) for i in range(self.n)]

    def cone(self, cid: ConeId) -> Cone:
        return Cone(tuple(self.rays[i] for i in cid))

    def chamber_id(self, i: int) -> ConeId:
        return (i % self.n, (i + 1) % self.n)

    def cone_of(self, p: Sequence) -> ConeId:
        """Smallest cone containing the point ``p`` (seed coordinates)."""
        if p[0] == 0 and p[1] == 0:
            return ()
        for i, r in enumerate(self.rays):
            if same_direction(r, p):
                return (i,)
        for i in range(self.n):
            if self.chamber(i).contains(p, relative_interior=True):
                return self.chamber_id(i)
        raise ValueError(f"point {p} not in fan support")

    def chamber_index_of(self, p: Sequence) -> int:
        """A chamber containing ``p``; for a point on ray ``i`` returns ``i``."""
        cid = self.cone_of(p)
        if len(cid) == 0:
            return 0
        return cid[0]

    def contains(self, p: Sequence) -> bool:
        return any(c.contains(p) for c in self.chambers())

    def chart(self, i: int) -> Matrix:
        """Developing map on chamber ``i`` (seed coords -> developed coords)."""
        return self._charts[i % self.n]

    def transition(self, i: int):
        """Tangent-vector change of chart crossing ray ``i`` counterclockwise."""
        return inverse_2x2(self.gluings[i % self.n])

    def monodromy(self):
        """Transport matrix of a counterclockwise loop starting in chamber 0."""
        return self._monodromy

    def developed_continuation(self):
        """Chart of chamber 0 reached by developing once around counterclockwise."""
        return integralize(mat_mul(self._charts[-1], self.gluings[0]))

    def is_trivial_monodromy(self) -> bool:
        return self.monodromy() == identity(2)

    def to_local(self, vec: Sequence, from_chamber: int, ray: int):
        """Re-express a chamber vector in the chart of chamber ``ray-1`` near ray ``ray``."""
        n = self.n
        if from_chamber % n == (ray - 1) % n:
            return tuple(vec)
        if from_chamber % n == ray % n:
            return integralize((mat_vec(self.gluings[ray % n], vec),))[0]
        raise ValueError("chamber is not adjacent to the ray")

    def developed_chamber_of_direction(self, r: Sequence) -> int:
        """Chamber whose developed image contains direction ``r`` (ray boundary goes ccw)."""
        for i in range(self.n):
            c = self.chart(i)
            a = mat_vec(c, self.rays[i])
            b = mat_vec(c, self.rays[(i + 1) % self.n])
            if det(a, b) <= 0:
                continue
            if same_direction(a, r):
                return i
            if det(a, r) > 0 and det(r, b) > 0:
                return i
        raise ValueError(f"direction {r} is not covered by the developed chambers")

    def developed_to_seed(self, vec: Sequence, chamber: int):
        return integralize((mat_vec(inverse_2x2(self.chart(chamber)), vec),))[0]

    def seed_to_developed(self, vec: Sequence, chamber: int):
        return tuple(mat_vec(self.chart(chamber), vec))


def _kink_at(rays: Sequence[Vector], gluings: Sequence, i: int) -> int | None:
    n = len(rays)
    prev = rays[(i - 1) % n]
    nxt = mat_vec(gluings[i], rays[(i + 1) % n])
    s = (prev[0] + nxt[0], prev[1] + nxt[1])
    d = rays[i]
    if det(s, d) != 0:
        return None
    k = Fraction(dot(s, d), dot(d, d))
    if k.denominator != 1:
        return None
    return -int(k)


def _check_cyclic(rays: Sequence[Vector]) -> None:
    n = len(rays)
    if n < 3:
        raise ValueError("a seed needs at least 3 rays")
    for r in rays:
        if not is_primitive(r):
            raise ValueError(f"ray {r} is not primitive")
    for i in range(n):
        if det(rays[i], rays[(i + 1) % n]) <= 0:
            raise ValueError(f"rays {rays[i]} and {rays[(i + 1) % n]} are not positively oriented")
    wraps = sum(1 for i in range(n) if angle_cmp(rays[(i + 1) % n], rays[i]) < 0)
    if wraps != 1:
        raise ValueError("rays must wind exactly once around the origin")


def build_fan(seed: Seed) -> Fan:
    """Fan of a seed with kink-determined gluing matrices."""
    rays = seed.rays
    _check_cyclic(rays)
    if len(seed.kinks) != len(rays):
        raise ValueError("one kink per ray is required")
    n = len(rays)
    gluings = []
    for i in range(n):
        d, nxt, prev = rays[i], rays[(i + 1) % n], rays[(i - 1) % n]
        image = (-seed.kinks[i] * d[0] - prev[0], -seed.kinks[i] * d[1] - prev[1])
        src = ((d[0], nxt[0]), (d[1], nxt[1]))
        dst = ((d[0], image[0]), (d[1], image[1]))
        k = integralize(mat_mul(dst, inverse_2x2(src)))
        if not is_integral(k):
            raise ValueError(f"gluing across ray {i} is not integral")
        gluings.append(k)
    return Fan(rays=rays, gluings=tuple(gluings), kinks=tuple(seed.kinks), curve_rank=seed.curve_rank)


def parallel_transport(v: Sequence[int], path: Sequence[int], fan: Fan, clockwise: bool | None = None):
    """Transport a tangent vector across an ordered, contiguous list of rays.

    The crossing direction is inferred from consecutive ray indices; a
    single-ray path is taken counterclockwise unless ``clockwise`` is set.
    """
    n = fan.n
    path = [i % n for i in path]
    if len(path) >= 2:
        step = (path[1] - path[0]) % n
        if step not in (1, n - 1):
            raise ValueError("path is not contiguous")
        inferred_cw = step == n - 1 and n != 2
        if clockwise is not None and clockwise != inferred_cw:
            raise ValueError("clockwise flag contradicts the path")
        clockwise = inferred_cw
        for a, b in zip(path, path[1:]):
            if (b - a) % n != step:
                raise ValueError("path is not contiguous")
    out = tuple(v)
    for i in path:
        m = fan.gluings[i] if clockwise else fan.transition(i)
        out = tuple(mat_vec(m, out))
    return integralize((out,))[0]


def star_subdivide(fan: Fan, ray: Sequence[int]) -> Fan:
    """Insert a new ray into the interior of a chamber (toric blowup)."""
    ray = (int(ray[0]), int(ray[1]))
    if not is_primitive(ray):
        raise ValueError("subdivision ray must be primitive")
    if ray in fan.rays:
        raise ValueError(f"ray {ray} already belongs to the fan")
    cid = fan.cone_of(ray)
    if len(cid) != 2:
        raise ValueError(f"ray {ray} does not lie in the interior of a maximal cone")
    c = cid[0]
    rays = list(fan.rays)
    gluings = list(fan.gluings)
    rays.insert(c + 1, ray)
    gluings.insert(c + 1, identity(2))
    kinks = tuple(_kink_at(rays, gluings, i) for i in range(len(rays)))
    return Fan(rays=tuple(rays), gluings=tuple(gluings), kinks=kinks, curve_rank=fan.curve_rank)


def is_refinement(fine: Fan, coarse: Fan) -> bool:
    """True if ``fine`` arises from ``coarse`` by star subdivisions."""
    if not set(coarse.rays) <= set(fine.rays):
        return False
    idx = [fine.rays.index(r) for r in coarse.rays]
    if idx != sorted(idx):
        return False
    for j, r in enumerate(coarse.rays):
        if fine.gluings[fine.rays.index(r)] != coarse.gluings[j]:
            return False
    return all(fine.gluings[i] == identity(2) for i, r in enumerate(fine.rays) if r not in coarse.rays)


def grid_points(radius: int, denominator: int = 1) -> Iterable[Point]:
    for x in range(-radius, radius + 1):
        for y in range(-radius, radius + 1):
            yield (Fraction(x, denominator), Fraction(y, denominator))
