"""Truncated power series in the completed monoid ring Z[Q + M] (over Q).

A term is ``c * t^A * z^m`` with ``A`` in N^r and ``m`` in Z^2. Truncation
is by the total degree of ``A`` only; the z-direction is never truncated.
Terms are kept sorted (curve, then direction) so that structural equality
is mathematical equality.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

Curve = tuple[int, ...]
Direction = tuple[int, int]
Key = tuple[Curve, Direction]


class SeriesError(ValueError):
    pass


def _add_vec(a, b):
    return tuple(x + y for x, y in zip(a, b))


class TruncatedSeries:
    """Immutable truncated series; ``order`` bounds the curve degree."""

    __slots__ = ("_terms", "order", "rank", "_hash")

    def __init__(self, terms: Mapping[Key, Fraction] | Iterable[tuple[Key, Fraction]], order: int, rank: int):
        if order < 0:
            raise SeriesError("truncation order must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Key, Fraction] = {}
        for (curve, direction), c in items:
            curve = tuple(int(a) for a in curve)
            if len(curve) != rank:
                raise SeriesError(f"curve class {curve} does not have rank {rank}")
            if sum(curve) > order:
                continue
            c = Fraction(c)
            if c == 0:
                continue
            key = (curve, (int(direction[0]), int(direction[1])))
            clean[key] = clean.get(key, Fraction(0)) + c
        self._terms = tuple(sorted((k, v) for k, v in clean.items() if v != 0))
        self.order = order
        self.rank = rank
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order: int, rank: int) -> "TruncatedSeries":
        return cls({}, order, rank)

    @classmethod
    def one(cls, order: int, rank: int) -> "TruncatedSeries":
        return cls({((0,) * rank, (0, 0)): 1}, order, rank)

    @classmethod
    def monomial(cls, curve: Curve, direction: Direction, order: int, coeff=1) -> "TruncatedSeries":
        return cls({(tuple(curve), tuple(direction)): coeff}, order, len(curve))

    # -- accessors ----------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[Key, Fraction], ...]:
        return self._terms

    def as_dict(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def coefficient(self, curve: Curve, direction: Direction) -> Fraction:
        return self.as_dict().get((tuple(curve), tuple(direction)), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self.rank, (0, 0))

    def degree_part(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries(((key, c) for key, c in self._terms if sum(key[0]) == k), self.order, self.rank)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.order, self.rank, self._terms) == (other.order, other.rank, other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.order, self.rank, self._terms))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return f"TruncatedSeries(0, order={self.order})"
        parts = []
        for (curve, d), c in self._terms:
            mono = "".join(f"t{i + 1}^{a}" for i, a in enumerate(curve) if a)
            if d != (0, 0):
                mono += f"z^{d}"
            parts.append(f"{c}{'*' + mono if mono else ''}")
        return f"TruncatedSeries({' + '.join(parts)}, order={self.order})"

    # -- ring structure -----------------------------------------------------

    def _check(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise SeriesError(f"mismatched truncation orders {self.order} and {other.order}")
        if self.rank != other.rank:
            raise SeriesError("mismatched curve ranks")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.one(self.order, self.rank) * other
        self._check(other)
        return TruncatedSeries(list(self._terms) + list(other._terms), self.order, self.rank)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(((k, -c) for k, c in self._terms), self.order, self.rank)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        c = Fraction(other)
        return TruncatedSeries(((k, c * v) for k, v in self._terms), self.order, self.rank)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1 / Fraction(scalar))

    def __pow__(self, e: int):
        return pow_series(self, e)

    def truncate(self, k: int) -> "TruncatedSeries":
        if k > self.order:
            raise SeriesError("cannot raise the truncation order")
        return TruncatedSeries(self._terms, k, self.rank)

    def with_order(self, k: int) -> "TruncatedSeries":
        """Reinterpret at order ``k``; raising the order pads with nothing."""
        return TruncatedSeries(self._terms, k, self.rank)

    def shift(self, curve: Curve, direction: Direction, coeff=1) -> "TruncatedSeries":
        """Multiply by the monomial ``coeff * t^curve z^direction``."""
        c = Fraction(coeff)
        return TruncatedSeries((((_add_vec(a, curve), _add_vec(d, direction)), c * v) for (a, d), v in self._terms),
                               self.order, self.rank)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product with terms of curve degree above the order dropped."""
    a._check(b)
    k = a.order
    by_deg: dict[int, list] = defaultdict(list)
    for (curve, d), c in b._terms:
        by_deg[sum(curve)].append((curve, d, c))
    out: dict[Key, Fraction] = defaultdict(Fraction)
    for (ca, da), va in a._terms:
        room = k - sum(ca)
        for deg, items in by_deg.items():
            if deg > room:
                continue
            for cb, db, vb in items:
                key = (_add_vec(ca, cb), (da[0] + db[0], da[1] + db[1]))
                out[key] += va * vb
    return TruncatedSeries(out, k, a.rank)


def _unit_part(f: TruncatedSeries):
    zero = (0,) * f.rank
    deg0 = [(d, c) for (curve, d), c in f.terms if curve == zero]
    return deg0


def exp_series(f: TruncatedSeries) -> TruncatedSeries:
    """exp(f) for f in the maximal ideal (no curve-degree-0 part)."""
    if _unit_part(f):
        raise SeriesError("exp requires a series without curve-degree-0 terms")
    result = TruncatedSeries.one(f.order, f.rank)
    power = TruncatedSeries.one(f.order, f.rank)
    for j in range(1, f.order + 1):
        power = mul(power, f) / j
        if power.is_zero():
            break
        result = result + power
    return result


def log_series(f: TruncatedSeries) -> TruncatedSeries:
    """log(f) for f with constant term 1 and no other curve-degree-0 terms."""
    deg0 = _unit_part(f)
    if deg0 != [((0, 0), Fraction(1))]:
        raise SeriesError("log requires constant term exactly 1")
    g = f - 1
    result = TruncatedSeries.zero(f.order, f.rank)
    power = TruncatedSeries.one(f.order, f.rank)
    for j in range(1, f.order + 1):
        power = mul(power, g)
        if power.is_zero():
            break
        result = result + power * Fraction((-1) ** (j + 1), j)
    return result


def inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse when the curve-degree-0 part is a single monomial ``c z^m``."""
    deg0 = _unit_part(f)
    if len(deg0) != 1:
        raise SeriesError("series is not invertible: degree-0 part must be a single monomial")
    (m, c), = deg0
    zero = (0,) * f.rank
    unit_inv = TruncatedSeries.monomial(zero, (-m[0], -m[1]), f.order, 1 / c)
    g = mul(f, unit_inv) - 1
    neg_g = -g
    result = TruncatedSeries.one(f.order, f.rank)
    power = TruncatedSeries.one(f.order, f.rank)
    for _ in range(f.order):
        power = mul(power, neg_g)
        if power.is_zero():
            break
        result = result + power
    return mul(result, unit_inv)


def pow_series(f: TruncatedSeries, e: int) -> TruncatedSeries:
    """Integer power; negative exponents need an invertible base."""
    e = int(e)
    if e < 0:
        return pow_series(inverse(f), -e)
    result = TruncatedSeries.one(f.order, f.rank)
    base = f
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def truncate(f: TruncatedSeries, k: int) -> TruncatedSeries:
    return f.truncate(k)
