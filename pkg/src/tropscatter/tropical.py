"""Tropical types, spines, and their validation.

A type records for each vertex, edge and leg the cone of the fan it maps
into, together with integral slopes. Cones are named by index tuples:
``()`` is the origin, ``(i,)`` the ray ``d_i`` and ``(i, i+1)`` chamber
``i``. Slopes are written in the seed coordinates of the flag's own cone;
across a ray they are compared after applying the gluing matrix.

Edges are stored with ``tail < head`` and the slope points from tail to head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .geometry import Fan, det, dot, is_refinement, same_direction
from .lattice import (
    INFINITE, cokernel_order, mat_vec, positive_kernel_point, rational_nullspace,
    rational_rank, saturated_lattice,
)

Vector = tuple[int, int]
Point = tuple[Fraction, Fraction]
ConeId = tuple[int, ...]

CONTRACTED_LEG_VALENCE = "contracted-leg vertex must be 3-valent"


class TypeError_(ValueError):
    """Malformed tropical type or spine."""


def _vec(v) -> Vector:
    return (int(v[0]), int(v[1]))


def _neg(v):
    return (-v[0], -v[1])


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def normalize_cone(fan: Fan, cid: Sequence[int]) -> ConeId:
    n = fan.n
    cid = tuple(int(i) % n for i in cid)
    if len(cid) == 2:
        a, b = cid
        if b == (a + 1) % n:
            return (a, b)
        if a == (b + 1) % n:
            return (b, a)
        raise TypeError_(f"{cid} are not adjacent rays")
    if len(cid) > 2:
        raise TypeError_("cones have at most two rays")
    return cid


def _is_face(small: ConeId, big: ConeId) -> bool:
    return set(small) <= set(big)


def _tangent(fan: Fan, cid: ConeId, u: Vector) -> bool:
    if len(cid) == 0:
        return u == (0, 0)
    if len(cid) == 1:
        return det(u, fan.rays[cid[0]]) == 0
    return True


def to_vertex_frame(fan: Fan, vertex_cone: ConeId, flag_cone: ConeId, u: Sequence[int]):
    """Re-express a slope written in ``flag_cone`` in the frame used at the vertex.

    At a vertex on ray ``i`` the frame is chamber ``i-1`` and slopes from
    chamber ``i`` pass through the gluing ``K_i``.
    """
    u = tuple(u)
    if len(vertex_cone) == 1 and len(flag_cone) == 2:
        i = vertex_cone[0]
        if flag_cone[0] == i:
            return tuple(int(x) for x in mat_vec(fan.gluings[i], u))
    return u


# -- types --------------------------------------------------------------------

@dataclass(frozen=True)
class TypeEdge:
    tail: int
    head: int
    slope: Vector
    cone: ConeId


@dataclass(frozen=True)
class TypeLeg:
    name: str
    vertex: int
    slope: Vector
    cone: ConeId


@dataclass(frozen=True)
class TropicalType:
    """Genus-zero graph with cone and slope decorations."""

    fan: Fan = field(repr=False)
    vertex_cones: tuple[ConeId, ...]
    edges: tuple[TypeEdge, ...] = ()
    legs: tuple[TypeLeg, ...] = ()

    def __post_init__(self):
        fan = self.fan
        vc = tuple(normalize_cone(fan, c) for c in self.vertex_cones)
        edges = []
        for e in self.edges:
            t, h, u = int(e.tail), int(e.head), _vec(e.slope)
            if t == h:
                raise TypeError_("loops are not allowed")
            if t > h:
                t, h, u = h, t, _neg(u)
            edges.append(TypeEdge(t, h, u, normalize_cone(fan, e.cone)))
        legs = [TypeLeg(str(l.name), int(l.vertex), _vec(l.slope), normalize_cone(fan, l.cone)) for l in self.legs]
        object.__setattr__(self, "vertex_cones", vc)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "legs", tuple(legs))
        reason = self.structural_problem()
        if reason:
            raise TypeError_(reason)

    @property
    def nvertices(self) -> int:
        return len(self.vertex_cones)

    def structural_problem(self) -> str | None:
        nv = self.nvertices
        if nv == 0:
            return "type has no vertices"
        for e in self.edges:
            if not (0 <= e.tail < nv and 0 <= e.head < nv):
                return f"edge {e} refers to a missing vertex"
            for v in (e.tail, e.head):
                if not _is_face(self.vertex_cones[v], e.cone):
                    return f"cone of vertex {v} is not a face of the cone of edge {e.tail}-{e.head}"
            if not _tangent(self.fan, e.cone, e.slope):
                return f"slope {e.slope} is not tangent to cone {e.cone}"
        for l in self.legs:
            if not 0 <= l.vertex < nv:
                return f"leg {l.name} refers to a missing vertex"
            if not _is_face(self.vertex_cones[l.vertex], l.cone):
                return f"cone of vertex {l.vertex} is not a face of the cone of leg {l.name}"
            if not _tangent(self.fan, l.cone, l.slope):
                return f"slope {l.slope} of leg {l.name} is not tangent to cone {l.cone}"
        if len(self.edges) != nv - 1 or not self._connected():
            return "graph is not a tree"
        names = [l.name for l in self.legs]
        if len(set(names)) != len(names):
            return "leg names must be distinct"
        return None

    def _connected(self) -> bool:
        adj = {v: set() for v in range(self.nvertices)}
        for e in self.edges:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.nvertices

    def flags(self, v: int) -> list[tuple[str, object, Vector, ConeId]]:
        """Edges and legs at ``v`` with slopes oriented away from ``v``."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append(("edge", i, e.slope, e.cone))
            elif e.head == v:
                out.append(("edge", i, _neg(e.slope), e.cone))
        for l in self.legs:
            if l.vertex == v:
                out.append(("leg", l.name, l.slope, l.cone))
        return out

    def valence(self, v: int) -> int:
        return len(self.flags(v))

    def bend(self, v: int) -> Vector:
        """Sum of the slopes oriented away from ``v`` in the vertex frame."""
        total = (0, 0)
        for _, _, u, cone in self.flags(v):
            total = _add(total, to_vertex_frame(self.fan, self.vertex_cones[v], cone, u))
        return total

    def leg(self, name: str) -> TypeLeg:
        for l in self.legs:
            if l.name == name:
                return l
        raise KeyError(name)

    def neighbours(self, v: int) -> list[int]:
        return [e.head if e.tail == v else e.tail for e in self.edges if v in (e.tail, e.head)]


@dataclass(frozen=True)
class DecoratedType:
    base: TropicalType
    curves: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        curves = tuple(tuple(int(a) for a in c) for c in self.curves)
        if len(curves) != self.base.nvertices:
            raise TypeError_("one curve class per vertex is required")
        if any(a < 0 for c in curves for a in c):
            raise TypeError_("curve classes are effective")
        object.__setattr__(self, "curves", curves)

    @property
    def total_class(self) -> tuple[int, ...]:
        rank = len(self.curves[0]) if self.curves else 0
        return tuple(sum(c[i] for c in self.curves) for i in range(rank))


def decorate(t: TropicalType, curves: Sequence[Sequence[int]] | None = None, rank: int | None = None) -> DecoratedType:
    if curves is None:
        rank = t.fan.curve_rank if rank is None else rank
        curves = [(0,) * rank for _ in range(t.nvertices)]
    return DecoratedType(t, tuple(tuple(c) for c in curves))


# -- realizability, dimensions and lattices -----------------------------------

class _System(NamedTuple):
    matrix: list[list[int]]
    variables: list[tuple]  # ("pos", v, generator) or ("len", edge)
    position_rows: dict  # vertex -> 2 x nvars rational matrix giving the seed position


def _linear_system(t: TropicalType) -> _System:
    fan = t.fan
    variables = []
    for v, cid in enumerate(t.vertex_cones):
        for i in cid:
            variables.append(("pos", v, i))
    for k in range(len(t.edges)):
        variables.append(("len", k))
    index = {var: j for j, var in enumerate(variables)}
    nvar = len(variables)
    pos = {}
    for v, cid in enumerate(t.vertex_cones):
        rows = [[0] * nvar, [0] * nvar]
        for i in cid:
            g = fan.rays[i]
            rows[0][index[("pos", v, i)]] = g[0]
            rows[1][index[("pos", v, i)]] = g[1]
        pos[v] = rows
    a = []
    for k, e in enumerate(t.edges):
        for c in range(2):
            row = [pos[e.head][c][j] - pos[e.tail][c][j] for j in range(nvar)]
            row[index[("len", k)]] -= e.slope[c]
            a.append(row)
    return _System(a, variables, pos)


def realization(t: TropicalType) -> tuple[Fraction, ...] | None:
    """A point of the open realization cone (all cone coordinates and lengths positive)."""
    sys = _linear_system(t)
    return positive_kernel_point(sys.matrix, len(sys.variables))


def is_realizable(t: TropicalType) -> bool:
    return realization(t) is not None


def _kernel(sys: _System):
    return rational_nullspace(sys.matrix, len(sys.variables))


def type_dimension(t: TropicalType) -> int:
    sys = _linear_system(t)
    return len(sys.variables) - rational_rank(sys.matrix) if sys.matrix else len(sys.variables)


def _position_images(sys: _System, v: int, basis):
    rows = sys.position_rows[v]
    return [tuple(sum(Fraction(r[j]) * b[j] for j in range(len(b))) for r in rows) for b in basis]


def vertex_image_dimension(t: TropicalType, v: int) -> int:
    sys = _linear_system(t)
    imgs = _position_images(sys, v, _kernel(sys))
    return rational_rank(imgs) if imgs else 0


def leg_image_dimension(t: TropicalType, leg: str) -> int:
    l = t.leg(leg)
    sys = _linear_system(t)
    imgs = _position_images(sys, l.vertex, _kernel(sys)) + [l.slope]
    return rational_rank(imgs)


def type_lattice(t: TropicalType) -> list[tuple[int, ...]]:
    """Z-basis of the tangent lattice of the type's cone.

    Coordinates are the seed positions of the vertices (two per vertex
    off the origin) followed by the edge lengths; the lattice is the set of
    integral points of the span of the realization cone.
    """
    sys = _linear_system(t)
    kernel = _kernel(sys)
    coords = []
    for b in kernel:
        vec = []
        for v, cid in enumerate(t.vertex_cones):
            if cid:
                for r in sys.position_rows[v]:
                    vec.append(sum(Fraction(r[j]) * b[j] for j in range(len(b))))
        for j, var in enumerate(sys.variables):
            if var[0] == "len":
                vec.append(b[j])
        coords.append(vec)
    dim = sum(2 for cid in t.vertex_cones if cid) + len(t.edges)
    return saturated_lattice(coords, dim)


def _position_slot(t: TropicalType, v: int) -> int | None:
    if not t.vertex_cones[v]:
        return None
    return 2 * sum(1 for w in range(v) if t.vertex_cones[w])


def _target_coordinates(fan: Fan, cid: ConeId, p: Sequence) -> tuple:
    """Coordinates of a tangent vector in the lattice of ``cid``."""
    if len(cid) == 1:
        g = fan.rays[cid[0]]
        return (Fraction(dot(p, g), dot(g, g)),)
    if len(cid) == 0:
        return ()
    return tuple(p)


def vertex_map(t: TropicalType, v: int) -> list[list[int]]:
    """Matrix of ``h_*`` from the type lattice to the lattice of ``sigma(v)``."""
    slot = _position_slot(t, v)
    basis = type_lattice(t)
    cid = t.vertex_cones[v]
    cols = []
    for b in basis:
        p = (0, 0) if slot is None else (b[slot], b[slot + 1])
        cols.append(_target_coordinates(t.fan, cid, p))
    rows = len(cid) if len(cid) < 2 else 2
    return [[int(c[r]) for c in cols] for r in range(rows)]


def leg_map(t: TropicalType, leg: str) -> list[list[int]]:
    """``h_*`` on the cone parametrizing the leg: type lattice times the leg length."""
    l = t.leg(leg)
    slot = _position_slot(t, l.vertex)
    cols = []
    for b in type_lattice(t):
        p = (0, 0) if slot is None else (b[slot], b[slot + 1])
        cols.append(_target_coordinates(t.fan, l.cone, p))
    cols.append(_target_coordinates(t.fan, l.cone, l.slope))
    rows = len(l.cone) if len(l.cone) < 2 else 2
    for c in cols:
        for x in c:
            if Fraction(x).denominator != 1:
                raise TypeError_("leg map is not integral")
    return [[int(c[r]) for c in cols] for r in range(rows)]


def _order(matrix, torsion_only):
    if not matrix:
        return 1
    if not matrix[0]:
        return 1 if torsion_only else INFINITE
    return cokernel_order(matrix, torsion_only)


def wall_multiplicity(t: TropicalType, leg: str | None = None) -> int:
    """``k_tau = |coker(h_*)_tors|`` on the outgoing leg of a wall type."""
    leg = leg or t.legs[0].name
    return _order(leg_map(t, leg), True)


def broken_line_multiplicity(t: TropicalType, leg: str = "L_out"):
    """``k_omega = |coker h_*|`` on the outgoing leg of a broken line type."""
    return _order(leg_map(t, leg), False)


def contracted_leg(t: TropicalType) -> TypeLeg:
    zeros = [l for l in t.legs if l.slope == (0, 0)]
    if len(zeros) != 1:
        raise TypeError_("a cylinder type has exactly one contracted leg")
    return zeros[0]


def cylinder_multiplicity(t: TropicalType):
    """``k_tau = |coker h_*|`` at the vertex carrying the contracted leg."""
    v = contracted_leg(t).vertex
    return _order(vertex_map(t, v), False)


def image_lattice(t: TropicalType, leg: str) -> list[list[int]]:
    """Generators (as matrix columns) of ``h_*`` on a leg's cone, in the leg cone's lattice."""
    return leg_map(t, leg)


# -- validation ---------------------------------------------------------------

class Verdict(NamedTuple):
    ok: bool
    reason: str


def _balance_problem(t: TropicalType) -> str | None:
    for v, cid in enumerate(t.vertex_cones):
        if not cid:
            continue
        b = t.bend(v)
        if b != (0, 0):
            return f"vertex {v} is not balanced (bend {b})"
    return None


def validate_type(t: TropicalType, kind: str) -> Verdict:
    """Check the leg, balancing, realizability and dimension conditions for ``kind``.

    ``kind`` is one of ``"wall"``, ``"broken_line"`` or ``"cylinder"``. In
    the surface case a wall type is rigid with a one-dimensional image of
    its outgoing leg, a broken line type moves in a one-parameter family
    whose outgoing leg sweeps a chamber, and a cylinder type has a
    two-dimensional family with the contracted-leg vertex moving freely.
    """
    kind = kind.replace("-", "_")
    if kind not in ("wall", "broken_line", "cylinder"):
        raise ValueError(f"unknown type kind {kind!r}")
    legs = t.legs
    if kind == "wall":
        if len(legs) != 1:
            return Verdict(False, "a wall type has exactly one leg")
        if legs[0].slope == (0, 0):
            return Verdict(False, "the outgoing leg of a wall type must have nonzero slope")
    elif kind == "broken_line":
        names = {l.name for l in legs}
        if len(legs) != 2 or "L_out" not in names:
            return Verdict(False, "a broken line type has legs L_in and L_out")
        out = t.leg("L_out")
        lin = next(l for l in legs if l.name != "L_out")
        if out.slope == (0, 0):
            return Verdict(False, "u(L_out) must be nonzero")
        if lin.slope == (0, 0) or not _in_cone(t.fan, lin.cone, lin.slope):
            return Verdict(False, "u(L_in) must be a nonzero vector of its cone")
        if not t.edges and t.nvertices == 1 and _add(out.slope, lin.slope) == (0, 0) and t.vertex_cones[0]:
            return Verdict(True, "trivial broken line type")
    else:
        if len(legs) != 3:
            return Verdict(False, "a cylinder type has exactly three legs")
        zeros = [l for l in legs if l.slope == (0, 0)]
        if len(zeros) != 1:
            return Verdict(False, "a cylinder type has exactly one contracted leg")
        for l in legs:
            if l is not zeros[0] and not _in_cone(t.fan, l.cone, l.slope):
                return Verdict(False, f"u({l.name}) must be a nonzero vector of its cone")
        if t.valence(zeros[0].vertex) != 3:
            return Verdict(False, CONTRACTED_LEG_VALENCE)
    problem = _balance_problem(t)
    if problem:
        return Verdict(False, problem)
    if not is_realizable(t):
        return Verdict(False, "type is not realizable")
    dim = type_dimension(t)
    if kind == "wall":
        img = leg_image_dimension(t, legs[0].name)
        if (dim, img) != (0, 1):
            return Verdict(False, f"wall type needs dim 0 and a 1-dimensional leg image, got {dim} and {img}")
    elif kind == "broken_line":
        img = leg_image_dimension(t, "L_out")
        if (dim, img) != (1, 2):
            return Verdict(False, f"broken line type needs dim 1 and a 2-dimensional leg image, got {dim} and {img}")
    else:
        img = vertex_image_dimension(t, contracted_leg(t).vertex)
        if (dim, img) != (2, 2):
            return Verdict(False, f"cylinder type needs dim 2 and a 2-dimensional vertex image, got {dim} and {img}")
    return Verdict(True, "ok")


def _in_cone(fan: Fan, cid: ConeId, u: Vector) -> bool:
    if u == (0, 0):
        return False
    if len(cid) == 0:
        return False
    if len(cid) == 1:
        return same_direction(u, fan.rays[cid[0]])
    return fan.cone(cid).contains(u)


# -- simplification -----------------------------------------------------------

def _rebuild(t: TropicalType, keep: list[int], edges, legs) -> TropicalType:
    remap = {v: i for i, v in enumerate(keep)}
    return TropicalType(
        t.fan,
        tuple(t.vertex_cones[v] for v in keep),
        tuple(TypeEdge(remap[e.tail], remap[e.head], e.slope, e.cone) for e in edges),
        tuple(TypeLeg(l.name, remap[l.vertex], l.slope, l.cone) for l in legs),
    )


def restrict_to_legs(t: TropicalType) -> TropicalType:
    """Restriction to the convex hull of the legs (leafs without legs are pruned)."""
    if not t.legs:
        raise TypeError_("type has no legs")
    alive = set(range(t.nvertices))
    edges = list(t.edges)
    leg_vertices = {l.vertex for l in t.legs}
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            deg = sum(1 for e in edges if v in (e.tail, e.head))
            if v not in leg_vertices and deg <= 1 and len(alive) > 1:
                alive.discard(v)
                edges = [e for e in edges if v not in (e.tail, e.head)]
                changed = True
    return _rebuild(t, sorted(alive), edges, list(t.legs))


def simplify(t: TropicalType) -> TropicalType:
    """Remove redundant vertices: 2-valent, non-bending, both flags in the same cone."""
    while True:
        target = None
        for v in range(t.nvertices):
            fl = t.flags(v)
            if len(fl) != 2 or t.bend(v) != (0, 0) or fl[0][3] != fl[1][3]:
                continue
            if fl[0][0] == "leg" and fl[1][0] == "leg":
                continue
            target = (v, fl)
            break
        if target is None:
            return t
        v, fl = target
        edges = list(t.edges)
        legs = list(t.legs)
        if fl[0][0] == "edge" and fl[1][0] == "edge":
            e1, e2 = t.edges[fl[0][1]], t.edges[fl[1][1]]
            a = e1.head if e1.tail == v else e1.tail
            b = e2.head if e2.tail == v else e2.tail
            edges = [e for e in edges if e is not e1 and e is not e2]
            edges.append(TypeEdge(a, b, fl[1][2], fl[1][3]))
        else:
            edge_flag = fl[0] if fl[0][0] == "edge" else fl[1]
            leg_flag = fl[1] if edge_flag is fl[0] else fl[0]
            e = t.edges[edge_flag[1]]
            a = e.head if e.tail == v else e.tail
            edges = [x for x in edges if x is not e]
            legs = [TypeLeg(l.name, a, l.slope, l.cone) if l.name == leg_flag[1] else l for l in legs]
        keep = [w for w in range(t.nvertices) if w != v]
        t = _rebuild(t, keep, edges, legs)


def spine_of_type(t: TropicalType) -> TropicalType:
    return simplify(restrict_to_legs(t))


def canonical_form(t: TropicalType, curves: Sequence | None = None):
    """Hashable form that is equal for isomorphic (decorated) types."""

    def enc(v, parent):
        legs = tuple(sorted((l.name, l.slope, l.cone) for l in t.legs if l.vertex == v))
        kids = []
        for e in t.edges:
            if e.tail == v and e.head != parent:
                kids.append((e.slope, e.cone, enc(e.head, v)))
            elif e.head == v and e.tail != parent:
                kids.append((_neg(e.slope), e.cone, enc(e.tail, v)))
        label = (t.vertex_cones[v], tuple(curves[v]) if curves is not None else None)
        return (label, legs, tuple(sorted(kids)))

    return min(enc(r, None) for r in range(t.nvertices))


def isomorphic(a: TropicalType, b: TropicalType) -> bool:
    return canonical_form(a) == canonical_form(b)


def decorated_isomorphic(a: DecoratedType, b: DecoratedType) -> bool:
    return canonical_form(a.base, a.curves) == canonical_form(b.base, b.curves)


# -- splitting ----------------------------------------------------------------

def _component(t: TropicalType, start: int, removed: int) -> list[int]:
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in t.neighbours(v):
            if w != removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return sorted(seen)


def split_cylinder(t: DecoratedType) -> tuple[DecoratedType, DecoratedType, DecoratedType]:
    """Cut a cylinder type at its contracted-leg vertex.

    Returns ``(omega1, omega2, tau0)``. Each ``omega`` keeps its original
    leg and gains a leg ``L_out`` where the cut edge was; ``omega1`` holds
    the leg whose name sorts first.
    """
    base = t.base
    verdict = validate_type(base, "cylinder")
    if not verdict.ok:
        raise TypeError_(f"not a cylinder type: {verdict.reason}")
    li = contracted_leg(base)
    vi = li.vertex
    if any(c for c in t.curves[vi]):
        raise TypeError_("the contracted-leg vertex must carry curve class 0")
    cut = [f for f in base.flags(vi) if f[0] == "edge"]
    if len(cut) != 2:
        raise TypeError_("both non-contracted flags at the contracted-leg vertex must be edges")
    pieces = []
    for _, k, u_away, cone in cut:
        e = base.edges[k]
        a = e.head if e.tail == vi else e.tail
        comp = _component(base, a, vi)
        comp_set = set(comp)
        edges = [x for x in base.edges if x.tail in comp_set and x.head in comp_set]
        legs = [l for l in base.legs if l.vertex in comp_set]
        legs.append(TypeLeg("L_out", a, _neg(u_away), cone))
        sub = _rebuild(base, comp, edges, legs)
        curves = tuple(t.curves[v] for v in comp)
        pieces.append(DecoratedType(sub, curves))
    pieces.sort(key=lambda d: min(l.name for l in d.base.legs if l.name != "L_out"))
    cut_legs = []
    for idx, (_, k, u_away, cone) in enumerate(sorted(cut, key=lambda f: _cut_rank(base, f, vi, pieces))):
        cut_legs.append(TypeLeg(f"C{idx + 1}", 0, u_away, cone))
    tau0 = TropicalType(base.fan, (base.vertex_cones[vi],), (), tuple([TypeLeg(li.name, 0, (0, 0), li.cone)] + cut_legs))
    rank = len(t.curves[vi])
    return pieces[0], pieces[1], DecoratedType(tau0, ((0,) * rank,))


def _cut_rank(base, flag, vi, pieces):
    e = base.edges[flag[1]]
    a = e.head if e.tail == vi else e.tail
    names = sorted(l.name for l in base.legs if l.vertex in set(_component(base, a, vi)))
    first = [min(l.name for l in p.base.legs if l.name != "L_out") for p in pieces]
    return first.index(names[0]) if names and names[0] in first else 0


def glue_cylinder(omega1: DecoratedType, omega2: DecoratedType, tau0: DecoratedType) -> DecoratedType:
    """Inverse of :func:`split_cylinder`."""
    fan = omega1.base.fan
    v0 = tau0.base
    if v0.nvertices != 1:
        raise TypeError_("tau0 must have a single vertex")
    cones = list(omega1.base.vertex_cones) + list(omega2.base.vertex_cones) + [v0.vertex_cones[0]]
    vi = len(cones) - 1
    off = omega1.base.nvertices
    edges, legs = [], []
    for shift, om in ((0, omega1), (off, omega2)):
        for e in om.base.edges:
            edges.append(TypeEdge(e.tail + shift, e.head + shift, e.slope, e.cone))
        for l in om.base.legs:
            if l.name == "L_out":
                edges.append(TypeEdge(l.vertex + shift, vi, l.slope, l.cone))
            else:
                legs.append(TypeLeg(l.name, l.vertex + shift, l.slope, l.cone))
    for l in v0.legs:
        if l.slope == (0, 0):
            legs.append(TypeLeg(l.name, vi, l.slope, l.cone))
    base = TropicalType(fan, tuple(cones), tuple(edges), tuple(legs))
    curves = tuple(omega1.curves) + tuple(omega2.curves) + tuple(tau0.curves)
    return DecoratedType(base, curves)


# -- spines -------------------------------------------------------------------

@dataclass(frozen=True)
class SpineEdge:
    tail: int
    head: int
    slope: Vector
    chamber: int
    length: Fraction


@dataclass(frozen=True)
class SpineLeg:
    name: str
    vertex: int
    slope: Vector
    chamber: int
    length: Fraction | None = None  # None for an infinite leg


@dataclass(frozen=True)
class Spine:
    """Metric tree mapped piecewise linearly into the fan.

    Positions are seed coordinates; every edge and leg lies in one closed
    chamber whose seed coordinates express its slope.
    """

    fan: Fan = field(repr=False)
    positions: tuple[Point, ...]
    chambers: tuple[int, ...]
    edges: tuple[SpineEdge, ...] = ()
    legs: tuple[SpineLeg, ...] = ()

    def __post_init__(self):
        n = self.fan.n
        object.__setattr__(self, "positions", tuple((Fraction(p[0]), Fraction(p[1])) for p in self.positions))
        object.__setattr__(self, "chambers", tuple(int(c) % n for c in self.chambers))
        object.__setattr__(self, "edges", tuple(
            SpineEdge(int(e.tail), int(e.head), _vec(e.slope), int(e.chamber) % n, Fraction(e.length)) for e in self.edges))
        object.__setattr__(self, "legs", tuple(
            SpineLeg(str(l.name), int(l.vertex), _vec(l.slope), int(l.chamber) % n,
                     None if l.length is None else Fraction(l.length)) for l in self.legs))
        problem = self.problem()
        if problem:
            raise TypeError_(problem)

    def problem(self) -> str | None:
        fan = self.fan
        nv = len(self.positions)
        if len(self.chambers) != nv:
            return "one chamber tag per vertex is required"
        for v, (p, c) in enumerate(zip(self.positions, self.chambers)):
            if not fan.chamber(c).contains(p) and p != (0, 0):
                return f"vertex {v} is not in its chamber {c}"
        for e in self.edges:
            if e.length <= 0:
                return "edge lengths must be positive"
            p, q = self.positions[e.tail], self.positions[e.head]
            if (q[0] - p[0], q[1] - p[1]) != (e.length * e.slope[0], e.length * e.slope[1]):
                return f"edge {e.tail}-{e.head} is not chart consistent"
            ch = fan.chamber(e.chamber)
            if not (ch.contains(p) and ch.contains(q)):
                return f"edge {e.tail}-{e.head} leaves chamber {e.chamber}"
        for l in self.legs:
            p = self.positions[l.vertex]
            ch = fan.chamber(l.chamber)
            if l.length is not None:
                if l.length <= 0:
                    return "finite legs need positive length"
                end = (p[0] + l.length * l.slope[0], p[1] + l.length * l.slope[1])
                if not ch.contains(end):
                    return f"finite leg {l.name} leaves chamber {l.chamber}"
            elif l.slope != (0, 0) and not ch.contains(_add(p, l.slope)) and not ch.contains(l.slope):
                return f"infinite leg {l.name} leaves chamber {l.chamber}"
        if len(self.edges) != nv - 1:
            return "spine domain must be a tree"
        return None

    def developed_position(self, v: int) -> Point:
        return tuple(mat_vec(self.fan.chart(self.chambers[v]), self.positions[v]))

    def developed_slope(self, slope: Vector, chamber: int) -> Vector:
        return tuple(int(x) for x in mat_vec(self.fan.chart(chamber), slope))

    def flags(self, v: int):
        """``(kind, index, slope away from v, chamber)`` for each edge and leg at ``v``."""
        out = []
        for i, e in enumerate(self.edges):
            if e.tail == v:
                out.append(("edge", i, e.slope, e.chamber))
            elif e.head == v:
                out.append(("edge", i, _neg(e.slope), e.chamber))
        for l in self.legs:
            if l.vertex == v:
                out.append(("leg", l.name, l.slope, l.chamber))
        return out

    def valence(self, v: int) -> int:
        return len(self.flags(v))


def _vertex_cone(fan: Fan, p: Point) -> ConeId:
    cid = fan.cone_of(p)
    return normalize_cone(fan, cid)


def _chamber_cone(fan: Fan, c: int) -> ConeId:
    return fan.chamber_id(c)


def _local_slope(fan: Fan, at: ConeId, chamber: int, u: Vector) -> Vector:
    """Express a chamber slope in the frame of the vertex cone ``at``."""
    return to_vertex_frame(fan, at, _chamber_cone(fan, chamber), u)


def bend_at(spine: Spine, v: int) -> Vector:
    """Bend ``sum d_e h`` with every edge oriented towards ``v`` (vertex frame)."""
    p = spine.positions[v]
    if p == (0, 0):
        raise TypeError_("the bend is undefined at the singular origin")
    cid = _vertex_cone(spine.fan, p)
    total = (0, 0)
    for _, _, u, ch in spine.flags(v):
        if len(cid) == 2 and ch != cid[0]:
            raise TypeError_(f"flag at vertex {v} lies in a different chamber")
        total = _add(total, _neg(_local_slope(spine.fan, cid, ch, u)))
    return total


def _frame_chamber(spine: Spine, v: int) -> int:
    cid = _vertex_cone(spine.fan, spine.positions[v])
    if len(cid) == 1:
        return (cid[0] - 1) % spine.fan.n
    return spine.chambers[v]


def developed_bend(spine: Spine, v: int) -> Vector:
    """:func:`bend_at` pushed into developed coordinates through the vertex frame."""
    chart = spine.fan.chart(_frame_chamber(spine, v))
    return tuple(int(x) for x in mat_vec(chart, bend_at(spine, v)))


def developed_vertex(spine: Spine, v: int) -> Point:
    return tuple(mat_vec(spine.fan.chart(_frame_chamber(spine, v)), spine.positions[v]))


def _wall_multiples(diagram, order=None) -> dict:
    """Direction of each ray support -> allowed bends ``-J m_d``."""
    from .series import log_series
    k = diagram.order if order is None else order
    out = {}
    for w in diagram.walls:
        js = set()
        for (curve, m), _c in log_series(w.function).terms:
            j = -dot(m, w.direction) // dot(w.direction, w.direction)
            js.add((j, sum(curve)))
        reach = {(0, 0)}
        frontier = set(reach)
        while frontier:
            new = set()
            for j0, d0 in frontier:
                for j, d in js:
                    item = (j0 + j, d0 + d)
                    if item[1] <= k and item not in reach:
                        reach.add(item)
                        new.add(item)
            frontier = new
        bends = {(-j * w.direction[0], -j * w.direction[1]) for j, _ in reach if j > 0}
        for r, _sign in w.halves():
            out.setdefault(r, set()).update(bends)
    return out


def _on_ray(p, r) -> bool:
    return det(p, r) == 0 and dot(p, r) > 0


def is_balanced(spine: Spine, walls) -> tuple[bool, list[int]]:
    """Balancing with respect to a scattering diagram; returns offending vertices."""
    allowed = _wall_multiples(walls)
    bad = []
    for v in range(len(spine.positions)):
        if spine.positions[v] == (0, 0):
            continue
        b = developed_bend(spine, v)
        if b == (0, 0):
            continue
        q = developed_vertex(spine, v)
        if not any(_on_ray(q, r) and b in bends for r, bends in allowed.items()):
            bad.append(v)
    return not bad, bad


def _segment_hits_origin(p, q) -> bool:
    if det(p, q) != 0:
        return False
    if p == (0, 0) or q == (0, 0):
        return True
    return dot(p, q) < 0


def is_transverse(spine: Spine, walls) -> tuple[bool, list]:
    """Transversality: finite wall intersections, walls met only at 2-valent vertices, origin avoided."""
    rays = [r for r, _ in walls.ray_functions()]
    issues = []
    for v in range(len(spine.positions)):
        q = spine.developed_position(v)
        if q == (0, 0):
            issues.append(("origin", "vertex", v))
            continue
        if any(_on_ray(q, r) for r in rays) and spine.valence(v) != 2:
            issues.append(("vertex-on-wall", v))
    for i, e in enumerate(spine.edges):
        p = tuple(mat_vec(spine.fan.chart(e.chamber), spine.positions[e.tail]))
        q = tuple(mat_vec(spine.fan.chart(e.chamber), spine.positions[e.head]))
        if _segment_hits_origin(p, q):
            issues.append(("origin", "edge", i))
            continue
        d = (q[0] - p[0], q[1] - p[1])
        for r in rays:
            if det(d, r) == 0 and det(p, r) == 0 and (dot(p, r) > 0 or dot(q, r) > 0):
                issues.append(("edge-on-wall", i, r))
    for l in spine.legs:
        p = tuple(mat_vec(spine.fan.chart(l.chamber), spine.positions[l.vertex]))
        u = spine.developed_slope(l.slope, l.chamber)
        if u == (0, 0):
            continue
        if l.length is None:
            if det(p, u) == 0 and (p == (0, 0) or dot(p, u) < 0):
                issues.append(("origin", "leg", l.name))
                continue
        else:
            q = (p[0] + l.length * u[0], p[1] + l.length * u[1])
            if _segment_hits_origin(p, q):
                issues.append(("origin", "leg", l.name))
                continue
        for r in rays:
            if det(u, r) == 0 and det(p, r) == 0 and (dot(p, r) > 0 or (l.length is None and dot(u, r) > 0)):
                issues.append(("leg-on-wall", l.name, r))
    return not issues, issues


def type_of_spine(spine: Spine, fan: Fan | None = None) -> TropicalType:
    """Tropical type of a spine, with cones read off in ``fan`` (default: the spine's fan)."""
    fan = spine.fan if fan is None else fan
    pos = spine.positions
    cones = [_vertex_cone(fan, p) if p != (0, 0) else () for p in pos]
    edges = []
    for e in spine.edges:
        p, q = pos[e.tail], pos[e.head]
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        cid = _vertex_cone(fan, mid)
        edges.append(TypeEdge(e.tail, e.head, _slope_in(fan, spine.fan, e.chamber, cid, e.slope), cid))
    legs = []
    for l in spine.legs:
        p = pos[l.vertex]
        if l.slope == (0, 0):
            cid = cones[l.vertex]
        else:
            step = l.length / 2 if l.length is not None else Fraction(1)
            cid = _vertex_cone(fan, (p[0] + step * l.slope[0], p[1] + step * l.slope[1]))
        legs.append(TypeLeg(l.name, l.vertex, _slope_in(fan, spine.fan, l.chamber, cid, l.slope), cid))
    return TropicalType(fan, tuple(cones), tuple(edges), tuple(legs))


def _slope_in(fan: Fan, spine_fan: Fan, chamber: int, cid: ConeId, u: Vector) -> Vector:
    # seed coordinates agree between a fan and its refinements, so the slope is unchanged
    return tuple(u)


# -- extension and subdivision ------------------------------------------------

def _exit(fan: Fan, c: int, p: Point, u: Vector):
    """First boundary crossing of ``p + s u`` (s > 0) leaving chamber ``c``."""
    ch = fan.chamber(c)
    a0, b0 = ch.coordinates(p)
    da, db = ch.coordinates(u)
    times = []
    if da < 0:
        times.append((-a0 / da, "a"))
    if db < 0:
        times.append((-b0 / db, "b"))
    times = [(s, w) for s, w in times if s > 0]
    if not times:
        return None
    s = min(t for t, _ in times)
    which = {w for t, w in times if t == s}
    q = (p[0] + s * u[0], p[1] + s * u[1])
    if which == {"a", "b"} or q == (0, 0):
        raise TypeError_("extension direction runs into the origin")
    # coordinate a vanishes on ray c+1, coordinate b on ray c
    return s, q, ("ccw" if "a" in which else "cw")


def _extend_leg(fan: Fan, positions: list, chambers: list, edges: list, v: int, u: Vector, c: int, max_steps: int):
    p = positions[v]
    cur_v, cur_u, cur_c = v, tuple(u), c
    for _ in range(max_steps):
        hit = _exit(fan, cur_c, p, cur_u)
        if hit is None:
            return cur_v, cur_u, cur_c
        s, q, way = hit
        positions.append(q)
        if way == "ccw":
            nxt_c = (cur_c + 1) % fan.n
            nxt_u = tuple(int(x) for x in mat_vec(fan.transition(nxt_c), cur_u))
        else:
            nxt_c = (cur_c - 1) % fan.n
            nxt_u = tuple(int(x) for x in mat_vec(fan.gluings[cur_c], cur_u))
        chambers.append(cur_c)
        w = len(positions) - 1
        edges.append(SpineEdge(cur_v, w, cur_u, cur_c, s))
        cur_v, cur_u, cur_c, p = w, nxt_u, nxt_c, q
    raise TypeError_("spine extension did not terminate")


def _check_infinitesimal(s: Spine) -> None:
    finite = [l for l in s.legs if l.length is not None]
    contracted = [l for l in s.legs if l.length is None and l.slope == (0, 0)]
    if len(finite) != 2 or len(contracted) != 1 or len(s.legs) != 3:
        raise TypeError_("an infinitesimal spine has two finite legs and one contracted infinite leg")
    vi = contracted[0].vertex
    if s.valence(vi) != 3:
        raise TypeError_(CONTRACTED_LEG_VALENCE)
    if len(_vertex_cone(s.fan, s.positions[vi])) != 2:
        raise TypeError_("the contracted-leg vertex must lie in the interior of a chamber")
    if bend_at(s, vi) != (0, 0):
        raise TypeError_("the contracted-leg vertex must be balanced")
    others = [v for v in range(len(s.positions)) if v != vi]
    if len(others) != 1 or s.valence(others[0]) != 2 or s.positions[others[0]] == (0, 0):
        raise TypeError_("an infinitesimal spine has a single 2-valent vertex off the origin")


def extend_spine(s: Spine, fan: Fan | None = None, strict: bool = True) -> Spine:
    """Glue infinite legs to the finite ones, adding 2-valent vertices at ray crossings."""
    fan = s.fan if fan is None else fan
    if strict:
        _check_infinitesimal(s)
    positions = list(s.positions)
    chambers = list(s.chambers)
    edges = list(s.edges)
    legs = []
    for l in s.legs:
        if l.length is None:
            legs.append(l)
            continue
        last_v, u, c = _extend_leg(fan, positions, chambers, edges, l.vertex, l.slope, l.chamber, 4 * fan.n + 4)
        legs.append(SpineLeg(l.name, last_v, u, c, None))
    return Spine(fan, tuple(positions), tuple(chambers), tuple(edges), tuple(legs))


def _new_chamber(fan_new: Fan, p: Point, q: Point | None, u: Vector | None) -> int:
    if q is not None:
        probe = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
    else:
        probe = (p[0] + u[0], p[1] + u[1])
    for i in range(fan_new.n):
        if fan_new.chamber(i).contains(probe):
            return i
    raise TypeError_("point outside the refined fan")


def _crossings(rays, p: Point, d: Vector, bounded: bool):
    """Parameters ``s`` in (0, 1) (or (0, inf)) where ``p + s d`` meets one of ``rays``."""
    out = []
    for r in rays:
        dd = det(d, r)
        if dd == 0:
            continue
        s = Fraction(-det(p, r), dd)
        if s <= 0 or (bounded and s >= 1):
            continue
        q = (p[0] + s * d[0], p[1] + s * d[1])
        if dot(q, r) > 0:
            out.append(s)
    return sorted(set(out))


def subdivide_spine(s: Spine, fan_old: Fan, fan_new: Fan) -> Spine:
    """Insert 2-valent vertices wherever the spine crosses a ray of the refinement."""
    if not is_refinement(fan_new, fan_old):
        raise TypeError_("the new fan does not refine the old one")
    new_rays = [r for r in fan_new.rays if r not in fan_old.rays]
    positions = list(s.positions)
    chambers = [None] * len(positions)
    for v, p in enumerate(positions):
        chambers[v] = _chamber_for_point(fan_new, p, s.chambers[v], fan_old)
    edges = []
    for e in s.edges:
        p = positions[e.tail]
        d = (positions[e.head][0] - p[0], positions[e.head][1] - p[1])
        cuts = _crossings(new_rays, p, d, True)
        prev_v, prev_s = e.tail, Fraction(0)
        for t in cuts + [Fraction(1)]:
            if t == 1:
                w = e.head
            else:
                positions.append((p[0] + t * d[0], p[1] + t * d[1]))
                chambers.append(None)
                w = len(positions) - 1
            a = positions[prev_v]
            b = positions[w]
            c = _new_chamber(fan_new, a, b, None)
            if chambers[w] is None:
                chambers[w] = c
            edges.append(SpineEdge(prev_v, w, e.slope, c, (t - prev_s) * e.length))
            prev_v, prev_s = w, t
    legs = []
    for l in s.legs:
        p = positions[l.vertex]
        if l.slope == (0, 0):
            legs.append(SpineLeg(l.name, l.vertex, l.slope, chambers[l.vertex], l.length))
            continue
        bounded = l.length is not None
        d = l.slope if not bounded else (l.slope[0] * l.length, l.slope[1] * l.length)
        cuts = _crossings(new_rays, p, d, bounded)
        prev_v, prev_s = l.vertex, Fraction(0)
        for t in cuts:
            positions.append((p[0] + t * d[0], p[1] + t * d[1]))
            w = len(positions) - 1
            c = _new_chamber(fan_new, positions[prev_v], positions[w], None)
            chambers.append(c)
            length = (t - prev_s) * (l.length if bounded else 1)
            edges.append(SpineEdge(prev_v, w, l.slope, c, length))
            prev_v, prev_s = w, t
        q = positions[prev_v]
        if bounded:
            rest = (1 - prev_s) * l.length
            end = (q[0] + rest * l.slope[0], q[1] + rest * l.slope[1])
            c = _new_chamber(fan_new, q, end, None)
            legs.append(SpineLeg(l.name, prev_v, l.slope, c, rest))
        else:
            c = _new_chamber(fan_new, q, None, l.slope)
            legs.append(SpineLeg(l.name, prev_v, l.slope, c, None))
    return Spine(fan_new, tuple(positions), tuple(chambers), tuple(edges), tuple(legs))


def _chamber_for_point(fan_new: Fan, p: Point, old_chamber: int, fan_old: Fan) -> int:
    if p == (0, 0):
        return fan_new.rays.index(fan_old.rays[old_chamber])
    old = fan_old.chamber(old_chamber)
    candidates = [i for i in range(fan_new.n) if fan_new.chamber(i).contains(p)]
    for i in candidates:
        g = fan_new.chamber(i).generators
        if all(old.contains(x) for x in g):
            return i
    return candidates[0]


# -- a family of cylinder types ---------------------------------------------

def square_fan() -> Fan:
    from .geometry import Seed, build_fan
    return build_fan(Seed(((1, 0), (0, 1), (-1, 0), (0, -1)), (0, 0, 0, 0)))


def branched_cylinder_type(c1: int, c2: int, beta: int, gamma: int, fan: Fan | None = None) -> TropicalType:
    """Cylinder type on the square fan with one wall branch on each positive axis.

    A branch of weight ``c1`` leaves the origin along ``e1`` and bends the
    leg ``L1``; a branch of weight ``c2`` does the same along ``e2`` for
    ``L2``. The contracted leg ``Li`` sits on the edge of slope
    ``(-beta, gamma)`` joining the two bending points.
    """
    if min(c1, c2, beta, gamma) < 1:
        raise ValueError("weights and slopes must be positive")
    fan = square_fan() if fan is None else fan
    b = (-beta, gamma)
    return TropicalType(
        fan,
        ((), (0,), (), (1,), (0, 1)),
        (TypeEdge(0, 1, (c1, 0), (0,)), TypeEdge(2, 3, (0, c2), (1,)),
         TypeEdge(1, 4, b, (0, 1)), TypeEdge(3, 4, (beta, -gamma), (0, 1))),
        (TypeLeg("L1", 1, (c1 + beta, -gamma), (3, 0)), TypeLeg("L2", 3, (-beta, c2 + gamma), (1, 2)),
         TypeLeg("Li", 4, (0, 0), (0, 1))),
    )


def branched_cylinder_spine(c1: int, c2: int, beta: int, gamma: int, fan: Fan | None = None) -> Spine:
    """A realization of the spine of :func:`branched_cylinder_type`."""
    fan = square_fan() if fan is None else fan
    # v_i = (1, gamma); v1 and v2 are where the edge line meets the axes
    vi = (Fraction(1), Fraction(gamma))
    v1 = (Fraction(1) + beta, Fraction(0))
    v2 = (Fraction(0), Fraction(gamma) + Fraction(gamma, beta))
    return Spine(
        fan, (v1, vi, v2), (0, 0, 0),
        (SpineEdge(0, 1, (-beta, gamma), 0, 1), SpineEdge(1, 2, (-beta, gamma), 0, Fraction(1, beta))),
        (SpineLeg("L1", 0, (c1 + beta, -gamma), 3, None), SpineLeg("L2", 2, (-beta, c2 + gamma), 1, None),
         SpineLeg("Li", 1, (0, 0), 0, None)),
    )
