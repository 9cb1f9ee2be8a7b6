"""Canonical JSON encoding for seeds, series, diagrams, tables, types and spines.

Every rational number is written as an integer ``num``/``den`` pair; floats
are rejected on input. Output uses sorted keys and a fixed layout so equal
objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .geometry import Seed, build_fan
from .scattering import CoefficientTable, ScatteringDiagram, Wall
from .series import TruncatedSeries
from .tropical import DecoratedType, Spine, SpineEdge, SpineLeg, TropicalType, TypeEdge, TypeLeg


class FormatError(ValueError):
    """Input does not follow the JSON schema."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def load_file(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh, parse_float=_reject_float)


def loads(text: str) -> Any:
    return json.loads(text, parse_float=_reject_float)


def _reject_float(s: str):
    raise FormatError(f"floating point literal {s!r} is not allowed; use num/den pairs")


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{what} must be an integer, got {x!r}")
    return x


def _ivec(x, n: int | None, what: str) -> tuple[int, ...]:
    if not isinstance(x, list) or (n is not None and len(x) != n):
        raise FormatError(f"{what} must be a list of {n or 'some'} integers")
    return tuple(_int(a, what) for a in x)


def _get(d: dict, key: str, what: str):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"{what} needs a {key!r} field")
    return d[key]


def frac_to_json(q) -> dict:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def frac_from_json(d, what: str = "number") -> Fraction:
    num = _int(_get(d, "num", what), what)
    den = _int(d.get("den", 1), what)
    if den == 0:
        raise FormatError(f"{what} has zero denominator")
    return Fraction(num, den)


def _point_to_json(p) -> list:
    return [frac_to_json(x) for x in p]


def _point_from_json(p, what: str) -> tuple[Fraction, Fraction]:
    if not isinstance(p, list) or len(p) != 2:
        raise FormatError(f"{what} must be a pair of num/den numbers")
    return tuple(x if isinstance(x, int) and not isinstance(x, bool) else frac_from_json(x, what) for x in p)


# -- seed and series ----------------------------------------------------------

def seed_to_json(seed: Seed) -> dict:
    return {"rays": [list(r) for r in seed.rays], "kinks": list(seed.kinks),
            "curve_rank": seed.curve_rank, "order": seed.order}


def seed_from_json(d) -> Seed:
    rays = _get(d, "rays", "seed")
    if not isinstance(rays, list):
        raise FormatError("seed rays must be a list")
    seed = Seed(tuple(_ivec(r, 2, "ray") for r in rays), _ivec(_get(d, "kinks", "seed"), len(rays), "kinks"),
                _int(d.get("curve_rank", 1), "curve_rank"), _int(d.get("order", 4), "order"))
    try:
        build_fan(seed)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return seed


def series_to_json(f: TruncatedSeries) -> dict:
    return {"order": f.order, "rank": f.rank,
            "terms": [{"curve": list(a), "dir": list(m), **frac_to_json(c)} for (a, m), c in f.terms]}


def series_from_json(d, rank: int | None = None) -> TruncatedSeries:
    order = _int(_get(d, "order", "series"), "order")
    terms = []
    for t in _get(d, "terms", "series"):
        terms.append(((_ivec(_get(t, "curve", "term"), None, "curve"), _ivec(_get(t, "dir", "term"), 2, "dir")),
                      frac_from_json(t, "coefficient")))
    if rank is None:
        rank = d.get("rank", len(terms[0][0][0]) if terms else 1)
    return TruncatedSeries(terms, order, rank)


# -- diagrams and tables ------------------------------------------------------

def diagram_to_json(diagram: ScatteringDiagram) -> dict:
    return {"seed": seed_to_json(diagram.seed), "order": diagram.order,
            "walls": [{"dir": list(w.direction), "incoming": w.line, "function": series_to_json(w.function)}
                      for w in diagram.walls]}


def diagram_from_json(d) -> ScatteringDiagram:
    seed = seed_from_json(_get(d, "seed", "diagram"))
    order = _int(d.get("order", seed.order), "order")
    walls = []
    for w in d.get("walls", []):
        f = series_from_json(_get(w, "function", "wall"), seed.curve_rank).with_order(order)
        incoming = w.get("incoming", False)
        if not isinstance(incoming, bool):
            raise FormatError("wall 'incoming' must be a boolean")
        try:
            walls.append(Wall(_ivec(_get(w, "dir", "wall"), 2, "dir"), f, incoming))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return ScatteringDiagram(seed, tuple(walls), order)


def table_to_json(table: CoefficientTable, line=None) -> dict:
    out = {"entries": [{"dir": list(d), "j": j, "curve": list(a), **frac_to_json(v)}
                       for (d, j, a), v in table.entries]}
    if line is not None:
        out["line"] = list(line)
    return out


def table_from_json(d) -> tuple[CoefficientTable, tuple[int, int] | None]:
    """Returns the table and its declared line (entries default to that direction)."""
    line = _ivec(d["line"], 2, "line") if isinstance(d, dict) and "line" in d else None
    entries = []
    for e in _get(d, "entries", "table"):
        direction = _ivec(e["dir"], 2, "dir") if "dir" in e else line
        if direction is None:
            raise FormatError("table entries need a 'dir' when the table has no 'line'")
        entries.append(((direction, _int(_get(e, "j", "entry"), "j"), _ivec(_get(e, "curve", "entry"), None, "curve")),
                        frac_from_json(e, "entry value")))
    try:
        return CoefficientTable(tuple(entries)), line
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# -- types and spines ---------------------------------------------------------

def _fan_to_json(fan) -> dict:
    if any(k is None for k in fan.kinks):
        raise FormatError("fan gluings are not described by integer kinks")
    return seed_to_json(Seed(fan.rays, tuple(fan.kinks), fan.curve_rank))


def type_to_json(t: TropicalType | DecoratedType) -> dict:
    curves = None
    if isinstance(t, DecoratedType):
        t, curves = t.base, t.curves
    out = {
        "fan": _fan_to_json(t.fan),
        "vertices": [{"cone": list(c)} for c in t.vertex_cones],
        "edges": [{"tail": e.tail, "head": e.head, "slope": list(e.slope), "cone": list(e.cone)} for e in t.edges],
        "legs": [{"name": l.name, "vertex": l.vertex, "slope": list(l.slope), "cone": list(l.cone)} for l in t.legs],
    }
    if curves is not None:
        for v, c in zip(out["vertices"], curves):
            v["curve"] = list(c)
    return out


def type_from_json(d) -> DecoratedType:
    fan = build_fan(seed_from_json(_get(d, "fan", "type")))
    vertices = _get(d, "vertices", "type")
    cones = tuple(_ivec(_get(v, "cone", "vertex"), None, "cone") for v in vertices)
    edges = tuple(TypeEdge(_int(_get(e, "tail", "edge"), "tail"), _int(_get(e, "head", "edge"), "head"),
                           _ivec(_get(e, "slope", "edge"), 2, "slope"), _ivec(_get(e, "cone", "edge"), None, "cone"))
                  for e in d.get("edges", []))
    legs = tuple(TypeLeg(str(_get(l, "name", "leg")), _int(_get(l, "vertex", "leg"), "vertex"),
                         _ivec(_get(l, "slope", "leg"), 2, "slope"), _ivec(_get(l, "cone", "leg"), None, "cone"))
                 for l in d.get("legs", []))
    base = TropicalType(fan, cones, edges, legs)
    rank = fan.curve_rank
    curves = tuple(_ivec(v["curve"], rank, "curve") if "curve" in v else (0,) * rank for v in vertices)
    return DecoratedType(base, curves)


def spine_to_json(s: Spine) -> dict:
    return {
        "fan": _fan_to_json(s.fan),
        "vertices": [{"position": _point_to_json(p), "chamber": c} for p, c in zip(s.positions, s.chambers)],
        "edges": [{"tail": e.tail, "head": e.head, "slope": list(e.slope), "chamber": e.chamber,
                   "length": frac_to_json(e.length)} for e in s.edges],
        "legs": [{"name": l.name, "vertex": l.vertex, "slope": list(l.slope), "chamber": l.chamber,
                  "length": None if l.length is None else frac_to_json(l.length)} for l in s.legs],
    }


def spine_from_json(d) -> Spine:
    fan = build_fan(seed_from_json(_get(d, "fan", "spine")))
    vertices = _get(d, "vertices", "spine")
    positions = tuple(_point_from_json(_get(v, "position", "vertex"), "position") for v in vertices)
    chambers = tuple(_int(_get(v, "chamber", "vertex"), "chamber") for v in vertices)
    edges = tuple(SpineEdge(_int(e["tail"], "tail"), _int(e["head"], "head"), _ivec(e["slope"], 2, "slope"),
                            _int(e["chamber"], "chamber"), frac_from_json(e["length"], "length"))
                  for e in d.get("edges", []))
    legs = tuple(SpineLeg(str(l["name"]), _int(l["vertex"], "vertex"), _ivec(l["slope"], 2, "slope"),
                          _int(l["chamber"], "chamber"),
                          None if l.get("length") is None else frac_from_json(l["length"], "length"))
                 for l in d.get("legs", []))
    return Spine(fan, positions, chambers, edges, legs)


def weighted_types_from_json(d) -> tuple[list[tuple[DecoratedType, Fraction]], list]:
    """``{"types": [{"type": ..., "N": {num, den}, "split": [N1, N2]?}]}``."""
    items, split = [], []
    for item in _get(d, "types", "types file"):
        items.append((type_from_json(_get(item, "type", "types entry")), frac_from_json(_get(item, "N", "types entry"), "N")))
        s = item.get("split")
        split.append(None if s is None else tuple(frac_from_json(x, "split value") for x in s))
    return items, split
