"""Deterministic SVG pictures of diagrams, broken lines and spines.

Everything is drawn in developed coordinates inside a fixed viewport.
Coordinates are rounded to three decimals so the same input always gives
the same bytes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable
from xml.sax.saxutils import escape

from .counts import BrokenLine
from .lattice import mat_vec
from .scattering import ScatteringDiagram
from .tropical import Spine

SIZE = 400
RADIUS = 4
PALETTE = ("#c0392b", "#2471a3", "#229954", "#af7ac5", "#d68910")


def _fmt(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, size: int, radius: float):
        self.size, self.radius = size, radius
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        scale = self.size / (2 * self.radius)
        return _fmt(self.size / 2 + float(p[0]) * scale), _fmt(self.size / 2 - float(p[1]) * scale)

    def far(self, direction, start=(0, 0)):
        """Point where ``start + s * direction`` leaves the viewport."""
        d = (float(direction[0]), float(direction[1]))
        n = math.hypot(*d)
        r = self.radius * 1.5
        return (float(start[0]) + r * d[0] / n, float(start[1]) + r * d[1] / n)

    def line(self, a, b, color: str, width: float = 1, dash: str | None = None):
        (x1, y1), (x2, y2) = self.xy(a), self.xy(b)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" stroke-width="{_fmt(width)}"{extra}/>')

    def polyline(self, points, color: str, width: float = 2):
        pts = " ".join(",".join(self.xy(p)) for p in points)
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def dot(self, p, color: str, r: float = 3):
        x, y = self.xy(p)
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(r)}" fill="{color}"/>')

    def text(self, p, label: str, color: str = "#000"):
        x, y = self.xy(p)
        self.items.append(f'<text x="{x}" y="{y}" font-family="monospace" font-size="11" fill="{color}">{escape(label)}</text>')

    def document(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">')
        body = "\n".join(self.items)
        return f'{head}\n<title>{escape(title)}</title>\n<rect width="100%" height="100%" fill="#fff"/>\n{body}\n</svg>\n'


def _leading_term(f) -> str:
    terms = [t for t in f.terms if any(t[0][0])]
    if not terms:
        return "1"
    (curve, m), c = min(terms, key=lambda t: (sum(t[0][0]), t[0]))
    mono = "".join(f"t{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(curve) if a)
    sign = "+" if c > 0 else "-"
    coeff = "" if abs(c) == 1 else str(abs(c))
    return f"1{sign}{coeff}{mono}z^({m[0]},{m[1]})"


def _draw_fan(canvas: _Canvas, fan) -> None:
    for i, r in enumerate(fan.rays):
        d = mat_vec(fan.chart(i), r)
        canvas.line((0, 0), canvas.far(d), "#bbbbbb", 1, "4,3")


def render_svg(diagram: ScatteringDiagram | None = None, broken_lines: Iterable[BrokenLine] = (),
               spine: Spine | None = None, size: int = SIZE, radius: float = RADIUS, title: str = "tropscatter") -> str:
    """SVG with fan rays, labeled walls, and optional broken lines or a spine."""
    canvas = _Canvas(size, radius)
    fan = diagram.fan if diagram is not None else (spine.fan if spine is not None else None)
    if fan is not None:
        _draw_fan(canvas, fan)
    if diagram is not None:
        for w in diagram.walls:
            for r, _ in w.halves():
                canvas.line((0, 0), canvas.far(r), "#000000", 1.5)
            label_at = (Fraction(w.direction[0]) * Fraction(radius) * Fraction(3, 5) / max(map(abs, w.direction)),
                        Fraction(w.direction[1]) * Fraction(radius) * Fraction(3, 5) / max(map(abs, w.direction)))
            canvas.text(label_at, _leading_term(w.function))
    for k, bl in enumerate(broken_lines):
        color = PALETTE[k % len(PALETTE)]
        first = bl.segments[0]
        start = first.start if first.start is not None else canvas.far(first.exponent, first.end)
        points = [start] + [s.end for s in bl.segments]
        canvas.polyline(points, color)
        canvas.dot(bl.endpoint, color)
    if spine is not None:
        _draw_spine(canvas, spine)
    return canvas.document(title)


def _developed(spine: Spine, chamber: int, p):
    return mat_vec(spine.fan.chart(chamber), p)


def _draw_spine(canvas: _Canvas, spine: Spine) -> None:
    red = PALETTE[0]
    for e in spine.edges:
        a = _developed(spine, e.chamber, spine.positions[e.tail])
        b = _developed(spine, e.chamber, spine.positions[e.head])
        canvas.line(a, b, red, 2.5)
    for l in spine.legs:
        p = _developed(spine, l.chamber, spine.positions[l.vertex])
        if l.slope == (0, 0):
            canvas.dot(p, red, 5)
            canvas.text(p, f" {l.name}", red)
            continue
        u = _developed(spine, l.chamber, l.slope)
        end = (p[0] + l.length * u[0], p[1] + l.length * u[1]) if l.length is not None else canvas.far(u, p)
        canvas.line(p, end, red, 2.5, None if l.length is None else "2,2")
    for v, (p, c) in enumerate(zip(spine.positions, spine.chambers)):
        canvas.dot(_developed(spine, c, p), "#000000", 2.5)
