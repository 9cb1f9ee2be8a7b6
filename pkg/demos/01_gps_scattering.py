"""
Completing the simplest scattering diagram
==========================================

Two lines cross at the origin of the square fan, one horizontal carrying
1 + t1 z^(-1,0) and one vertical carrying 1 + t2 z^(0,-1). Going once
around the origin the two wall crossings do not commute, and the
completion algorithm adds rays until the loop acts trivially.

Run with an optional directory argument to also write an SVG picture.
"""

import sys
from pathlib import Path

from tropscatter import complete_to_consistency, extract_coefficients, gps_diagram
from tropscatter.render import render_svg
from tropscatter.scattering import is_consistent, path_ordered_product
from tropscatter.series import TruncatedSeries

# The incoming lines on their own are not consistent: transporting z^(1,0)
# around the origin picks up correction terms.
initial = gps_diagram(order=3)
loop = path_ordered_product(initial, 0, TruncatedSeries.monomial((0, 0), (1, 0), 3))
print("loop image of z^(1,0) before completion:")
print("   ", loop)

# Completion works order by order in t and adds outgoing rays.
done = complete_to_consistency(initial)
print("\nwalls after completion:")
for w in done.walls:
    kind = "line" if w.line else "ray "
    print(f"  {kind} {w.direction}: {w.function}")
print("\nconsistent around the origin:", is_consistent(done))

# The log of each wall function gives the coefficient table. At order 2 the
# only new entry is the cross term t1 t2 on the diagonal ray.
print("\nnew coefficients (direction, j, curve class) -> value:")
table = extract_coefficients(done.with_walls(done.new_walls(initial)))
for key, value in table.entries:
    print("   ", key, "->", value)

# Squaring the incoming functions makes the diagonal ray much richer; its
# function is (1 - t1 t2 z^(-1,-1))^(-4) to this order.
squared = complete_to_consistency(gps_diagram(order=4, power=2))
central = next(w for w in squared.walls if w.direction == (1, 1))
print("\ncentral ray for (1 + t z)^2 inputs:", central.function)

if len(sys.argv) > 1:
    out = Path(sys.argv[1]) / "gps.svg"
    out.write_text(render_svg(done, title="completed GPS diagram"), encoding="utf-8")
    print("\nwrote", out)
