"""
Broken lines and theta functions
================================

A broken line comes in from infinity carrying z^p, and each time it
crosses a wall it may trade its monomial for a term of the wall-crossing
expansion. Summing the final monomials of all broken lines ending at a
point q gives the local expression of the theta function at q. Products
of theta functions expand back into theta functions, and the expansion
does not depend on q exactly when the diagram is consistent.
"""

from fractions import Fraction

from tropscatter import complete_to_consistency, gps_diagram
from tropscatter.counts import InconsistentDiagramError, theta_function, theta_product, trace_broken_lines

diagram = complete_to_consistency(gps_diagram(order=3))
q = (Fraction(1, 3), Fraction(2, 3))

# Broken lines for p = (1, 0) ending near the diagonal ray.
print(f"broken lines for z^(1,0) ending at ({q[0]}, {q[1]}):")
for bl in trace_broken_lines(diagram, (1, 0), q):
    c, curve, m = bl.final_monomial
    print(f"  {bl.bends} bends, final monomial {c} t^{curve} z^{m}")
print("theta_(1,0) at q:", theta_function(diagram, (1, 0), q))

# Structure constants. theta_(1,0) theta_(0,1) = theta_(1,1) + t1 t2.
for p, r in [((1, 0), (0, 1)), ((1, 0), (-1, 0)), ((1, 1), (-1, 0))]:
    constants = theta_product(diagram, p, r)
    terms = " + ".join(f"({c}) theta_{s}" for s, c in constants.items())
    print(f"theta_{p} * theta_{r} = {terms}")

# Before completion, the answer depends on where we look.
try:
    theta_product(gps_diagram(order=3), (1, 0), (0, 1))
except InconsistentDiagramError as exc:
    print("\nwithout the diagonal ray:", exc)
