"""
Cylinder types, splitting and spines
====================================

A tropical cylinder type has two legs reaching the boundary and one
contracted leg at a 3-valent vertex v_i. Cutting at v_i leaves two broken
line types. Their lattice multiplicities and the index of the glued
lattice satisfy k_tau N_tau = k_1 k_2 N_1 N_2.

The second half extends an infinitesimal spine to infinity across a
kinked ray, then refines the fan and subdivides a spine.
"""

from fractions import Fraction

from tropscatter.counts import assemble_cylinder_count, check_splitting_identity
from tropscatter.geometry import Seed, build_fan, star_subdivide
from tropscatter.tropical import (
    Spine, SpineEdge, SpineLeg, branched_cylinder_spine, branched_cylinder_type, decorate, developed_bend,
    extend_spine, spine_of_type, split_cylinder, subdivide_spine, validate_type,
)

# A family of cylinder types on the square fan: branches of weight c1 and c2
# come out of the origin along the axes and bend the two boundary legs.
print("c1 c2 beta gamma | k_tau k_1 k_2 | N_tau (N_1 = N_2 = 1)")
for args in [(1, 1, 1, 1), (2, 1, 1, 1), (2, 2, 1, 1), (3, 2, 1, 2), (2, 3, 2, 1)]:
    t = decorate(branched_cylinder_type(*args), rank=1)
    check = check_splitting_identity(t, 1, 1)
    print(f"{args} | {check.k_tau} {check.k_omega1} {check.k_omega2} | {check.n_tau}  holds={check.holds}")

t = decorate(branched_cylinder_type(2, 2, 1, 1), rank=1)
omega1, omega2, tau0 = split_cylinder(t)
print("\nomega1 legs:", [(leg.name, leg.slope) for leg in omega1.base.legs])
print("omega2 legs:", [(leg.name, leg.slope) for leg in omega2.base.legs])
print("valid broken lines:", validate_type(omega1.base, "broken_line").ok, validate_type(omega2.base, "broken_line").ok)
print("spine of the type has", spine_of_type(t.base).nvertices, "vertices")

spine = branched_cylinder_spine(2, 2, 1, 1)
print("assembled count with N_tau = 3:", assemble_cylinder_count(spine, [(t, 3)]))

# Extension across a ray with kink -1: the slope changes chart at the crossing
# but the developed bend there stays zero.
fan = build_fan(Seed(((1, 0), (0, 1), (-1, 0), (0, -1)), (-1, 0, 0, 0)))
s = Spine(fan, ((Fraction(2), Fraction(1)), (Fraction(1), Fraction(2))), (0, 0), (SpineEdge(0, 1, (-1, 1), 0, 1),),
          (SpineLeg("L1", 0, (1, -2), 0, Fraction(1, 4)), SpineLeg("L2", 1, (-1, 1), 0, Fraction(1, 2)),
           SpineLeg("Li", 1, (0, 0), 0)))
ext = extend_spine(s)
print("\nextended spine vertices:")
for v, (p, c) in enumerate(zip(ext.positions, ext.chambers)):
    bend = developed_bend(ext, v)
    print(f"  {v}: ({p[0]}, {p[1]}) in chamber {c}, valence {ext.valence(v)}, bend {bend}")

# Star subdivision at (1,1) cuts the edges of a spine that cross the new ray.
# With gamma = 2 the contracted-leg vertex sits at (1, 2), off the diagonal.
spine = branched_cylinder_spine(2, 1, 1, 2)
fine = star_subdivide(spine.fan, (1, 1))
sub = subdivide_spine(spine, spine.fan, fine)
new = [f"({p[0]}, {p[1]})" for p in sub.positions[len(spine.positions):]]
print("\nsubdivided spine has", len(sub.positions), "vertices; inserted:", ", ".join(new))
