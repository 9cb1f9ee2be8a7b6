"""
The exponential formula on a single line
========================================

Along a line through the origin, a wall-crossing function can be assembled
in two ways from the same coefficient table: by summing multinomial counts
of multisets of wall types (f_an) or by exponentiating the generating series
of the table (f_log). They always agree, and this script shows a few
coefficients of both.
"""

import random
from fractions import Fraction

from tropscatter.counts import build_f_an, build_f_log, multinomial_count, verify_exponential_formula
from tropscatter.scattering import CoefficientTable

line = (1, 1)
table = CoefficientTable({
    ((1, 1), 1, (1, 0)): Fraction(2),
    ((1, 1), 1, (0, 1)): Fraction(-1, 2),
    ((1, 1), 2, (1, 1)): Fraction(3),
})

print("f_an  =", build_f_an(table, line, 3))
print("f_log =", build_f_log(table, line, 3))

# One coefficient by hand: z^(-2,-2) t1 t2 arises from one copy of each
# degree-one entry, or from the single j = 2 entry.
print("\ncount at t1 t2 z^(-2,-2):", multinomial_count(table, line, (-2, -2), (1, 1)), "= 2 * (-1/2) + 3")

# A batch of random tables, checked structurally.
rng = random.Random(1)
agree = 0
for _ in range(50):
    entries = {}
    for _ in range(rng.randint(1, 4)):
        sign = rng.choice((1, -1))
        entries[((sign, sign), rng.randint(1, 2), (rng.randint(0, 2), rng.randint(1, 2)))] = Fraction(
            rng.randint(-3, 3), rng.choice((1, 2)))
    ok, _ = verify_exponential_formula(CoefficientTable(entries), line, 4, 2)
    agree += ok
print(f"\n{agree}/50 random tables satisfy f_an = f_log")
