"""Integer linear algebra on small dense matrices.

Matrices are tuples of row tuples holding Python ints (or Fractions where
noted). Everything here is exact; numpy is deliberately avoided because
object arrays buy nothing over plain lists at these sizes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

INFINITE = math.inf

Matrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> tuple:
    if not m:
        return ()
    return tuple(zip(*m))


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def inverse_2x2(m: Sequence[Sequence]) -> tuple:
    """Exact inverse of a 2x2 matrix; integral when the determinant is a unit."""
    (a, b), (c, d) = m
    det = a * d - b * c
    if det == 0:
        raise ZeroDivisionError("singular 2x2 matrix")
    inv = ((Fraction(d, 1) / det, Fraction(-b, 1) / det),
           (Fraction(-c, 1) / det, Fraction(a, 1) / det))
    return integralize(inv)


def integralize(m: Sequence[Sequence]) -> tuple:
    """Convert Fraction entries with denominator 1 to int; leave others alone."""
    out = []
    for row in m:
        out.append(tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in row))
    return tuple(out)


def is_integral(m: Sequence[Sequence]) -> bool:
    return all(Fraction(x).denominator == 1 for row in m for x in row)


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Smith normal form ``U @ m @ V = D``.

    Returns ``(diag, U, V)`` where ``diag`` lists the elementary divisors
    d_1 | d_2 | ... (length ``min(rows, cols)``, zeros last) and ``U``, ``V``
    are unimodular.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(map(int, r)) for r in m]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):  # col_dst -= q * col_src
        for r in a:
            r[dst] -= q * r[src]
        for r in v:
            r[dst] -= q * r[src]

    t = 0
    while t < min(rows, cols):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, q)
                    if a[t][j]:
                        done = False
            if done:
                # enforce divisibility of the remaining block by the pivot
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, -1)
                continue
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols)
                       if a[i][j] and (i == t or j == t)]
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    diag = [a[i][i] for i in range(min(rows, cols))]
    return diag, u, v


def cokernel_order(m: Sequence[Sequence[int]], torsion_only: bool = False):
    """Order of ``Z^rows / m(Z^cols)``, or of its torsion subgroup.

    Returns ``INFINITE`` when the cokernel has positive free rank and
    ``torsion_only`` is false.
    """
    rows = len(m)
    if rows == 0:
        return 1
    cols = len(m[0])
    if cols == 0:
        return 1 if torsion_only else INFINITE
    diag, _, _ = smith_normal_form(m)
    rank = sum(1 for d in diag if d)
    if rank < rows and not torsion_only:
        return INFINITE
    order = 1
    for d in diag:
        if d:
            order *= d
    return order


def integer_kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[tuple[int, ...]]:
    """A Z-basis of ``{x in Z^cols : m x = 0}``."""
    if not m:
        n = ncols or 0
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    cols = len(m[0])
    diag, _, v = smith_normal_form(m)
    rank = sum(1 for d in diag if d)
    return [tuple(v[i][j] for i in range(cols)) for j in range(rank, cols)]


def rational_rank(m: Sequence[Sequence]) -> int:
    """Rank over Q via fraction-exact Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    if not a or not a[0]:
        return 0
    rank = 0
    cols = len(a[0])
    for c in range(cols):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c] != 0:
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


def rational_nullspace(m: Sequence[Sequence], ncols: int) -> list[tuple[Fraction, ...]]:
    """A Q-basis of ``{x : m x = 0}`` from the reduced row echelon form."""
    a = [[Fraction(x) for x in row] for row in m if any(row)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -a[i][f]
        basis.append(tuple(v))
    return basis


def clear_denominators(v: Sequence) -> tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


def saturated_lattice(vectors: Sequence[Sequence], dim: int) -> list[tuple[int, ...]]:
    """Z-basis of ``span_Q(vectors) ∩ Z^dim``."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    annihilator = [clear_denominators(y) for y in rational_nullspace(vecs, dim)]
    if not annihilator:
        return [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    return integer_kernel(annihilator)


def positive_kernel_point(m: Sequence[Sequence], ncols: int) -> tuple[Fraction, ...] | None:
    """Some ``x`` with ``m x = 0`` and every ``x_i >= 1``, or None.

    Exact phase-one simplex with Bland's rule on ``m y = -m 1``, ``y >= 0``.
    """
    rows = [[Fraction(x) for x in row] for row in m if any(row)]
    if ncols == 0:
        return ()
    if not rows:
        return tuple(Fraction(1) for _ in range(ncols))
    b = [-sum(row) for row in rows]
    for i in range(len(rows)):
        if b[i] < 0:
            rows[i] = [-x for x in rows[i]]
            b[i] = -b[i]
    nr = len(rows)
    # tableau columns: y (ncols), artificials (nr); basis starts with artificials
    tab = [rows[i] + [Fraction(int(i == j)) for j in range(nr)] + [b[i]] for i in range(nr)]
    basis = [ncols + i for i in range(nr)]
    total = ncols + nr
    cost = [Fraction(0)] * ncols + [Fraction(1)] * nr
    while True:
        # reduced costs for phase one objective
        red = []
        for j in range(total):
            z = sum(cost[basis[i]] * tab[i][j] for i in range(nr))
            red.append(cost[j] - z)
        enter = next((j for j in range(total) if red[j] < 0), None)
        if enter is None:
            break
        ratios = [(tab[i][-1] / tab[i][enter], basis[i], i) for i in range(nr) if tab[i][enter] > 0]
        if not ratios:
            return None  # unbounded cannot happen for phase one, guard anyway
        _, _, leave = min(ratios)
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(nr):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        basis[leave] = enter
    objective = sum(tab[i][-1] for i in range(nr) if basis[i] >= ncols)
    if objective != 0:
        return None
    y = [Fraction(0)] * ncols
    for i, j in enumerate(basis):
        if j < ncols:
            y[j] = tab[i][-1]
    return tuple(Fraction(1) + v for v in y)
