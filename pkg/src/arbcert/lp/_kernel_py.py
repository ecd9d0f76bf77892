"""Fraction-free simplex kernel on Python integers.

Tableau rows 0 and 1 are objective rows (reduced costs, right-hand side
last), rows 2.. are constraints.  The true tableau is ``M / det``; basic
columns hold ``det`` on their row and zero elsewhere.  Pivoting keeps
every entry integral (each division below is exact).

This module is the reference implementation; the compiled kernel must
produce identical pivots.
"""

OPTIMAL = 0
UNBOUNDED = 1
OVERFLOW = 2

NAME = "python"


def pivot(M, basis, det, r, c):
    p = M[r][c]
    prow = M[r]
    for i, row in enumerate(M):
        if i == r:
            continue
        f = row[c]
        if f:
            M[i] = [(v * p - f * w) // det for v, w in zip(row, prow)]
        elif p != det:
            M[i] = [v * p // det for v in row]
    basis[r - 2] = c
    return p


def run(M, basis, det, obj, nenter):
    """Bland's-rule primal simplex on objective row ``obj``.

    Returns ``(status, column, det, pivots)``; ``column`` is the entering
    column that proved unboundedness.
    """
    rhs = len(M[0]) - 1
    m = len(M)
    pivots = 0
    while True:
        orow = M[obj]
        c = -1
        for j in range(nenter):
            if orow[j] < 0:
                c = j
                break
        if c < 0:
            return OPTIMAL, -1, det, pivots
        r = -1
        bn = bd = 0
        for i in range(2, m):
            a = M[i][c]
            if a > 0:
                b = M[i][rhs]
                if r < 0:
                    r, bn, bd = i, b, a
                    continue
                lhs = b * bd
                rhs_ = bn * a
                if lhs < rhs_ or (lhs == rhs_ and basis[i - 2] < basis[r - 2]):
                    r, bn, bd = i, b, a
        if r < 0:
            return UNBOUNDED, c, det, pivots
        det = pivot(M, basis, det, r, c)
        pivots += 1
