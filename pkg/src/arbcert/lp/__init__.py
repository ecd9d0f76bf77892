"""Exact-rational linear programming.

:func:`solve_lp` maximizes a linear objective over free variables subject to
``<=``, ``>=`` and ``=`` constraints with rational data.  It runs a two-phase
primal simplex with Bland's least-index rule on an integer (fraction-free)
tableau.  A compiled int64 kernel is used when it imports; any int64
overflow restarts the solve on Python integers, so results never depend on
which kernel ran.  Set ``ARBCERT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional, Sequence, Union

from ..errors import MalformedLP
from . import _kernel_py

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

if os.environ.get("ARBCERT_PURE_PYTHON"):
    _kernel_c = None

BACKEND = _kernel_c.NAME if _kernel_c is not None else _kernel_py.NAME

_INT64_HEADROOM = 1 << 62
RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    rel: str
    rhs: Fraction

    def holds(self, assignment: Mapping[str, Fraction]) -> bool:
        lhs = sum((Fraction(a) * assignment[v] for v, a in self.coeffs.items()), Fraction(0))
        if self.rel == "<=":
            return lhs <= self.rhs
        if self.rel == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple
    constraints: tuple
    objective: Mapping[str, Fraction]

    def value(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((Fraction(c) * assignment[v] for v, c in self.objective.items()), Fraction(0))

    def violated(self, assignment: Mapping[str, Fraction]) -> list:
        return [k for k, con in enumerate(self.constraints) if not con.holds(assignment)]


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    assignment: dict


@dataclass(frozen=True)
class Unbounded:
    """``point`` is feasible; ``point + s * ray`` stays feasible for all
    ``s >= 0`` and the objective grows along ``ray``."""

    point: dict
    ray: dict


LPResult = Union[Infeasible, Optimal, Unbounded]


@dataclass
class SolveStats:
    backend: str = ""
    pivots: int = 0
    fallbacks: int = 0
    extra: dict = field(default_factory=dict)


def make_lp(variables: Sequence[str], constraints, objective) -> LinearProgram:
    """Build a :class:`LinearProgram` from ``(coeffs, rel, rhs)`` triples."""
    cons = tuple(
        c if isinstance(c, Constraint)
        else Constraint({v: Fraction(a) for v, a in c[0].items()}, c[1], Fraction(c[2]))
        for c in constraints
    )
    return LinearProgram(tuple(variables), cons, {v: Fraction(a) for v, a in objective.items()})


def _validate(lp: LinearProgram):
    names = set(lp.variables)
    if len(names) != len(lp.variables):
        raise MalformedLP("duplicate variable names")
    for k, con in enumerate(lp.constraints):
        if con.rel not in RELATIONS:
            raise MalformedLP(f"constraint {k}: unknown relation {con.rel!r}")
        unknown = set(con.coeffs) - names
        if unknown:
            raise MalformedLP(f"constraint {k}: undeclared variables {sorted(unknown)}")
    unknown = set(lp.objective) - names
    if unknown:
        raise MalformedLP(f"objective: undeclared variables {sorted(unknown)}")


def _tableau(lp: LinearProgram):
    """Integer two-objective tableau with slack/artificial starting basis."""
    index = {v: k for k, v in enumerate(lp.variables)}
    nsplit = 2 * len(lp.variables)
    rows, rhs, slack_sign = [], [], []
    for con in lp.constraints:
        sign = -1 if con.rel == ">=" else 1
        den = lcm(con.rhs.denominator, *(Fraction(a).denominator for a in con.coeffs.values()))
        row = [0] * nsplit
        for v, a in con.coeffs.items():
            a = Fraction(a) * den * sign
            k = index[v]
            row[2 * k] += a.numerator
            row[2 * k + 1] -= a.numerator
        b = (con.rhs * den * sign).numerator
        s = 0 if con.rel == "=" else 1
        if b < 0:
            row = [-a for a in row]
            b, s = -b, -s
        rows.append(row)
        rhs.append(b)
        slack_sign.append(s)

    m = len(rows)
    slack_rows = [i for i in range(m) if slack_sign[i] != 0]
    art_rows = [i for i in range(m) if slack_sign[i] != 1]
    nslack, nart = len(slack_rows), len(art_rows)
    first_art = nsplit + nslack
    ncols = first_art + nart

    cons = []
    basis = []
    slack_col = {i: nsplit + k for k, i in enumerate(slack_rows)}
    art_col = {i: first_art + k for k, i in enumerate(art_rows)}
    for i in range(m):
        full = rows[i] + [0] * (nslack + nart) + [rhs[i]]
        if i in slack_col:
            full[slack_col[i]] = slack_sign[i]
        if i in art_col:
            full[art_col[i]] = 1
            basis.append(art_col[i])
        else:
            basis.append(slack_col[i])
        cons.append(full)

    oden = lcm(1, *(Fraction(c).denominator for c in lp.objective.values()))
    obj2 = [0] * (ncols + 1)
    for v, c in lp.objective.items():
        c = (Fraction(c) * oden).numerator
        k = index[v]
        obj2[2 * k] -= c
        obj2[2 * k + 1] += c
    obj1 = [0] * (ncols + 1)
    for i in art_rows:
        for j, a in enumerate(cons[i]):
            obj1[j] -= a
    for i in art_rows:
        obj1[art_col[i]] = 0
    return [obj2, obj1] + cons, basis, first_art, oden


class _PyState:
    kernel = _kernel_py

    def __init__(self, M, basis):
        self.M = [list(r) for r in M]
        self.basis = list(basis)

    def entry(self, i, j):
        return self.M[i][j]

    def row(self, i):
        return self.M[i]

    def negate_row(self, i):
        self.M[i] = [-v for v in self.M[i]]

    def delete_row(self, i):
        del self.M[i]
        del self.basis[i - 2]

    @property
    def nrows(self):
        return len(self.M)


class _CState(_PyState):
    kernel = _kernel_c

    def __init__(self, M, basis):
        import numpy as np

        self.M = np.array(M, dtype=np.int64)
        self.basis = np.array(basis, dtype=np.int64)

    def entry(self, i, j):
        return int(self.M[i, j])

    def row(self, i):
        return [int(v) for v in self.M[i]]

    def negate_row(self, i):
        self.M[i] *= -1

    def delete_row(self, i):
        import numpy as np

        self.M = np.ascontiguousarray(np.delete(self.M, i, axis=0))
        self.basis = np.ascontiguousarray(np.delete(self.basis, i - 2))

    @property
    def nrows(self):
        return self.M.shape[0]


def _simplex(state, first_art, stats: SolveStats):
    """Two-phase driver.  Returns ``(status, col, det)`` with status one of
    ``"infeasible"``, ``"optimal"``, ``"unbounded"``."""
    k = state.kernel
    det = 1
    ncols = len(state.row(0)) - 1
    rhs = ncols
    if any(b >= first_art for b in state.basis):
        status, _, det, piv = k.run(state.M, state.basis, det, 1, ncols)
        stats.pivots += piv
        if status == k.OVERFLOW:
            raise OverflowError
        if state.entry(1, rhs) < 0:
            return "infeasible", -1, det
        i = 2
        while i < state.nrows:
            if state.basis[i - 2] >= first_art:
                j = next((j for j in range(first_art) if state.entry(i, j) != 0), None)
                if j is None:
                    state.delete_row(i)
                    continue
                if state.entry(i, j) < 0:
                    state.negate_row(i)
                det = k.pivot(state.M, state.basis, det, i, j)
                stats.pivots += 1
            i += 1
    status, col, det, piv = k.run(state.M, state.basis, det, 0, first_art)
    stats.pivots += piv
    if status == k.OVERFLOW:
        raise OverflowError
    return ("optimal" if status == k.OPTIMAL else "unbounded"), col, det


def _extract(lp, state, first_art, det, oden, status, col) -> LPResult:
    nvar = len(lp.variables)
    rhs = len(state.row(0)) - 1
    vals = [Fraction(0)] * first_art
    ray = [Fraction(0)] * first_art
    for i in range(2, state.nrows):
        b = int(state.basis[i - 2])
        if b < first_art:
            vals[b] = Fraction(state.entry(i, rhs), det)
            if status == "unbounded":
                ray[b] = -Fraction(state.entry(i, col), det)
    point = {v: vals[2 * k] - vals[2 * k + 1] for k, v in enumerate(lp.variables)}
    if status == "optimal":
        value = Fraction(state.entry(0, rhs), det * oden)
        return Optimal(value, point)
    ray[col] = Fraction(1)
    direction = {v: ray[2 * k] - ray[2 * k + 1] for k, v in enumerate(lp.variables)}
    return Unbounded(point, direction)


def solve_lp(lp: LinearProgram, backend: Optional[str] = None,
             stats: Optional[SolveStats] = None) -> LPResult:
    """Maximize ``lp.objective`` exactly.

    ``backend`` is ``"cython"``, ``"python"`` or ``None`` for the fastest
    available.
    """
    _validate(lp)
    if stats is None:
        stats = SolveStats()
    M, basis, first_art, oden = _tableau(lp)

    use_c = _kernel_c is not None and backend != "python"
    if backend == "cython" and _kernel_c is None:
        raise RuntimeError("compiled simplex kernel is not available")
    if use_c and max((abs(v) for r in M for v in r), default=0) >= _INT64_HEADROOM:
        use_c = False
    state = None
    if use_c:
        state = _CState(M, basis)
        try:
            status, col, det = _simplex(state, first_art, stats)
            stats.backend = _kernel_c.NAME
        except OverflowError:
            stats.fallbacks += 1
            state = None
    if state is None:
        state = _PyState(M, basis)
        status, col, det = _simplex(state, first_art, stats)
        stats.backend = _kernel_py.NAME
    if status == "infeasible":
        return Infeasible()
    return _extract(lp, state, first_art, det, oden, status, col)


__all__ = [
    "BACKEND", "Constraint", "Infeasible", "LinearProgram", "LPResult", "Optimal",
    "SolveStats", "Unbounded", "make_lp", "solve_lp",
]
