"""Exact sparse linear algebra over QQ (thin layer over sympy's DomainMatrix)."""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix


def _q(c):
    if isinstance(c, Fraction):
        return QQ(c.numerator, c.denominator)
    return QQ(c)


def solve_columns(columns: Sequence[Mapping[Hashable, object]], rhs: Mapping[Hashable, object]):
    """Solve ``sum_j u_j * columns[j] == rhs`` for rational ``u``.

    Columns and ``rhs`` are sparse vectors keyed by arbitrary row labels.
    Returns ``{j: value}`` for the nonzero entries of the particular solution
    whose free variables are zero (pivots are taken leftmost, so earlier
    columns are preferred), or ``None`` if the system is inconsistent.
    """
    rows: dict[Hashable, int] = {}
    data: dict[int, dict[int, object]] = {}
    for j, col in enumerate(columns):
        for key, c in col.items():
            if not c:
                continue
            i = rows.setdefault(key, len(rows))
            data.setdefault(i, {})[j] = _q(c)
    ncols = len(columns)
    for key, c in rhs.items():
        if not c:
            continue
        i = rows.setdefault(key, len(rows))
        data.setdefault(i, {})[ncols] = _q(c)
    if not data:
        return {}
    M = DomainMatrix(data, (len(rows), ncols + 1), QQ)
    reduced, pivots = M.rref()
    if pivots and pivots[-1] == ncols:
        return None
    rep = reduced.rep.to_sdm()
    sol = {}
    for r, pc in enumerate(pivots):
        val = rep.get(r, {}).get(ncols)
        if val:
            sol[pc] = val
    return sol


def nullspace(rows: Sequence[Sequence[object]], ncols: int) -> list[list[Fraction]]:
    """Basis of the right null space of a dense rational matrix."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    M = DomainMatrix([[_q(c) for c in row] for row in rows], (len(rows), ncols), QQ)
    basis = M.nullspace().to_Matrix()
    return [[Fraction(int(v.p), int(v.q)) for v in basis.row(i)] for i in range(basis.rows)]


def solve_dense(A: Sequence[Sequence[object]], b: Sequence[object]):
    """Unique or particular solution of ``A u = b``; ``None`` if inconsistent."""
    cols = [{i: A[i][j] for i in range(len(A))} for j in range(len(A[0]))]
    sol = solve_columns(cols, {i: v for i, v in enumerate(b)})
    if sol is None:
        return None
    return [Fraction(int(sol[j].numerator), int(sol[j].denominator)) if j in sol else Fraction(0) for j in range(len(cols))]
