"""Fraction-free Gauss-Jordan elimination for exact rational systems.

Rows are scaled to integers on entry and kept primitive (content divided out)
after every combination, so entries stay small without ever forming a
fraction until the final back-substitution.
"""
from __future__ import annotations

import math

from .rationals import rational


def _integer_row(values):
    denom = 1
    for v in values:
        if not isinstance(v, int):
            denom = math.lcm(denom, int(v.denominator))
    return [int(v * denom) for v in values]


def _primitive(row):
    g = 0
    for v in row:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


class InconsistentSystem(ValueError):
    """A row reduced to ``0 = nonzero``."""


class IncrementalSolver:
    """Reduced row echelon form of ``[A | b]`` built one row at a time.

    :meth:`add_row` returns ``"pivot"`` (rank grew), ``"redundant"``
    (consistent combination of earlier rows) or ``"inconsistent"``.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = {}  # pivot column -> integer row of length ncols + 1

    @property
    def rank(self):
        return len(self.rows)

    def full_rank(self):
        return self.rank == self.ncols

    def reduce(self, coeffs, rhs=0):
        row = _integer_row(list(coeffs) + [rhs])
        for col, prow in self.rows.items():
            if row[col]:
                p, r = prow[col], row[col]
                row = _primitive([p * x - r * y for x, y in zip(row, prow)])
        return row

    def add_row(self, coeffs, rhs=0):
        if len(coeffs) != self.ncols:
            raise ValueError(f"row has {len(coeffs)} entries, expected {self.ncols}")
        row = self.reduce(coeffs, rhs)
        col = next((c for c in range(self.ncols) if row[c]), None)
        if col is None:
            return "inconsistent" if row[-1] else "redundant"
        if row[col] < 0:
            row = [-x for x in row]
        for other_col, prow in list(self.rows.items()):
            if prow[col]:
                p, r = row[col], prow[col]
                self.rows[other_col] = _primitive([p * x - r * y for x, y in zip(prow, row)])
        self.rows[col] = row
        return "pivot"

    def solution(self):
        """Unique solution; requires full column rank."""
        if not self.full_rank():
            raise ValueError(f"system has rank {self.rank} < {self.ncols}")
        out = []
        for col in range(self.ncols):
            row = self.rows[col]
            out.append(rational(row[-1], row[col]))
        return out


def rank(matrix):
    """Exact rank of a rational matrix given as a list of rows."""
    if not matrix:
        return 0
    solver = IncrementalSolver(len(matrix[0]))
    for row in matrix:
        solver.add_row(row)
    return solver.rank


def solve(matrix, rhs):
    """Unique exact solution of ``matrix @ x = rhs``.

    Raises :class:`InconsistentSystem` if there is none and ``ValueError`` if
    the solution is not unique.
    """
    solver = IncrementalSolver(len(matrix[0]))
    for row, b in zip(matrix, rhs):
        if solver.add_row(row, b) == "inconsistent":
            raise InconsistentSystem("system has no solution")
    return solver.solution()
