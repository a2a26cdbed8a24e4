"""Exact two-phase simplex over the rationals with Bland's rule.

Standard form only: minimise ``c . x`` subject to ``A x = b`` and ``x >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import as_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        p = row[c]
        if p != 1:
            row[:] = [v / p for v in row]
            self.rhs[r] /= p
        for i, other in enumerate(self.rows):
            f = other[c]
            if i != r and f:
                other[:] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        red = list(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                red = [x - cb * y for x, y in zip(red, self.rows[r])]
        return red

    def run(self, cost: Sequence[Fraction], allowed: int) -> str:
        """Minimise over the first ``allowed`` columns; Bland's rule guarantees termination."""
        while True:
            red = self.reduced_costs(cost)
            entering = next((j for j in range(allowed) if red[j] < 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp(c: Sequence, a_eq: Sequence[Sequence], b_eq: Sequence) -> LPResult:
    cost = [as_fraction(v) for v in c]
    n = len(cost)
    rows = [[as_fraction(v) for v in r] for r in a_eq]
    rhs = [as_fraction(v) for v in b_eq]
    m = len(rows)
    if any(len(r) != n for r in rows) or len(rhs) != m:
        raise ValueError("inconsistent LP dimensions")
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    # phase I: one artificial per row
    full = [r + [Fraction(int(i == j)) for j in range(m)] for i, r in enumerate(rows)]
    tab = _Tableau(full, rhs, [n + i for i in range(m)])
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1, n + m)
    if sum((tab.rhs[r] for r, b in enumerate(tab.basis) if b >= n), Fraction(0)) > 0:
        return LPResult(INFEASIBLE)
    # drive zero-level artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= n:
            j = next((j for j in range(n) if tab.rows[r][j]), None)
            if j is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, j)
        r += 1
    tab.rows = [row[:n] for row in tab.rows]
    status = tab.run(cost, n)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for r, b in enumerate(tab.basis):
        x[b] = tab.rhs[r]
    value = sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0))
    return LPResult(OPTIMAL, tuple(x), value)


def conic_combination(generators: Sequence[Sequence], target: Sequence) -> tuple[Fraction, ...] | None:
    """Nonnegative coefficients expressing ``target`` over ``generators``, or None."""
    target = [as_fraction(v) for v in target]
    if not generators:
        return tuple() if not any(target) else None
    a_eq = [[as_fraction(g[i]) for g in generators] for i in range(len(target))]
    res = solve_lp([0] * len(generators), a_eq, target)
    return res.x if res.status == OPTIMAL else None
