"""Brute-force solver used to cross-check the continued-fraction path.

Only :func:`integer_nth_root` is shared with the main solver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import integer_nth_root
from .thue_core import SolutionTriple


@dataclass(frozen=True)
class OracleQuery:
    n: int
    m: int
    y_max: int

    def __post_init__(self):
        if self.y_max < 1:
            raise ValueError(f"y_max must be >= 1, got {self.y_max}")
        if self.n < 2:
            raise ValueError(f"exponent must be >= 2, got {self.n}")
        if self.m < 1:
            raise ValueError(f"coefficient m must be >= 1, got {self.m}")


def brute_solve(q: OracleQuery) -> list[SolutionTriple]:
    """Every (x, y) with 1 <= y <= y_max and x^n - m*y^n = +-1, ordered by y."""
    n, m = q.n, q.m
    hits = []
    for y in range(1, q.y_max + 1):
        base = m * y ** n
        for rhs in (-1, 1):
            x, exact = integer_nth_root(base + rhs, n)
            if exact and x >= 1:
                hits.append(SolutionTriple(n, m, x, y, rhs))
    return hits
