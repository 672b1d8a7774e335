"""Bridges to Youden rectangles and binary pseudo-Youden designs.

A (n, k, lambda) Youden rectangle is a binary k x n array on n symbols whose
columns pairwise share lambda = k(k-1)/(n-1) symbols.  Removing one column
together with its symbols and exchanging the roles of columns and symbols
yields a mono array on n-1 symbols; we measure how much of each design
family is reachable that way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .canonical import canonical_key
from .core import RowColumnArray, classify, from_matrix, validate
from .enumeration import (
    EnumerationReport,
    SearchTarget,
    cc_target,
    enumerate_designs,
)

YOUDEN_ENUM_MAX_N = 8


class YoudenError(ValueError):
    pass


@dataclass(frozen=True)
class YoudenRectangle:
    array: RowColumnArray  # k x n on n symbols

    @property
    def n(self) -> int:
        return self.array.c

    @property
    def k(self) -> int:
        return self.array.r

    @property
    def lam(self) -> int:
        lam = Fraction(self.k * (self.k - 1), self.n - 1)
        if lam.denominator != 1:
            raise YoudenError("k(k-1)/(n-1) is not an integer")
        return int(lam)

    def check(self) -> None:
        a = self.array
        if a.v != a.c:
            raise YoudenError("need an array on n symbols with n columns")
        rep = validate(a)
        if not rep.ok:
            raise YoudenError(f"not binary/equireplicate: {rep.violations[0]}")
        lam = self.lam
        cols = [a.col_set(j) for j in range(a.c)]
        for j in range(a.c):
            for y in range(j + 1, a.c):
                if len(cols[j] & cols[y]) != lam:
                    raise YoudenError(f"columns {j},{y} share {len(cols[j] & cols[y])} != {lam}")


def youden_target(n: int, k: int) -> SearchTarget:
    lam = Fraction(k * (k - 1), n - 1)
    if lam.denominator != 1:
        raise YoudenError(f"no ({n},{k}) Youden rectangle: lambda = {lam}")
    return SearchTarget(v=n, r=k, c=n, mode="cc", lam_cc=int(lam))


def enumerate_youden(n: int, k: int, budget_n: int = YOUDEN_ENUM_MAX_N) -> list[YoudenRectangle]:
    """All (n, k) Youden rectangles up to isotopism (tiny n only).

    The same column-by-column machinery applies: rows of a binary k x n
    array on n symbols are automatically permutations, and the column-pair
    constant is the Youden lambda.
    """
    if n > budget_n:
        raise YoudenError(f"n = {n} beyond the desk budget {budget_n}")
    lam = Fraction(k * (k - 1), n - 1)
    if lam.denominator != 1:
        return []
    report = enumerate_designs(youden_target(n, k))
    out = []
    for reps in report.representatives.values():
        for a in reps:
            yr = YoudenRectangle(a)
            yr.check()
            out.append(yr)
    return sorted(out, key=lambda y: y.array.cells)


def youden_to_mono(y: YoudenRectangle, col_index: int) -> RowColumnArray:
    """Delete one column and its symbols, then swap column/symbol roles.

    Output: n-1 symbols (the surviving original columns), k rows, n-k
    columns (the surviving original symbols); always a mono array with
    column constant lambda.
    """
    y.check()
    a = y.array
    n, k = y.n, y.k
    if not (0 <= col_index < n):
        raise YoudenError("column index out of range")
    removed = a.col_set(col_index)
    survivors = sorted(set(range(n)) - removed)  # old symbols -> new columns
    sym_of_col = {old_j: t for t, old_j in enumerate(j for j in range(n) if j != col_index)}
    col_of_sym = {s: t for t, s in enumerate(survivors)}
    grid = [[None] * (n - k) for _ in range(k)]
    for i in range(k):
        for j in range(n):
            if j == col_index:
                continue
            s = a.cells[i][j]
            if s in removed:
                continue
            grid[i][col_of_sym[s]] = sym_of_col[j]
    for row in grid:
        if any(x is None for x in row):
            raise YoudenError("transformation left a hole; input is not a Youden rectangle")
    out = from_matrix(grid, n - 1)
    cl = classify(out)
    if cl.cc_constant != y.lam:
        raise YoudenError("output lost the constant column property")
    return out


def youden_coverage(n: int, k: int) -> dict:
    """Proportion of design classes reachable from (n,k) Youden rectangles.

    Numerators count distinct isotopism classes over all rectangles and all
    removed columns; denominators come from complete enumeration at
    (n-1, k, n-k).
    """
    yrs = enumerate_youden(n, k)
    hit: dict[str, set] = {}
    for y in yrs:
        for j in range(n):
            arr = youden_to_mono(y, j)
            label = classify(arr).label
            hit.setdefault(label, set()).add(canonical_key(arr))
    base = enumerate_designs(cc_target(n - 1, k, n - k))
    out = {"yr_count": len(yrs), "params": (n - 1, k, n - k), "fractions": {}}
    for label in sorted(set(base.counts) | set(hit)):
        out["fractions"][label] = (len(hit.get(label, set())), base.counts.get(label, 0))
    return out


def is_pyd(a: RowColumnArray) -> bool:
    """True iff the 2r row and column blocks of a square array form a
    balanced incomplete block design (every symbol pair in equally many
    blocks)."""
    if a.r != a.c:
        raise YoudenError("the block design view needs a square array")
    rep = validate(a)
    if not rep.ok:
        raise ValueError(f"invalid array: {rep.violations[0]}")
    blocks = [a.row_set(i) for i in range(a.r)] + [a.col_set(j) for j in range(a.c)]
    counts: dict[tuple[int, int], int] = {}
    for b in blocks:
        bs = sorted(b)
        for t, s1 in enumerate(bs):
            for s2 in bs[t + 1 :]:
                counts[(s1, s2)] = counts.get((s1, s2), 0) + 1
    values = set(counts.values())
    n_pairs = a.v * (a.v - 1) // 2
    if len(counts) < n_pairs:
        # some pair never co-occurs; constant only if nothing co-occurs twice
        return not values or values == {0}
    return len(values) == 1


def pyd_subset(arrays: list[RowColumnArray]) -> list[RowColumnArray]:
    return [a for a in arrays if is_pyd(a)]
