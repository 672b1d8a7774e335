"""Checked builders: symbol-blowup products and the half-primed cyclic square.

Each builder validates its own output through the classifier rather than
trusting the construction, so a wrong implementation fails loudly.
"""

from __future__ import annotations

import random

from .core import RowColumnArray, classify, connectivity, from_matrix, validate
from .params import derive


class ConstructionError(ValueError):
    pass


def cyclic_latin_square(n: int) -> RowColumnArray:
    """Group table of the cyclic group: cell (i, j) = (i + j) mod n."""
    if n < 1:
        raise ConstructionError("order must be positive")
    return from_matrix([[(i + j) % n for j in range(n)] for i in range(n)], n)


def latin_rectangle(n_symbols: int, n_rows: int, n_cols: int | None = None) -> RowColumnArray:
    """First n_rows rows (and optionally n_cols columns) of the cyclic square."""
    if n_rows > n_symbols:
        raise ConstructionError("a Latin rectangle needs n_rows <= n_symbols")
    if n_cols is None:
        n_cols = n_symbols
    if n_cols > n_symbols:
        raise ConstructionError("n_cols cannot exceed the symbol count")
    return from_matrix(
        [[(i + j) % n_symbols for j in range(n_cols)] for i in range(n_rows)],
        n_symbols,
    )


def _require(cond: bool, msg: str):
    if not cond:
        raise ConstructionError(msg)


def sesqui_product(
    S: RowColumnArray,
    m: int,
    orderings: dict[tuple[int, int], tuple[int, ...]] | None = None,
) -> RowColumnArray:
    """Blow each symbol of a sesqui array up into a horizontal strip of m
    fresh symbols, giving an r x mc sesqui array on mv symbols.

    Fresh symbols for source symbol s are the block {m*s, ..., m*s + m - 1}.
    The canonical ordering writes each block in the same (ascending) order at
    every occurrence; `orderings` may override single occurrences, keyed by
    (row, col) of the source cell, with a permutation of range(m).
    """
    _require(m >= 1, "multiplier must be >= 1")
    cl = classify(S)
    _require(cl.has_rr and cl.has_rc, "base array must satisfy both the row-pair "
             "and row-column intersection properties")
    out = []
    for i in range(S.r):
        row = []
        for j in range(S.c):
            s = S.cells[i][j]
            order = orderings.get((i, j)) if orderings else None
            if order is None:
                order = tuple(range(m))
            _require(sorted(order) == list(range(m)), f"ordering at {(i, j)} is not a permutation")
            row.extend(m * s + t for t in order)
        out.append(row)
    arr = from_matrix(out, m * S.v)
    rep = validate(arr)
    if not rep.ok:
        raise ConstructionError(f"product failed validation: {rep.violations[0]}")
    return arr


def sesqui_product_connected(
    S: RowColumnArray, m: int, seed: int = 0, max_tries: int = 2000
) -> RowColumnArray:
    """Best-effort variant with connected column design: retry random
    per-occurrence orderings until connectivity holds."""
    rng = random.Random(seed)
    for _ in range(max_tries):
        orderings = {}
        for i in range(S.r):
            for j in range(S.c):
                perm = list(range(m))
                rng.shuffle(perm)
                orderings[(i, j)] = tuple(perm)
        arr = sesqui_product(S, m, orderings)
        if connectivity(arr, "columns"):
            return arr
    raise ConstructionError(
        f"no connected ordering found within {max_tries} random tries"
    )


def _grid_product(S: RowColumnArray, T: RowColumnArray,
                  isotopes: list[RowColumnArray] | None) -> RowColumnArray:
    """Replace each symbol occurrence of S with a copy of T on fresh symbols."""
    a, b = T.r, T.c
    occurrence = 0
    out = [[0] * (S.c * b) for _ in range(S.r * a)]
    for i in range(S.r):
        for j in range(S.c):
            s = S.cells[i][j]
            copy = T if isotopes is None else isotopes[occurrence]
            if (copy.v, copy.r, copy.c) != (T.v, T.r, T.c):
                raise ConstructionError("per-occurrence isotopes must match T's shape")
            occurrence += 1
            for x in range(a):
                for y in range(b):
                    out[i * a + x][j * b + y] = s * T.v + copy.cells[x][y]
    return from_matrix(out, S.v * T.v)


def mono_product(S: RowColumnArray, T: RowColumnArray,
                 isotopes: list[RowColumnArray] | None = None) -> RowColumnArray:
    """Product of two column-property arrays; result keeps constant column
    intersections on v_S * v_T symbols."""
    _require(classify(S).has_cc, "S must have constant column intersections")
    _require(classify(T).has_cc, "T must have constant column intersections")
    arr = _grid_product(S, T, isotopes)
    cl = classify(arr)
    if not cl.has_cc:
        raise ConstructionError("product lost the column property")
    return arr


def ao_product(S: RowColumnArray, T: RowColumnArray,
               isotopes: list[RowColumnArray] | None = None) -> RowColumnArray:
    """Product of two adjusted-orthogonal arrays; result keeps constant
    row-column intersections on v_S * v_T symbols."""
    _require(classify(S).has_rc, "S must be adjusted orthogonal")
    _require(classify(T).has_rc, "T must be adjusted orthogonal")
    arr = _grid_product(S, T, isotopes)
    cl = classify(arr)
    if not cl.has_rc:
        raise ConstructionError("product lost adjusted orthogonality")
    return arr


def _factor_for_product(v: int, r: int, c: int) -> tuple[int, int]:
    """Split v = m * n with m | r and n | c, maximizing min(m, n).

    A split always exists when v | rc: give each prime of v to the row side
    as far as r allows, the rest must fit the column side.
    """
    candidates = []
    for m in range(1, v + 1):
        if v % m == 0:
            n = v // m
            if r % m == 0 and c % n == 0:
                candidates.append((min(m, n), m, n))
    if not candidates:
        raise ConstructionError(f"no factorization v = m*n with m|r, n|c for ({v},{r},{c})")
    _, m, n = max(candidates)
    return m, n


def ao_for_params(v: int, r: int, c: int) -> RowColumnArray:
    """Adjusted-orthogonal array for any admissible (v, r, c), built as the
    product of an m x b and an a x n Latin rectangle where v = mn, r = am,
    c = bn."""
    p = derive(v, r, c)
    if p.e_int is None or not p.in_range:
        raise ConstructionError(f"({v},{r},{c}) is not admissible for AO arrays")
    m, n = _factor_for_product(v, r, c)
    a, b = r // m, c // n
    S = latin_rectangle(m, m, b)   # m x b on m symbols
    T = latin_rectangle(n, a, n)   # a x n on n symbols
    arr = ao_product(S, T)
    cl = classify(arr)
    if not cl.has_rc:
        raise ConstructionError("construction output failed the classifier")
    return arr


def half_latin_ao(k: int) -> RowColumnArray:
    """2k x 2k adjusted-orthogonal array on 4k symbols with constant k.

    Start from the cyclic square L[i][j] = (i+j) mod 2k and prime the k
    positions (i(k-1), ..., i(k-1)+k-1) mod 2k of row i; primed symbol s
    becomes s + 2k.  This position reading reproduces the published example
    verbatim.
    """
    if k < 1:
        raise ConstructionError("k must be >= 1")
    n = 2 * k
    grid = [[(i + j) % n for j in range(n)] for i in range(n)]
    for i in range(n):
        start = (i * (k - 1)) % n
        for t in range(k):
            j = (start + t) % n
            grid[i][j] += n
    arr = from_matrix(grid, 4 * k)
    cl = classify(arr)
    if cl.rc_constant != k:
        raise ConstructionError("half-primed square lost adjusted orthogonality")
    return arr
