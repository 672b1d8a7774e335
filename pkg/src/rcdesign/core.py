"""Arrays, structural validation, intersection profiles and the design taxonomy.

The central object is a binary, equireplicate r x c array on v symbols.
Everything downstream (canonical forms, enumeration, constructions) consumes
and produces these arrays.  Values are immutable and hashable so they can be
shared freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

# Proper-variant labels.  "SA_T" / "MA_T" are the transposed families; "none"
# means no intersection property holds.
LABELS = ("TA", "DA", "SA", "SA_T", "MA", "MA_T", "AO", "none")

DISPLAY_LABEL = {
    "TA": "TA",
    "DA": "DA",
    "SA": "SA",
    "SA_T": "SA^T",
    "MA": "MA",
    "MA_T": "MA^T",
    "AO": "AO",
    "none": "none",
}


class StructuralError(ValueError):
    """Raised when a grid is not even a well-formed array (ragged rows,
    symbol indices out of range, empty dimensions)."""


@dataclass(frozen=True)
class RowColumnArray:
    """An r x c grid of symbol indices in 0..v-1, row-major.

    Construction checks structure only (shape, symbol range).  Binarity and
    equireplication are checked by :func:`validate`, so invalid candidates
    can still be represented and reported on.
    """

    v: int
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.v <= 0:
            raise StructuralError("v must be positive")
        if not self.cells or not self.cells[0]:
            raise StructuralError("array must have at least one row and column")
        width = len(self.cells[0])
        for row in self.cells:
            if len(row) != width:
                raise StructuralError("ragged rows: dimension mismatch")
            for s in row:
                if not (0 <= s < self.v):
                    raise StructuralError(f"symbol {s} out of range 0..{self.v - 1}")

    @property
    def r(self) -> int:
        return len(self.cells)

    @property
    def c(self) -> int:
        return len(self.cells[0])

    @property
    def e(self) -> Fraction:
        """Replication number rc/v as an exact rational."""
        return Fraction(self.r * self.c, self.v)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.uint8)

    def row_set(self, i: int) -> frozenset:
        return frozenset(self.cells[i])

    def col_set(self, j: int) -> frozenset:
        return frozenset(row[j] for row in self.cells)

    def __str__(self) -> str:
        return format_array(self)


def from_matrix(mat, v: int) -> RowColumnArray:
    """Build an array from any nested sequence / numpy matrix."""
    cells = tuple(tuple(int(x) for x in row) for row in mat)
    return RowColumnArray(v=v, cells=cells)


@dataclass(frozen=True)
class Violation:
    kind: str  # repeat-in-row | repeat-in-column | non-equireplicate
    where: int  # row/column index, or symbol for replication faults
    symbol: int
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


def validate(a: RowColumnArray) -> ValidationReport:
    """Check binarity and equireplication with e = rc/v.

    A non-integral rc/v is reported as a non-equireplicate verdict, not an
    exception: such grids are representable, they just cannot be valid.
    """
    violations = []
    for i, row in enumerate(a.cells):
        seen = set()
        for s in row:
            if s in seen:
                violations.append(Violation("repeat-in-row", i, s))
            seen.add(s)
    for j in range(a.c):
        seen = set()
        for i in range(a.r):
            s = a.cells[i][j]
            if s in seen:
                violations.append(Violation("repeat-in-column", j, s))
            seen.add(s)
    counts = [0] * a.v
    for row in a.cells:
        for s in row:
            counts[s] += 1
    e = a.e
    if e.denominator != 1:
        violations.append(
            Violation("non-equireplicate", 0, -1, f"rc/v = {e} is not an integer")
        )
    else:
        for s, n in enumerate(counts):
            if n != e:
                violations.append(
                    Violation("non-equireplicate", n, s, f"symbol {s} occurs {n} times, expected {e}")
                )
    # dedupe repeated reports for the same fault
    uniq = tuple(dict.fromkeys(violations))
    return ValidationReport(ok=not uniq, violations=uniq)


@dataclass(frozen=True)
class IntersectionProfile:
    """Multisets of line-intersection sizes, plus their exact rational means.

    rr has C(r,2) entries, cc has C(c,2), rc has r*c entries.
    """

    rr: tuple[int, ...]
    cc: tuple[int, ...]
    rc: tuple[int, ...]

    @property
    def mean_rr(self) -> Fraction:
        return Fraction(sum(self.rr), len(self.rr)) if self.rr else Fraction(0)

    @property
    def mean_cc(self) -> Fraction:
        return Fraction(sum(self.cc), len(self.cc)) if self.cc else Fraction(0)

    @property
    def mean_rc(self) -> Fraction:
        return Fraction(sum(self.rc), len(self.rc))

    def constant(self, family: str):
        """Return the constant intersection size of a family, or None."""
        ms = getattr(self, family)
        if ms and all(x == ms[0] for x in ms):
            return ms[0]
        # a single-line family (r or c == 1) has an empty pair multiset and
        # counts as trivially constant with undefined value
        if not ms:
            return 0
        return None


def intersections(a: RowColumnArray) -> IntersectionProfile:
    rep = validate(a)
    if not rep.ok:
        raise ValueError(f"array is not a valid row-column design: {rep.violations[0]}")
    rows = [a.row_set(i) for i in range(a.r)]
    cols = [a.col_set(j) for j in range(a.c)]
    rr = tuple(
        sorted(len(rows[i] & rows[k]) for i in range(a.r) for k in range(i + 1, a.r))
    )
    cc = tuple(
        sorted(len(cols[j] & cols[k]) for j in range(a.c) for k in range(j + 1, a.c))
    )
    rc = tuple(sorted(len(rows[i] & cols[j]) for i in range(a.r) for j in range(a.c)))
    return IntersectionProfile(rr=rr, cc=cc, rc=rc)


@dataclass(frozen=True)
class DesignClassification:
    rr_constant: int | None
    cc_constant: int | None
    rc_constant: int | None
    label: str
    connected_rows: bool
    connected_cols: bool

    @property
    def has_rr(self) -> bool:
        return self.rr_constant is not None

    @property
    def has_cc(self) -> bool:
        return self.cc_constant is not None

    @property
    def has_rc(self) -> bool:
        return self.rc_constant is not None


def proper_label(rr: bool, cc: bool, rc: bool) -> str:
    """Map the three constancy flags to the proper-variant taxonomy."""
    if rr and cc and rc:
        return "TA"
    if rr and cc:
        return "DA"
    if rr and rc:
        return "SA"
    if cc and rc:
        return "SA_T"
    if rc:
        return "AO"
    if cc:
        return "MA"
    if rr:
        return "MA_T"
    return "none"


def classify(a: RowColumnArray) -> DesignClassification:
    """Classify a valid array by which intersection properties hold.

    All three multisets are computed even when one would suffice, so the
    report is uniform and auditable.
    """
    prof = intersections(a)
    rr = prof.constant("rr")
    cc = prof.constant("cc")
    rc = prof.constant("rc")
    return DesignClassification(
        rr_constant=rr,
        cc_constant=cc,
        rc_constant=rc,
        label=proper_label(rr is not None, cc is not None, rc is not None),
        connected_rows=connectivity(a, "rows"),
        connected_cols=connectivity(a, "columns"),
    )


def transpose(a: RowColumnArray) -> RowColumnArray:
    cells = tuple(tuple(a.cells[i][j] for i in range(a.r)) for j in range(a.c))
    return RowColumnArray(v=a.v, cells=cells)


def connectivity(a: RowColumnArray, axis: str) -> bool:
    """True iff the bipartite incidence graph lines-vs-symbols is connected.

    axis selects whether lines are rows or columns.  Symbols that never occur
    count as isolated vertices (disconnected) only if v exceeds the symbols
    actually used; for valid equireplicate arrays every symbol occurs.
    """
    if axis not in ("rows", "columns"):
        raise ValueError("axis must be 'rows' or 'columns'")
    if axis == "rows":
        lines = [a.row_set(i) for i in range(a.r)]
    else:
        lines = [a.col_set(j) for j in range(a.c)]
    n_lines = len(lines)
    # BFS over the union graph: line nodes 0..n_lines-1, symbol nodes offset
    sym_to_lines: dict[int, list[int]] = {}
    for li, line in enumerate(lines):
        for s in line:
            sym_to_lines.setdefault(s, []).append(li)
    seen_lines = {0}
    seen_syms = set()
    frontier = [0]
    while frontier:
        nxt = []
        for li in frontier:
            for s in lines[li]:
                if s not in seen_syms:
                    seen_syms.add(s)
                    for lk in sym_to_lines[s]:
                        if lk not in seen_lines:
                            seen_lines.add(lk)
                            nxt.append(lk)
        frontier = nxt
    return len(seen_lines) == n_lines and len(seen_syms) == len(sym_to_lines)


# ---------------------------------------------------------------------------
# Canonical text format: header "v r c", then r lines of c space-separated
# symbol indices.  Blank line separates arrays in a list file.  ASCII decimal,
# LF endings, bit-exact.
# ---------------------------------------------------------------------------


def format_array(a: RowColumnArray, tag: str = "") -> str:
    head = f"{tag} {a.v} {a.r} {a.c}" if tag else f"{a.v} {a.r} {a.c}"
    lines = [head]
    lines.extend(" ".join(str(s) for s in row) for row in a.cells)
    return "\n".join(lines) + "\n"


def parse_array(text: str) -> tuple[RowColumnArray, str]:
    """Parse one array block; returns (array, tag) where tag may be ''."""
    lines = [ln for ln in text.strip().split("\n")]
    head = lines[0].split()
    tag = ""
    if head and not head[0].lstrip("-").isdigit():
        tag = head[0]
        head = head[1:]
    if len(head) != 3:
        raise StructuralError(f"bad header: {lines[0]!r}")
    v, r, c = (int(x) for x in head)
    if len(lines) != 1 + r:
        raise StructuralError(f"expected {r} rows, got {len(lines) - 1}")
    cells = []
    for ln in lines[1:]:
        row = [int(x) for x in ln.split()]
        if len(row) != c:
            raise StructuralError(f"expected {c} entries per row: {ln!r}")
        cells.append(tuple(row))
    return RowColumnArray(v=v, cells=tuple(cells)), tag


def format_array_list(arrays: Iterable[RowColumnArray], tag: str = "") -> str:
    return "\n".join(format_array(a, tag=tag) for a in arrays)


def parse_array_list(text: str) -> list[RowColumnArray]:
    blocks = [b for b in text.split("\n\n") if b.strip()]
    return [parse_array(b)[0] for b in blocks]


def isotope(
    a: RowColumnArray,
    row_perm: Sequence[int],
    col_perm: Sequence[int],
    sym_perm: Sequence[int],
) -> RowColumnArray:
    """Apply an isotopism: B[i][j] = sym_perm[A[row_perm[i]][col_perm[j]]]."""
    cells = tuple(
        tuple(sym_perm[a.cells[row_perm[i]][col_perm[j]]] for j in range(a.c))
        for i in range(a.r)
    )
    return RowColumnArray(v=a.v, cells=cells)


def iter_rows_symbols(a: RowColumnArray) -> Iterator[tuple[int, int, int]]:
    for i, row in enumerate(a.cells):
        for j, s in enumerate(row):
            yield i, j, s
