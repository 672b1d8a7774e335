"""Canonical forms under isotopism, autotopism orders, trisotopism classes.

Two arrays are isotopic when a row permutation, a column permutation and a
symbol permutation carry one to the other.  The canonical representative of a
class is the isotope whose row-major symbol sequence is lexicographically
minimal, with symbols relabelled in first occurrence order along the scan.
The autotopism group order falls out of the same search as a byproduct.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RowColumnArray, from_matrix, transpose, validate


@dataclass(frozen=True)
class CanonicalForm:
    array: RowColumnArray
    aut_order: int

    @property
    def key(self) -> tuple[int, ...]:
        return tuple(s for row in self.array.cells for s in row)


def canonical(a: RowColumnArray) -> CanonicalForm:
    """Lexicographically minimal isotope plus autotopism group order.

    The column permutations are enumerated explicitly, so cost grows with c!;
    practical up to c = 9 or so.  All full enumeration work stays well below
    that.
    """
    rep = validate(a)
    if not rep.ok:
        raise ValueError(f"cannot canonicalize an invalid array: {rep.violations[0]}")
    mat = a.to_numpy()
    perms = _kernels.perm_table(a.c)
    best = np.empty(a.r * a.c, np.uint8)
    aut = int(_kernels.canon_with_aut(mat, a.v, perms, best))
    arr = from_matrix(best.reshape(a.r, a.c), a.v)
    return CanonicalForm(array=arr, aut_order=aut)


def canonical_key(a: RowColumnArray) -> tuple[int, ...]:
    return canonical(a).key


def is_isotopic(a: RowColumnArray, b: RowColumnArray) -> bool:
    """True iff the canonical forms coincide.

    Arrays with different shape or symbol count are non-isotopic by
    definition (documented false, not an error).
    """
    if (a.v, a.r, a.c) != (b.v, b.r, b.c):
        return False
    return canonical(a).array == canonical(b).array


@dataclass(frozen=True)
class TrisotopismClass:
    representative: RowColumnArray
    self_transpose: bool
    aut_order: int

    @property
    def autotrisotopism_order(self) -> int:
        """Stabilizer order in the transpose-extended group: doubles for
        classes isotopic to their own transpose."""
        return 2 * self.aut_order if self.self_transpose else self.aut_order


def trisotopic_classes(arrays: list[RowColumnArray]) -> list[TrisotopismClass]:
    """Merge pairwise non-isotopic square arrays under isotopism + transpose.

    Input arrays must be square and pairwise non-isotopic (e.g. enumeration
    output).  Returns one entry per trisotopism class.
    """
    for a in arrays:
        if a.r != a.c:
            raise ValueError("trisotopism requires square arrays")
    canons = [canonical(a) for a in arrays]
    by_key = {cf.key: i for i, cf in enumerate(canons)}
    if len(by_key) != len(arrays):
        raise ValueError("input arrays are not pairwise non-isotopic")
    classes: list[TrisotopismClass] = []
    seen: set[int] = set()
    for i, cf in enumerate(canons):
        if i in seen:
            continue
        seen.add(i)
        tkey = canonical(transpose(cf.array)).key
        if tkey == cf.key:
            classes.append(
                TrisotopismClass(representative=cf.array, self_transpose=True, aut_order=cf.aut_order)
            )
        else:
            partner = by_key.get(tkey)
            if partner is None:
                raise ValueError(
                    "transpose class missing from input; pass a transpose-closed family"
                )
            seen.add(partner)
            classes.append(
                TrisotopismClass(representative=cf.array, self_transpose=False, aut_order=cf.aut_order)
            )
    return classes


def autotrisotopism_histogram(classes: list[TrisotopismClass]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for cl in classes:
        o = cl.autotrisotopism_order
        hist[o] = hist.get(o, 0) + 1
    return hist


# ---------------------------------------------------------------------------
# Brute-force reference implementations (test oracles).  Deliberately written
# without any of the pruning machinery above.
# ---------------------------------------------------------------------------


def _greedy_relabel(seq: list[int]) -> tuple[int, ...]:
    lab: dict[int, int] = {}
    out = []
    for s in seq:
        if s not in lab:
            lab[s] = len(lab)
        out.append(lab[s])
    return tuple(out)


def brute_canonical_key(a: RowColumnArray) -> tuple[int, ...]:
    """Minimum over all r! * c! frames with greedy first-occurrence
    relabelling.  Exponential; for small arrays only."""
    cells = a.cells
    r, c = a.r, a.c
    best = None
    for rp in itertools.permutations(range(r)):
        for cp in itertools.permutations(range(c)):
            seq = [cells[rp[i]][cp[j]] for i in range(r) for j in range(c)]
            key = _greedy_relabel(seq)
            if best is None or key < best:
                best = key
    return best


def brute_canonical_key_full_relabel(a: RowColumnArray) -> tuple[int, ...]:
    """Same minimum but over every symbol bijection, not just the greedy one.
    Confirms on tiny inputs that greedy relabelling is optimal."""
    cells = a.cells
    r, c = a.r, a.c
    best = None
    for rp in itertools.permutations(range(r)):
        for cp in itertools.permutations(range(c)):
            seq = [cells[rp[i]][cp[j]] for i in range(r) for j in range(c)]
            for sp in itertools.permutations(range(a.v)):
                key = tuple(sp[s] for s in seq)
                if best is None or key < best:
                    best = key
    return best


def brute_aut_order(a: RowColumnArray) -> int:
    """Count (row perm, col perm, symbol perm) triples fixing the array.

    The symbol permutation is determined on occurring symbols by the frame;
    every symbol occurs in a valid array, so counting frames suffices.
    """
    cells = a.cells
    r, c = a.r, a.c
    target = tuple(s for row in cells for s in row)
    count = 0
    for rp in itertools.permutations(range(r)):
        for cp in itertools.permutations(range(c)):
            seq = [cells[rp[i]][cp[j]] for i in range(r) for j in range(c)]
            # the unique symbol map sending seq -> target, if consistent
            mapping: dict[int, int] = {}
            ok = True
            for s, t in zip(seq, target):
                if mapping.setdefault(s, t) != t:
                    ok = False
                    break
            if ok and len(set(mapping.values())) == len(mapping):
                count += 1
    return count


def reduced_orbit_size(a: RowColumnArray) -> int:
    """Number of distinct greedy-relabelled images over all r! * c! frames.

    Since distinct relabelled images are never symbol-permutation equivalent,
    (reduced orbit size) * aut_order == r! * c! for any valid array.
    """
    cells = a.cells
    r, c = a.r, a.c
    seen = set()
    for rp in itertools.permutations(range(r)):
        for cp in itertools.permutations(range(c)):
            seq = [cells[rp[i]][cp[j]] for i in range(r) for j in range(c)]
            seen.add(_greedy_relabel(seq))
    return len(seen)
