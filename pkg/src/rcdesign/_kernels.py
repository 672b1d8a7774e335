"""Jit-compiled inner loops: canonical forms and column-by-column extension.

Arrays are handled as (r, d) uint8 matrices of symbol indices.  The canonical
form of an array is the lexicographically smallest row-major symbol sequence
over all row and column permutations, with symbols relabelled in first
occurrence order along the scan (which is the optimal relabelling for this
order).  The number of (row-perm, col-perm) frames reproducing the canonical
sequence equals the autotopism group order when every symbol occurs in the
array; for partial arrays the returned count is only meaningful for dedup.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np
from numba import njit, prange

SENTINEL = 127  # larger than any symbol label we ever assign (v <= 63)


@lru_cache(maxsize=None)
def perm_table(d: int) -> np.ndarray:
    """All permutations of range(d) in lexicographic order, shape (d!, d)."""
    return np.array(list(itertools.permutations(range(d))), dtype=np.int8)


@njit(cache=True)
def canon_with_aut(A, v, perms, best):
    """Write the canonical form of A into `best`; return the frame count.

    A: (r, d) uint8, perms: (d!, d) int8, best: out (r*d,) uint8.
    """
    r, d = A.shape
    nperm = perms.shape[0]
    for t in range(r * d):
        best[t] = SENTINEL
    if r == 1:
        for j in range(d):
            best[j] = j
        return nperm

    aut = 0
    lab = np.empty(v, np.int16)
    cur = np.empty(r * d, np.uint8)
    used = np.zeros(r, np.uint8)
    cand = np.full(r + 1, -1, np.int64)
    undo_base = np.zeros(r + 1, np.int64)
    nl_at = np.zeros(r + 1, np.int64)
    undo_sym = np.empty(r * d, np.int64)

    for p in range(nperm):
        tau = perms[p]
        for i0 in range(r):
            for s in range(v):
                lab[s] = -1
            for j in range(d):
                lab[A[i0, tau[j]]] = j
            if best[0] == SENTINEL:
                for j in range(d):
                    best[j] = j
                aut = 0
            for x in range(r):
                used[x] = 0
            used[i0] = 1
            k = 1
            cand[1] = -1
            undo_base[1] = 0
            nl_at[1] = d
            undo_ptr = 0
            while k >= 1:
                # roll back labels and row choice of the candidate previously
                # tried at this level
                while undo_ptr > undo_base[k]:
                    undo_ptr -= 1
                    lab[undo_sym[undo_ptr]] = -1
                if cand[k] >= 0:
                    used[cand[k]] = 0
                i = cand[k] + 1
                while i < r and used[i] == 1:
                    i += 1
                if i >= r:
                    cand[k] = -1
                    k -= 1
                    continue
                cand[k] = i
                used[i] = 1
                nl = nl_at[k]
                base = k * d
                cmpres = 0
                for j in range(d):
                    s = A[i, tau[j]]
                    l = lab[s]
                    if l < 0:
                        lab[s] = nl
                        undo_sym[undo_ptr] = s
                        undo_ptr += 1
                        l = nl
                        nl += 1
                    if cmpres == 0:
                        b = best[base + j]
                        if l > b:
                            cmpres = 1
                            break
                        elif l < b:
                            cmpres = -1
                    cur[base + j] = l
                if cmpres == 1:
                    continue
                if cmpres == -1:
                    for j in range(d):
                        best[base + j] = cur[base + j]
                    for t in range((k + 1) * d, r * d):
                        best[t] = SENTINEL
                    aut = 0
                if k == r - 1:
                    aut += 1
                    continue
                k += 1
                cand[k] = -1
                undo_base[k] = undo_ptr
                nl_at[k] = nl
    return aut


@njit(parallel=True, cache=True)
def canon_batch(arrays, v, perms):
    """Canonical keys and frame counts for a batch of (r, d) arrays."""
    n, r, d = arrays.shape
    keys = np.empty((n, r * d), np.uint8)
    auts = np.empty(n, np.int64)
    for idx in prange(n):
        best = np.empty(r * d, np.uint8)
        auts[idx] = canon_with_aut(arrays[idx], v, perms, best)
        for t in range(r * d):
            keys[idx, t] = best[t]
    return keys, auts


# ---------------------------------------------------------------------------
# Column extension.
#
# Modes: lam_cc >= 0  -- every pair of columns must meet in exactly lam_cc
#        lam_cc == -1 -- pairwise-equal column intersections, value free
#        lam_cc == -2 -- no column-pair requirement (AO searches)
# cap_rr / cap_rc >= 0 bound row-row and row-column intersection sizes of
# partial objects; -1 disables the bound.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _extend_one(A, v, e, c_total, lam_cc, cap_rr, cap_rc, perms_new, do_fill, out, out_off):
    """DFS over all legal next columns of partial array A (r x dprev).

    Returns the number of legal columns.  When do_fill is true, writes the
    canonical key of each child into out[out_off + t].
    """
    r, dprev = A.shape
    dnew = dprev + 1

    used_cnt = np.zeros(v, np.int64)
    rowmask = np.zeros(r, np.uint64)
    for i in range(r):
        for j in range(dprev):
            s = A[i, j]
            used_cnt[s] += 1
            rowmask[i] |= np.uint64(1) << np.uint64(s)
    colmask = np.zeros(dprev, np.uint64)
    for j in range(dprev):
        for i in range(r):
            colmask[j] |= np.uint64(1) << np.uint64(A[i, j])

    # effective column-pair constant
    lam_eff = lam_cc
    if lam_cc == -1 and dprev >= 2:
        inter01 = 0
        for i in range(r):
            if (colmask[0] >> np.uint64(A[i, 1])) & np.uint64(1):
                inter01 += 1
        lam_eff = inter01
    elif lam_cc == -1:
        lam_eff = -1  # not yet established
    elif lam_cc == -2:
        lam_eff = -2

    # row-row intersections of the prefix (only needed when capped)
    rr_cur = np.zeros((r, r), np.int64)
    if cap_rr >= 0:
        for i in range(r):
            for x in range(i + 1, r):
                common = rowmask[i] & rowmask[x]
                cnt = 0
                for s in range(v):
                    if (common >> np.uint64(s)) & np.uint64(1):
                        cnt += 1
                rr_cur[i, x] = cnt
                rr_cur[x, i] = cnt
                if cnt > cap_rr:
                    return 0

    # row-column intersections vs existing columns (only when capped)
    rc_cur = np.zeros((r, dprev), np.int64)
    if cap_rc >= 0:
        for i in range(r):
            for j in range(dprev):
                common = rowmask[i] & colmask[j]
                cnt = 0
                for s in range(v):
                    if (common >> np.uint64(s)) & np.uint64(1):
                        cnt += 1
                rc_cur[i, j] = cnt
                if cnt > cap_rc:
                    return 0

    # forced symbols: must appear in this column or run out of columns
    slack = c_total - dprev  # columns still to be filled, this one included
    nforced = 0
    forced = np.zeros(v, np.uint8)
    for s in range(v):
        need = e - used_cnt[s]
        if need > slack:
            return 0
        if need == slack and need > 0:
            forced[s] = 1
            nforced += 1

    # DFS state.  Invariant: at the top of the outer loop no placement is
    # active for row i, and kcol[i] holds the previously tried symbol (-1 if
    # none); placements for rows < i are active.
    kcol = np.empty(r, np.int64)  # chosen symbol per row
    inter = np.zeros(dprev, np.int64)  # running |K cap old column j|
    cntrow = np.zeros(r, np.int64)  # running |K cap old row x|
    newmask = np.uint64(0)
    forced_left = nforced

    child = np.empty((r, dnew), np.uint8)
    best = np.empty(r * dnew, np.uint8)

    n_children = 0
    i = 0
    kcol[0] = -1
    while i >= 0:
        s = kcol[i] + 1
        found = -1
        while s < v:
            if used_cnt[s] < e and not (
                (rowmask[i] >> np.uint64(s)) & np.uint64(1)
            ) and not ((newmask >> np.uint64(s)) & np.uint64(1)):
                ok = True
                if forced[s] == 0 and forced_left > (r - 1 - i):
                    # placing a non-forced symbol leaves too few rows
                    ok = False
                if ok and lam_eff >= 0:
                    for j in range(dprev):
                        bit = (colmask[j] >> np.uint64(s)) & np.uint64(1)
                        nv = inter[j] + np.int64(bit)
                        if nv > lam_eff or nv + (r - 1 - i) < lam_eff:
                            ok = False
                            break
                if ok and cap_rc >= 0:
                    # s joins K: |K cap final row x| = cntrow[x] + 1 (for k_x)
                    for x in range(r):
                        if ((rowmask[x] >> np.uint64(s)) & np.uint64(1)) and cntrow[x] + 2 > cap_rc:
                            ok = False
                            break
                    if ok:
                        # s joins row i: old columns gain |row_i cap col_j|
                        for j in range(dprev):
                            if ((colmask[j] >> np.uint64(s)) & np.uint64(1)) and rc_cur[i, j] + 1 > cap_rc:
                                ok = False
                                break
                if ok and cap_rr >= 0:
                    for x in range(r):
                        if x != i and ((rowmask[x] >> np.uint64(s)) & np.uint64(1)) and rr_cur[i, x] + 1 > cap_rr:
                            ok = False
                            break
                if ok:
                    found = s
                    break
            s += 1
        if found < 0:
            # exhausted this row: backtrack, undoing the parent placement
            kcol[i] = -1
            i -= 1
            if i >= 0:
                ps = kcol[i]
                used_cnt[ps] -= 1
                newmask &= ~(np.uint64(1) << np.uint64(ps))
                if forced[ps] == 1:
                    forced_left += 1
                for j in range(dprev):
                    inter[j] -= np.int64((colmask[j] >> np.uint64(ps)) & np.uint64(1))
                if cap_rc >= 0:
                    for x in range(r):
                        cntrow[x] -= np.int64((rowmask[x] >> np.uint64(ps)) & np.uint64(1))
                    for j in range(dprev):
                        rc_cur[i, j] -= np.int64((colmask[j] >> np.uint64(ps)) & np.uint64(1))
                if cap_rr >= 0:
                    for x in range(r):
                        if x != i:
                            delta = np.int64((rowmask[x] >> np.uint64(ps)) & np.uint64(1))
                            rr_cur[i, x] -= delta
                            rr_cur[x, i] -= delta
            continue
        # place candidate
        kcol[i] = found
        used_cnt[found] += 1
        newmask |= np.uint64(1) << np.uint64(found)
        if forced[found] == 1:
            forced_left -= 1
        for j in range(dprev):
            inter[j] += np.int64((colmask[j] >> np.uint64(found)) & np.uint64(1))
        if cap_rc >= 0:
            for x in range(r):
                cntrow[x] += np.int64((rowmask[x] >> np.uint64(found)) & np.uint64(1))
            for j in range(dprev):
                rc_cur[i, j] += np.int64((colmask[j] >> np.uint64(found)) & np.uint64(1))
        if cap_rr >= 0:
            for x in range(r):
                if x != i:
                    delta = np.int64((rowmask[x] >> np.uint64(found)) & np.uint64(1))
                    rr_cur[i, x] += delta
                    rr_cur[x, i] += delta
        if i == r - 1:
            # a complete legal column
            if do_fill:
                for x in range(r):
                    for j in range(dprev):
                        child[x, j] = A[x, j]
                    child[x, dprev] = kcol[x]
                canon_with_aut(child, v, perms_new, best)
                for t in range(r * dnew):
                    out[out_off + n_children, t] = best[t]
            n_children += 1
            # undo immediately and scan for the next symbol in this row
            used_cnt[found] -= 1
            newmask &= ~(np.uint64(1) << np.uint64(found))
            if forced[found] == 1:
                forced_left += 1
            for j in range(dprev):
                inter[j] -= np.int64((colmask[j] >> np.uint64(found)) & np.uint64(1))
            if cap_rc >= 0:
                for x in range(r):
                    cntrow[x] -= np.int64((rowmask[x] >> np.uint64(found)) & np.uint64(1))
                for j in range(dprev):
                    rc_cur[i, j] -= np.int64((colmask[j] >> np.uint64(found)) & np.uint64(1))
            if cap_rr >= 0:
                for x in range(r):
                    if x != i:
                        delta = np.int64((rowmask[x] >> np.uint64(found)) & np.uint64(1))
                        rr_cur[i, x] -= delta
                        rr_cur[x, i] -= delta
            continue
        i += 1
        kcol[i] = -1
    return n_children


@njit(parallel=True, cache=True)
def extend_level(reps, v, e, c_total, lam_cc, cap_rr, cap_rc, perms_new, do_fill, offsets, out):
    """Extend every rep by one column; count or fill canonical child keys."""
    n = reps.shape[0]
    counts = np.zeros(n, np.int64)
    for idx in prange(n):
        counts[idx] = _extend_one(
            reps[idx], v, e, c_total, lam_cc, cap_rr, cap_rc,
            perms_new, do_fill, out, offsets[idx],
        )
    return counts


@njit(cache=True)
def fill_design(blocks, v, cap_rr, cap_rc, perms, do_fill, out):
    """All row-by-row SDR orderings of one unordered block design.

    blocks: (c, r) uint8, each row one block's content sorted ascending.
    Column 0 is pinned to its ascending order (row permutations make any
    filling reachable from such a representative).  Returns the number of
    fillings; when do_fill, writes each filling's canonical key into out.
    """
    c, r = blocks.shape
    one = np.uint64(1)
    blockmask = np.zeros(c, np.uint64)
    for j in range(c):
        for t in range(r):
            blockmask[j] |= one << np.uint64(blocks[j, t])
    remaining = blockmask.copy()
    rowmask = np.zeros(r, np.uint64)
    grid = np.empty((r, c), np.uint8)
    child = np.empty((r, c), np.uint8)
    best = np.empty(r * c, np.uint8)
    # cell-level DFS over row-major positions
    last = np.full(r * c, -1, np.int64)  # last symbol tried per cell
    n_found = 0
    pos = 0
    while pos >= 0:
        i = pos // c
        j = pos % c
        # find next candidate symbol for this cell
        s = last[pos] + 1
        found = -1
        if j == 0:
            # pinned: only candidate is the i-th smallest of block 0
            cand = blocks[0, i]
            if s <= cand and (remaining[0] >> np.uint64(cand)) & one and not (
                (rowmask[i] >> np.uint64(cand)) & one
            ):
                found = cand
        else:
            while s < v:
                if ((remaining[j] >> np.uint64(s)) & one) and not (
                    (rowmask[i] >> np.uint64(s)) & one
                ):
                    found = s
                    break
                s += 1
        if found < 0:
            last[pos] = -1
            pos -= 1
            if pos >= 0:
                pi, pj = pos // c, pos % c
                ps = grid[pi, pj]
                remaining[pj] |= one << np.uint64(ps)
                rowmask[pi] &= ~(one << np.uint64(ps))
            continue
        last[pos] = found
        grid[i, j] = found
        remaining[j] &= ~(one << np.uint64(found))
        rowmask[i] |= one << np.uint64(found)
        if j == c - 1:
            # row complete: intersection caps against earlier rows / columns
            ok = True
            if cap_rr >= 0:
                for x in range(i):
                    common = rowmask[i] & rowmask[x]
                    cnt = 0
                    for t in range(v):
                        cnt += np.int64((common >> np.uint64(t)) & one)
                    if cnt > cap_rr:
                        ok = False
                        break
            if ok and cap_rc >= 0:
                for jj in range(c):
                    common = rowmask[i] & blockmask[jj]
                    cnt = 0
                    for t in range(v):
                        cnt += np.int64((common >> np.uint64(t)) & one)
                    if cnt > cap_rc:
                        ok = False
                        break
            if not ok:
                remaining[j] |= one << np.uint64(found)
                rowmask[i] &= ~(one << np.uint64(found))
                continue
        if pos == r * c - 1:
            if do_fill:
                for x in range(r):
                    for y in range(c):
                        child[x, y] = grid[x, y]
                canon_with_aut(child, v, perms, best)
                for t in range(r * c):
                    out[n_found, t] = best[t]
            n_found += 1
            remaining[j] |= one << np.uint64(found)
            rowmask[i] &= ~(one << np.uint64(found))
            continue
        pos += 1
    return n_found


def unique_rows(arr: np.ndarray) -> np.ndarray:
    """np.unique on uint8 rows via a void view (memcmp ordering)."""
    if arr.shape[0] == 0:
        return arr
    a = np.ascontiguousarray(arr)
    voided = a.view(np.dtype((np.void, a.shape[1])))[:, 0]
    uniq = np.unique(voided)
    return uniq.view(np.uint8).reshape(-1, a.shape[1])
