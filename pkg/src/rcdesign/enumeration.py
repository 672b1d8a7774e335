"""Complete enumeration of isotopism classes, column by column.

The search extends partial arrays one column at a time and keeps a single
lexicographically minimal representative per isotopism class at every level,
so the partial-object count is the limiting resource.  Constant column
intersections prune the constant-CC family searches; AO searches instead cap
the row-column intersection sizes (partial sizes never exceed the final
constant, and the average forces equality on completed arrays).  A second,
structurally different generator builds the same designs from unordered
block designs by consecutive systems of distinct representatives and serves
as a cross-check.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._kernels import canon_batch, extend_level, perm_table, unique_rows
from .core import RowColumnArray, classify, from_matrix
from .params import ParameterSet, derive

DEFAULT_CHILD_BUDGET = 60_000_000
DEFAULT_PARTIAL_BUDGET = 8_000_000
_CHUNK_BYTES = 192 * 1024 * 1024


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchTarget:
    """One enumeration instance.

    mode 'cc': enumerate arrays with constant column intersections lam_cc
        (lam_cc None means 'pairwise equal, any value', used for negative
        controls on divisibility-inadmissible sets).
    mode 'ao': no column constraint; row-column intersections capped at e.
    cap_rr / cap_rc restrict row-row / row-column intersection sizes, which
    confines a 'cc' run to the RR-constant (double/triple) or RC-constant
    (transposed-sesqui/triple) families.
    """

    v: int
    r: int
    c: int
    mode: str
    lam_cc: int | None = None
    cap_rr: int | None = None
    cap_rc: int | None = None

    @property
    def params(self) -> ParameterSet:
        return derive(self.v, self.r, self.c)

    def describe(self) -> str:
        bits = [f"v={self.v} {self.r}x{self.c} mode={self.mode}"]
        if self.lam_cc is not None:
            bits.append(f"lam_cc={self.lam_cc}")
        if self.cap_rr is not None:
            bits.append(f"cap_rr={self.cap_rr}")
        if self.cap_rc is not None:
            bits.append(f"cap_rc={self.cap_rc}")
        return " ".join(bits)


def cc_target(v: int, r: int, c: int, constrain: str = "") -> SearchTarget:
    """Standard constant-CC search; constrain 'da' adds the row cap (finds
    only double/triple arrays), 'sat' adds the row-column cap."""
    p = derive(v, r, c)
    lam = p.lam_int("cc")
    if lam is None:
        raise ValueError(f"({v},{r},{c}) has non-integral column constant; "
                         "use inadmissible_cc_target for negative controls")
    cap_rr = None
    cap_rc = None
    if constrain == "da":
        cap_rr = p.lam_int("rr")
        if cap_rr is None:
            raise ValueError("row constant not integral; no double/triple search")
    elif constrain == "sat":
        cap_rc = p.e_int
    elif constrain:
        raise ValueError(f"unknown constraint {constrain!r}")
    return SearchTarget(v, r, c, "cc", lam_cc=lam, cap_rr=cap_rr, cap_rc=cap_rc)


def ao_target(v: int, r: int, c: int) -> SearchTarget:
    p = derive(v, r, c)
    e = p.e_int
    if e is None:
        raise ValueError(f"({v},{r},{c}) is not equireplicate-compatible")
    return SearchTarget(v, r, c, "ao", cap_rc=e)


def inadmissible_cc_target(v: int, r: int, c: int) -> SearchTarget:
    """Pairwise-equal CC search without a prescribed constant: the negative
    control mode for sets whose column constant is not an integer."""
    return SearchTarget(v, r, c, "cc", lam_cc=None)


@dataclass
class EnumerationReport:
    target: SearchTarget
    counts: dict = field(default_factory=dict)
    histograms: dict = field(default_factory=dict)
    representatives: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def total_classes(self) -> int:
        return sum(self.counts.values())

    def to_json(self, include_reps: bool = False) -> dict:
        out = {
            "target": {
                "v": self.target.v,
                "r": self.target.r,
                "c": self.target.c,
                "mode": self.target.mode,
                "lam_cc": self.target.lam_cc,
                "cap_rr": self.target.cap_rr,
                "cap_rc": self.target.cap_rc,
            },
            "counts": dict(self.counts),
            "histograms": {k: {str(o): n for o, n in sorted(v.items())} for k, v in self.histograms.items()},
            "stats": self.stats,
            "reason": self.reason,
        }
        if include_reps:
            out["representatives"] = {
                k: [[list(row) for row in a.cells] for a in v]
                for k, v in self.representatives.items()
            }
        return out


def _lam_code(target: SearchTarget) -> int:
    if target.mode == "ao":
        return -2
    return -1 if target.lam_cc is None else target.lam_cc


def _seed(r: int) -> np.ndarray:
    return np.arange(r, dtype=np.uint8).reshape(1, r, 1)


def _extend(reps: np.ndarray, target: SearchTarget, e: int, depth: int,
            child_budget: int, partial_budget: int) -> tuple[np.ndarray, int]:
    """One BFS level: all children of all reps, reduced to canonical forms."""
    v, r, c = target.v, target.r, target.c
    perms = perm_table(depth)
    lam = _lam_code(target)
    cap_rr = -1 if target.cap_rr is None else target.cap_rr
    cap_rc = -1 if target.cap_rc is None else target.cap_rc
    dummy_out = np.empty((1, r * depth), np.uint8)
    zeros = np.zeros(reps.shape[0], np.int64)
    counts = extend_level(reps, v, e, c, lam, cap_rr, cap_rc, perms, False, zeros, dummy_out)
    total = int(counts.sum())
    if total > child_budget:
        raise BudgetExceeded(
            f"level {depth}: {total} partial objects exceed child budget {child_budget}"
        )
    key_bytes = r * depth
    per_chunk = max(1, _CHUNK_BYTES // max(1, key_bytes))
    offsets = np.zeros(reps.shape[0] + 1, np.int64)
    np.cumsum(counts, out=offsets[1:])
    parts = []
    lo = 0
    n = reps.shape[0]
    while lo < n:
        hi = lo
        while hi < n and offsets[hi + 1] - offsets[lo] <= per_chunk:
            hi += 1
        if hi == lo:
            hi = lo + 1  # single oversized rep: take it alone
        nch = int(offsets[hi] - offsets[lo])
        out = np.empty((max(nch, 1), key_bytes), np.uint8)
        local = (offsets[lo:hi] - offsets[lo]).copy()
        extend_level(reps[lo:hi], v, e, c, lam, cap_rr, cap_rc, perms, True, local, out)
        parts.append(unique_rows(out[:nch]))
        lo = hi
    merged = parts[0] if len(parts) == 1 else unique_rows(np.concatenate(parts))
    if merged.shape[0] > partial_budget:
        raise BudgetExceeded(
            f"level {depth}: {merged.shape[0]} classes exceed partial budget {partial_budget}"
        )
    return merged.reshape(-1, r, depth), total


def _finalize(target: SearchTarget, reps: np.ndarray, stats: dict) -> EnumerationReport:
    v, r, c = target.v, target.r, target.c
    report = EnumerationReport(target=target, stats=stats)
    n = reps.shape[0]
    if n == 0:
        return report
    keys, auts = canon_batch(reps, v, perm_table(c))
    counts: dict[str, int] = {}
    hists: dict[str, dict[int, int]] = {}
    repmap: dict[str, list[RowColumnArray]] = {}
    for idx in range(n):
        arr = from_matrix(reps[idx], v)
        label = classify(arr).label
        counts[label] = counts.get(label, 0) + 1
        hists.setdefault(label, {})
        o = int(auts[idx])
        hists[label][o] = hists[label].get(o, 0) + 1
        repmap.setdefault(label, []).append(arr)
    report.counts = counts
    report.histograms = hists
    report.representatives = repmap
    return report


def enumerate_designs(
    target: SearchTarget,
    run_inadmissible: bool = False,
    child_budget: int = DEFAULT_CHILD_BUDGET,
    partial_budget: int = DEFAULT_PARTIAL_BUDGET,
    checkpoint_dir: str | Path | None = None,
    progress: bool = False,
) -> EnumerationReport:
    """Complete enumeration for one target, one canonical rep per class.

    Divisibility-inadmissible targets return an empty report with a reason;
    run_inadmissible=True instead performs the (vacuous) search as a negative
    control where equireplication is at least representable.
    """
    t0 = time.time()
    p = target.params
    e = p.e_int
    if e is None:
        return EnumerationReport(
            target=target,
            reason=f"rc/v = {p.e} is not an integer: no equireplicate array exists",
            stats={"levels": [], "children": [], "wall_time": 0.0},
        )
    if target.mode == "cc" and target.lam_cc is None and p.lam_int("cc") is None:
        if not run_inadmissible:
            return EnumerationReport(
                target=target,
                reason=f"column constant {p.lambda_cc} is not an integer",
                stats={"levels": [], "children": [], "wall_time": 0.0},
            )
    if target.r > target.v or target.c < 1:
        return EnumerationReport(target=target, reason="no binary column exists",
                                 stats={"levels": [], "children": [], "wall_time": 0.0})

    ck = _Checkpoint(checkpoint_dir, target) if checkpoint_dir else None
    reps = _seed(target.r)
    levels = [1]
    children = [0]
    start_depth = 2
    if ck is not None:
        resumed = ck.load()
        if resumed is not None:
            reps, start_depth, levels, children = resumed
    for depth in range(start_depth, target.c + 1):
        reps, total = _extend(reps, target, e, depth, child_budget, partial_budget)
        levels.append(int(reps.shape[0]))
        children.append(total)
        if progress:
            print(f"  depth {depth}: {total} children -> {reps.shape[0]} classes", flush=True)
        if ck is not None:
            ck.save(reps, depth, levels, children)
        if reps.shape[0] == 0:
            break
    stats = {"levels": levels, "children": children, "wall_time": round(time.time() - t0, 3)}
    return _finalize(target, reps if reps.shape[2] == target.c else np.empty((0, target.r, target.c), np.uint8), stats)


class _Checkpoint:
    """Per-level serialization of the BFS frontier so long runs resume."""

    def __init__(self, directory: str | Path, target: SearchTarget):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.meta = self.dir / "target.json"
        self.desc = {
            "v": target.v, "r": target.r, "c": target.c, "mode": target.mode,
            "lam_cc": target.lam_cc, "cap_rr": target.cap_rr, "cap_rc": target.cap_rc,
        }

    def load(self):
        if not self.meta.exists():
            return None
        state = json.loads(self.meta.read_text())
        if state.get("target") != self.desc:
            raise ValueError(f"checkpoint at {self.dir} belongs to a different target")
        depth = state["depth"]
        reps = np.load(self.dir / f"level_{depth}.npy")
        return reps, depth + 1, state["levels"], state["children"]

    def save(self, reps: np.ndarray, depth: int, levels: list, children: list):
        np.save(self.dir / f"level_{depth}.npy", reps)
        tmp = self.meta.with_suffix(".tmp")
        tmp.write_text(json.dumps({
            "target": self.desc, "depth": depth, "levels": levels, "children": children,
        }))
        tmp.replace(self.meta)


def autotopism_histogram(report: EnumerationReport, label: str) -> dict[int, int]:
    return dict(report.histograms.get(label, {}))


# ---------------------------------------------------------------------------
# Independent generator: unordered block designs ordered by consecutive SDRs.
# ---------------------------------------------------------------------------


def _block_designs(v: int, r: int, c: int, e: int, lam_cc: int | None,
                   budget: int) -> list[tuple[tuple[int, ...], ...]]:
    """Non-decreasing c-tuples of r-subsets of [v] with symbol degrees e and
    (when lam_cc is given) pairwise intersections exactly lam_cc.

    The first block is pinned to {0..r-1}: a symbol permutation makes the
    lexicographically smallest block of any design equal to it, and designs
    are reduced per symbol-permutation class afterwards anyway.
    """
    blocks = list(itertools.combinations(range(v), r))
    masks = [sum(1 << s for s in b) for b in blocks]
    out: list[tuple[tuple[int, ...], ...]] = []
    deg = [0] * v

    def rec(start: int, chosen: list[int]):
        if len(out) > budget:
            raise BudgetExceeded(f"more than {budget} block designs")
        if len(chosen) == c:
            if all(deg[s] == e for s in range(v)):
                out.append(tuple(blocks[i] for i in chosen))
            return
        left = c - len(chosen) - 1
        for bi in range(start, len(blocks)):
            m = masks[bi]
            if any(deg[s] >= e for s in blocks[bi]):
                continue
            if lam_cc is not None and any(
                (m & masks[cj]).bit_count() != lam_cc for cj in chosen
            ):
                continue
            for s in blocks[bi]:
                deg[s] += 1
            if all(e - deg[s] <= left for s in range(v)):
                chosen.append(bi)
                rec(bi, chosen)
                chosen.pop()
            for s in blocks[bi]:
                deg[s] -= 1

    first = 0  # blocks[0] == (0, 1, ..., r-1)
    for s in blocks[first]:
        deg[s] += 1
    rec(first, [first])
    for s in blocks[first]:
        deg[s] -= 1
    return _dedup_designs_by_signature(out, v, c)


def _dedup_designs_by_signature(
    designs: list[tuple[tuple[int, ...], ...]], v: int, c: int
) -> list[tuple[tuple[int, ...], ...]]:
    """Keep one block design per symbol-permutation class.

    A multiset of blocks is determined up to symbol renaming by how many
    symbols carry each membership signature (the subset of blocks containing
    them), so the canonical key is that count vector minimized over block
    permutations.  Fillings of one representative reach every isotopism
    class of the whole symbol orbit.
    """
    seen: dict[tuple[int, ...], tuple[tuple[int, ...], ...]] = {}
    kept = []
    for design in designs:
        sig_count: dict[int, int] = {}
        for s in range(v):
            sig = 0
            for j, b in enumerate(design):
                if s in b:
                    sig |= 1 << j
            sig_count[sig] = sig_count.get(sig, 0) + 1
        best_key = None
        for perm in itertools.permutations(range(c)):
            vec = [0] * (1 << c)
            for sig, n in sig_count.items():
                psig = 0
                for j in range(c):
                    if sig & (1 << perm[j]):
                        psig |= 1 << j
                vec[psig] = n
            key = tuple(vec)
            if best_key is None or key < best_key:
                best_key = key
        if best_key not in seen:
            seen[best_key] = design
            kept.append(design)
    return kept


def enumerate_via_sdr(
    target: SearchTarget,
    design_budget: int = 2_000_000,
    filling_budget: int = 50_000_000,
) -> EnumerationReport:
    """Generate the same classes from unordered block designs.

    Refuses pairwise-equal CC targets (only used as negative controls) and
    anything whose block-design family is too large for the budget.
    """
    from ._kernels import fill_design

    t0 = time.time()
    p = target.params
    e = p.e_int
    if e is None:
        return EnumerationReport(target=target, reason="rc/v not an integer",
                                 stats={"wall_time": 0.0})
    lam = target.lam_cc if target.mode == "cc" else None
    if target.mode == "cc" and target.lam_cc is None:
        raise ValueError("SDR generator needs a fixed column constant")
    designs = _block_designs(target.v, target.r, target.c, e, lam, design_budget)
    v, r, c = target.v, target.r, target.c
    cap_rr = -1 if target.cap_rr is None else target.cap_rr
    cap_rc = -1 if target.cap_rc is None else target.cap_rc
    perms = perm_table(c)
    dummy = np.empty((1, r * c), np.uint8)
    parts: list[np.ndarray] = []
    n_fill = 0
    for design in designs:
        blocks = np.array([sorted(b) for b in design], dtype=np.uint8)
        cnt = int(fill_design(blocks, v, cap_rr, cap_rc, perms, False, dummy))
        n_fill += cnt
        if n_fill > filling_budget:
            raise BudgetExceeded(f"more than {filling_budget} SDR fillings")
        if cnt == 0:
            continue
        out = np.empty((cnt, r * c), np.uint8)
        fill_design(blocks, v, cap_rr, cap_rc, perms, True, out)
        parts.append(unique_rows(out))
    stats = {"designs": len(designs), "fillings": n_fill,
             "wall_time": round(time.time() - t0, 3)}
    if not parts:
        return EnumerationReport(target=target, stats=stats)
    uniq = parts[0] if len(parts) == 1 else unique_rows(np.concatenate(parts))
    reps = uniq.reshape(-1, r, c)
    # the row/column caps are necessary-size filters only; the final
    # classification decides labels, identical to the main path
    report = _finalize(target, reps, stats)
    report.stats = stats
    return report


def reports_agree(a: EnumerationReport, b: EnumerationReport) -> bool:
    """Counts, histograms and representative sets all identical."""
    if a.counts != b.counts or a.histograms != b.histograms:
        return False
    for label in set(a.representatives) | set(b.representatives):
        ra = [x.cells for x in a.representatives.get(label, [])]
        rb = [x.cells for x in b.representatives.get(label, [])]
        if sorted(ra) != sorted(rb):
            return False
    return True
