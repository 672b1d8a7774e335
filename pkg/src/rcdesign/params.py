"""Derived parameters, admissibility verdicts, parameter-space scans.

Admissibility is implemented strictly as the divisibility conditions: e =
rc/v integral plus integrality of the relevant lambda averages, within the
non-trivial range max{r,c} < v <= rc/2.  The "forced property" exclusions and
the known-nonexistent component-BIBD annotations are separate layers so the
three notions stay distinguishable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import isqrt
from pathlib import Path

# Table column order used throughout reports.
TYPE_COLUMNS = ("MA", "SA_T", "MA_T", "SA", "DA", "TA", "AO")

# Proper variants impossible when a property is forced to hold.
_BLOCKED_BY_FORCED_RR = {"MA", "SA_T", "AO"}  # these require RR to fail
_BLOCKED_BY_FORCED_CC = {"MA_T", "SA", "AO"}  # these require CC to fail


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterSet:
    v: int
    r: int
    c: int
    e: Fraction
    lambda_rr: Fraction
    lambda_cc: Fraction
    lambda_rc: Fraction
    in_range: bool
    forced_rr: bool
    forced_cc: bool
    admissible_for: str  # '', 'ao', 'cc-side', 'rr-side', 'all'

    @property
    def e_int(self) -> int | None:
        return int(self.e) if self.e.denominator == 1 else None

    def lam_int(self, family: str) -> int | None:
        lam = {"rr": self.lambda_rr, "cc": self.lambda_cc, "rc": self.lambda_rc}[family]
        return int(lam) if lam.denominator == 1 else None

    def divisibility_admissible(self, label: str) -> bool:
        """Divisibility-only admissibility of one design type (in range)."""
        if not self.in_range or self.e.denominator != 1:
            return False
        need_rr = label in ("MA_T", "SA", "DA", "TA")
        need_cc = label in ("MA", "SA_T", "DA", "TA")
        if need_rr and self.lambda_rr.denominator != 1:
            return False
        if need_cc and self.lambda_cc.denominator != 1:
            return False
        return True

    def type_status(self, label: str) -> str:
        """'' not admissible | '-' admissible but property-forced out | 'adm'."""
        if not self.divisibility_admissible(label):
            return ""
        if self.forced_rr and label in _BLOCKED_BY_FORCED_RR:
            return "-"
        if self.forced_cc and label in _BLOCKED_BY_FORCED_CC:
            return "-"
        return "adm"

    def to_json(self) -> dict:
        frac = lambda f: [f.numerator, f.denominator]
        return {
            "v": self.v,
            "r": self.r,
            "c": self.c,
            "e": frac(self.e),
            "lambda_rr": frac(self.lambda_rr),
            "lambda_cc": frac(self.lambda_cc),
            "lambda_rc": frac(self.lambda_rc),
            "in_range": self.in_range,
            "forced_rr": self.forced_rr,
            "forced_cc": self.forced_cc,
            "admissible_for": self.admissible_for,
            "types": {t: self.type_status(t) for t in TYPE_COLUMNS},
        }


def derive(v: int, r: int, c: int) -> ParameterSet:
    """Exact derived parameters and verdicts for one (v, r, c)."""
    if r <= 1 or c <= 1:
        raise ParameterError("need r > 1 and c > 1")
    if v <= 0:
        raise ParameterError("need v > 0")
    e = Fraction(r * c, v)
    lam_rr = Fraction(c, 1) * (e - 1) / (r - 1)
    lam_cc = Fraction(r, 1) * (e - 1) / (c - 1)
    lam_rc = e
    in_range = max(r, c) < v and 2 * v <= r * c
    forced_rr = Fraction(2 * c - v, 1) == lam_rr
    forced_cc = Fraction(2 * r - v, 1) == lam_cc
    if e.denominator != 1 or not in_range:
        adm = ""
    else:
        rr_ok = lam_rr.denominator == 1
        cc_ok = lam_cc.denominator == 1
        adm = {
            (False, False): "ao",
            (True, False): "rr-side",
            (False, True): "cc-side",
            (True, True): "all",
        }[(rr_ok, cc_ok)]
    return ParameterSet(
        v=v, r=r, c=c, e=e,
        lambda_rr=lam_rr, lambda_cc=lam_cc, lambda_rc=lam_rc,
        in_range=in_range, forced_rr=forced_rr, forced_cc=forced_cc,
        admissible_for=adm,
    )


def enumerate_admissible(v_max: int) -> list[ParameterSet]:
    """All in-range parameter sets with integral e, 6 <= v <= v_max.

    Ordered like the master table: by v, then e, then by the smaller
    dimension, with each r < c shape immediately followed by its transpose.
    Every such set is admissible for at least the AO type, so this is exactly
    the set of table rows.
    """
    rows: list[ParameterSet] = []
    for v in range(6, v_max + 1):
        by_e: dict[int, list[tuple[int, int]]] = {}
        for r in range(2, v):
            for c in range(r, v):
                if (r * c) % v or 2 * v > r * c:
                    continue
                by_e.setdefault((r * c) // v, []).append((r, c))
        for e in sorted(by_e):
            for r, c in sorted(by_e[e]):
                rows.append(derive(v, r, c))
                if r != c:
                    rows.append(derive(v, c, r))
    return rows


def brute_admissible_oracle(v: int, r: int, c: int, label: str) -> bool:
    """Independent naive divisibility checker (test oracle, no Fractions)."""
    if r <= 1 or c <= 1 or max(r, c) >= v or 2 * v > r * c or (r * c) % v:
        return False
    e = (r * c) // v
    if label in ("MA_T", "SA", "DA", "TA") and (c * (e - 1)) % (r - 1):
        return False
    if label in ("MA", "SA_T", "DA", "TA") and (r * (e - 1)) % (c - 1):
        return False
    return True


# ---------------------------------------------------------------------------
# Component block designs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentBIBDParams:
    points: int
    blocks: int
    replication: int
    block_size: int
    pair_count: int

    @property
    def short(self) -> tuple[int, int, int]:
        return (self.points, self.block_size, self.pair_count)

    def counts_consistent(self) -> bool:
        return (
            self.points * self.replication == self.blocks * self.block_size
            and self.pair_count * (self.points - 1)
            == self.replication * (self.block_size - 1)
        )


def _builtin_nonexistent() -> set[tuple[int, int, int]]:
    # (15,5,2) is the classical non-existent case; the others are its
    # complement and the (21,6,2)/(21,15,14) pair behind the transposed
    # sesqui exclusions at (28,8,21) and (28,20,21).
    return {(15, 5, 2), (15, 10, 9), (21, 6, 2), (21, 15, 14)}


def load_nonexistent_bibds(extra_file: str | Path | None = None) -> set[tuple[int, int, int]]:
    table = _builtin_nonexistent()
    if extra_file is not None:
        data = json.loads(Path(extra_file).read_text())
        for row in data:
            table.add(tuple(int(x) for x in row))
    return table


def component_bibds(
    p: ParameterSet, nonexistent: set[tuple[int, int, int]] | None = None
) -> dict:
    """Row/column component designs plus tri-state existence hints.

    The hint is 'known-nonexistent' from the lookup table, 'exists' only for
    trivially constructible cases (block size 2, i.e. lambda-fold complete
    pair designs, or blocks equal to the whole point set), else 'unknown'.
    """
    if nonexistent is None:
        nonexistent = load_nonexistent_bibds()
    out: dict[str, dict | None] = {"bibd_r": None, "bibd_c": None}
    e = p.e_int
    if e is None:
        return out

    def hint(b: ComponentBIBDParams) -> str:
        if b.short in nonexistent:
            return "known-nonexistent"
        if b.block_size == 2 or b.block_size == b.points:
            return "exists"
        return "unknown"

    if p.lambda_rr.denominator == 1:
        b = ComponentBIBDParams(p.r, p.v, p.c, e, int(p.lambda_rr))
        out["bibd_r"] = {"params": b, "hint": hint(b)}
    if p.lambda_cc.denominator == 1:
        b = ComponentBIBDParams(p.c, p.v, p.r, e, int(p.lambda_cc))
        out["bibd_c"] = {"params": b, "hint": hint(b)}
    return out


# ---------------------------------------------------------------------------
# The v < r+c-1 scans.
# ---------------------------------------------------------------------------

RELAX_MODES = ("double", "rr-only", "cc-only", "ao")


def _lam_conditions_hold(e: int, r: int, c: int, relax: str) -> bool:
    if relax in ("double", "rr-only") and (c * (e - 1)) % (r - 1):
        return False
    if relax in ("double", "cc-only") and (r * (e - 1)) % (c - 1):
        return False
    return True


def search_small_v_naive(v_max: int, relax: str = "double") -> list[tuple[int, int, int]]:
    """Reference scan: admissible sets with v < r+c-1, straightforward loops."""
    if relax not in RELAX_MODES:
        raise ParameterError(f"relax must be one of {RELAX_MODES}")
    found = []
    for v in range(6, v_max + 1):
        for r in range(2, v):
            # v < r+c-1 and c < v bound the window
            for c in range(max(2, v - r + 2), v):
                if (r * c) % v or 2 * v > r * c:
                    continue
                e = (r * c) // v
                if _lam_conditions_hold(e, r, c, relax):
                    found.append((v, r, c))
    return found


def search_small_v(v_max: int, relax: str = "double") -> list[tuple[int, int, int]]:
    """Admissible parameter sets with max{r,c} < v < r+c-1, v <= v_max.

    Parametrized as r = e+a, c = e+b with ab = ke, 1 <= k <= e-2 (that
    inequality is exactly v < r+c-1) and v = e+a+b+k.  For double/triple
    arrays the answer is expected to be empty throughout the tested range.
    """
    if relax not in RELAX_MODES:
        raise ParameterError(f"relax must be one of {RELAX_MODES}")
    if v_max <= 4000:
        return sorted(search_small_v_naive(v_max, relax))
    from ._scan import scan_small_v_kernel

    mode = RELAX_MODES.index(relax)
    raw = scan_small_v_kernel(v_max, mode)
    return sorted((int(v), int(r), int(c)) for v, r, c in raw)


# ---------------------------------------------------------------------------
# Binary pseudo-Youden parameter series and search.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PYDParameterSet:
    v: int
    r: int
    e: int
    lambda_bibd: int
    series_index: int | None = None

    @property
    def main_series(self) -> bool:
        return self.series_index is not None


def pyd_main_series(i: int) -> PYDParameterSet:
    """Parameters from the odd-square series: v = s_i^2 with s_i the i-th odd
    number, r = t_i the i-th even triangular number (valid from i = 2)."""
    if i < 2:
        raise ParameterError("series starts at i = 2")
    s = 2 * i - 1
    t = s * (s - (-1) ** (i - 1)) // 2
    v = s * s
    e_num = t * t
    if e_num % v:
        raise AssertionError("series replication must be integral")
    e = e_num // v
    lam_num = 2 * e * (t - 1)
    if lam_num % (v - 1):
        raise AssertionError("series pair count must be integral")
    return PYDParameterSet(v=v, r=t, e=e, lambda_bibd=lam_num // (v - 1), series_index=i)


def _main_series_index(v: int, r: int) -> int | None:
    s = isqrt(v)
    if s * s != v or s % 2 == 0 or s < 3:
        return None
    i = (s + 1) // 2
    t = s * (s - (-1) ** (i - 1)) // 2
    return i if t == r else None


def pyd_admissible_search(v_max: int, odd_squares_only: bool | None = None) -> list[PYDParameterSet]:
    """All (v, r) with r < v < r^2, v | r^2 and integral BIBD pair count.

    odd_squares_only=False restricts output to v that are NOT odd squares
    (used to confirm that range is empty); None means no restriction.
    """
    out = []
    # v | r^2 and r < v <= v_max; also v < r^2 requires r > sqrt(v)
    for r in range(2, v_max):
        rr = r * r
        # divisors of r^2 in (r, min(v_max, r^2 - 1)]
        for v in _divisors_between(rr, r + 1, min(v_max, rr - 1)):
            e = rr // v
            if (2 * e * (r - 1)) % (v - 1):
                continue
            s = isqrt(v)
            is_odd_square = s * s == v and s % 2 == 1
            if odd_squares_only is False and is_odd_square:
                continue
            if odd_squares_only is True and not is_odd_square:
                continue
            out.append(
                PYDParameterSet(v=v, r=r, e=e, lambda_bibd=(2 * e * (r - 1)) // (v - 1),
                                series_index=_main_series_index(v, r))
            )
    return sorted(out, key=lambda p: (p.v, p.r))


def _divisors_between(n: int, lo: int, hi: int) -> list[int]:
    if hi < lo:
        return []
    divs = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            if lo <= d <= hi:
                divs.append(d)
            q = n // d
            if q != d and lo <= q <= hi:
                divs.append(q)
        d += 1
    return sorted(divs)


def pyd_extra_dimension_report(v_max: int) -> list[dict]:
    """Group the PYD parameter search by v and flag values of v admitting
    more than one r (the series only predicts one)."""
    groups: dict[int, list[PYDParameterSet]] = {}
    for p in pyd_admissible_search(v_max):
        groups.setdefault(p.v, []).append(p)
    report = []
    for v in sorted(groups):
        rs = [p.r for p in groups[v]]
        report.append(
            {
                "v": v,
                "r_values": rs,
                "main_series_r": next((p.r for p in groups[v] if p.main_series), None),
                "extra": len(rs) > 1,
            }
        )
    return report
