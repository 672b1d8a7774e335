"""Satisfiability models for design existence, plus a tiny complete solver.

One Boolean variable per (row, column, symbol) triple, with linear
pseudo-Boolean constraints forcing binarity, equireplication and the target
intersection properties.  Properness (a property required to fail) becomes a
disjunction over line pairs of 'deviates above' / 'deviates below'
indicators.  Models are written in OPB or DIMACS CNF; the built-in solver is
only meant for desk-size verification, industrial instances go to an
external pseudo-Boolean solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from .core import RowColumnArray, from_matrix
from .params import derive

_REQUIRED = {
    "TA": ("rr", "cc", "rc"),
    "DA": ("rr", "cc"),
    "SA": ("rr", "rc"),
    "SA_T": ("cc", "rc"),
    "MA": ("cc",),
    "MA_T": ("rr",),
    "AO": ("rc",),
}


@dataclass
class Linear:
    """sum(coef * var) within [lo, hi]; var indices are 1-based."""

    coefs: list[int]
    vars: list[int]
    lo: int | None
    hi: int | None


@dataclass
class PBModel:
    v: int
    r: int
    c: int
    target: str
    proper: bool
    nvars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    linears: list[Linear] = field(default_factory=list)
    varmap: dict[str, int] = field(default_factory=dict)

    def new_var(self, name: str) -> int:
        self.nvars += 1
        self.varmap[name] = self.nvars
        return self.nvars

    def x(self, i: int, j: int, s: int) -> int:
        return self.varmap[f"x[{i},{j},{s}]"]

    def eq(self, coefs, vars_, k):
        self.linears.append(Linear(list(coefs), list(vars_), k, k))

    def le(self, coefs, vars_, k):
        self.linears.append(Linear(list(coefs), list(vars_), None, k))

    def ge(self, coefs, vars_, k):
        self.linears.append(Linear(list(coefs), list(vars_), k, None))


class ModelError(ValueError):
    pass


def _pair_family(model: PBModel, p, family: str, members: dict) -> dict:
    """AND-variables y counting common symbols of each line pair of a family.

    members maps (line, s) -> membership var.  Returns {pair: [y vars]}.
    """
    v = model.v
    if family == "rr":
        pairs = list(combinations(range(model.r), 2))
        key = lambda pair, s: (("w", pair[0], s), ("w", pair[1], s))
    elif family == "cc":
        pairs = list(combinations(range(model.c), 2))
        key = lambda pair, s: (("m", pair[0], s), ("m", pair[1], s))
    else:  # rc
        pairs = [(i, j) for i in range(model.r) for j in range(model.c)]
        key = lambda pair, s: (("w", pair[0], s), ("m", pair[1], s))
    out = {}
    for pair in pairs:
        ys = []
        for s in range(v):
            k1, k2 = key(pair, s)
            v1, v2 = members[k1], members[k2]
            y = model.new_var(f"y{family}[{pair},{s}]")
            # y = v1 AND v2
            model.clauses.append([-y, v1])
            model.clauses.append([-y, v2])
            model.clauses.append([y, -v1, -v2])
            ys.append(y)
        out[pair] = ys
    return out


def build_model(v: int, r: int, c: int, target: str, proper: bool = True) -> PBModel:
    """Encode existence of a (proper) row-column design of one type.

    Raises ModelError on divisibility-inadmissible parameters, mirroring the
    enumerator's refusal.
    """
    if target not in _REQUIRED:
        raise ModelError(f"unknown target {target!r}")
    p = derive(v, r, c)
    e = p.e_int
    if e is None:
        raise ModelError(f"rc/v = {p.e} is not an integer")
    required = _REQUIRED[target]
    lam = {"rr": p.lam_int("rr"), "cc": p.lam_int("cc"), "rc": p.lam_int("rc")}
    for fam in required:
        if lam[fam] is None:
            raise ModelError(f"{fam} constant {getattr(p, 'lambda_' + fam)} is not an integer")

    model = PBModel(v=v, r=r, c=c, target=target, proper=proper)
    for i in range(r):
        for j in range(c):
            for s in range(v):
                model.new_var(f"x[{i},{j},{s}]")
    # exactly one symbol per cell
    for i in range(r):
        for j in range(c):
            xs = [model.x(i, j, s) for s in range(v)]
            model.clauses.append(list(xs))
            model.eq([1] * v, xs, 1)
    # binarity
    for i in range(r):
        for s in range(v):
            model.le([1] * c, [model.x(i, j, s) for j in range(c)], 1)
    for j in range(c):
        for s in range(v):
            model.le([1] * r, [model.x(i, j, s) for i in range(r)], 1)
    # equireplication
    for s in range(v):
        model.eq([1] * (r * c), [model.x(i, j, s) for i in range(r) for j in range(c)], e)

    forbidden = [f for f in ("rr", "cc", "rc") if f not in required] if proper else []
    # forbidden families whose average is non-integral fail automatically
    forbidden = [f for f in forbidden if lam[f] is not None]

    need_w = any(f in ("rr", "rc") for f in list(required) + forbidden)
    need_m = any(f in ("cc", "rc") for f in list(required) + forbidden)
    members: dict = {}
    if need_w:
        for i in range(r):
            for s in range(v):
                w = model.new_var(f"w[{i},{s}]")
                members[("w", i, s)] = w
                model.eq([1] * c + [-1], [model.x(i, j, s) for j in range(c)] + [w], 0)
    if need_m:
        for j in range(c):
            for s in range(v):
                m = model.new_var(f"m[{j},{s}]")
                members[("m", j, s)] = m
                model.eq([1] * r + [-1], [model.x(i, j, s) for i in range(r)] + [m], 0)

    caps = {"rr": c, "cc": r, "rc": min(r, c)}
    for fam in required:
        ys = _pair_family(model, p, fam, members)
        for pair, yvars in ys.items():
            model.eq([1] * v, yvars, lam[fam])
    for fam in forbidden:
        ys = _pair_family(model, p, fam, members)
        deviants = []
        L = lam[fam]
        cap = caps[fam]
        for pair, yvars in ys.items():
            up = model.new_var(f"dev+{fam}[{pair}]")
            dn = model.new_var(f"dev-{fam}[{pair}]")
            # up -> sum >= L+1 ;  dn -> sum <= L-1 (vacuous when unset)
            model.ge([1] * v + [-(L + 1)], yvars + [up], 0)
            model.le([1] * v + [cap - L + 1], yvars + [dn], cap)
            deviants.extend([up, dn])
        model.clauses.append(deviants)
        model.ge([1] * len(deviants), deviants, 1)
    return model


# ---------------------------------------------------------------------------
# Emission.
# ---------------------------------------------------------------------------


def emit_opb(model: PBModel) -> str:
    """Linear pseudo-Boolean format: '>=' and '=' rows, ';'-terminated."""
    rows = []
    for cl in model.clauses:
        terms = []
        rhs = 1
        for lit in cl:
            if lit > 0:
                terms.append(f"+1 x{lit}")
            else:
                terms.append(f"-1 x{-lit}")
                rhs -= 1
        rows.append(" ".join(terms) + f" >= {rhs} ;")
    for lin in model.linears:
        terms = " ".join(
            f"{'+' if co >= 0 else '-'}{abs(co)} x{va}" for co, va in zip(lin.coefs, lin.vars)
        )
        if lin.lo is not None and lin.hi is not None and lin.lo == lin.hi:
            rows.append(f"{terms} = {lin.lo} ;")
        else:
            if lin.lo is not None:
                rows.append(f"{terms} >= {lin.lo} ;")
            if lin.hi is not None:
                neg = " ".join(
                    f"{'+' if -co >= 0 else '-'}{abs(co)} x{va}"
                    for co, va in zip(lin.coefs, lin.vars)
                )
                rows.append(f"{neg} >= {-lin.hi} ;")
    head = f"* #variable= {model.nvars} #constraint= {len(rows)}\n"
    head += f"* row-column design model: v={model.v} r={model.r} c={model.c} target={model.target} proper={model.proper}\n"
    return head + "\n".join(rows) + "\n"


def emit_varmap(model: PBModel) -> str:
    return json.dumps(
        {
            "v": model.v, "r": model.r, "c": model.c,
            "target": model.target, "proper": model.proper,
            "variables": model.varmap,
        },
        indent=0, sort_keys=True,
    )


def _at_most_k_clauses(vars_: list[int], k: int) -> list[list[int]]:
    return [[-x for x in sub] for sub in combinations(vars_, k + 1)]


def _at_least_k_clauses(vars_: list[int], k: int) -> list[list[int]]:
    n = len(vars_)
    return [list(sub) for sub in combinations(vars_, n - k + 1)]


def emit_cnf(model: PBModel, clause_budget: int = 2_000_000) -> str:
    """DIMACS CNF with every linear constraint expanded binomially.

    Practical for tiny instances only; the budget guards the blow-up.
    """
    clauses: list[list[int]] = [list(cl) for cl in model.clauses]
    for lin in model.linears:
        pos = [v for co, v in zip(lin.coefs, lin.vars) if co == 1]
        neg = [v for co, v in zip(lin.coefs, lin.vars) if co != 1]
        if all(co in (1, -1) for co in lin.coefs) and len(neg) <= 1:
            # sum(pos) - neg in [lo, hi]; treat the common shapes
            if not neg:
                if lin.hi is not None:
                    clauses.extend(_at_most_k_clauses(pos, lin.hi))
                if lin.lo is not None and lin.lo > 0:
                    clauses.extend(_at_least_k_clauses(pos, lin.lo))
            else:
                w = neg[0]
                # sum(pos) - w = 0  <->  w = sum(pos): w -> >=1 and each x -> w
                if lin.lo == 0 and lin.hi == 0:
                    clauses.append([-w] + pos)
                    for x in pos:
                        clauses.append([-x, w])
                else:
                    raise ModelError("unsupported mixed linear for CNF export")
        else:
            # indicator rows from properness: c0*x0 + sum(y) >= lo or <= hi
            ind = lin.vars[-1]
            co = lin.coefs[-1]
            ys = lin.vars[:-1]
            if lin.lo is not None and lin.hi is None and co < 0:
                # sum(y) >= (-co) when ind: clause set with ind negated
                k = -co
                for sub in combinations(ys, len(ys) - k + 1):
                    clauses.append([-ind] + list(sub))
            elif lin.hi is not None and lin.lo is None and co > 0:
                # sum(y) <= hi - co when ind
                k = lin.hi - co
                for sub in combinations(ys, k + 1):
                    clauses.append([-ind] + [-y for y in sub])
            else:
                raise ModelError("unsupported linear for CNF export")
        if len(clauses) > clause_budget:
            raise ModelError(f"CNF expansion exceeds {clause_budget} clauses")
    out = [f"p cnf {model.nvars} {len(clauses)}"]
    out.extend(" ".join(str(l) for l in cl) + " 0" for cl in clauses)
    return "\n".join(out) + "\n"


def validate_opb(text: str) -> bool:
    """Syntactic check of the emitted OPB file."""
    import re

    lines = text.strip().split("\n")
    if not lines[0].startswith("* #variable="):
        return False
    m = re.match(r"\* #variable= (\d+) #constraint= (\d+)", lines[0])
    if not m:
        return False
    nv, nc = int(m.group(1)), int(m.group(2))
    body = [ln for ln in lines[1:] if not ln.startswith("*")]
    if len(body) != nc:
        return False
    term = re.compile(r"^([+-]\d+ x\d+ )+(>=|=) -?\d+ ;$")
    for ln in body:
        if not term.match(ln):
            return False
        for tok in re.findall(r"x(\d+)", ln):
            if not (1 <= int(tok) <= nv):
                return False
    return True


# ---------------------------------------------------------------------------
# Naive complete solver: DPLL with unit propagation on clauses and bound
# propagation on linear constraints.
# ---------------------------------------------------------------------------


@dataclass
class SolveResult:
    status: str  # SAT | UNSAT | UNKNOWN
    assignment: dict[int, bool] | None
    nodes: int


def naive_solve(model: PBModel, node_budget: int = 200_000) -> SolveResult:
    nvars = model.nvars
    assign = [-1] * (nvars + 1)
    clauses = model.clauses
    linears = model.linears
    var_clauses: list[list[int]] = [[] for _ in range(nvars + 1)]
    for idx, cl in enumerate(clauses):
        for lit in cl:
            var_clauses[abs(lit)].append(idx)
    var_linears: list[list[int]] = [[] for _ in range(nvars + 1)]
    for idx, lin in enumerate(linears):
        for va in lin.vars:
            var_linears[va].append(idx)

    def propagate(trail: list[int]) -> bool:
        queue = list(range(len(clauses)))
        lqueue = list(range(len(linears)))
        while queue or lqueue:
            while queue:
                ci = queue.pop()
                cl = clauses[ci]
                unassigned = None
                n_un = 0
                sat = False
                for lit in cl:
                    vv = assign[abs(lit)]
                    if vv == -1:
                        n_un += 1
                        unassigned = lit
                        if n_un > 1:
                            break
                    elif (vv == 1) == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if n_un == 0:
                    return False
                if n_un == 1:
                    va = abs(unassigned)
                    val = 1 if unassigned > 0 else 0
                    assign[va] = val
                    trail.append(va)
                    queue.extend(var_clauses[va])
                    lqueue.extend(var_linears[va])
            while lqueue:
                li = lqueue.pop()
                lin = linears[li]
                lo_sum = 0
                hi_sum = 0
                for co, va in zip(lin.coefs, lin.vars):
                    vv = assign[va]
                    if vv == -1:
                        if co > 0:
                            hi_sum += co
                        else:
                            lo_sum += co
                    elif vv == 1:
                        lo_sum += co
                        hi_sum += co
                if lin.hi is not None and lo_sum > lin.hi:
                    return False
                if lin.lo is not None and hi_sum < lin.lo:
                    return False
                for co, va in zip(lin.coefs, lin.vars):
                    if assign[va] != -1:
                        continue
                    # try x=1: min becomes lo_sum + max(co,0)... recompute contribution
                    min1 = lo_sum + co if co > 0 else lo_sum
                    max1 = hi_sum if co > 0 else hi_sum + co
                    min0 = lo_sum if co > 0 else lo_sum - co
                    max0 = hi_sum - co if co > 0 else hi_sum
                    bad1 = (lin.hi is not None and min1 > lin.hi) or (
                        lin.lo is not None and max1 < lin.lo
                    )
                    bad0 = (lin.hi is not None and min0 > lin.hi) or (
                        lin.lo is not None and max0 < lin.lo
                    )
                    if bad0 and bad1:
                        return False
                    if bad0 or bad1:
                        assign[va] = 0 if bad1 else 1
                        trail.append(va)
                        queue.extend(var_clauses[va])
                        lqueue.extend(var_linears[va])
                        break
        return True

    nodes = 0

    def undo(trail: list[int], mark: int):
        while len(trail) > mark:
            assign[trail.pop()] = -1

    def dpll() -> str:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            return "UNKNOWN"
        branch = -1
        for va in range(1, nvars + 1):
            if assign[va] == -1:
                branch = va
                break
        if branch == -1:
            return "SAT"
        for val in (1, 0):
            trail: list[int] = []
            assign[branch] = val
            trail.append(branch)
            if propagate(trail):
                res = dpll()
                if res != "UNSAT":
                    undo(trail, 0) if res == "UNKNOWN" else None
                    return res
            undo(trail, 0)
        return "UNSAT"

    trail0: list[int] = []
    if not propagate(trail0):
        return SolveResult("UNSAT", None, 0)
    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(10000 + nvars * 4)
    try:
        res = dpll()
    finally:
        sys.setrecursionlimit(old)
    if res == "SAT":
        return SolveResult("SAT", {vv: assign[vv] == 1 for vv in range(1, nvars + 1)}, nodes)
    return SolveResult(res, None, nodes)


def decode_assignment(model: PBModel, assignment: dict[int, bool]) -> RowColumnArray:
    grid = [[None] * model.c for _ in range(model.r)]
    for i in range(model.r):
        for j in range(model.c):
            hits = [s for s in range(model.v) if assignment[model.x(i, j, s)]]
            if len(hits) != 1:
                raise ModelError(f"cell ({i},{j}) decodes to {hits}")
            grid[i][j] = hits[0]
    return from_matrix(grid, model.v)


def encode_array(model: PBModel, a: RowColumnArray) -> dict[int, bool]:
    """Assignment of the x/w/m/y layer implied by a concrete array.

    Deviation indicators are set consistently so satisfaction can be checked
    for arrays of the model's target type.
    """
    assignment = {vv: False for vv in range(1, model.nvars + 1)}
    for i in range(model.r):
        for j in range(model.c):
            assignment[model.x(i, j, a.cells[i][j])] = True
    rows = [set(row) for row in a.cells]
    cols = [set(a.cells[i][j] for i in range(model.r)) for j in range(model.c)]
    for name, idx in model.varmap.items():
        if name.startswith("w["):
            i, s = json.loads("[" + name[2:-1] + "]")
            assignment[idx] = s in rows[i]
        elif name.startswith("m["):
            j, s = json.loads("[" + name[2:-1] + "]")
            assignment[idx] = s in cols[j]
    for name, idx in model.varmap.items():
        if name.startswith("yrr"):
            pair, s = _parse_pair_name(name)
            assignment[idx] = s in rows[pair[0]] and s in rows[pair[1]]
        elif name.startswith("ycc"):
            pair, s = _parse_pair_name(name)
            assignment[idx] = s in cols[pair[0]] and s in cols[pair[1]]
        elif name.startswith("yrc"):
            pair, s = _parse_pair_name(name)
            assignment[idx] = s in rows[pair[0]] and s in cols[pair[1]]
    p = derive(model.v, model.r, model.c)
    for name, idx in model.varmap.items():
        if name.startswith("dev"):
            fam = name[4:6]
            pair = _parse_pair_name(name, with_symbol=False)
            L = p.lam_int(fam)
            if fam == "rr":
                size = len(rows[pair[0]] & rows[pair[1]])
            elif fam == "cc":
                size = len(cols[pair[0]] & cols[pair[1]])
            else:
                size = len(rows[pair[0]] & cols[pair[1]])
            if name.startswith("dev+"):
                assignment[idx] = size >= L + 1
            else:
                assignment[idx] = size <= L - 1
    return assignment


def _parse_pair_name(name: str, with_symbol: bool = True):
    inner = name[name.index("[") + 1 : name.rindex("]")]
    # format: (a, b),s  or  (a, b)
    pair_part = inner[inner.index("(") + 1 : inner.index(")")]
    a, b = (int(x) for x in pair_part.split(","))
    if not with_symbol:
        return (a, b)
    s = int(inner[inner.index(")") + 2 :])
    return (a, b), s


def check_assignment(model: PBModel, assignment: dict[int, bool]) -> bool:
    for cl in model.clauses:
        if not any(assignment[abs(l)] == (l > 0) for l in cl):
            return False
    for lin in model.linears:
        total = sum(co for co, va in zip(lin.coefs, lin.vars) if assignment[va])
        if lin.lo is not None and total < lin.lo:
            return False
        if lin.hi is not None and total > lin.hi:
            return False
    return True
