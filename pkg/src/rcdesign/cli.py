"""Command-line entry point: parameter scans, enumeration, constructions,
heuristic search, satisfiability models, Youden/PYD tools, report rendering.

Exit codes: 0 success, 2 usage error, 3 refused budget / infeasible request.
Machine output is JSON (--format json), human output aligned text tables.
Every run writes a manifest recording inputs, seeds and output digests.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .core import format_array, format_array_list, parse_array
from .enumeration import (
    BudgetExceeded,
    ao_target,
    cc_target,
    enumerate_designs,
    enumerate_via_sdr,
)
from .params import (
    TYPE_COLUMNS,
    derive,
    enumerate_admissible,
    pyd_admissible_search,
    pyd_extra_dimension_report,
    pyd_main_series,
    search_small_v,
)

EXIT_BUDGET = 3


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return _sha256(text.encode())


class Manifest:
    def __init__(self, argv: list[str], seed: int | None = None):
        self.data = {
            "tool": "rcdesign",
            "version": __version__,
            "argv": argv,
            "seed": seed,
            "inputs": {},
            "outputs": {},
            "started": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "finished": None,
        }

    def add_input(self, path: str | Path):
        p = Path(path)
        self.data["inputs"][str(p)] = _sha256(p.read_bytes())

    def add_output(self, path: str | Path, digest: str):
        self.data["outputs"][str(path)] = digest

    def write(self, path: Path):
        self.data["finished"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        _atomic_write(path, json.dumps(self.data, indent=1, sort_keys=True))


def _set_jobs(jobs: int | None):
    if jobs:
        import numba

        numba.set_num_threads(max(1, jobs))


# ---------------------------------------------------------------------------
# Table rendering shared by `params` and `report`.
# ---------------------------------------------------------------------------

_DISPLAY = {"MA": "MA", "SA_T": "SA^T", "MA_T": "MA^T", "SA": "SA", "DA": "DA", "TA": "TA", "AO": "AO"}


def render_master_table(v_max: int, counts: dict | None = None) -> str:
    """Rows (v, e, r x c) with one cell per design type: a count when known,
    '+' when admissible without data, '-' when property-forced out, blank
    when not admissible."""
    rows = enumerate_admissible(v_max)
    head = ["v", "e", "rxc"] + [_DISPLAY[t] for t in TYPE_COLUMNS]
    table = [head]
    last_v = last_e = None
    for p in rows:
        cells = [
            str(p.v) if p.v != last_v else "",
            str(p.e_int) if (p.v, p.e_int) != (last_v, last_e) else "",
            f"{p.r}x{p.c}",
        ]
        for t in TYPE_COLUMNS:
            status = p.type_status(t)
            if status == "adm":
                val = None
                if counts:
                    val = counts.get((p.v, p.r, p.c, t))
                cells.append(str(val) if val is not None else "+")
            elif status == "-":
                cells.append("-")
            else:
                cells.append("")
        last_v, last_e = p.v, p.e_int
        table.append(cells)
    widths = [max(len(row[i]) for row in table) for i in range(len(head))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def cmd_params(args, manifest: Manifest) -> int:
    if args.small_v:
        found = search_small_v(args.vmax, relax=args.relax)
        payload = [{"v": v, "r": r, "c": c} for v, r, c in found]
        text = json.dumps(payload, indent=0) + "\n" if args.format == "json" else (
            "\n".join(f"{v} {r} {c}" for v, r, c in found) + ("\n" if found else "empty\n")
        )
    elif args.format == "json":
        text = "\n".join(json.dumps(p.to_json(), sort_keys=True) for p in enumerate_admissible(args.vmax)) + "\n"
    else:
        text = render_master_table(args.vmax)
    return _deliver(text, args.out, manifest)


def _deliver(text: str, out: str | None, manifest: Manifest) -> int:
    if out:
        digest = _atomic_write(Path(out), text)
        manifest.add_output(out, digest)
    else:
        sys.stdout.write(text)
    return 0


def cmd_enumerate(args, manifest: Manifest) -> int:
    if args.mode == "ao":
        target = ao_target(args.v, args.r, args.c)
    else:
        target = cc_target(args.v, args.r, args.c, constrain=args.constrain)
    ckdir = args.checkpoint or os.environ.get("RCDESIGN_CHECKPOINT_DIR")
    if ckdir and not args.checkpoint:
        ckdir = str(Path(ckdir) / f"v{args.v}_r{args.r}_c{args.c}_{args.mode}{args.constrain}")
    method = enumerate_via_sdr if args.method == "sdr" else enumerate_designs
    kwargs = {}
    if method is enumerate_designs:
        kwargs = dict(
            child_budget=args.child_budget,
            partial_budget=args.partial_budget,
            checkpoint_dir=ckdir,
            progress=args.progress,
        )
    report = method(target, **kwargs)
    outdir = Path(args.out_dir)
    payload = report.to_json()
    payload["labels"] = sorted(report.counts)
    digest = _atomic_write(outdir / "report.json", json.dumps(payload, indent=1, sort_keys=True))
    manifest.add_output(outdir / "report.json", digest)
    if args.label_filter:
        labels = [l for l in report.representatives if l in args.label_filter.split(",")]
    else:
        labels = sorted(report.representatives)
    for label in labels:
        text = format_array_list(report.representatives[label])
        digest = _atomic_write(outdir / f"reps_{label}.txt", text)
        manifest.add_output(outdir / f"reps_{label}.txt", digest)
    if report.reason:
        print(f"refused/empty: {report.reason}")
    else:
        print(f"{target.describe()} -> {dict(sorted(report.counts.items()))}")
    return 0


def cmd_construct(args, manifest: Manifest) -> int:
    from . import construct as con

    if args.kind == "half-latin-ao":
        arr = con.half_latin_ao(args.k)
    elif args.kind == "cyclic-latin":
        arr = con.cyclic_latin_square(args.n)
    elif args.kind == "latin-rectangle":
        arr = con.latin_rectangle(args.n, args.rows, args.cols)
    elif args.kind == "ao-for-params":
        arr = con.ao_for_params(args.v, args.r, args.c)
    elif args.kind == "sesqui-product":
        base, _ = parse_array(Path(args.base).read_text())
        manifest.add_input(args.base)
        if args.connected:
            arr = con.sesqui_product_connected(base, args.m, seed=args.seed or 0)
        else:
            arr = con.sesqui_product(base, args.m)
    elif args.kind in ("mono-product", "ao-product"):
        a, _ = parse_array(Path(args.base).read_text())
        b, _ = parse_array(Path(args.other).read_text())
        manifest.add_input(args.base)
        manifest.add_input(args.other)
        fn = con.mono_product if args.kind == "mono-product" else con.ao_product
        arr = fn(a, b)
    else:
        raise ValueError(f"unknown construction {args.kind}")
    return _deliver(format_array(arr), args.out, manifest)


def cmd_search(args, manifest: Manifest) -> int:
    from . import heuristic as h

    res = h.local_search(
        args.v, args.r, args.c, args.target,
        seed=args.seed, max_restarts=args.max_restarts,
        max_steps=args.max_steps, jobs=args.jobs or 1,
    )
    payload = {
        "params": {"v": args.v, "r": args.r, "c": args.c},
        "target": args.target,
        "seed": args.seed,
        "success": res.success,
        "proper": res.proper,
        "label": res.classification.label if res.classification else None,
        "best_violations": res.best_violations,
        "restarts_used": res.restarts_used,
        "steps_used": res.steps_used,
        "array": [list(row) for row in res.found.cells] if res.found else None,
    }
    text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    rcode = _deliver(text, args.out, manifest)
    if args.array_out and res.found:
        digest = _atomic_write(Path(args.array_out), format_array(res.found))
        manifest.add_output(args.array_out, digest)
    return rcode if res.success else EXIT_BUDGET


def cmd_sat(args, manifest: Manifest) -> int:
    from . import satgen as sg

    model = sg.build_model(args.v, args.r, args.c, args.target, proper=not args.improper)
    if args.sat_cmd == "emit":
        text = sg.emit_opb(model) if args.fmt == "opb" else sg.emit_cnf(model)
        ret = _deliver(text, args.out, manifest)
        if args.varmap:
            digest = _atomic_write(Path(args.varmap), sg.emit_varmap(model))
            manifest.add_output(args.varmap, digest)
        return ret
    res = sg.naive_solve(model, node_budget=args.node_budget)
    payload = {"status": res.status, "nodes": res.nodes, "array": None}
    if res.status == "SAT":
        arr = sg.decode_assignment(model, res.assignment)
        payload["array"] = [list(row) for row in arr.cells]
    _deliver(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out, manifest)
    return 0 if res.status in ("SAT", "UNSAT") else EXIT_BUDGET


def cmd_youden(args, manifest: Manifest) -> int:
    from . import youden as yo

    if args.youden_cmd == "enumerate":
        yrs = yo.enumerate_youden(args.n, args.k)
        text = format_array_list([y.array for y in yrs], tag="YR")
        return _deliver(text, args.out, manifest)
    cov = yo.youden_coverage(args.n, args.k)
    payload = {
        "yr_count": cov["yr_count"],
        "params": list(cov["params"]),
        "fractions": {k: list(v) for k, v in cov["fractions"].items()},
    }
    return _deliver(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out, manifest)


def cmd_pyd(args, manifest: Manifest) -> int:
    from . import youden as yo

    if args.pyd_cmd == "series":
        p = pyd_main_series(args.i)
        payload = {"i": args.i, "v": p.v, "r": p.r, "e": p.e, "lambda": p.lambda_bibd}
    elif args.pyd_cmd == "search":
        sets = pyd_admissible_search(
            args.vmax, odd_squares_only=False if args.non_square_only else None
        )
        payload = {
            "sets": [
                {"v": p.v, "r": p.r, "e": p.e, "lambda": p.lambda_bibd,
                 "main_series_index": p.series_index}
                for p in sets
            ],
            "multi_r": [g for g in pyd_extra_dimension_report(args.vmax) if g["extra"]],
        }
    else:  # check
        arr, _ = parse_array(Path(args.array).read_text())
        manifest.add_input(args.array)
        payload = {"is_pyd": yo.is_pyd(arr)}
    return _deliver(json.dumps(payload, indent=1, sort_keys=True) + "\n", args.out, manifest)


def cmd_report(args, manifest: Manifest) -> int:
    counts: dict = {}
    for f in sorted(Path(args.reports_dir).glob("**/report.json")):
        data = json.loads(f.read_text())
        t = data["target"]
        for label, n in data["counts"].items():
            counts[(t["v"], t["r"], t["c"], label)] = n
            # a constant-CC run at (v,r,c) also fills the transposed cells
            flip = {"MA": "MA_T", "MA_T": "MA", "SA": "SA_T", "SA_T": "SA"}
            if label in flip:
                counts.setdefault((t["v"], t["c"], t["r"], flip[label]), n)
            else:
                counts.setdefault((t["v"], t["c"], t["r"], label), n)
    text = render_master_table(args.vmax, counts)
    return _deliver(text, args.out, manifest)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rcdesign",
        description="row-column design enumeration and construction toolkit",
    )
    ap.add_argument("--manifest", default=None, help="manifest path (default <out>.manifest.json or stdout runs skip it)")
    ap.add_argument("--jobs", type=int, default=None, help="worker threads for parallel kernels")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("params", help="admissible parameter sets / master table")
    p.add_argument("--vmax", type=int, required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--small-v", action="store_true", help="scan for admissible sets with v < r+c-1")
    p.add_argument("--relax", choices=["double", "rr-only", "cc-only", "ao"], default="double")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("enumerate", help="complete enumeration of one parameter set")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--mode", choices=["cc", "ao"], required=True)
    p.add_argument("--constrain", choices=["", "da", "sat"], default="")
    p.add_argument("--method", choices=["bfs", "sdr"], default="bfs")
    p.add_argument("--label-filter", default="")
    p.add_argument("--child-budget", type=int, default=60_000_000)
    p.add_argument("--partial-budget", type=int, default=8_000_000)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--progress", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("construct", help="checked builders")
    p.add_argument("kind", choices=[
        "half-latin-ao", "cyclic-latin", "latin-rectangle",
        "ao-for-params", "sesqui-product", "mono-product", "ao-product",
    ])
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--v", type=int, default=None)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--base", default=None, help="input array file")
    p.add_argument("--other", default=None, help="second input array file")
    p.add_argument("--connected", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("search", help="heuristic local search")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--target", required=True,
                   choices=["TA", "DA", "SA", "SA_T", "MA", "MA_T", "AO"])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-restarts", type=int, default=200)
    p.add_argument("--max-steps", type=int, default=4000)
    p.add_argument("--out", default=None)
    p.add_argument("--array-out", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sat", help="satisfiability models")
    satsub = p.add_subparsers(dest="sat_cmd", required=True)
    for scmd in ("emit", "solve"):
        sp = satsub.add_parser(scmd)
        sp.add_argument("--v", type=int, required=True)
        sp.add_argument("--r", type=int, required=True)
        sp.add_argument("--c", type=int, required=True)
        sp.add_argument("--target", required=True,
                        choices=["TA", "DA", "SA", "SA_T", "MA", "MA_T", "AO"])
        sp.add_argument("--improper", action="store_true",
                        help="drop the properness (forced-failure) constraints")
        sp.add_argument("--out", default=None)
        if scmd == "emit":
            sp.add_argument("--fmt", choices=["opb", "cnf"], default="opb")
            sp.add_argument("--varmap", default=None)
        else:
            sp.add_argument("--node-budget", type=int, default=200_000)
        sp.set_defaults(func=cmd_sat)

    p = sub.add_parser("youden", help="Youden rectangle tools")
    ysub = p.add_subparsers(dest="youden_cmd", required=True)
    for ycmd in ("enumerate", "coverage"):
        yp = ysub.add_parser(ycmd)
        yp.add_argument("--n", type=int, required=True)
        yp.add_argument("--k", type=int, required=True)
        yp.add_argument("--out", default=None)
        yp.set_defaults(func=cmd_youden)

    p = sub.add_parser("pyd", help="binary pseudo-Youden parameter tools")
    psub = p.add_subparsers(dest="pyd_cmd", required=True)
    sp = psub.add_parser("series")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_pyd)
    sp = psub.add_parser("search")
    sp.add_argument("--vmax", type=int, required=True)
    sp.add_argument("--non-square-only", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_pyd)
    sp = psub.add_parser("check")
    sp.add_argument("--array", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_pyd)

    p = sub.add_parser("report", help="render stored enumeration reports as the master table")
    p.add_argument("--reports-dir", required=True)
    p.add_argument("--vmax", type=int, default=14)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    _set_jobs(args.jobs)
    manifest = Manifest(argv, seed=getattr(args, "seed", None))
    try:
        code = args.func(args, manifest)
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    manifest_path = args.manifest
    if manifest_path is None:
        out = getattr(args, "out", None) or getattr(args, "out_dir", None)
        if out:
            out = Path(out)
            manifest_path = (out / "manifest.json") if out.is_dir() else out.with_name(out.name + ".manifest.json")
    if manifest_path:
        manifest.write(Path(manifest_path))
    return code


if __name__ == "__main__":
    sys.exit(main())
