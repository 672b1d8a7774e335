#!/usr/bin/env python3
"""Stretch run: complete enumeration of 6x6 adjusted-orthogonal arrays on 9
symbols, plus the transpose-merged class count and both histograms.

Writes JSON + representative list files under --out-dir and checkpoints each
BFS level so the run can resume after interruption.
"""

import argparse
import json
import time
from pathlib import Path

from rcdesign import ao_target, enumerate_designs
from rcdesign.canonical import autotrisotopism_histogram, trisotopic_classes
from rcdesign.core import format_array_list


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="runs/ao_9_6_6")
    ap.add_argument("--child-budget", type=int, default=400_000_000)
    ap.add_argument("--partial-budget", type=int, default=60_000_000)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.time()
    report = enumerate_designs(
        ao_target(9, 6, 6),
        child_budget=args.child_budget,
        partial_budget=args.partial_budget,
        checkpoint_dir=out / "checkpoint",
        progress=True,
    )
    print("counts:", report.counts)
    print("stats:", report.stats)

    reps = report.representatives.get("AO", [])
    (out / "reps_AO.txt").write_text(format_array_list(reps))

    tris = trisotopic_classes(reps)
    tris_hist = autotrisotopism_histogram(tris)
    payload = report.to_json()
    payload["trisotopism_classes"] = len(tris)
    payload["autotrisotopism_histogram"] = {str(k): v for k, v in sorted(tris_hist.items())}
    payload["total_wall_time"] = round(time.time() - t0, 1)
    (out / "report.json").write_text(json.dumps(payload, indent=1, sort_keys=True))
    print("trisotopism classes:", len(tris))
    print("autotrisotopism histogram:", dict(sorted(tris_hist.items())))


if __name__ == "__main__":
    main()
