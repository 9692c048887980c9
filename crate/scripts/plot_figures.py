#!/usr/bin/env python3
"""Plot the committed figure CSVs.

Reads figures/out/*.csv and, when matplotlib is importable, writes one PNG
per figure pairing the solid and dashed series. Without matplotlib it just
prints a per-series summary, so the repo carries no plotting dependency.

Usage: scripts/plot_figures.py [--dir figures/out] [--save-to DIR]
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def load_series(path):
    meta = {}
    rows = []
    with open(path, newline="") as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            else:
                body.append(line)
        for row in csv.DictReader(body):
            rows.append(
                (int(row["t"]), float(row["overlap"]), float(row["p_m"]))
            )
    return meta, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", default="figures/out", type=Path)
    ap.add_argument("--save-to", default=None, type=Path)
    args = ap.parse_args()

    files = sorted(args.dir.glob("*.csv"))
    if not files:
        sys.exit(f"no CSV files under {args.dir}")

    series = {p.stem: load_series(p) for p in files}
    for name, (meta, rows) in series.items():
        p_ms = [r[2] for r in rows]
        overlaps = [r[1] for r in rows]
        print(
            f"{name}: {meta.get('graph', '?')}, {len(rows)} rows, "
            f"min overlap {min(overlaps):.4f}, max p_M {max(p_ms):.6f}"
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; summaries only", file=sys.stderr)
        return

    out_dir = args.save_to or args.dir
    groups = defaultdict(dict)
    for name in series:
        stem, _, style = name.rpartition("_")
        if style in ("solid", "dashed") and stem:
            groups[stem][style] = name
        else:
            groups[name]["solid"] = name

    for stem, styles in sorted(groups.items()):
        fig, (ax_ov, ax_pm) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
        for style, linestyle in (("solid", "-"), ("dashed", "--")):
            if style not in styles:
                continue
            _, rows = series[styles[style]]
            ts = [r[0] for r in rows]
            ax_ov.plot(ts, [r[1] for r in rows], linestyle, label=style)
            ax_pm.plot(ts, [r[2] for r in rows], linestyle, label=style)
        ax_ov.set_ylabel("overlap with start")
        ax_pm.set_ylabel("marked probability")
        ax_pm.set_xlabel("step")
        ax_ov.legend()
        fig.suptitle(stem)
        target = out_dir / f"{stem}.png"
        fig.savefig(target, dpi=150)
        plt.close(fig)
        print(f"wrote {target}")


if __name__ == "__main__":
    main()
