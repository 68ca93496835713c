"""CSV tables and plot-data series."""

from __future__ import annotations

import csv
import json
from collections import defaultdict

CSV_HEADER = ("problem", "algorithm", "predictor", "param", "mean_ratio", "std_ratio", "trials", "seed")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(round(x, 12))
    return str(x)


def emit_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_HEADER])


def plot_series(rows) -> list:
    """One series per (algorithm, predictor), points sorted by parameter.

    Parameterless rows become a single point with ``x = None`` (drawn as a
    horizontal reference line).
    """
    groups = defaultdict(list)
    for r in rows:
        groups[(r.algorithm, r.predictor)].append(r)
    out = []
    for (alg, pred), rs in sorted(groups.items()):
        rs = sorted(rs, key=lambda r: (r.param is not None, r.param if r.param is not None else 0))
        out.append(
            {
                "algorithm": alg,
                "predictor": pred,
                "x": [r.param for r in rs],
                "y": [r.mean_ratio for r in rs],
                "std": [r.std_ratio for r in rs],
            }
        )
    return out


def emit_plot_data(rows, path) -> None:
    rows = list(rows)
    doc = {"problem": rows[0].problem if rows else None, "series": plot_series(rows)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
