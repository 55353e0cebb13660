"""The two figure kinds rendered from harness CSV files.

Nothing is recomputed from raw runs: every plotted point carries the CSV
strings verbatim in data-x/data-y attributes, and pixel positions are a
deterministic function of those values.
"""
from __future__ import annotations

import sys
from pathlib import Path

from .csvio import read_summary, read_trace_summary
from .svg import Frame, Svg

SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#8c564b", "#17becf", "#7f7f7f"]


def plot_trajectory(in_csv: str | Path, out_svg: str | Path,
                    overlay_label: str | None = None) -> Path:
    """Median rate per fitness value: line, percentile band, overlay.

    Fitness on x, rate on a log y axis; the band spans median to 95th
    percentile and collapses to nothing where they coincide.  A missing or
    empty overlay column only drops the dashed overlay line (with a warning).
    """
    rows, has_overlay = read_trace_summary(in_csv)
    if not has_overlay:
        print(f"warning: {in_csv} has no overlay values; overlay omitted",
              file=sys.stderr)

    positives = [v for r in rows for v in (r.median_rate, r.p95_rate)
                 if v > 0]
    overlay_vals = [r.overlay_rate for r in rows if r.overlay_rate]
    lo = min(positives) if positives else 1e-4
    hi = max(positives + overlay_vals) if positives or overlay_vals else 1.0
    svg = Svg()
    frame = Frame.build(svg, min(r.fitness for r in rows),
                        max(max(r.fitness for r in rows), 1), lo * 0.8,
                        hi * 1.25, logy=True)
    frame.draw_axes("fitness", "mutation rate", "rate trajectory")

    floor = lo * 0.8
    band_points = [(frame.xscale(r.fitness), frame.yscale(max(r.p95_rate, floor)))
                   for r in rows]
    band_points += [(frame.xscale(r.fitness),
                     frame.yscale(max(r.median_rate, floor)))
                    for r in reversed(rows)]
    if any(r.p95_rate != r.median_rate for r in rows):
        svg.polygon(band_points, fill="#bbbbbb", opacity=0.5, cls="band")

    median_points = [(frame.xscale(r.fitness),
                      frame.yscale(max(r.median_rate, floor))) for r in rows]
    svg.polyline(median_points, stroke="#1f77b4", width=1.8, cls="median-line")
    for r in rows:
        svg.circle(frame.xscale(r.fitness),
                   frame.yscale(max(r.median_rate, floor)), 1.6,
                   fill="#1f77b4", cls="data-point",
                   data={"x": r.raw["fitness"], "y": r.raw["median_rate"]})

    if has_overlay:
        pts = [(frame.xscale(r.fitness), frame.yscale(max(r.overlay_rate, floor)))
               for r in rows if r.overlay_rate is not None]
        svg.polyline(pts, stroke="#d62728", width=1.4, dash="6 4",
                     cls="overlay-line")
        svg.text(frame.right - 4, frame.top + 12,
                 overlay_label or "reference rate", size=11, anchor="end",
                 fill="#d62728")
    out = Path(out_svg)
    out.write_text(svg.render())
    return out


def plot_runtime_vs_k(in_csv: str | Path, out_svg: str | Path,
                      logx: bool = False) -> Path:
    """Normalized median runtime against k, one series per algorithm.

    Error bars stretch 1.5 interquartile ranges beyond q1 and q3 (scaled
    into the normalized units of the y axis); budget-censored cells are
    drawn hollow.  The bar semantics are stated in the figure footer.
    """
    rows = read_summary(in_csv)
    algorithms = sorted({r.algorithm for r in rows})
    xs = [r.k for r in rows]
    bar_tops, bar_bottoms, ys = [], [], []
    for r in rows:
        scale = r.normalized_median / r.median if r.median else 1.0
        iqr = r.q3 - r.q1
        bar_bottoms.append(max((r.q1 - 1.5 * iqr) * scale, 0.0))
        bar_tops.append((r.q3 + 1.5 * iqr) * scale)
        ys.append(r.normalized_median)
    svg = Svg()
    frame = Frame.build(svg, min(xs), max(xs), 0.0,
                        max(bar_tops + ys) * 1.1 or 1.0, logx=logx)
    frame.draw_axes("k", "normalized median evaluations",
                    "runtime versus hidden structure size")

    for index, algorithm in enumerate(algorithms):
        color = SERIES_COLORS[index % len(SERIES_COLORS)]
        series = [r for r in rows if r.algorithm == algorithm]
        line_pts = []
        for r in series:
            x = frame.xscale(r.k)
            y = frame.yscale(r.normalized_median)
            scale = r.normalized_median / r.median if r.median else 1.0
            iqr = r.q3 - r.q1
            y_lo = frame.yscale(max((r.q1 - 1.5 * iqr) * scale, 0.0))
            y_hi = frame.yscale((r.q3 + 1.5 * iqr) * scale)
            svg.line(x, y_lo, x, y_hi, stroke=color, width=1.0)
            svg.line(x - 3, y_lo, x + 3, y_lo, stroke=color, width=1.0)
            svg.line(x - 3, y_hi, x + 3, y_hi, stroke=color, width=1.0)
            censored = r.success_count < r.trials
            svg.circle(x, y, 3.2,
                       fill="#ffffff" if censored else color,
                       stroke=color,
                       cls="data-point censored" if censored else "data-point",
                       data={"x": r.raw["k"], "y": r.raw["normalized_median"],
                             "algorithm": r.algorithm,
                             "censored": "true" if censored else "false"})
            line_pts.append((x, y))
        svg.polyline(line_pts, stroke=color, width=1.2,
                     cls=f"series-{algorithm}")
        legend_y = frame.top + 14 * index + 6
        svg.circle(frame.left + 10, legend_y, 3.2, fill=color)
        svg.text(frame.left + 18, legend_y + 4, algorithm, size=11)

    svg.text(frame.left, frame.bottom + 52,
             "bars: q1 - 1.5*IQR to q3 + 1.5*IQR; hollow points hit the "
             "evaluation budget in at least one run", size=9, fill="#555555")
    out = Path(out_svg)
    out.write_text(svg.render())
    return out
