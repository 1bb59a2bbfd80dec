"""CSV and SVG emission for experiment reports.

Everything written here is a pure function of the experiment results: no
timestamps, no environment leakage, stable ordering and number formatting,
so re-running a scenario reproduces the report directory byte for byte.
"""

from __future__ import annotations

import json
import math
import os

from .metrics import REFERENCE


def fmt(value):
    """Stable, compact number formatting for CSV cells."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if value == int(value) and abs(value) < 1e15:
            return str(int(value))
        return format(value, ".6g")
    return str(value)


def _write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_run_samples(path, samples):
    from .routing import samples_to_csv

    _write(path, samples_to_csv(samples))


def write_trace(path, trace):
    from .movement import trace_to_csv

    _write(path, trace_to_csv(trace))


RUN_STATS_COLUMNS = (
    "topology,type,model,run,child_seed,nodes,cn,ha,samples,handoffs,"
    "mean_r,p90_r,max_r,mean_L,p90_L,max_L,mean_b,b_over_l,total_c,total_ab"
)


def write_run_stats(path, results):
    lines = [RUN_STATS_COLUMNS]
    for res in results:
        rec, s = res.record, res.record.stats
        lines.append(
            ",".join(
                fmt(v)
                for v in (
                    rec.topology, rec.topo_type, rec.model, rec.run_index,
                    rec.child_seed, rec.nodes, res.cn, res.ha, s.samples, s.handoffs,
                    s.mean_r, s.p90_r, s.max_r, s.mean_L, s.p90_L, s.max_L,
                    s.mean_b, s.b_over_l, s.total_c, s.total_ab,
                )
            )
        )
    _write(path, "\n".join(lines) + "\n")


AGGREGATE_COLUMNS = (
    "type,model,topologies,runs,mean_r,p90_r,max_r_avg,max_r,"
    "mean_L,p90_L,max_L_avg,max_L,b_over_l,total_c,total_ab,bw_ratio"
)


def write_aggregate(path, agg):
    lines = [AGGREGATE_COLUMNS]
    for g in agg.rows:
        lines.append(
            ",".join(
                fmt(v)
                for v in (
                    g.topo_type, g.model, g.topologies, g.runs, g.mean_r, g.p90_r,
                    g.max_r_avg, g.max_r, g.mean_L, g.p90_L, g.max_L_avg, g.max_L,
                    g.b_over_l, g.total_c, g.total_ab, g.bw_ratio,
                )
            )
        )
    _write(path, "\n".join(lines) + "\n")


def write_summary(path, results):
    """Per (topology, movement) metric table: mean / p90 / max columns.

    r and L rows carry all three statistics (averaged over the topology's
    runs; max is the max across runs); b_over_l and the link totals only
    have a mean (totals are summed over runs).
    """
    from statistics import fmean

    by_key: dict[tuple[str, str], list] = {}
    for res in results:
        by_key.setdefault((res.record.topology, res.record.model), []).append(res.record.stats)
    lines = ["topology,model,metric,mean,p90,max"]
    for (topo, model), stats in sorted(by_key.items()):
        bols = [s.b_over_l for s in stats if s.b_over_l is not None]
        rows = (
            ("r", fmean(s.mean_r for s in stats), fmean(s.p90_r for s in stats),
             max(s.max_r for s in stats)),
            ("L", fmean(s.mean_L for s in stats), fmean(s.p90_L for s in stats),
             max(s.max_L for s in stats)),
            ("b_over_l", fmean(bols) if bols else None, None, None),
            ("total_c", sum(s.total_c for s in stats), None, None),
            ("total_ab", sum(s.total_ab for s in stats), None, None),
        )
        for metric, mean, p90, mx in rows:
            lines.append(",".join((topo, model, metric, fmt(mean), fmt(p90), fmt(mx))))
    _write(path, "\n".join(lines) + "\n")


HANDOFF_COLUMNS = (
    "topology,model,run,step,strategy,L,B,latency_ms,lost,dup,out_of_order,control_msgs"
)


def write_handoff(path, rows):
    lines = [HANDOFF_COLUMNS]
    for row in rows:
        rep = row.report
        lines.append(
            ",".join(
                fmt(v)
                for v in (
                    row.topology, row.model, row.run_index, row.step, row.strategy,
                    row.graft_links, row.b_hops, rep.handoff_latency, rep.packets_lost,
                    rep.packets_duplicated, rep.out_of_order, rep.control_messages,
                )
            )
        )
    _write(path, "\n".join(lines) + "\n")


def write_report_json(path, payload):
    _write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


_PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377")


def svg_grouped_bars(title, ylabel, groups, series, values, references=()):
    """Self-contained grouped bar chart; deterministic text output.

    values maps (group, series) -> number or None; references is a list of
    (label, value) horizontal dashed annotation lines.
    """
    width, height = 760, 430
    left, right, top, bottom = 70, 20, 40, 80
    plot_w, plot_h = width - left - right, height - top - bottom
    numbers = [v for v in values.values() if v is not None]
    numbers.extend(v for _, v in references)
    ymax = max(numbers, default=1.0) * 1.15 or 1.0

    def y(v):
        return top + plot_h - (v / ymax) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:g}" y="22" font-family="sans-serif" font-size="15" '
        f'text-anchor="middle">{title}</text>',
        f'<text x="16" y="{top + plot_h / 2:g}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {top + plot_h / 2:g})">{ylabel}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    for frac in (0.25, 0.5, 0.75, 1.0):
        val = ymax * frac
        parts.append(
            f'<line x1="{left - 4}" y1="{y(val):.2f}" x2="{left}" y2="{y(val):.2f}" '
            'stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y(val) + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{val:.4g}</text>'
        )
    group_w = plot_w / max(len(groups), 1)
    bar_w = group_w * 0.8 / max(len(series), 1)
    for gi, group in enumerate(groups):
        gx = left + gi * group_w
        for si, name in enumerate(series):
            val = values.get((group, name))
            if val is None:
                continue
            x = gx + group_w * 0.1 + si * bar_w
            parts.append(
                f'<rect x="{x:.2f}" y="{y(val):.2f}" width="{bar_w:.2f}" '
                f'height="{top + plot_h - y(val):.2f}" fill="{_PALETTE[si % len(_PALETTE)]}"/>'
            )
        parts.append(
            f'<text x="{gx + group_w / 2:.2f}" y="{top + plot_h + 16}" '
            f'font-family="sans-serif" font-size="11" text-anchor="middle">{group}</text>'
        )
    for ri, (label, val) in enumerate(references):
        parts.append(
            f'<line x1="{left}" y1="{y(val):.2f}" x2="{left + plot_w}" y2="{y(val):.2f}" '
            'stroke="#555555" stroke-dasharray="6 4"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 4}" y="{y(val) - 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" fill="#555555">{label} {val:g}</text>'
        )
    legend_y = height - 36
    lx = left
    for si, name in enumerate(series):
        parts.append(
            f'<rect x="{lx}" y="{legend_y}" width="12" height="12" '
            f'fill="{_PALETTE[si % len(_PALETTE)]}"/>'
        )
        parts.append(
            f'<text x="{lx + 16}" y="{legend_y + 10}" font-family="sans-serif" '
            f'font-size="11">{name}</text>'
        )
        lx += 16 + 8 * len(name) + 24
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def render_plots(report_dir):
    """Render grouped bar charts from an existing aggregate.csv.

    Emits one SVG per metric (mean_r, mean_L, b_over_l, link totals), with
    the reference-study averages drawn as dashed annotation lines. Returns
    the written paths.
    """
    agg_path = os.path.join(report_dir, "aggregate.csv")
    if not os.path.exists(agg_path):
        raise FileNotFoundError(f"missing {agg_path}; run a scenario first")
    rows = _read_csv(agg_path)
    if not rows:
        raise ValueError(f"{agg_path} has no data rows")
    groups = sorted({r["type"] for r in rows})
    series = sorted({r["model"] for r in rows})
    plots_dir = os.path.join(report_dir, "plots")
    written = []

    def grab(column):
        out = {}
        for r in rows:
            text = r[column]
            out[(r["type"], r["model"])] = float(text) if text else None
        return out

    charts = (
        ("mean_r.svg", "Route efficiency ratio r by topology type and movement",
         "mean r = (A+B)/C", grab("mean_r"), (("reference", REFERENCE["mean_r"]),)),
        ("added_links.svg", "Links added per handoff by topology type and movement",
         "mean added links L", grab("mean_L"), (("reference", REFERENCE["mean_L"]),)),
        ("b_over_l.svg", "Handoff latency ratio av.B/av.L",
         "B/L", grab("b_over_l"), (("reference", REFERENCE["b_over_l"]),)),
    )
    for fname, title, ylabel, values, refs in charts:
        path = os.path.join(plots_dir, fname)
        _write(path, svg_grouped_bars(title, ylabel, groups, series, values, refs))
        written.append(path)

    totals = {}
    for r in rows:
        totals[(r["type"], f"{r['model']} A+B")] = float(r["total_ab"])
        totals[(r["type"], f"{r['model']} C")] = float(r["total_c"])
    total_series = sorted({key[1] for key in totals})
    path = os.path.join(plots_dir, "total_links.svg")
    _write(
        path,
        svg_grouped_bars(
            "Total links traversed (Mobile IP A+B vs multicast C)",
            "links per topology (all runs)",
            groups,
            total_series,
            totals,
            (("reference A+B", REFERENCE["total_ab"]), ("reference C", REFERENCE["total_c"])),
        ),
    )
    written.append(path)
    return written
