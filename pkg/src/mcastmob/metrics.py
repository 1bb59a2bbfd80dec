"""Run statistics: route-efficiency ratio, added-link distributions, aggregation.

Percentiles use the nearest-rank convention on an ascending sort. Added-link
(L) statistics cover handoff samples only; the establishment join is tree
setup, not a handoff. The B/L ratio divides per-run means (av.B / av.L)
because L is frequently zero for individual steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean, pstdev

from .routing import StepSample

# Headline averages of the original wide-area evaluation. Emitted as
# annotations for side-by-side comparison, never asserted: the topology
# instances behind them are not reproducible.
REFERENCE = {
    "mean_r": 2.11,
    "mean_L": 2.51,
    "b_over_l": 2.31,
    "total_ab": 11_157,
    "total_c": 6_208,
}


def nearest_rank_p90(values):
    """90th percentile, nearest-rank: element ceil(0.9 n) of the ascending sort."""
    if not values:
        raise ValueError("p90 of empty sequence")
    ordered = sorted(values)
    return ordered[math.ceil(0.9 * len(ordered)) - 1]


@dataclass(frozen=True)
class RunStats:
    """Aggregates of one run's StepSamples.

    r statistics and link totals cover every sample; L statistics and
    mean_b cover the `handoffs` non-establishment samples. b_over_l is None
    when there are no handoffs or mean_L is zero.
    """

    samples: int
    handoffs: int
    total_c: int
    total_ab: int
    mean_r: float
    p90_r: float
    max_r: float
    mean_L: float
    p90_L: float
    max_L: float
    mean_b: float
    b_over_l: float | None


def run_stats(samples) -> RunStats:
    if not samples:
        raise ValueError("run_stats needs at least one sample")
    for s in samples:
        if s.c_hops < 1:
            raise ValueError(f"sample {s.step} has c_hops < 1; r is undefined")
    ratios = [(s.a_hops + s.b_hops) / s.c_hops for s in samples]
    moves = [s for s in samples if not s.establishment]
    added = [s.added_links for s in moves]
    mean_l = fmean(added) if added else 0.0
    mean_b = fmean(s.b_hops for s in moves) if moves else 0.0
    return RunStats(
        samples=len(samples),
        handoffs=len(moves),
        total_c=sum(s.c_hops for s in samples),
        total_ab=sum(s.a_hops + s.b_hops for s in samples),
        mean_r=fmean(ratios),
        p90_r=nearest_rank_p90(ratios),
        max_r=max(ratios),
        mean_L=mean_l,
        p90_L=float(nearest_rank_p90(added)) if added else 0.0,
        max_L=float(max(added)) if added else 0.0,
        mean_b=mean_b,
        b_over_l=(mean_b / mean_l) if added and mean_l > 0 else None,
    )


@dataclass(frozen=True)
class RunRecord:
    """One run's stats tagged with its scenario coordinates."""

    topology: str
    topo_type: str
    model: str
    nodes: int
    run_index: int
    child_seed: int
    stats: RunStats


@dataclass(frozen=True)
class GroupStats:
    """Two-level averages for one (topology type, movement model) group.

    Level one averages each topology's runs; level two averages across
    topologies of the type. max_* fields come in two flavors: *_avg is the
    mean of per-topology maxima, the bare field the absolute maximum.
    total_c/total_ab are per-topology sums (all runs pooled) averaged across
    topologies; bw_ratio is the plain grand-sum ratio sum(a+b)/sum(c).
    """

    topo_type: str
    model: str
    topologies: int
    runs: int
    mean_r: float
    p90_r: float
    max_r_avg: float
    max_r: float
    mean_L: float
    p90_L: float
    max_L_avg: float
    max_L: float
    b_over_l: float | None
    total_c: float
    total_ab: float
    bw_ratio: float


@dataclass(frozen=True)
class AggregateStats:
    rows: tuple[GroupStats, ...]

    def row(self, topo_type, model):
        for r in self.rows:
            if r.topo_type == topo_type and r.model == model:
                return r
        raise KeyError((topo_type, model))

    def overall(self, field):
        values = [getattr(r, field) for r in self.rows if getattr(r, field) is not None]
        return fmean(values)

    def overall_bw_ratio(self):
        total_ab = sum(r.total_ab * r.topologies for r in self.rows)
        total_c = sum(r.total_c * r.topologies for r in self.rows)
        return total_ab / total_c


def aggregate(records) -> AggregateStats:
    """Group RunRecords by (topology type, movement model), two-level averaged.

    Order independent: permuting the input yields the same table.
    """
    if not records:
        raise ValueError("aggregate needs at least one record")
    groups: dict[tuple[str, str], dict[str, list[RunStats]]] = {}
    for rec in records:
        groups.setdefault((rec.topo_type, rec.model), {}).setdefault(rec.topology, []).append(
            rec.stats
        )
    rows = []
    for (ttype, model), by_topo in sorted(groups.items()):
        topo_means = {
            field: [] for field in ("mean_r", "p90_r", "mean_L", "p90_L", "mean_b")
        }
        topo_max_r, topo_max_l, topo_bol = [], [], []
        topo_tc, topo_tab = [], []
        run_count = 0
        for _, stats_list in sorted(by_topo.items()):
            run_count += len(stats_list)
            for field, acc in topo_means.items():
                acc.append(fmean(getattr(s, field) for s in stats_list))
            topo_max_r.append(max(s.max_r for s in stats_list))
            topo_max_l.append(max(s.max_L for s in stats_list))
            bols = [s.b_over_l for s in stats_list if s.b_over_l is not None]
            if bols:
                topo_bol.append(fmean(bols))
            topo_tc.append(sum(s.total_c for s in stats_list))
            topo_tab.append(sum(s.total_ab for s in stats_list))
        rows.append(
            GroupStats(
                topo_type=ttype,
                model=model,
                topologies=len(by_topo),
                runs=run_count,
                mean_r=fmean(topo_means["mean_r"]),
                p90_r=fmean(topo_means["p90_r"]),
                max_r_avg=fmean(topo_max_r),
                max_r=max(topo_max_r),
                mean_L=fmean(topo_means["mean_L"]),
                p90_L=fmean(topo_means["p90_L"]),
                max_L_avg=fmean(topo_max_l),
                max_L=max(topo_max_l),
                b_over_l=fmean(topo_bol) if topo_bol else None,
                total_c=fmean(topo_tc),
                total_ab=fmean(topo_tab),
                bw_ratio=sum(topo_tab) / sum(topo_tc),
            )
        )
    return AggregateStats(rows=tuple(rows))


@dataclass(frozen=True)
class SizeSensitivity:
    """Dispersion of per-size means for one movement model within a topology type."""

    model: str
    sizes: tuple[int, ...]
    mean_r_values: tuple[float, ...]
    mean_r_mean: float
    mean_r_cv: float
    mean_L_values: tuple[float, ...]
    mean_L_mean: float
    mean_L_cv: float


def _cv(values):
    center = fmean(values)
    return pstdev(values) / center if center else 0.0


def size_sensitivity(records, topo_type):
    """Mean and coefficient of variation of mean_r / mean_L across sizes.

    Requires at least three distinct node counts of the given type.
    """
    filtered = [r for r in records if r.topo_type == topo_type]
    sizes = sorted({r.nodes for r in filtered})
    if len(sizes) < 3:
        raise ValueError(f"need >= 3 sizes of type {topo_type!r}, have {len(sizes)}")
    out = []
    for model in sorted({r.model for r in filtered}):
        r_vals, l_vals = [], []
        for size in sizes:
            stats = [r.stats for r in filtered if r.model == model and r.nodes == size]
            r_vals.append(fmean(s.mean_r for s in stats))
            l_vals.append(fmean(s.mean_L for s in stats))
        out.append(
            SizeSensitivity(
                model=model,
                sizes=tuple(sizes),
                mean_r_values=tuple(r_vals),
                mean_r_mean=fmean(r_vals),
                mean_r_cv=_cv(r_vals),
                mean_L_values=tuple(l_vals),
                mean_L_mean=fmean(l_vals),
                mean_L_cv=_cv(l_vals),
            )
        )
    return tuple(out)
