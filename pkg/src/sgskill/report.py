"""Machine-readable summary artifacts: skill histograms, shrinkage scatter
data, percentile effect sizes, leaderboards, and BH plot geometry.

Everything is emitted as CSV plus a JSON manifest; rendering is a separate
concern and never happens here.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .eb_core import GolferAggregate, SkillPosterior
from .ingest import Category
from .mtest import TestResult, bh_k_star

HOLES_PER_TOURNAMENT = 72
PERCENTILE_METHOD = "linear"  # Q(p) interpolates at index p*(n-1), zero-based
MIN_GOLFERS_FOR_PERCENTILES = 20


@dataclass(frozen=True)
class EffectSizeSummary:
    category: Category
    delta_p95_p5: float  # strokes per hole, EB estimates
    per_tournament: float  # delta * holes_per_tournament
    delta_p95_p5_mle: float  # same gap on unshrunk means, for comparison
    percentile_method: str = PERCENTILE_METHOD


@dataclass(frozen=True)
class BHPlotData:
    category: Category
    points: tuple[tuple[int, float], ...]  # (rank, p) sorted by rank
    lines: tuple[tuple[float, float], ...]  # (alpha, slope alpha/n)
    k_star: dict[float, int]


@dataclass(frozen=True)
class ScatterRow:
    golfer_season_id: str
    category: Category
    mle_mean: float
    eb_mean: float
    n_holes: int
    residual: float  # eb_mean - mle_mean


def _by_category(items):
    groups: dict[Category, list] = {}
    for it in items:
        groups.setdefault(it.category, []).append(it)
    return groups


def _gap(values: np.ndarray) -> float:
    return float(np.quantile(values, 0.95) - np.quantile(values, 0.05))


def effect_sizes(
    posteriors: Sequence[SkillPosterior],
    holes_per_tournament: int = HOLES_PER_TOURNAMENT,
) -> list[EffectSizeSummary]:
    """95th-5th percentile gap of estimated skill per category, in strokes
    per hole and cumulated over a tournament."""
    out = []
    for cat, posts in sorted(_by_category(posteriors).items(), key=lambda kv: kv[0].value):
        if len(posts) < MIN_GOLFERS_FOR_PERCENTILES:
            raise ValueError(
                f"{cat.value}: need >= {MIN_GOLFERS_FOR_PERCENTILES} golfers for "
                f"percentile gaps, got {len(posts)}"
            )
        eb = np.array([p.eb_mean for p in posts])
        mle = np.array([p.mle_mean for p in posts])
        delta = _gap(eb)
        out.append(
            EffectSizeSummary(
                category=cat,
                delta_p95_p5=delta,
                per_tournament=holes_per_tournament * delta,
                delta_p95_p5_mle=_gap(mle),
            )
        )
    return out


def skill_histogram(
    posteriors: Sequence[SkillPosterior], bins: int
) -> dict[Category, tuple[np.ndarray, np.ndarray]]:
    """Equal-width histogram of EB skill per category: (counts, edges)."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    out = {}
    for cat, posts in _by_category(posteriors).items():
        eb = np.array([p.eb_mean for p in posts])
        out[cat] = np.histogram(eb, bins=bins)
    return out


def shrinkage_scatter(
    aggs: Sequence[GolferAggregate], posteriors: Sequence[SkillPosterior]
) -> list[ScatterRow]:
    """One (mle_mean, eb_mean, n_holes) row per golfer per category."""
    agg_keys = {(a.golfer_season_id, a.category) for a in aggs}
    post_keys = {(p.golfer_season_id, p.category) for p in posteriors}
    if agg_keys != post_keys:
        raise ValueError(
            f"aggregates and posteriors disagree: {sorted(agg_keys ^ post_keys)[:5]}"
        )
    return [
        ScatterRow(
            golfer_season_id=p.golfer_season_id,
            category=p.category,
            mle_mean=p.mle_mean,
            eb_mean=p.eb_mean,
            n_holes=p.n_holes,
            residual=p.eb_mean - p.mle_mean,
        )
        for p in posteriors
    ]


def top_k(
    posteriors: Sequence[SkillPosterior], k: int
) -> dict[Category, list[SkillPosterior]]:
    """Top k golfers per category by EB skill, ties broken by golfer id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = {}
    for cat, posts in _by_category(posteriors).items():
        if k > len(posts):
            raise ValueError(f"{cat.value}: k={k} exceeds {len(posts)} golfers")
        ranked = sorted(posts, key=lambda p: (-p.eb_mean, p.golfer_season_id))
        out[cat] = ranked[:k]
    return out


def bh_plot_data(
    tests: Sequence[TestResult], alphas: Sequence[float]
) -> dict[Category, BHPlotData]:
    """Rank-vs-p points plus BH threshold lines (slope alpha/n) and the
    step-up cutoff k* per alpha, consistent with mtest.bh_reject."""
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {a}")
    out = {}
    for cat, ts in _by_category(tests).items():
        ordered = sorted(ts, key=lambda t: (t.p_value, t.golfer_season_id))
        p_sorted = np.array([t.p_value for t in ordered])
        n = len(ordered)
        out[cat] = BHPlotData(
            category=cat,
            points=tuple((rank + 1, float(p)) for rank, p in enumerate(p_sorted)),
            lines=tuple((a, a / n) for a in alphas),
            k_star={a: bh_k_star(p_sorted, a) for a in alphas},
        )
    return out


# ---------------------------------------------------------------------------
# report directory emission


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report(
    out_dir: str | Path,
    aggs: Sequence[GolferAggregate],
    posteriors: Sequence[SkillPosterior],
    tests: Sequence[TestResult],
    alphas: Sequence[float],
    bins: int = 30,
    k: int = 7,
    holes_per_tournament: int = HOLES_PER_TOURNAMENT,
    config: dict | None = None,
    version: str = "0.1.0",
) -> Path:
    """Emit the full report directory and return the manifest path.

    Layout: report/{category}/{skill_hist,shrinkage,top_k,bh_points,
    bh_lines}.csv + effects.json, with a top-level manifest.json.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    hists = skill_histogram(posteriors, bins)
    scatter = _by_category(shrinkage_scatter(aggs, posteriors))
    leaders = top_k(posteriors, k)
    bh = bh_plot_data(tests, alphas)
    effects = {e.category: e for e in effect_sizes(posteriors, holes_per_tournament)}

    files: dict[str, str] = {}
    categories = sorted({p.category for p in posteriors}, key=lambda c: c.value)
    for cat in categories:
        cdir = out_dir / cat.value
        cdir.mkdir(exist_ok=True)

        counts, edges = hists[cat]
        _write_csv(
            cdir / "skill_hist.csv",
            ["bin_left", "bin_right", "count"],
            [[_fmt(edges[i]), _fmt(edges[i + 1]), int(counts[i])] for i in range(len(counts))],
        )
        _write_csv(
            cdir / "shrinkage.csv",
            ["golfer_season", "mle_mean", "eb_mean", "n_holes", "residual"],
            [
                [r.golfer_season_id, _fmt(r.mle_mean), _fmt(r.eb_mean), r.n_holes, _fmt(r.residual)]
                for r in scatter[cat]
            ],
        )
        _write_csv(
            cdir / "top_k.csv",
            ["rank", "golfer_season", "eb_mean", "mle_mean", "n_holes"],
            [
                [i + 1, p.golfer_season_id, _fmt(p.eb_mean), _fmt(p.mle_mean), p.n_holes]
                for i, p in enumerate(leaders[cat])
            ],
        )
        _write_csv(
            cdir / "bh_points.csv",
            ["rank", "p_value"],
            [[rank, _fmt(p)] for rank, p in bh[cat].points],
        )
        _write_csv(
            cdir / "bh_lines.csv",
            ["alpha", "slope", "k_star", "expected_true"],
            [
                [_fmt(a), _fmt(slope), bh[cat].k_star[a], _fmt((1.0 - a) * bh[cat].k_star[a])]
                for a, slope in bh[cat].lines
            ],
        )
        e = effects[cat]
        with (cdir / "effects.json").open("w") as fh:
            json.dump(
                {
                    "category": cat.value,
                    "delta_p95_p5": e.delta_p95_p5,
                    "per_tournament": e.per_tournament,
                    "delta_p95_p5_mle": e.delta_p95_p5_mle,
                    "percentile_method": e.percentile_method,
                    "holes_per_tournament": holes_per_tournament,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        for name in ("skill_hist.csv", "shrinkage.csv", "top_k.csv", "bh_points.csv", "bh_lines.csv", "effects.json"):
            files[f"{cat.value}/{name}"] = name.split(".")[0]

    config = config or {}
    config_blob = json.dumps(config, sort_keys=True).encode()
    manifest = {
        "version": version,
        "config": config,
        "config_hash": hashlib.sha256(config_blob).hexdigest(),
        "categories": [c.value for c in categories],
        "alphas": [float(a) for a in alphas],
        "files": files,
    }
    manifest_path = out_dir / "manifest.json"
    with manifest_path.open("w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
