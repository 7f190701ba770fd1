"""Figure builders: one matplotlib Figure per figure id, one panel per
stroke category.

Every plotted number is read verbatim from the report directory's CSV/JSON
files; these builders never recompute a statistic. Figures are built on
plain `matplotlib.figure.Figure` objects (no pyplot, no global state), so
independent figures can render in parallel.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from matplotlib.figure import Figure

#: figure id -> (report files consumed per category, one-line description)
FIGURE_IDS: dict[str, tuple[tuple[str, ...], str]] = {
    "fig1": (("shrinkage.csv",), "distribution of holes played per golfer-season"),
    "fig2": (("shrinkage.csv",), "distribution of per-golfer mean outcomes (strokes/hole)"),
    "fig3": (("skill_hist.csv",), "histogram of estimated skill"),
    "fig4": (("shrinkage.csv",), "raw mean vs shrunk estimate, sized by holes played"),
    "fig5": (("top_k.csv",), "leaderboard of top skill estimates"),
    "fig6": (("bh_points.csv", "bh_lines.csv"), "sorted p-values with step-up threshold lines"),
    "fig7": (("bh_lines.csv",), "discoveries and expected true discoveries per level"),
}


class FigureInputError(ValueError):
    """A figure's required report files are missing from the manifest."""


@dataclass(frozen=True)
class FigureStyle:
    bins: int = 20  # for the raw-value histograms (fig1, fig2)
    point_scale: float = 4.0  # marker area = point_scale * sqrt(n_holes)
    dpi: int = 100
    panel_size: tuple[float, float] = (4.5, 3.6)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[str, ...]  # manifest-relative files consumed
    output: Path
    style: FigureStyle = field(default_factory=FigureStyle)


@dataclass(frozen=True)
class ReportData:
    root: Path
    manifest: dict
    categories: tuple[str, ...]

    def rows(self, category: str, name: str) -> list[dict[str, str]]:
        with (self.root / category / name).open(newline="") as fh:
            return list(csv.DictReader(fh))

    def column(self, category: str, name: str, col: str) -> list[float]:
        return [float(r[col]) for r in self.rows(category, name)]


def load_report(manifest_path: str | Path) -> ReportData:
    manifest_path = Path(manifest_path)
    manifest = json.loads(manifest_path.read_text())
    return ReportData(
        root=manifest_path.parent,
        manifest=manifest,
        categories=tuple(manifest["categories"]),
    )


def check_inputs(report: ReportData, figure_id: str) -> None:
    if figure_id not in FIGURE_IDS:
        raise FigureInputError(
            f"unknown figure id {figure_id!r}; valid ids: {', '.join(sorted(FIGURE_IDS))}"
        )
    needed, _ = FIGURE_IDS[figure_id]
    listed = set(report.manifest.get("files", {}))
    missing = [
        f"{cat}/{name}"
        for cat in report.categories
        for name in needed
        if f"{cat}/{name}" not in listed or not (report.root / cat / name).exists()
    ]
    if missing:
        raise FigureInputError(f"{figure_id}: missing report files: {', '.join(missing)}")


def _panels(report: ReportData, style: FigureStyle, title: str) -> tuple[Figure, list]:
    n = len(report.categories)
    w, h = style.panel_size
    fig = Figure(figsize=(w * max(n, 1), h), dpi=style.dpi)
    axes = fig.subplots(1, max(n, 1), squeeze=False)[0]
    fig.suptitle(title)
    for ax, cat in zip(axes, report.categories):
        ax.set_title(cat)
    return fig, list(axes)


def build_figure(
    report: ReportData, figure_id: str, style: FigureStyle | None = None
) -> tuple[Figure, list[str]]:
    """Build one figure; returns (figure, warnings). Raises FigureInputError
    for unknown ids or missing inputs."""
    style = style or FigureStyle()
    check_inputs(report, figure_id)
    builder = _BUILDERS[figure_id]
    _, description = FIGURE_IDS[figure_id]
    fig, axes = _panels(report, style, f"{figure_id}: {description}")
    warnings: list[str] = []
    for ax, cat in zip(axes, report.categories):
        builder(report, cat, ax, style, warnings)
    fig.tight_layout(rect=(0, 0, 1, 0.92))
    return fig, warnings


def _warn_if_empty(rows, figure_id, cat, warnings) -> bool:
    if not rows:
        warnings.append(f"{figure_id}: {cat}: no data rows; rendering empty axes")
        return True
    return False


def _fig1(report, cat, ax, style, warnings):
    holes = report.column(cat, "shrinkage.csv", "n_holes")
    if _warn_if_empty(holes, "fig1", cat, warnings):
        return
    ax.hist(holes, bins=style.bins, color="#4878a8", edgecolor="white")
    ax.set_xlabel("holes played")
    ax.set_ylabel("golfer-seasons")


def _fig2(report, cat, ax, style, warnings):
    means = report.column(cat, "shrinkage.csv", "mle_mean")
    if _warn_if_empty(means, "fig2", cat, warnings):
        return
    ax.hist(means, bins=style.bins, color="#6aa84f", edgecolor="white")
    ax.set_xlabel("mean outcome (strokes/hole)")
    ax.set_ylabel("golfer-seasons")


def _fig3(report, cat, ax, style, warnings):
    rows = report.rows(cat, "skill_hist.csv")
    if _warn_if_empty(rows, "fig3", cat, warnings):
        return
    lefts = [float(r["bin_left"]) for r in rows]
    rights = [float(r["bin_right"]) for r in rows]
    counts = [int(r["count"]) for r in rows]
    widths = [r - l for l, r in zip(lefts, rights)]
    ax.bar(lefts, counts, width=widths, align="edge", color="#8064a2", edgecolor="white")
    ax.set_xlabel("estimated skill (strokes/hole)")
    ax.set_ylabel("golfer-seasons")


def _fig4(report, cat, ax, style, warnings):
    rows = report.rows(cat, "shrinkage.csv")
    if _warn_if_empty(rows, "fig4", cat, warnings):
        return
    mle = [float(r["mle_mean"]) for r in rows]
    eb = [float(r["eb_mean"]) for r in rows]
    holes = [float(r["n_holes"]) for r in rows]
    sizes = [style.point_scale * math.sqrt(n) for n in holes]
    sc = ax.scatter(mle, eb, s=sizes, c=holes, cmap="viridis", alpha=0.7, linewidths=0)
    lo, hi = min(mle + eb), max(mle + eb)
    ax.plot([lo, hi], [lo, hi], color="gray", linestyle="--", linewidth=1, label="no shrinkage")
    ax.figure.colorbar(sc, ax=ax, label="holes played")
    ax.set_xlabel("raw mean (strokes/hole)")
    ax.set_ylabel("shrunk estimate (strokes/hole)")
    ax.legend(loc="upper left", fontsize="small")


def _fig5(report, cat, ax, style, warnings):
    rows = report.rows(cat, "top_k.csv")
    if _warn_if_empty(rows, "fig5", cat, warnings):
        return
    rows = sorted(rows, key=lambda r: int(r["rank"]), reverse=True)  # best on top
    names = [r["golfer_season"] for r in rows]
    eb = [float(r["eb_mean"]) for r in rows]
    ax.barh(names, eb, color="#c0504d")
    ax.set_xlabel("estimated skill (strokes/hole)")


def _fig6(report, cat, ax, style, warnings):
    points = report.rows(cat, "bh_points.csv")
    lines = report.rows(cat, "bh_lines.csv")
    if _warn_if_empty(points, "fig6", cat, warnings):
        return
    ranks = [int(r["rank"]) for r in points]
    ps = [float(r["p_value"]) for r in points]
    ax.scatter(ranks, ps, s=12, color="black", zorder=3, label="sorted p-values")
    for r in lines:
        alpha, slope, k_star = float(r["alpha"]), float(r["slope"]), int(r["k_star"])
        ax.plot(
            [0, ranks[-1]],
            [0.0, slope * ranks[-1]],
            linewidth=1,
            label=f"level {alpha:g} (cutoff k*={k_star})",
        )
    ax.set_xlabel("rank")
    ax.set_ylabel("p-value")
    ax.legend(fontsize="x-small")


def _fig7(report, cat, ax, style, warnings):
    rows = report.rows(cat, "bh_lines.csv")
    if _warn_if_empty(rows, "fig7", cat, warnings):
        return
    alphas = [float(r["alpha"]) for r in rows]
    discovered = [int(r["k_star"]) for r in rows]
    expected_true = [float(r["expected_true"]) for r in rows]
    xs = range(len(alphas))
    width = 0.4
    ax.bar([x - width / 2 for x in xs], discovered, width, label="discoveries", color="#4878a8")
    ax.bar(
        [x + width / 2 for x in xs],
        expected_true,
        width,
        label="expected true discoveries",
        color="#f0a830",
    )
    ax.set_xticks(list(xs), [f"{a:g}" for a in alphas])
    ax.set_xlabel("level")
    ax.set_ylabel("golfer-seasons")
    ax.legend(fontsize="small")


_BUILDERS = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
}
