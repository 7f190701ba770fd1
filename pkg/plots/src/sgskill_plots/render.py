"""Batch rendering: figure ids in, image files out.

Per-figure failures are collected rather than aborting the batch, so one
missing input never blocks the remaining figures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .figures import FIGURE_IDS, FigureInputError, FigureStyle, build_figure, load_report

VALID_FORMATS = ("png", "svg")


@dataclass(frozen=True)
class RenderResult:
    written: tuple[Path, ...]
    failures: dict[str, str] = field(default_factory=dict)  # figure id -> reason
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


def render(
    manifest_path: str | Path,
    figure_ids: list[str],
    out_dir: str | Path,
    fmt: str = "png",
    style: FigureStyle | None = None,
) -> RenderResult:
    """Render each requested figure to <out_dir>/<figure_id>.<fmt>.

    Unknown figure ids fail fast (before any rendering); missing inputs
    fail only the affected figure.
    """
    if fmt not in VALID_FORMATS:
        raise ValueError(f"format must be one of {', '.join(VALID_FORMATS)}, got {fmt!r}")
    unknown = [f for f in figure_ids if f not in FIGURE_IDS]
    if unknown:
        raise FigureInputError(
            f"unknown figure ids: {', '.join(unknown)}; valid ids: {', '.join(sorted(FIGURE_IDS))}"
        )
    if not figure_ids:
        raise ValueError("no figure ids requested")

    report = load_report(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written: list[Path] = []
    failures: dict[str, str] = {}
    warnings: list[str] = []
    for fid in figure_ids:
        try:
            fig, warns = build_figure(report, fid, style)
        except FigureInputError as exc:
            failures[fid] = str(exc)
            continue
        warnings.extend(warns)
        path = out_dir / f"{fid}.{fmt}"
        fig.savefig(path, format=fmt)
        written.append(path)
    return RenderResult(tuple(written), failures, tuple(warnings))
