"""Shot-level CSV ingestion, per-hole aggregation, and cohort filtering."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, TextIO


class Category(str, Enum):
    DRIVING = "Driving"
    APPROACHING = "Approaching"
    PUTTING = "Putting"


# Accepted category spellings (matched case-insensitively).
_CATEGORY_TOKENS = {
    "drive": Category.DRIVING,
    "driving": Category.DRIVING,
    "approach": Category.APPROACHING,
    "approaching": Category.APPROACHING,
    "putt": Category.PUTTING,
    "putting": Category.PUTTING,
}

# Logical field -> default CSV column name.
DEFAULT_COLUMNS = {
    "golfer_season": "golfer_season",
    "tournament": "tournament",
    "round": "round",
    "hole": "hole",
    "category": "category",
    "strokes_gained": "strokes_gained",
}


class SchemaError(ValueError):
    """A required column is missing from the CSV header."""


class StrictParseError(ValueError):
    """Row-level errors escalated to failure under strict mode."""

    def __init__(self, errors: list["RowError"]):
        self.errors = errors
        preview = "; ".join(str(e) for e in errors[:5])
        more = "" if len(errors) <= 5 else f" (+{len(errors) - 5} more)"
        super().__init__(f"{len(errors)} malformed row(s): {preview}{more}")


@dataclass(frozen=True)
class RowError:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass(frozen=True)
class ShotRecord:
    golfer_season_id: str
    tournament_id: str
    round: int
    hole: int
    category: Category
    strokes_gained: float


@dataclass(frozen=True)
class HoleOutcome:
    golfer_season_id: str
    category: Category
    hole_key: tuple[str, int, int]  # (tournament_id, round, hole)
    x: float


@dataclass(frozen=True)
class CohortConfig:
    min_holes: int = 150

    def __post_init__(self):
        if self.min_holes < 1:
            raise ValueError(f"min_holes must be >= 1, got {self.min_holes}")


def parse_category(token: str) -> Category:
    try:
        return _CATEGORY_TOKENS[token.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown category {token!r}") from None


def parse_shots(
    stream: TextIO | Iterable[str],
    columns: dict[str, str] | None = None,
    strict: bool = False,
) -> tuple[list[ShotRecord], list[RowError]]:
    """Parse a shot-level CSV stream into ShotRecords.

    Returns (records, row_errors). Malformed rows are collected with their
    line numbers rather than dropped silently; with strict=True any row
    error raises StrictParseError after the full pass. A missing required
    column raises SchemaError immediately.
    """
    colmap = dict(DEFAULT_COLUMNS)
    if columns:
        unknown = set(columns) - set(DEFAULT_COLUMNS)
        if unknown:
            raise SchemaError(f"unknown schema field(s): {sorted(unknown)}")
        colmap.update(columns)

    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise SchemaError("empty input: no header row")
    missing = [col for col in colmap.values() if col not in reader.fieldnames]
    if missing:
        raise SchemaError(f"missing required column(s): {missing}")

    records: list[ShotRecord] = []
    errors: list[RowError] = []
    for row in reader:
        line = reader.line_num
        try:
            records.append(_parse_row(row, colmap))
        except (ValueError, TypeError) as exc:
            errors.append(RowError(line, str(exc)))
    if strict and errors:
        raise StrictParseError(errors)
    return records, errors


def _parse_row(row: dict[str, str], colmap: dict[str, str]) -> ShotRecord:
    def get(logical: str) -> str:
        value = row.get(colmap[logical])
        if value is None or value == "":
            raise ValueError(f"missing value for {colmap[logical]!r}")
        return value

    rnd = int(get("round"))
    if rnd < 1:
        raise ValueError(f"round must be positive, got {rnd}")
    hole = int(get("hole"))
    if not 1 <= hole <= 18:
        raise ValueError(f"hole must be in 1..18, got {hole}")
    sg = float(get("strokes_gained"))
    if not math.isfinite(sg):
        raise ValueError(f"strokes_gained must be finite, got {sg}")
    return ShotRecord(
        golfer_season_id=get("golfer_season"),
        tournament_id=get("tournament"),
        round=rnd,
        hole=hole,
        category=parse_category(get("category")),
        strokes_gained=sg,
    )


def aggregate_holes(shots: Iterable[ShotRecord]) -> list[HoleOutcome]:
    """Sum strokes gained per (golfer, category, hole).

    A hole with no shots of a given category for a golfer produces no
    outcome for that category. Output order is first-appearance order, so
    aggregation is deterministic but the per-group totals are
    permutation-invariant.
    """
    totals: dict[tuple[str, Category, tuple[str, int, int]], float] = {}
    for shot in shots:
        key = (shot.golfer_season_id, shot.category, (shot.tournament_id, shot.round, shot.hole))
        totals[key] = totals.get(key, 0.0) + shot.strokes_gained
    return [
        HoleOutcome(golfer_season_id=gid, category=cat, hole_key=hk, x=x)
        for (gid, cat, hk), x in totals.items()
    ]


def filter_cohort(outcomes: Iterable[HoleOutcome], cfg: CohortConfig) -> list[HoleOutcome]:
    """Drop golfer-seasons whose distinct played holes (union over
    categories) number fewer than cfg.min_holes."""
    outcomes = list(outcomes)
    holes: dict[str, set[tuple[str, int, int]]] = {}
    for o in outcomes:
        holes.setdefault(o.golfer_season_id, set()).add(o.hole_key)
    keep = {gid for gid, hs in holes.items() if len(hs) >= cfg.min_holes}
    return [o for o in outcomes if o.golfer_season_id in keep]


OUTCOME_HEADER = ["golfer_season", "category", "tournament", "round", "hole", "x"]


def write_outcomes_csv(outcomes: Iterable[HoleOutcome], stream: TextIO) -> None:
    w = csv.writer(stream)
    w.writerow(OUTCOME_HEADER)
    for o in outcomes:
        t, r, h = o.hole_key
        w.writerow([o.golfer_season_id, o.category.value, t, r, h, repr(o.x)])


def read_outcomes_csv(stream: TextIO) -> list[HoleOutcome]:
    reader = csv.DictReader(stream)
    out = []
    for row in reader:
        out.append(
            HoleOutcome(
                golfer_season_id=row["golfer_season"],
                category=Category(row["category"]),
                hole_key=(row["tournament"], int(row["round"]), int(row["hole"])),
                x=float(row["x"]),
            )
        )
    return out
