"""Two-sided tests of zero skill and Benjamini-Hochberg FDR control."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eb_core import SkillPosterior
from .ingest import Category

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TestResult:
    golfer_season_id: str
    category: Category
    z: float
    p_value: float


@dataclass(frozen=True)
class BHOutcome:
    category: Category
    alpha: float
    m_discoveries: int
    expected_true: float  # (1 - alpha) * m_discoveries
    rejected_ids: tuple[str, ...]  # ascending p, ties broken by golfer id


def normal_sf2(z: float | np.ndarray):
    """Two-sided tail 2*Phi(-|z|), via erfc for full double accuracy."""
    if isinstance(z, np.ndarray):
        from scipy.special import erfc

        return erfc(np.abs(z) / _SQRT2)
    return math.erfc(abs(z) / _SQRT2)


def p_value(post: SkillPosterior) -> TestResult:
    """z = |eb_mean| / sqrt(post_var); p = 2*Phi(-z)."""
    if not post.post_var > 0.0:
        raise ValueError(
            f"golfer {post.golfer_season_id!r}: post_var must be positive, got {post.post_var}"
        )
    z = abs(post.eb_mean) / math.sqrt(post.post_var)
    return TestResult(
        golfer_season_id=post.golfer_season_id,
        category=post.category,
        z=z,
        p_value=normal_sf2(z),
    )


def bh_k_star(p_sorted: np.ndarray, alpha: float) -> int:
    """Largest k with p_(k) <= k*alpha/n (0 if none); p_sorted ascending."""
    n = p_sorted.size
    ok = p_sorted <= alpha * np.arange(1, n + 1) / n
    if not ok.any():
        return 0
    return int(np.nonzero(ok)[0][-1]) + 1


def bh_reject(tests: Sequence[TestResult], alpha: float) -> BHOutcome:
    """Benjamini-Hochberg step-up at level alpha over one category's tests.

    Rejects the k* smallest p-values where k* = max{k : p_(k) <= k*alpha/n}.
    rejected_ids are ordered by ascending p with ties broken by golfer id;
    equal p-values always share the same fate.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not tests:
        raise ValueError("tests must be nonempty")
    cats = {t.category for t in tests}
    if len(cats) != 1:
        raise ValueError(f"tests span multiple categories: {sorted(c.value for c in cats)}")
    (category,) = cats

    ordered = sorted(tests, key=lambda t: (t.p_value, t.golfer_season_id))
    p_sorted = np.array([t.p_value for t in ordered])
    k = bh_k_star(p_sorted, alpha)
    return BHOutcome(
        category=category,
        alpha=alpha,
        m_discoveries=k,
        expected_true=(1.0 - alpha) * k,
        rejected_ids=tuple(t.golfer_season_id for t in ordered[:k]),
    )


def bh_sweep(tests: Sequence[TestResult], alphas: Sequence[float]) -> list[BHOutcome]:
    """bh_reject at each alpha; rejection sets are nested in alpha."""
    return [bh_reject(tests, a) for a in alphas]
