"""Empirical Bayes skill estimation from strokes-gained shot data.

Pipeline: parse shot-level CSV -> aggregate to per-hole outcomes ->
per-golfer sufficient statistics -> fit a two-level Gaussian hierarchy by
marginal maximum likelihood -> closed-form posterior skill estimates ->
two-sided tests against zero skill with Benjamini-Hochberg FDR control.
"""

__version__ = "0.1.0"

from .ingest import (
    Category,
    ShotRecord,
    HoleOutcome,
    CohortConfig,
    parse_shots,
    aggregate_holes,
    filter_cohort,
)
from .eb_core import (
    GolferAggregate,
    CategoryFit,
    SkillPosterior,
    summarize,
    fit_category,
    posterior,
    posterior_all,
)
from .mtest import TestResult, BHOutcome, p_value, bh_reject, bh_sweep
from .simlab import SyntheticConfig, SimulationReport, generate, run_fdr_study, run_contrast_study

__all__ = [
    "__version__",
    "Category",
    "ShotRecord",
    "HoleOutcome",
    "CohortConfig",
    "parse_shots",
    "aggregate_holes",
    "filter_cohort",
    "GolferAggregate",
    "CategoryFit",
    "SkillPosterior",
    "summarize",
    "fit_category",
    "posterior",
    "posterior_all",
    "TestResult",
    "BHOutcome",
    "p_value",
    "bh_reject",
    "bh_sweep",
    "SyntheticConfig",
    "SimulationReport",
    "generate",
    "run_fdr_study",
    "run_contrast_study",
]
