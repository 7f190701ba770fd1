"""Synthetic cohorts with known ground truth, and Monte Carlo validation
of FDR control, power, and hyperparameter recovery.

All randomness flows from numpy's PCG64 generator seeded explicitly;
replication r of a study uses the substream seeded by (master_seed, r), so
serial and parallel execution would agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import eb_core, mtest
from .ingest import Category, HoleOutcome

# 2 * Phi^-1(0.95); a N(0, s^2) population has a 95th-5th percentile gap
# of this times s.
_GAP_FACTOR = 2.0 * 1.6448536269514722


@dataclass(frozen=True)
class SyntheticConfig:
    n_golfers: int
    holes_per_golfer: int | tuple[int, int]  # fixed, or inclusive uniform range
    mu_s: float
    tau2_s: float
    sigma2: float | tuple[float, float]  # fixed, or per-golfer uniform range
    null_fraction: float = 0.0
    seed: int = 0
    category: Category = Category.DRIVING

    def __post_init__(self):
        if self.n_golfers < 1:
            raise ValueError("n_golfers must be >= 1")
        if self.tau2_s < 0:
            raise ValueError("tau2_s must be >= 0")
        if not 0.0 <= self.null_fraction <= 1.0:
            raise ValueError("null_fraction must be in [0, 1]")
        holes = self.holes_per_golfer
        if isinstance(holes, tuple):
            if len(holes) != 2 or holes[0] > holes[1] or holes[0] < 1:
                raise ValueError(f"bad holes_per_golfer range {holes}")
        elif holes < 1:
            raise ValueError("holes_per_golfer must be >= 1")
        s2 = self.sigma2
        if isinstance(s2, tuple):
            if len(s2) != 2 or s2[0] > s2[1] or s2[0] < 0:
                raise ValueError(f"bad sigma2 range {s2}")
        elif s2 < 0:
            raise ValueError("sigma2 must be >= 0")


@dataclass(frozen=True)
class AlphaSummary:
    alpha: float
    empirical_fdr: float
    empirical_power: float
    mean_discoveries: float
    mean_naive_false_positives: float


@dataclass(frozen=True)
class RecoveryStats:
    bias_mu: float
    bias_tau2: float
    rmse_mu: float
    rmse_tau2: float


@dataclass(frozen=True)
class RepRecord:
    replication: int
    alpha: float
    discoveries: int
    false_discoveries: int
    naive_rejections: int
    mu_hat: float
    tau2_hat: float


@dataclass(frozen=True)
class SimulationReport:
    replications: int
    per_alpha: tuple[AlphaSummary, ...]
    recovery: RecoveryStats
    mean_eb_gap: float  # mean 95th-5th percentile gap of EB estimates
    rows: tuple[RepRecord, ...] = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "per_alpha": [vars(a) for a in self.per_alpha],
            "recovery": vars(self.recovery),
            "mean_eb_gap": self.mean_eb_gap,
        }


@dataclass(frozen=True)
class _Cohort:
    mu_true: np.ndarray
    is_null: np.ndarray
    n_holes: np.ndarray
    sigma2: np.ndarray
    means: np.ndarray
    var_mle: np.ndarray
    x: np.ndarray | None  # flat hole outcomes, golfer-major (materialized runs)


def _draw_cohort(cfg: SyntheticConfig, rng: np.random.Generator, keep_x: bool = False) -> _Cohort:
    n = cfg.n_golfers
    if isinstance(cfg.holes_per_golfer, tuple):
        a, b = cfg.holes_per_golfer
        n_holes = rng.integers(a, b + 1, size=n)
    else:
        n_holes = np.full(n, cfg.holes_per_golfer, dtype=np.int64)
    if isinstance(cfg.sigma2, tuple):
        sigma2 = rng.uniform(cfg.sigma2[0], cfg.sigma2[1], size=n)
    else:
        sigma2 = np.full(n, float(cfg.sigma2))

    n_null = int(round(cfg.null_fraction * n))
    is_null = np.zeros(n, dtype=bool)
    is_null[rng.permutation(n)[:n_null]] = True
    mu_true = cfg.mu_s + math.sqrt(cfg.tau2_s) * rng.standard_normal(n)
    mu_true[is_null] = 0.0

    total = int(n_holes.sum())
    x = rng.standard_normal(total)
    x *= np.repeat(np.sqrt(sigma2), n_holes)
    x += np.repeat(mu_true, n_holes)

    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(n_holes[:-1], out=starts[1:])
    sums = np.add.reduceat(x, starts)
    means = sums / n_holes
    var_mle = np.add.reduceat((x - np.repeat(means, n_holes)) ** 2, starts) / n_holes
    return _Cohort(
        mu_true=mu_true,
        is_null=is_null,
        n_holes=n_holes,
        sigma2=sigma2,
        means=means,
        var_mle=var_mle,
        x=x if keep_x else None,
    )


def golfer_id(i: int) -> str:
    return f"sim{i:04d}"


def generate(cfg: SyntheticConfig) -> tuple[list[HoleOutcome], dict[str, float]]:
    """Materialize one synthetic cohort as hole outcomes plus the ground
    truth skill of each golfer. Deterministic given cfg.seed; a
    null_fraction share of golfers has skill exactly 0."""
    rng = np.random.default_rng(cfg.seed)
    c = _draw_cohort(cfg, rng, keep_x=True)
    outcomes: list[HoleOutcome] = []
    pos = 0
    for i in range(cfg.n_golfers):
        gid = golfer_id(i)
        for j in range(int(c.n_holes[i])):
            # synthetic schedule: 18-hole "tournaments", one round each
            hole_key = (f"T{j // 18 + 1:03d}", 1, j % 18 + 1)
            outcomes.append(
                HoleOutcome(
                    golfer_season_id=gid,
                    category=cfg.category,
                    hole_key=hole_key,
                    x=float(c.x[pos + j]),
                )
            )
        pos += int(c.n_holes[i])
    truth = {golfer_id(i): float(c.mu_true[i]) for i in range(cfg.n_golfers)}
    return outcomes, truth


def _study_rep(
    cfg: SyntheticConfig,
    rep: int,
    alphas: Sequence[float],
    tol: float,
    max_iter: int,
):
    """One replication: draw -> fit -> posteriors -> EB and naive p-values
    -> BH per alpha. Returns per-alpha counts plus fitted hyperparameters
    and the realized EB percentile gap."""
    rng = np.random.default_rng([cfg.seed, rep])
    c = _draw_cohort(cfg, rng)
    var_mle, _ = eb_core.floor_variances(c.var_mle, c.n_holes)
    v = var_mle / c.n_holes
    mu_hat, tau2_hat, _, _, _, _ = eb_core.em_fit(c.means, v, tol, max_iter)
    eb, V = eb_core.posterior_arrays(c.means, c.n_holes, var_mle, mu_hat, tau2_hat)
    if tau2_hat == 0.0:
        # degenerate prior: no golfer is individually distinguishable
        p_eb = np.ones_like(eb)
    else:
        p_eb = mtest.normal_sf2(eb / np.sqrt(V))
    p_naive = mtest.normal_sf2(c.means / np.sqrt(v))
    gap = float(np.quantile(eb, 0.95) - np.quantile(eb, 0.05))

    order = np.argsort(p_eb, kind="stable")
    p_sorted = p_eb[order]
    n_nonnull = int((~c.is_null).sum())
    out = []
    for alpha in alphas:
        k = mtest.bh_k_star(p_sorted, alpha)
        rejected = order[:k]
        false = int(c.is_null[rejected].sum())
        naive = int((p_naive <= alpha).sum())
        power = (k - false) / n_nonnull if n_nonnull else 0.0
        fdp = false / max(1, k)
        out.append((alpha, k, false, naive, fdp, power))
    return out, mu_hat, tau2_hat, gap


def mixture_moments(cfg: SyntheticConfig) -> tuple[float, float]:
    """Population mean and variance of true skills under the config's
    null/non-null mixture; the single-Gaussian fit targets these."""
    w = 1.0 - cfg.null_fraction
    m = w * cfg.mu_s
    var = w * (cfg.tau2_s + cfg.mu_s**2) - m**2
    return m, var


def run_fdr_study(
    cfg: SyntheticConfig,
    alphas: Sequence[float],
    replications: int,
    tol: float = 1e-9,
    max_iter: int = 1000,
) -> SimulationReport:
    """Monte Carlo study of the full pipeline on synthetic cohorts.

    Per replication: generate -> sufficient statistics -> hyperparameter
    fit -> posteriors -> EB p-values -> BH at each alpha. A discovery is
    false iff the golfer's true skill is exactly 0. Also counts naive
    per-test rejections of the unshrunk mean (p from z = mean/sqrt(v_i))
    at level alpha, the uncorrected comparison.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {a}")

    rows: list[RepRecord] = []
    mu_hats = np.empty(replications)
    tau2_hats = np.empty(replications)
    gaps = np.empty(replications)
    acc = {a: {"fdp": 0.0, "power": 0.0, "disc": 0.0, "naive": 0.0} for a in alphas}
    for rep in range(replications):
        per_alpha, mu_hat, tau2_hat, gap = _study_rep(cfg, rep, alphas, tol, max_iter)
        mu_hats[rep] = mu_hat
        tau2_hats[rep] = tau2_hat
        gaps[rep] = gap
        for alpha, k, false, naive, fdp, power in per_alpha:
            acc[alpha]["fdp"] += fdp
            acc[alpha]["power"] += power
            acc[alpha]["disc"] += k
            acc[alpha]["naive"] += naive
            rows.append(RepRecord(rep, alpha, k, false, naive, mu_hat, tau2_hat))

    mu_star, var_star = mixture_moments(cfg)
    per_alpha_out = tuple(
        AlphaSummary(
            alpha=a,
            empirical_fdr=acc[a]["fdp"] / replications,
            empirical_power=acc[a]["power"] / replications,
            mean_discoveries=acc[a]["disc"] / replications,
            mean_naive_false_positives=acc[a]["naive"] / replications,
        )
        for a in alphas
    )
    recovery = RecoveryStats(
        bias_mu=float(mu_hats.mean() - mu_star),
        bias_tau2=float(tau2_hats.mean() - var_star),
        rmse_mu=float(np.sqrt(np.mean((mu_hats - mu_star) ** 2))),
        rmse_tau2=float(np.sqrt(np.mean((tau2_hats - var_star) ** 2))),
    )
    return SimulationReport(
        replications=replications,
        per_alpha=per_alpha_out,
        recovery=recovery,
        mean_eb_gap=float(gaps.mean()),
        rows=tuple(rows),
    )


class ContrastOrderingError(AssertionError):
    """Discovery counts failed the expected ordering across categories."""


def run_contrast_study(
    putting_like: SyntheticConfig,
    driving_like: SyntheticConfig,
    alphas: Sequence[float],
    replications: int,
    approach_like: SyntheticConfig | None = None,
    tol: float = 1e-9,
    max_iter: int = 1000,
) -> tuple[SimulationReport, ...]:
    """Run matched studies for category analogues with different skill
    dispersion. When the tau2 values are strictly ordered, asserts that
    mean discovery counts are strictly increasing in tau2 at every alpha.
    """
    configs = [putting_like] + ([approach_like] if approach_like else []) + [driving_like]
    reports = tuple(run_fdr_study(c, alphas, replications, tol, max_iter) for c in configs)
    tau2s = [c.tau2_s for c in configs]
    if all(a < b for a, b in zip(tau2s, tau2s[1:])):
        for j, alpha in enumerate(alphas):
            counts = [r.per_alpha[j].mean_discoveries for r in reports]
            if not all(a < b for a, b in zip(counts, counts[1:])):
                raise ContrastOrderingError(
                    f"discovery counts not increasing at alpha={alpha}: {counts}"
                )
    return reports


def tau2_for_percentile_gap(
    target_gap: float,
    sigma2: float,
    mean_holes: float,
) -> float:
    """Prior variance whose EB estimates have (approximately) the given
    95th-5th percentile gap, accounting for shrinkage.

    EB estimates across golfers have sd tau2 / sqrt(tau2 + v) with
    v = sigma2 / mean_holes; solving for the tau2 that hits the target sd
    gives the positive root of tau2^2 = t^2 (tau2 + v).
    """
    t2 = (target_gap / _GAP_FACTOR) ** 2
    v = sigma2 / mean_holes
    return 0.5 * (t2 + math.sqrt(t2 * t2 + 4.0 * t2 * v))
