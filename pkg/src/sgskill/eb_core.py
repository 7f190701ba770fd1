"""Two-level Gaussian hierarchy: marginal MLE fit and closed-form posteriors.

Model per stroke category: hole outcomes X_ij ~ N(mu_i, sigma2_i) for golfer
i, latent skill mu_i ~ N(mu, tau2). Hyperparameters (mu, tau2) are fit by
marginal maximum likelihood on the per-golfer sample means via a monotone
EM fixed point; sigma2_i is the per-golfer divisor-N sample variance,
plugged in once before the fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import Category, HoleOutcome

# Degenerate per-golfer variances are floored at this fraction of the
# cohort's pooled within-golfer variance.
VAR_FLOOR_FRACTION = 1e-3
# M-step values of tau2 below this are treated as the tau2 = 0 boundary.
TAU2_BOUNDARY = 1e-12

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class DegenerateModelError(ValueError):
    """Both the prior variance and a golfer's sampling variance are zero."""


class FitError(ValueError):
    """The hierarchy cannot be fit on the given aggregates."""


@dataclass(frozen=True)
class GolferAggregate:
    golfer_season_id: str
    category: Category
    n_holes: int
    mean: float
    var_mle: float  # divisor-N sample variance of hole outcomes


@dataclass(frozen=True)
class CategoryFit:
    category: Category
    mu: float
    tau2: float
    n_golfers: int
    iterations: int
    final_loglik: float
    converged: bool
    at_boundary: bool = False
    floored_ids: tuple[str, ...] = ()
    loglik_trace: tuple[float, ...] | None = None


@dataclass(frozen=True)
class SkillPosterior:
    golfer_season_id: str
    category: Category
    eb_mean: float
    post_var: float
    mle_mean: float
    n_holes: int


def summarize(outcomes: Iterable[HoleOutcome]) -> list[GolferAggregate]:
    """Per-(golfer, category) sufficient statistics: count, mean, and
    divisor-N variance of hole outcomes. Groups appear in first-appearance
    order."""
    groups: dict[tuple[str, Category], list[float]] = {}
    for o in outcomes:
        groups.setdefault((o.golfer_season_id, o.category), []).append(o.x)
    aggs = []
    for (gid, cat), xs in groups.items():
        arr = np.asarray(xs, dtype=float)
        aggs.append(
            GolferAggregate(
                golfer_season_id=gid,
                category=cat,
                n_holes=arr.size,
                mean=float(arr.mean()),
                var_mle=float(arr.var()),
            )
        )
    return aggs


def floor_variances(var_mle: np.ndarray, n_holes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Replace zero divisor-N variances with a small floor.

    The floor is VAR_FLOOR_FRACTION times the pooled within-golfer
    variance, which keeps the fix scale-equivariant. Returns the floored
    array and a boolean mask of the golfers that were floored.
    """
    var_mle = np.asarray(var_mle, dtype=float)
    mask = var_mle == 0.0
    if not mask.any():
        return var_mle, mask
    pooled = float(np.sum(n_holes * var_mle) / np.sum(n_holes))
    if pooled <= 0.0:
        raise DegenerateModelError("all golfer variances are zero; noise scale unidentifiable")
    out = var_mle.copy()
    out[mask] = pooled * VAR_FLOOR_FRACTION
    return out, mask


def marginal_loglik(means: np.ndarray, v: np.ndarray, mu: float, tau2: float) -> float:
    """Log-likelihood of sample means under X-bar_i ~ N(mu, tau2 + v_i)."""
    s = tau2 + v
    return float(-0.5 * np.sum(np.log(2.0 * math.pi * s) + (means - mu) ** 2 / s))


def _profile_mu(means: np.ndarray, v: np.ndarray, tau2: float) -> float:
    """Maximizing mu for a fixed tau2: the precision-weighted mean."""
    w = 1.0 / (tau2 + v)
    return float(np.sum(w * means) / np.sum(w))


def _profile_score(means: np.ndarray, v: np.ndarray, tau2: float) -> float:
    """d/d(tau2) of the profile log-likelihood (mu profiled out)."""
    s = tau2 + v
    m = _profile_mu(means, v, tau2)
    return 0.5 * float(np.sum((means - m) ** 2 / s**2 - 1.0 / s))


def em_fit(
    means: np.ndarray,
    v: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[float, float, int, list[float], bool, bool]:
    """EM fixed point for (mu, tau2) given sample means and their effective
    sampling variances v_i = var_mle_i / n_holes_i.

    E-step: per-golfer posterior mean m_i and variance V_i under the
    current (mu, tau2). M-step: mu <- mean(m_i), tau2 <- mean(V_i +
    (m_i - mu)^2). The marginal log-likelihood is non-decreasing across
    iterations. Returns (mu, tau2, iterations, loglik_trace, converged,
    at_boundary).
    """
    means = np.asarray(means, dtype=float)
    v = np.asarray(v, dtype=float)

    # Exact boundary check: at tau2 = 0 the profile MLE of mu is the
    # precision-weighted mean; if the likelihood gradient in tau2 there is
    # nonpositive, the MLE sits on the tau2 = 0 boundary and EM would only
    # crawl toward it.
    if _profile_score(means, v, 0.0) <= 0.0:
        mu0 = _profile_mu(means, v, 0.0)
        return mu0, 0.0, 0, [marginal_loglik(means, v, mu0, 0.0)], True, True

    mu = float(means.mean())
    # method-of-moments start
    tau2 = max(float(means.var()) - float(v.mean()), 1e-8)
    trace: list[float] = []
    converged = False
    at_boundary = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        post_prec = 1.0 / v + 1.0 / tau2
        V = 1.0 / post_prec
        m = (means / v + mu / tau2) * V
        mu_new = float(m.mean())
        tau2_new = float(np.mean(V + (m - mu_new) ** 2))
        trace.append(marginal_loglik(means, v, mu_new, tau2_new))
        if tau2_new < TAU2_BOUNDARY:
            mu, tau2 = mu_new, 0.0
            converged = True
            at_boundary = True
            break
        rel = max(
            abs(mu_new - mu) / max(abs(mu_new), TAU2_BOUNDARY),
            abs(tau2_new - tau2) / max(tau2_new, TAU2_BOUNDARY),
        )
        mu, tau2 = mu_new, tau2_new
        if rel < tol:
            converged = True
            break

    if not at_boundary:
        polished = _polish_tau2(means, v, tau2)
        if polished is not None:
            if polished < TAU2_BOUNDARY:
                polished = 0.0
            mu_p = _profile_mu(means, v, polished)
            ll_p = marginal_loglik(means, v, mu_p, polished)
            if ll_p >= trace[-1]:
                mu, tau2 = mu_p, polished
                trace.append(ll_p)
                converged = True
                at_boundary = polished == 0.0
    return mu, tau2, iterations, trace, converged, at_boundary


def _polish_tau2(means: np.ndarray, v: np.ndarray, tau2: float) -> float | None:
    """Exact interior maximizer of the profile likelihood in tau2.

    The EM fixed point approaches small-tau2 optima only harmonically, so
    a run capped by max_iter can stall orders of magnitude away from the
    stationary point. The profile score is positive at tau2 = 0 here (the
    boundary case exits earlier) and negative for large tau2, so a
    bracketed root solve pins the maximizer directly.
    """
    from scipy.optimize import brentq

    hi = max(2.0 * tau2, float(means.var()), float(v.mean()), TAU2_BOUNDARY)
    for _ in range(200):
        if _profile_score(means, v, hi) < 0.0:
            break
        hi *= 2.0
    else:
        return None
    return float(brentq(lambda t2: _profile_score(means, v, t2), 0.0, hi, xtol=1e-300, rtol=8.882e-16))


def fit_category(
    aggs: Sequence[GolferAggregate],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    keep_trace: bool = False,
) -> CategoryFit:
    """Fit (mu, tau2) for one stroke category by marginal maximum
    likelihood. Requires at least two golfers (tau2 is unidentifiable
    otherwise); non-convergence within max_iter is flagged, not fatal."""
    if len(aggs) < 2:
        raise FitError(f"need >= 2 golfers to fit a category, got {len(aggs)}")
    cats = {a.category for a in aggs}
    if len(cats) != 1:
        raise FitError(f"aggregates span multiple categories: {sorted(c.value for c in cats)}")
    (category,) = cats

    n_holes = np.array([a.n_holes for a in aggs], dtype=float)
    means = np.array([a.mean for a in aggs], dtype=float)
    var_mle = np.array([a.var_mle for a in aggs], dtype=float)
    var_mle, floored = floor_variances(var_mle, n_holes)
    v = var_mle / n_holes
    if not np.all(np.isfinite(v)):
        raise FitError("non-finite effective sampling variance")

    mu, tau2, iterations, trace, converged, at_boundary = em_fit(means, v, tol, max_iter)
    return CategoryFit(
        category=category,
        mu=mu,
        tau2=tau2,
        n_golfers=len(aggs),
        iterations=iterations,
        final_loglik=trace[-1],
        converged=converged,
        at_boundary=at_boundary,
        floored_ids=tuple(a.golfer_season_id for a, f in zip(aggs, floored) if f),
        loglik_trace=tuple(trace) if keep_trace else None,
    )


def posterior(agg: GolferAggregate, fit: CategoryFit) -> SkillPosterior:
    """Closed-form Normal-Normal posterior for one golfer.

    eb_mean = (N*mean/sigma2 + mu/tau2) / (N/sigma2 + 1/tau2) and
    post_var = (N/sigma2 + 1/tau2)^-1, with sigma2 the golfer's plug-in
    variance and (mu, tau2) from the category fit. The tau2 = 0 and
    sigma2 = 0 limits collapse the posterior onto the prior mean or the
    sample mean respectively.
    """
    s2 = agg.var_mle
    t2 = fit.tau2
    if s2 == 0.0 and t2 == 0.0:
        raise DegenerateModelError(
            f"golfer {agg.golfer_season_id!r}: both prior and sampling variance are zero"
        )
    if t2 == 0.0:
        eb, pv = fit.mu, 0.0
    elif s2 == 0.0:
        eb, pv = agg.mean, 0.0
    else:
        prec = agg.n_holes / s2 + 1.0 / t2
        eb = (agg.n_holes * agg.mean / s2 + fit.mu / t2) / prec
        pv = 1.0 / prec
    return SkillPosterior(
        golfer_season_id=agg.golfer_season_id,
        category=agg.category,
        eb_mean=eb,
        post_var=pv,
        mle_mean=agg.mean,
        n_holes=agg.n_holes,
    )


def posterior_all(aggs: Sequence[GolferAggregate], fit: CategoryFit) -> list[SkillPosterior]:
    """Elementwise posterior with golfer ids attached to any failure."""
    out = []
    for agg in aggs:
        try:
            out.append(posterior(agg, fit))
        except DegenerateModelError:
            raise
        except Exception as exc:
            raise type(exc)(f"golfer {agg.golfer_season_id!r}: {exc}") from exc
    return out


def posterior_arrays(
    means: np.ndarray,
    n_holes: np.ndarray,
    var_mle: np.ndarray,
    mu: float,
    tau2: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized posterior over golfers; requires var_mle > 0 elementwise.

    With tau2 = 0 every posterior collapses to (mu, 0)."""
    means = np.asarray(means, dtype=float)
    n_holes = np.asarray(n_holes, dtype=float)
    var_mle = np.asarray(var_mle, dtype=float)
    if tau2 == 0.0:
        return np.full_like(means, mu), np.zeros_like(means)
    prec = n_holes / var_mle + 1.0 / tau2
    eb = (n_holes * means / var_mle + mu / tau2) / prec
    return eb, 1.0 / prec
