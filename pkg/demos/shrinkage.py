"""How shrinkage reorders a leaderboard.

A golfer with a hot streak over few holes posts a better raw average than
a steady golfer with a full season, yet the posterior ranks the steady
golfer higher: the estimate pools each sample mean toward the population
mean with strength inversely tied to data volume.

Run:  python3 demos/shrinkage.py
"""

from sgskill import eb_core, simlab

cfg = simlab.SyntheticConfig(
    n_golfers=120,
    holes_per_golfer=(80, 1600),  # wide spread of season lengths
    mu_s=0.0,
    tau2_s=0.003,
    sigma2=0.5,
    seed=99,
)
outcomes, truth = simlab.generate(cfg)
aggs = eb_core.summarize(outcomes)
fit = eb_core.fit_category(aggs)
posts = eb_core.posterior_all(aggs, fit)

print(f"fitted population: mu={fit.mu:+.5f}, tau2={fit.tau2:.5f} "
      f"({fit.iterations} iterations, converged={fit.converged})\n")

by_raw = sorted(posts, key=lambda p: -p.mle_mean)[:10]
print(f"{'golfer':>8} {'holes':>6} {'raw mean':>9} {'posterior':>10} {'shrunk by':>10} {'true skill':>11}")
for p in by_raw:
    pulled = p.eb_mean - p.mle_mean
    print(
        f"{p.golfer_season_id:>8} {p.n_holes:>6} {p.mle_mean:>9.4f} "
        f"{p.eb_mean:>10.4f} {pulled:>+10.4f} {truth[p.golfer_season_id]:>11.4f}"
    )

raw_rank = [p.golfer_season_id for p in sorted(posts, key=lambda p: -p.mle_mean)]
eb_rank = [p.golfer_season_id for p in sorted(posts, key=lambda p: -p.eb_mean)]
moved = sum(1 for a, b in zip(raw_rank, eb_rank) if a != b)
print(f"\n{moved} of {len(posts)} leaderboard positions change once shrinkage is applied")
