import csv

import pytest

from sgskill import simlab
from sgskill.ingest import Category

SHOT_HEADER = ["golfer_season", "tournament", "round", "hole", "category", "strokes_gained"]


def write_shot_csv(path, n_golfers=3, holes=200, seed=1234):
    """Tiny synthetic fixture: one shot per hole outcome, all three
    categories, enough holes to survive the default cohort filter."""
    rows = []
    for cat, tau2, cat_seed in [
        (Category.DRIVING, 0.003, seed),
        (Category.APPROACHING, 0.002, seed + 1),
        (Category.PUTTING, 0.001, seed + 2),
    ]:
        cfg = simlab.SyntheticConfig(
            n_golfers=n_golfers,
            holes_per_golfer=holes,
            mu_s=0.0,
            tau2_s=tau2,
            sigma2=0.5,
            seed=cat_seed,
            category=cat,
        )
        outcomes, _ = simlab.generate(cfg)
        for o in outcomes:
            t, r, h = o.hole_key
            rows.append([o.golfer_season_id, t, r, h, o.category.value, repr(o.x)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SHOT_HEADER)
        w.writerows(rows)
    return path


@pytest.fixture(scope="session")
def shot_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("fixture") / "shots.csv"
    return write_shot_csv(path)
