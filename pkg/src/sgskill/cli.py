"""Command-line pipeline: fit, test, simulate, report, all.

Config precedence: CLI flags > --config file > SGSKILL_* environment
variables > built-in defaults. The effective config is echoed into the
output directory (run_config.json) for provenance. Exit codes: 0 success,
1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np
from pathlib import Path

from . import __version__, eb_core, ingest, mtest, report as report_mod, simlab
from .ingest import Category

ENV_PREFIX = "SGSKILL_"
DEFAULT_ALPHAS = [0.01, 0.05, 0.10, 0.15]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise UsageError(message)


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name.upper())


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise DataError(f"config file not found: {p}")
    if p.suffix.lower() == ".toml":
        import tomllib

        return tomllib.loads(p.read_text())
    return json.loads(p.read_text())


def _resolve(args, cfg: dict, name: str, default, cast=None):
    """flag > config file > env > default."""
    val = getattr(args, name, None)
    if val is None:
        val = cfg.get(name)
    if val is None:
        raw = _env(name)
        if raw is not None:
            if name == "alphas":
                val = [float(t) for t in raw.split(",") if t]
            elif cast in (int, float):
                val = cast(raw)
            elif cast is bool:
                val = raw.lower() in ("1", "true", "yes")
            else:
                val = raw
    if val is None:
        val = default
    elif cast and not isinstance(val, (list, bool)):
        val = cast(val)
    return val


def build_parser() -> _Parser:
    parser = _Parser(prog="sgskill", description=__doc__)
    parser.add_argument("--version", action="store_true", help="print version and exit")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="JSON/TOML config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--config-dump", action="store_true", help="print effective config and exit")

    p_fit = sub.add_parser("fit", help="ingest shots and fit per-category skill posteriors")
    common(p_fit)
    p_fit.add_argument("--input", action="append", help="shot-level CSV (repeatable)")
    p_fit.add_argument("--schema", help="JSON file mapping logical fields to column names")
    p_fit.add_argument("--min-holes", dest="min_holes", type=int)
    p_fit.add_argument("--tol", type=float)
    p_fit.add_argument("--max-iter", dest="max_iter", type=int)
    p_fit.add_argument("--strict", action="store_true", default=None)
    p_fit.add_argument("--diagnostics", action="store_true", default=None)

    p_test = sub.add_parser("test", help="p-values and BH rejections from fit artifacts")
    common(p_test)
    p_test.add_argument("--alpha", dest="alphas", action="append", type=float)

    p_sim = sub.add_parser("simulate", help="synthetic-cohort FDR study")
    common(p_sim)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--replications", type=int)
    p_sim.add_argument("--alpha", dest="alphas", action="append", type=float)

    p_rep = sub.add_parser("report", help="summary artifacts from fit+test outputs")
    common(p_rep)
    p_rep.add_argument("--bins", type=int)
    p_rep.add_argument("--top-k", dest="top_k", type=int)
    p_rep.add_argument("--holes-per-tournament", dest="holes_per_tournament", type=int)
    p_rep.add_argument("--alpha", dest="alphas", action="append", type=float)

    p_all = sub.add_parser("all", help="fit + test + report")
    common(p_all)
    p_all.add_argument("--input", action="append")
    p_all.add_argument("--schema")
    p_all.add_argument("--min-holes", dest="min_holes", type=int)
    p_all.add_argument("--tol", type=float)
    p_all.add_argument("--max-iter", dest="max_iter", type=int)
    p_all.add_argument("--strict", action="store_true", default=None)
    p_all.add_argument("--diagnostics", action="store_true", default=None)
    p_all.add_argument("--alpha", dest="alphas", action="append", type=float)
    p_all.add_argument("--bins", type=int)
    p_all.add_argument("--top-k", dest="top_k", type=int)
    return parser


def _fit_config(args, cfg) -> dict:
    return {
        "input": _resolve(args, cfg, "input", None),
        "schema": _resolve(args, cfg, "schema", None),
        "min_holes": _resolve(args, cfg, "min_holes", 150, int),
        "tol": _resolve(args, cfg, "tol", eb_core.DEFAULT_TOL, float),
        "max_iter": _resolve(args, cfg, "max_iter", eb_core.DEFAULT_MAX_ITER, int),
        "strict": bool(_resolve(args, cfg, "strict", False, bool)),
        "diagnostics": bool(_resolve(args, cfg, "diagnostics", False, bool)),
        "out": _resolve(args, cfg, "out", None),
    }


def _write_json(path: Path, obj) -> None:
    with path.open("w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(config) -> Path:
    if not config.get("out"):
        raise UsageError("--out is required")
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


POSTERIOR_HEADER = ["golfer_season", "category", "n_holes", "mle_mean", "eb_mean", "post_var"]


def cmd_fit(args) -> int:
    cfg = _load_config_file(args.config)
    config = _fit_config(args, cfg)
    if args.config_dump:
        print(json.dumps(config, indent=2, sort_keys=True))
        return EXIT_OK
    if not config["input"]:
        raise UsageError("at least one --input CSV is required")
    out = _out_dir(config)

    schema = None
    if config["schema"]:
        schema_path = Path(config["schema"])
        if not schema_path.exists():
            raise DataError(f"schema file not found: {schema_path}")
        schema = json.loads(schema_path.read_text())

    shots = []
    all_errors = []
    for path in config["input"]:
        p = Path(path)
        if not p.exists():
            raise DataError(f"input file not found: {p}")
        with p.open(newline="") as fh:
            try:
                records, errors = ingest.parse_shots(fh, schema, strict=config["strict"])
            except (ingest.SchemaError, ingest.StrictParseError) as exc:
                raise DataError(f"{p}: {exc}") from exc
        shots.extend(records)
        for e in errors:
            print(f"warning: {p}: {e}", file=sys.stderr)
            all_errors.append({"file": str(p), "line": e.line, "message": e.message})

    outcomes = ingest.filter_cohort(
        ingest.aggregate_holes(shots), ingest.CohortConfig(config["min_holes"])
    )
    if not outcomes:
        raise DataError("no golfer-seasons survive the cohort filter")
    aggs = eb_core.summarize(outcomes)

    fits = []
    posteriors = []
    diagnostics = {"row_errors": all_errors, "categories": {}}
    by_cat: dict[Category, list] = {}
    for a in aggs:
        by_cat.setdefault(a.category, []).append(a)
    for cat in sorted(by_cat, key=lambda c: c.value):
        cat_aggs = by_cat[cat]
        try:
            fit = eb_core.fit_category(
                cat_aggs, config["tol"], config["max_iter"], keep_trace=config["diagnostics"]
            )
            # posteriors use the same floored variances the fit used
            var, _ = eb_core.floor_variances(
                np.array([a.var_mle for a in cat_aggs]),
                np.array([a.n_holes for a in cat_aggs], dtype=float),
            )
            cat_aggs = [
                eb_core.GolferAggregate(a.golfer_season_id, a.category, a.n_holes, a.mean, float(s2))
                for a, s2 in zip(cat_aggs, var)
            ]
            posteriors.extend(eb_core.posterior_all(cat_aggs, fit))
        except (eb_core.FitError, eb_core.DegenerateModelError) as exc:
            raise DataError(f"{cat.value}: {exc}") from exc
        fits.append(
            {
                "category": fit.category.value,
                "mu": fit.mu,
                "tau2": fit.tau2,
                "n_golfers": fit.n_golfers,
                "iterations": fit.iterations,
                "final_loglik": fit.final_loglik,
                "converged": fit.converged,
                "at_boundary": fit.at_boundary,
                "floored_ids": list(fit.floored_ids),
            }
        )
        if config["diagnostics"]:
            diagnostics["categories"][cat.value] = {
                "iterations": fit.iterations,
                "loglik_trace": list(fit.loglik_trace or ()),
            }
        if config["strict"] and not fit.converged:
            raise DataError(f"{cat.value}: fit did not converge within {config['max_iter']} iterations")

    _write_json(out / "fits.json", fits)
    with (out / "posteriors.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(POSTERIOR_HEADER)
        for p in sorted(posteriors, key=lambda p: (p.category.value, p.golfer_season_id)):
            w.writerow(
                [p.golfer_season_id, p.category.value, p.n_holes, repr(p.mle_mean), repr(p.eb_mean), repr(p.post_var)]
            )
    if config["diagnostics"]:
        _write_json(out / "diagnostics.json", diagnostics)
    _write_json(out / "run_config.json", {k: v for k, v in config.items() if k != "out"})
    return EXIT_OK


def _read_posteriors(out: Path) -> list[eb_core.SkillPosterior]:
    path = out / "posteriors.csv"
    if not path.exists():
        raise DataError(f"missing fit artifact: {path} (run `sgskill fit` first)")
    posts = []
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            posts.append(
                eb_core.SkillPosterior(
                    golfer_season_id=row["golfer_season"],
                    category=Category(row["category"]),
                    eb_mean=float(row["eb_mean"]),
                    post_var=float(row["post_var"]),
                    mle_mean=float(row["mle_mean"]),
                    n_holes=int(row["n_holes"]),
                )
            )
    return posts


def _alpha_col(alpha: float) -> str:
    return f"rejected_at_alpha_{alpha:g}"


def cmd_test(args) -> int:
    cfg = _load_config_file(args.config)
    config = {
        "out": _resolve(args, cfg, "out", None),
        "alphas": _resolve(args, cfg, "alphas", DEFAULT_ALPHAS),
    }
    if args.config_dump:
        print(json.dumps(config, indent=2, sort_keys=True))
        return EXIT_OK
    out = _out_dir(config)
    alphas = [float(a) for a in config["alphas"]]
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise UsageError(f"alpha must be in (0, 1), got {a}")

    posteriors = _read_posteriors(out)
    by_cat: dict[Category, list] = {}
    for p in posteriors:
        by_cat.setdefault(p.category, []).append(p)

    results_rows = []
    bh_records = []
    for cat in sorted(by_cat, key=lambda c: c.value):
        # a boundary fit (tau2 = 0) yields degenerate posteriors: no golfer
        # is individually distinguishable, so their p-values are 1
        tests = [
            mtest.p_value(p)
            if p.post_var > 0.0
            else mtest.TestResult(p.golfer_season_id, cat, 0.0, 1.0)
            for p in by_cat[cat]
        ]
        outcomes = mtest.bh_sweep(tests, alphas)
        rejected = {o.alpha: set(o.rejected_ids) for o in outcomes}
        for p, t in zip(by_cat[cat], tests):
            row = {
                "golfer_season": p.golfer_season_id,
                "category": cat.value,
                "eb_mean": p.eb_mean,
                "post_var": p.post_var,
                "z": t.z,
                "p_value": t.p_value,
            }
            for a in alphas:
                row[_alpha_col(a)] = p.golfer_season_id in rejected[a]
            results_rows.append(row)
        for o in outcomes:
            bh_records.append(
                {
                    "category": cat.value,
                    "alpha": o.alpha,
                    "m_discoveries": o.m_discoveries,
                    "expected_true": o.expected_true,
                    "rejected_ids": list(o.rejected_ids),
                }
            )

    results_rows.sort(key=lambda r: (r["category"], r["golfer_season"]))
    header = ["golfer_season", "category", "eb_mean", "post_var", "z", "p_value"] + [
        _alpha_col(a) for a in alphas
    ]
    with (out / "results.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in results_rows:
            w.writerow(
                [
                    r["golfer_season"],
                    r["category"],
                    repr(r["eb_mean"]),
                    repr(r["post_var"]),
                    repr(r["z"]),
                    repr(r["p_value"]),
                ]
                + [str(r[_alpha_col(a)]).lower() for a in alphas]
            )
    _write_json(out / "results.json", results_rows)
    _write_json(out / "bh.json", bh_records)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_config_file(args.config)
    config = {
        "n_golfers": _resolve(args, cfg, "n_golfers", 553, int),
        "holes_per_golfer": cfg.get("holes_per_golfer", [400, 1600]),
        "mu_s": _resolve(args, cfg, "mu_s", 0.0, float),
        "tau2_s": _resolve(args, cfg, "tau2_s", 0.001, float),
        "sigma2": cfg.get("sigma2", 0.5),
        "null_fraction": _resolve(args, cfg, "null_fraction", 0.0, float),
        "seed": _resolve(args, cfg, "seed", None, int),
        "replications": _resolve(args, cfg, "replications", 200, int),
        "alphas": _resolve(args, cfg, "alphas", DEFAULT_ALPHAS),
        "out": _resolve(args, cfg, "out", None),
    }
    if args.config_dump:
        print(json.dumps(config, indent=2, sort_keys=True))
        return EXIT_OK
    if config["replications"] < 1:
        raise UsageError("--replications must be >= 1")
    if config["seed"] is None:
        config["seed"] = int.from_bytes(os.urandom(4), "big")
        print(f"seed not given; using randomly drawn seed {config['seed']}")
    out = _out_dir(config)

    holes = config["holes_per_golfer"]
    sigma2 = config["sigma2"]
    sim_cfg = simlab.SyntheticConfig(
        n_golfers=config["n_golfers"],
        holes_per_golfer=tuple(holes) if isinstance(holes, (list, tuple)) else int(holes),
        mu_s=config["mu_s"],
        tau2_s=config["tau2_s"],
        sigma2=tuple(sigma2) if isinstance(sigma2, (list, tuple)) else float(sigma2),
        null_fraction=config["null_fraction"],
        seed=config["seed"],
    )
    rep = simlab.run_fdr_study(sim_cfg, [float(a) for a in config["alphas"]], config["replications"])
    _write_json(out / "simulation.json", rep.to_dict())
    with (out / "replications.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replication", "alpha", "discoveries", "false_discoveries", "naive_rejections", "mu_hat", "tau2_hat"])
        for r in rep.rows:
            w.writerow([r.replication, repr(r.alpha), r.discoveries, r.false_discoveries, r.naive_rejections, repr(r.mu_hat), repr(r.tau2_hat)])
    _write_json(out / "run_config.json", {k: v for k, v in config.items() if k != "out"})
    for a in rep.per_alpha:
        print(
            f"alpha={a.alpha:g}: empirical_fdr={a.empirical_fdr:.4f} "
            f"mean_discoveries={a.mean_discoveries:.2f} "
            f"naive={a.mean_naive_false_positives:.2f}"
        )
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _load_config_file(args.config)
    config = {
        "out": _resolve(args, cfg, "out", None),
        "bins": _resolve(args, cfg, "bins", 30, int),
        "top_k": _resolve(args, cfg, "top_k", 7, int),
        "holes_per_tournament": _resolve(args, cfg, "holes_per_tournament", 72, int),
        "alphas": _resolve(args, cfg, "alphas", DEFAULT_ALPHAS),
    }
    if args.config_dump:
        print(json.dumps(config, indent=2, sort_keys=True))
        return EXIT_OK
    out = _out_dir(config)
    posteriors = _read_posteriors(out)
    aggs = [
        eb_core.GolferAggregate(p.golfer_season_id, p.category, p.n_holes, p.mle_mean, 0.0)
        for p in posteriors
    ]
    try:
        tests = [
            mtest.p_value(p)
            if p.post_var > 0.0
            else mtest.TestResult(p.golfer_season_id, p.category, 0.0, 1.0)
            for p in posteriors
        ]
        report_mod.write_report(
            out / "report",
            aggs,
            posteriors,
            tests,
            [float(a) for a in config["alphas"]],
            bins=config["bins"],
            k=config["top_k"],
            holes_per_tournament=config["holes_per_tournament"],
            config={k: v for k, v in config.items() if k != "out"},
            version=__version__,
        )
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    return EXIT_OK


def cmd_all(args) -> int:
    rc = cmd_fit(args)
    if rc != EXIT_OK or args.config_dump:
        return rc
    rc = cmd_test(args)
    if rc != EXIT_OK:
        return rc
    return cmd_report(args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.version:
            print(json.dumps({"name": "sgskill", "version": __version__}))
            return EXIT_OK
        if args.command is None:
            raise UsageError("a subcommand is required (fit, test, simulate, report, all)")
        handler = {
            "fit": cmd_fit,
            "test": cmd_test,
            "simulate": cmd_simulate,
            "report": cmd_report,
            "all": cmd_all,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
