import json

import pytest

from sgskill.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from sgskill.report import read_csv


def run(*argv):
    return main(list(argv))


def tree_bytes(root):
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestFit:
    def test_fit_writes_artifacts(self, shot_csv, tmp_path):
        out = tmp_path / "out"
        assert run("fit", "--input", str(shot_csv), "--out", str(out)) == EXIT_OK
        fits = json.loads((out / "fits.json").read_text())
        assert {f["category"] for f in fits} == {"Driving", "Approaching", "Putting"}
        rows = read_csv(out / "posteriors.csv")
        per_cat = {}
        for r in rows:
            per_cat[r["category"]] = per_cat.get(r["category"], 0) + 1
        assert per_cat == {"Driving": 3, "Approaching": 3, "Putting": 3}

    def test_missing_input_is_data_error(self, tmp_path, capsys):
        rc = run("fit", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o"))
        assert rc == EXIT_DATA
        assert "nope.csv" in capsys.readouterr().err

    def test_no_input_is_usage_error(self, tmp_path):
        assert run("fit", "--out", str(tmp_path / "o")) == EXIT_USAGE

    def test_diagnostics_sidecar(self, shot_csv, tmp_path):
        out = tmp_path / "out"
        assert run("fit", "--input", str(shot_csv), "--out", str(out), "--diagnostics") == EXIT_OK
        diag = json.loads((out / "diagnostics.json").read_text())
        assert set(diag["categories"]) == {"Driving", "Approaching", "Putting"}
        for cat in diag["categories"].values():
            assert len(cat["loglik_trace"]) >= 1

    def test_strict_rejects_bad_rows(self, shot_csv, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text(shot_csv.read_text() + "p9,T1,1,3,chipping,0.1\n")
        out = tmp_path / "o"
        assert run("fit", "--input", str(bad), "--out", str(out), "--strict") == EXIT_DATA
        # non-strict succeeds with a warning
        assert run("fit", "--input", str(bad), "--out", str(out)) == EXIT_OK


class TestTest:
    def test_sweep_counts(self, shot_csv, tmp_path):
        out = tmp_path / "out"
        run("fit", "--input", str(shot_csv), "--out", str(out), "--min-holes", "100")
        assert run("test", "--out", str(out)) == EXIT_OK
        bh = json.loads((out / "bh.json").read_text())
        # default sweep: 4 alphas x 3 categories
        assert len(bh) == 12
        rows = read_csv(out / "results.csv")
        assert "rejected_at_alpha_0.05" in rows[0]
        for r in rows:
            assert 0.0 < float(r["p_value"]) <= 1.0

    def test_alpha_bounds(self, shot_csv, tmp_path):
        out = tmp_path / "out"
        run("fit", "--input", str(shot_csv), "--out", str(out))
        assert run("test", "--out", str(out), "--alpha", "0.5") == EXIT_OK
        assert run("test", "--out", str(out), "--alpha", "1.0") == EXIT_USAGE

    def test_missing_fit_artifacts(self, tmp_path):
        assert run("test", "--out", str(tmp_path / "empty")) == EXIT_DATA


class TestSimulate:
    def test_deterministic_given_seed(self, tmp_path):
        cfg = tmp_path / "study.json"
        cfg.write_text(
            json.dumps(
                {
                    "n_golfers": 30,
                    "holes_per_golfer": 100,
                    "tau2_s": 0.005,
                    "sigma2": 0.5,
                    "replications": 5,
                    "alphas": [0.05, 0.1],
                }
            )
        )
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("simulate", "--config", str(cfg), "--seed", "9", "--out", str(a)) == EXIT_OK
        assert run("simulate", "--config", str(cfg), "--seed", "9", "--out", str(b)) == EXIT_OK
        assert tree_bytes(a) == tree_bytes(b)
        report = json.loads((a / "simulation.json").read_text())
        assert report["replications"] == 5
        assert {r["alpha"] for r in report["per_alpha"]} == {0.05, 0.1}

    def test_zero_replications_usage_error(self, tmp_path):
        rc = run("simulate", "--replications", "0", "--seed", "1", "--out", str(tmp_path / "o"))
        assert rc == EXIT_USAGE


class TestReportCmd:
    def test_full_pipeline_manifest(self, shot_csv, tmp_path):
        out = tmp_path / "out"
        run("fit", "--input", str(shot_csv), "--out", str(out))
        run("test", "--out", str(out))
        # three golfers < percentile minimum; widen using top_k=1 still fails
        rc = run("report", "--out", str(out), "--top-k", "1")
        assert rc == EXIT_DATA  # too few golfers for percentiles is actionable

    def test_missing_posteriors(self, tmp_path):
        assert run("report", "--out", str(tmp_path / "empty")) == EXIT_DATA


@pytest.fixture(scope="module")
def big_csv(tmp_path_factory):
    from conftest import write_shot_csv

    path = tmp_path_factory.mktemp("fix") / "shots.csv"
    return write_shot_csv(path, n_golfers=25, holes=200, seed=5)


class TestAll:
    def test_all_end_to_end(self, big_csv, tmp_path):
        out = tmp_path / "out"
        rc = run("all", "--input", str(big_csv), "--out", str(out), "--alpha", "0.05", "--alpha", "0.1")
        assert rc == EXIT_OK
        manifest = json.loads((out / "report" / "manifest.json").read_text())
        assert manifest["categories"] == ["Approaching", "Driving", "Putting"]

    def test_all_byte_identical(self, big_csv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("all", "--input", str(big_csv), "--out", str(out)) == EXIT_OK
        assert tree_bytes(a) == tree_bytes(b)


class TestMisc:
    def test_version(self, capsys):
        assert run("--version") == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["name"] == "sgskill"

    def test_no_subcommand_usage(self):
        assert run() == EXIT_USAGE

    def test_config_dump(self, capsys, tmp_path):
        assert run("fit", "--min-holes", "99", "--config-dump") == EXIT_OK
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["min_holes"] == 99

    def test_env_override(self, monkeypatch, capsys):
        monkeypatch.setenv("SGSKILL_MIN_HOLES", "42")
        assert run("fit", "--config-dump") == EXIT_OK
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["min_holes"] == 42

    def test_flag_beats_env(self, monkeypatch, capsys):
        monkeypatch.setenv("SGSKILL_MIN_HOLES", "42")
        assert run("fit", "--min-holes", "7", "--config-dump") == EXIT_OK
        assert json.loads(capsys.readouterr().out)["min_holes"] == 7
