import itertools
import math

import numpy as np
import pytest

from sgskill.eb_core import SkillPosterior
from sgskill.ingest import Category
from sgskill.mtest import bh_reject, bh_sweep, normal_sf2, p_value
from sgskill.mtest import TestResult as _TestResult

from oracles import bh_brute, normal_cdf_quadrature


def post(gid="g", eb=0.1, var=0.01, cat=Category.PUTTING):
    return SkillPosterior(gid, cat, eb, var, eb, 100)


def tr(gid, p, cat=Category.PUTTING):
    return _TestResult(gid, cat, 0.0, p)


class TestPValue:
    def test_null_center(self):
        assert p_value(post(eb=0.0)).p_value == 1.0

    def test_z_1959964(self):
        t = p_value(post(eb=1.959964, var=1.0))
        assert t.p_value == pytest.approx(0.05, abs=1e-5)

    def test_z_2575829(self):
        t = p_value(post(eb=2.575829, var=1.0))
        assert t.p_value == pytest.approx(0.01, abs=1e-5)

    def test_matches_quadrature_oracle(self):
        for z in [0.1, 0.5, 1.0, 2.0, 3.5, 5.0]:
            expected = 2.0 * normal_cdf_quadrature(-z)
            assert normal_sf2(z) == pytest.approx(expected, abs=1e-12)

    def test_sign_symmetric(self):
        assert p_value(post(eb=0.5)).p_value == p_value(post(eb=-0.5)).p_value

    def test_strictly_decreasing_in_z(self):
        zs = np.linspace(0.0, 8.0, 200)
        ps = [normal_sf2(float(z)) for z in zs]
        assert ps[0] == 1.0
        assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_nonpositive_var_rejected(self):
        with pytest.raises(ValueError, match="post_var"):
            p_value(post(var=0.0))


class TestBH:
    def test_worked_example(self):
        tests = [tr(f"g{i}", p) for i, p in enumerate([0.01, 0.02, 0.04, 0.20])]
        out = bh_reject(tests, 0.05)
        assert out.m_discoveries == 2
        assert out.rejected_ids == ("g0", "g1")
        assert out.expected_true == pytest.approx(0.95 * 2)

    def test_all_ones_no_rejections(self):
        tests = [tr(f"g{i}", 1.0) for i in range(10)]
        for alpha in [0.01, 0.5, 0.99]:
            assert bh_reject(tests, alpha).m_discoveries == 0

    def test_all_zeros_reject_all(self):
        tests = [tr(f"g{i}", 0.0) for i in range(7)]
        out = bh_reject(tests, 0.01)
        assert out.m_discoveries == 7

    def test_alpha_validation(self):
        tests = [tr("g", 0.5)]
        for alpha in [0.0, 1.0, -0.1, 1.5]:
            with pytest.raises(ValueError):
                bh_reject(tests, alpha)
        with pytest.raises(ValueError):
            bh_reject([], 0.05)

    def test_exhaustive_grid_vs_brute_force(self):
        grid = [0.001, 0.01, 0.05, 0.2, 0.9]
        for n in range(1, 6):
            for ps in itertools.product(grid, repeat=n):
                tests = [tr(f"g{i}", p) for i, p in enumerate(ps)]
                for alpha in [0.01, 0.05, 0.1, 0.25]:
                    assert bh_reject(tests, alpha).m_discoveries == bh_brute(ps, alpha)

    def test_random_vectors_vs_brute_force(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(1, 51))
            ps = rng.uniform(0, 1, n) ** rng.uniform(0.5, 3)
            tests = [tr(f"g{i}", float(p)) for i, p in enumerate(ps)]
            alpha = float(rng.uniform(0.01, 0.5))
            assert bh_reject(tests, alpha).m_discoveries == bh_brute(ps, alpha)

    def test_ties_share_fate(self):
        tests = [tr("b", 0.02), tr("a", 0.02), tr("c", 0.9)]
        out = bh_reject(tests, 0.05)
        assert set(out.rejected_ids) in (set(), {"a", "b"})
        assert out.rejected_ids == ("a", "b")  # tie broken by id

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        ps = rng.uniform(0, 0.3, 30)
        tests = [tr(f"g{i}", float(p)) for i, p in enumerate(ps)]
        base = set(bh_reject(tests, 0.1).rejected_ids)
        for _ in range(5):
            shuffled = list(tests)
            rng.shuffle(shuffled)
            assert set(bh_reject(shuffled, 0.1).rejected_ids) == base

    def test_mixed_categories_rejected(self):
        with pytest.raises(ValueError):
            bh_reject([tr("a", 0.1), tr("b", 0.1, cat=Category.DRIVING)], 0.05)


class TestSweep:
    def test_monotone_and_nested(self):
        rng = np.random.default_rng(8)
        ps = rng.uniform(0, 1, 50) ** 2
        tests = [tr(f"g{i}", float(p)) for i, p in enumerate(ps)]
        alphas = [0.01, 0.05, 0.10, 0.15]
        outs = bh_sweep(tests, alphas)
        ms = [o.m_discoveries for o in outs]
        assert ms == sorted(ms)
        sets = [set(o.rejected_ids) for o in outs]
        for small, big in zip(sets, sets[1:]):
            assert small <= big

    def test_singleton_matches_reject(self):
        tests = [tr(f"g{i}", p) for i, p in enumerate([0.01, 0.2])]
        (out,) = bh_sweep(tests, [0.05])
        assert out == bh_reject(tests, 0.05)

    def test_empty_alphas(self):
        assert bh_sweep([tr("g", 0.5)], []) == []
