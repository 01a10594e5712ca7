"""Monte Carlo engine: determinism, normalization, and the statistical checks."""
import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import gamma as gamma_fn

from uclt.distances import natural_function, sigma_squared
from uclt.errors import HorizonExceeded
from uclt.psi import gaussian_lp_norm
from uclt.simulate import (
    OSEKOWSKI_CONSTANT,
    MartingaleFieldModel,
    SimulationReport,
    clt_diagnostic,
    covariance_estimate,
    equicontinuity_check,
    estimate_moment_curves,
    grid_coords,
    ks_gaussian,
    ks_two_sample,
    martingale_difference_check,
    model_from_config,
    osekowski_check,
    simulate_eta,
    tail_domination_check,
    weighted_tail_domination_check,
)


def white_gaussian(npts=3, horizon=64, seed=42):
    return MartingaleFieldModel("wg", "iid_gaussian_field", grid_coords(npts),
                                {"kernel": {"name": "white"}}, horizon=horizon, seed=seed)


def rademacher(npts=2, horizon=512, seed=7):
    return MartingaleFieldModel("rad", "bounded_sign", grid_coords(npts), {},
                                horizon=horizon, seed=seed)


ALL_KINDS = [
    white_gaussian(),
    MartingaleFieldModel("wb", "weibull_field", grid_coords(3),
                         {"K": 1.0, "q": 2.0}, horizon=64, seed=9),
    MartingaleFieldModel("gl", "garch_like", grid_coords(3),
                         {"kernel": {"name": "rbf", "length_scale": 0.5}},
                         horizon=64, seed=10),
    MartingaleFieldModel("bs", "bounded_sign", grid_coords(3),
                         {"modulation": 0.25, "amplitude_slope": 0.5},
                         horizon=64, seed=11),
]


class TestKsStatistics:
    def test_two_sample_against_scipy(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal(700)
        b = rng.standard_normal(900) + 0.2
        assert ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-12)

    def test_one_sample_against_scipy(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(1500) * 1.7
        got = ks_gaussian(x, 1.7)
        ref = stats.kstest(x, lambda v: stats.norm.cdf(v, scale=1.7)).statistic
        assert got == pytest.approx(ref, abs=1e-12)


class TestEngine:
    def test_n_one_is_first_difference(self):
        m = white_gaussian()
        eta = simulate_eta(m, 1, 100)
        assert eta.shape == (100, 3)

    def test_unit_variance_normalization(self):
        m = white_gaussian()
        R = 40000
        eta = simulate_eta(m, 16, R)
        tol = 3 * math.sqrt(2.0 / R)
        assert np.all(np.abs(eta.var(axis=0) - 1.0) < tol)

    def test_sign_walk_fourth_moment(self):
        m = rademacher()
        R = 200000
        for n in (4, 16):
            e = simulate_eta(m, n, R)[:, 0]
            target = 3.0 - 2.0 / n
            se = (e ** 4).std() / math.sqrt(R)
            assert (e ** 4).mean() == pytest.approx(target, abs=3 * se)

    def test_horizon_guard(self):
        with pytest.raises(HorizonExceeded):
            simulate_eta(white_gaussian(horizon=8), 16, 10)

    def test_deterministic_across_threads_and_reruns(self):
        m = white_gaussian()
        a = simulate_eta(m, 16, 5000, threads=1)
        b = simulate_eta(m, 16, 5000, threads=4)
        c = simulate_eta(m, 16, 5000, threads=8)
        assert np.array_equal(a, b) and np.array_equal(a, c)
        assert np.array_equal(a, simulate_eta(m, 16, 5000))

    def test_seed_changes_output(self):
        a = simulate_eta(white_gaussian(seed=1), 8, 100)
        b = simulate_eta(white_gaussian(seed=2), 8, 100)
        assert not np.array_equal(a, b)

    @pytest.mark.parametrize("model", ALL_KINDS, ids=lambda m: m.kind)
    def test_difference_property_all_kinds(self, model):
        rows = martingale_difference_check(model, [2, 16, 64], R=30000)
        assert all(r["ok"] for r in rows)

    def test_bias_detected(self):
        bad = MartingaleFieldModel("bad", "bounded_sign", grid_coords(2), {},
                                   horizon=16, seed=5, bias=0.1)
        rows = martingale_difference_check(bad, [2, 16], R=20000)
        assert not all(r["ok"] for r in rows)

    def test_growth_explodes_variance(self):
        m = MartingaleFieldModel("gr", "iid_gaussian_field", grid_coords(2),
                                 {"kernel": {"name": "white"}}, horizon=64, seed=6,
                                 growth=0.5)
        field = estimate_moment_curves(m, [], [2.0], 4000, i_max=64)
        assert math.isinf(sigma_squared(field, [1, 2, 4, 8, 16, 32, 64]))


class TestMomentEstimation:
    def test_gaussian_increment_norms(self):
        m = MartingaleFieldModel("br", "iid_gaussian_field", grid_coords(4, 0.2, 1.0),
                                 {"kernel": {"name": "brownian"}}, horizon=16, seed=3)
        labels = m.labels
        field = estimate_moment_curves(m, [(labels[0], labels[3])], [2, 3, 4], 30000, i_max=8)
        curve = field.pair_curve(3, labels[0], labels[3])
        sd = math.sqrt(0.8)  # increment variance = |x1 - x2| for this kernel
        for p in (2, 3, 4):
            expect = sd * gaussian_lp_norm(p)
            assert curve.value_at(p) == pytest.approx(expect, abs=4 * curve.stderr_at(p) + 1e-3)

    def test_same_point_pair_is_zero(self):
        m = white_gaussian()
        field = estimate_moment_curves(m, [("x0", "x1")], [2.0, 3.0], 2000, i_max=4)
        zero = field.pair_curve(2, "x0", "x0")
        assert all(v == 0 for v in zero.norms)

    def test_variance_matches_squared_l2(self):
        m = white_gaussian()
        field = estimate_moment_curves(m, [], [2.0, 4.0], 30000, i_max=4)
        for i in (1, 3):
            l2 = field.point_curve(i, "x0").value_at(2.0)
            se = field.point_curve(i, "x0").stderr_at(2.0)
            assert field.variance(i, "x0") == pytest.approx(l2 ** 2, abs=8 * se + 1e-3)

    def test_kernel_scaling_scales_norms_exactly(self):
        base = MartingaleFieldModel("a", "iid_gaussian_field", grid_coords(2),
                                    {"kernel": {"name": "white", "variance": 1.0}},
                                    horizon=8, seed=12)
        quad = MartingaleFieldModel("b", "iid_gaussian_field", grid_coords(2),
                                    {"kernel": {"name": "white", "variance": 4.0}},
                                    horizon=8, seed=12)
        f1 = estimate_moment_curves(base, [("x0", "x1")], [2, 4], 2000, i_max=4)
        f2 = estimate_moment_curves(quad, [("x0", "x1")], [2, 4], 2000, i_max=4)
        for p in (2, 4):
            assert f2.point_curve(1, "x0").value_at(p) == \
                pytest.approx(2 * f1.point_curve(1, "x0").value_at(p), rel=1e-10)

    def test_weibull_point_moments(self):
        K, q = 1.5, 2.0
        m = MartingaleFieldModel("wb", "weibull_field", grid_coords(2),
                                 {"K": K, "q": q}, horizon=8, seed=13)
        field = estimate_moment_curves(m, [], [2.0, 4.0], 60000, i_max=2)
        for p in (2.0, 4.0):
            expect = K * gamma_fn(1 + p / q) ** (1 / p)
            got = field.point_curve(1, "x0")
            assert got.value_at(p) == pytest.approx(expect, abs=5 * got.stderr_at(p) + 2e-3)


class TestOsekowski:
    def test_p2_orthogonality_ratio(self):
        for model in (white_gaussian(horizon=512), rademacher()):
            rows = osekowski_check(model, [2.0], [8, 64], 30000)
            for r in rows:
                assert abs(r["ratio"] - math.log(2) / 2) <= 3 * r["se"] + 1e-4

    def test_n_one_exact_cancellation(self):
        rows = osekowski_check(white_gaussian(), [2.0, 3.0, 4.0], [1], 500)
        for r in rows:
            assert r["ratio"] == pytest.approx(math.log(r["p"]) / r["p"], rel=1e-12)
            assert r["ratio"] <= 1 / math.e + 1e-12

    def test_garch_within_bound(self):
        m = MartingaleFieldModel("gl", "garch_like", grid_coords(2),
                                 {"kernel": {"name": "white"}}, horizon=256, seed=4)
        rows = osekowski_check(m, [3.0, 4.0, 6.0], [16, 256], 20000)
        for r in rows:
            assert r["within_bound"]
            assert r["ratio"] <= OSEKOWSKI_CONSTANT - 3 * r["se"]

    def test_pairs_mode(self):
        m = white_gaussian()
        rows = osekowski_check(m, [2.0], [8], 4000, mode="pairs", pair=("x0", "x2"))
        assert abs(rows[0]["ratio"] - math.log(2) / 2) <= 4 * rows[0]["se"] + 1e-3

    def test_rejects_p_below_two(self):
        with pytest.raises(ValueError):
            osekowski_check(white_gaussian(), [1.5], [8], 100)


class TestEquicontinuity:
    def test_identical_points_both_sides_zero(self):
        m = white_gaussian()
        rows = equicontinuity_check(m, [("x0", "x0")], [2, 3, 4], [1, 4], 2000)
        assert rows[0]["lhs"] == 0.0 and rows[0]["dbar"] == 0.0 and rows[0]["ok"]

    def test_brownian_scale_invariance(self):
        m = MartingaleFieldModel("br", "iid_gaussian_field", grid_coords(5, 0.2, 1.0),
                                 {"kernel": {"name": "brownian"}}, horizon=16, seed=3)
        rows = equicontinuity_check(m, [("x0", "x4"), ("x1", "x2")], [2, 3, 4, 6],
                                    [1, 2, 4, 8, 16], 20000)
        assert all(r["ok"] for r in rows)
        ratios = [r["ratio"] for r in rows]
        assert ratios[0] == pytest.approx(ratios[1], rel=0.15)

    def test_garch_domination(self):
        m = MartingaleFieldModel("gl", "garch_like", grid_coords(3),
                                 {"kernel": {"name": "rbf", "length_scale": 0.4}},
                                 horizon=64, seed=21)
        rows = equicontinuity_check(m, [("x0", "x2"), ("x0", "x1")], [2, 3, 4, 6],
                                    [1, 4, 16, 64], 20000)
        assert all(r["ok"] for r in rows)


class TestCovariance:
    def test_kernel_recovery(self):
        m = MartingaleFieldModel("rbf", "iid_gaussian_field", grid_coords(4),
                                 {"kernel": {"name": "rbf", "length_scale": 0.5}},
                                 horizon=32, seed=3)
        cov, se, ana = covariance_estimate(m, 8, 40000)
        assert ana is not None
        assert np.all(np.abs(cov - ana) <= 3.5 * se)

    def test_diagonal_consistent_with_variance_functional(self):
        m = white_gaussian()
        cov, _, _ = covariance_estimate(m, 8, 30000)
        field = estimate_moment_curves(m, [], [2.0], 30000, i_max=8)
        s2 = sigma_squared(field, [1, 2, 4, 8])
        assert min(np.diag(cov)) == pytest.approx(s2, rel=0.05)

    def test_shared_sign_structure(self):
        m = rademacher(npts=3)
        cov, se, ana = covariance_estimate(m, 16, 20000)
        assert ana is not None and np.allclose(ana, 1.0)
        assert np.all(np.abs(cov - ana) <= 4 * se + 1e-9)

    def test_independent_sign_structure(self):
        m = MartingaleFieldModel("ind", "bounded_sign", grid_coords(3),
                                 {"cross": "independent"}, horizon=32, seed=8)
        cov, se, ana = covariance_estimate(m, 16, 20000)
        assert np.allclose(ana, np.eye(3))
        assert np.all(np.abs(cov - ana) <= 4 * se + 1e-9)

    def test_estimated_field_variance_consistency(self):
        m = white_gaussian()
        field = estimate_moment_curves(m, [], [2.0, 4.0], 20000, i_max=4)
        assert field.variance_consistency() == []


class TestCltDiagnostic:
    def test_identical_distributions_small_ks(self):
        m = white_gaussian(npts=4, horizon=64)
        d = clt_diagnostic(m, (63, 64), 1500)
        assert d["ks_supnorm"] <= 1.4 * d["ks_critical_5pct"]

    def test_gaussian_marginals_exact(self):
        m = MartingaleFieldModel("g", "iid_gaussian_field", grid_coords(5),
                                 {"kernel": {"name": "rbf"}}, horizon=128, seed=8)
        d = clt_diagnostic(m, (16, 128), 1500)
        worst = max(max(v.values()) for v in d["per_point_ks"].values())
        assert worst <= 0.05

    def test_validates_order(self):
        with pytest.raises(ValueError):
            clt_diagnostic(white_gaussian(), (8, 8), 100)


class TestTailDomination:
    @pytest.mark.parametrize("model", ALL_KINDS, ids=lambda m: m.kind)
    def test_all_kinds_dominated(self, model):
        rows = tail_domination_check(model, None, [1.5, 2.0, 3.0], [16, 64], 20000)
        assert all(r["ok"] for r in rows)

    def test_weighted_form(self):
        rng = np.random.default_rng(0)
        rows = weighted_tail_domination_check(rademacher(), None, [1.5, 2.0, 3.0],
                                              rng.standard_normal(64), 50000)
        assert all(r["ok"] for r in rows)


class TestConfigAndReports:
    def test_model_from_config(self):
        m = model_from_config({"kind": "weibull_field", "name": "w",
                               "x_points": {"grid_1d": {"n": 3}}, "horizon": 8,
                               "K": 1.0, "q": 2.0}, default_seed=5)
        assert m.seed == 5 and m.npoints == 3
        m2 = model_from_config({"kind": "bounded_sign", "x_points": [[0.0], [1.0]],
                                "horizon": 4, "seed": 9})
        assert m2.coords == ((0.0,), (1.0,))

    def test_threads_env_fallback(self, monkeypatch):
        from uclt.simulate import resolve_threads
        monkeypatch.delenv("UCLT_THREADS", raising=False)
        assert resolve_threads(None) == 1
        monkeypatch.setenv("UCLT_THREADS", "6")
        assert resolve_threads(None) == 6
        assert resolve_threads(2) == 2  # explicit flag wins
        m = white_gaussian()
        a = simulate_eta(m, 8, 2000)
        monkeypatch.setenv("UCLT_THREADS", "4")
        b = simulate_eta(m, 8, 2000)
        assert (a == b).all()

    def test_report_json_deterministic(self):
        rows = osekowski_check(white_gaussian(), [2.0], [8], 2000, threads=1)
        rows4 = osekowski_check(white_gaussian(), [2.0], [8], 2000, threads=4)
        a = SimulationReport("wg", 42, 2000, "osekowski", rows).to_json()
        b = SimulationReport("wg", 42, 2000, "osekowski", rows4).to_json()
        assert a == b
