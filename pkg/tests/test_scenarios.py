import json
import math

import numpy as np
import pytest
from scipy import integrate, stats

from almostsd.empirical import OrderKind
from almostsd.errors import ParameterError
from almostsd.scenarios import (GB2, Composite, LogNormal, Normal, Piece, ScenarioSpec,
                                builtin_scenarios, distribution_from_dict, gb2_unit_mean_scale,
                                get_scenario, oracle_index, oracle_mvr, power_curve, sample_from,
                                scenario4_substitute, scenario_oracle, simulate_pair)

# Reference MVRs from an earlier stand-alone quadrature script (scipy.stats
# frozen distributions, fixed-point log grid); independent of this package.
INDEPENDENT = {"1": 0.1272899, "2": 0.0361597, "3": 0.0631505}
REFERENCE = {"1": 0.127290, "2": 0.036160, "3": 0.063151}
SUBSTITUTE_MVR = 0.020663800867144255


def gb2_mean_by_quadrature(d: GB2) -> float:
    """E X = int_0^inf P(X > x) dx with P(X > x) from scipy's beta-prime law of (X/b)^a."""
    y = stats.betaprime(d.p, d.q)
    sf = lambda u: math.exp(u) * y.sf(math.exp(d.a * (u - math.log(d.b))))
    # below x = b e^-40 the integrand is ~x, so the omitted piece is < 1e-17
    lo, hi = math.log(d.b) - 40.0, math.log(d.b) + 400.0 / (d.a * d.q)
    pts = np.linspace(lo, hi, 200)
    return math.fsum(integrate.quad(sf, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
                     for a, b in zip(pts[:-1], pts[1:]))


class TestSampling:
    def test_degenerate_lognormal(self, rng):
        x = sample_from(LogNormal(0.0, 1e-8), 1000, rng).sorted_values
        np.testing.assert_allclose(x, 1.0, atol=1e-6)

    def test_gb2_unit_mean(self):
        rng = np.random.default_rng(1)
        d = get_scenario("3").pop1
        assert d.sample(1_000_000, rng).mean() == pytest.approx(1.0, abs=0.01)

    def test_lognormal_mean(self):
        rng = np.random.default_rng(2)
        assert LogNormal(2.0, 1.0).sample(1_000_000, rng).mean() == pytest.approx(math.exp(2.5), abs=0.15)

    def test_deterministic(self):
        a = LogNormal(1.0, 1.0).sample(10, np.random.default_rng(5))
        b = LogNormal(1.0, 1.0).sample(10, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_invalid_size(self, rng):
        with pytest.raises(ParameterError):
            sample_from(LogNormal(0, 1), 0, rng)

    def test_gb2_sampler_matches_cdf(self):
        d = get_scenario("3").pop2
        x = d.sample(20_000, np.random.default_rng(3))
        assert stats.kstest(x, np.vectorize(d.cdf)).pvalue > 0.001

    def test_composite_sampler_matches_cdf(self):
        d = scenario4_substitute()
        x = d.sample(20_000, np.random.default_rng(4))
        assert stats.kstest(x, np.vectorize(d.cdf)).pvalue > 0.001


class TestDistributions:
    def test_gb2_cdf_against_scipy(self):
        d = GB2(2.0, 1.3, 0.8, 1.5)
        for x in (0.01, 0.5, 1.3, 4.0, 30.0):
            assert d.cdf(x) == pytest.approx(stats.betaprime(0.8, 1.5).cdf((x / 1.3) ** 2.0), rel=1e-12)

    def test_gb2_ppf_inverts_cdf(self):
        d = get_scenario("3").pop2
        for u in (1e-6, 0.3, 0.9, 0.999999):
            assert d.cdf(d.ppf(u)) == pytest.approx(u, rel=1e-9)

    def test_lognormal_against_scipy(self):
        d = LogNormal(1.0, 1.5)
        ref = stats.lognorm(s=1.5, scale=math.e)
        for x in (0.1, 2.0, 50.0):
            assert d.cdf(x) == pytest.approx(ref.cdf(x), rel=1e-12)
            assert d.partial_moment(x) == pytest.approx(
                integrate.quad(lambda t: t * ref.pdf(t), 0, x, epsabs=1e-13)[0], rel=1e-8)

    def test_normal_partial_moment(self):
        d = Normal(0.5, 2.0)
        ref = stats.norm(0.5, 2.0)
        assert d.partial_moment(1.0) == pytest.approx(
            integrate.quad(lambda t: t * ref.pdf(t), -40, 1.0, epsabs=1e-13)[0], rel=1e-9)

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            LogNormal(0.0, 0.0)
        with pytest.raises(ParameterError, match="infinite mean"):
            GB2(2.0, 1.0, 1.0, 0.4)

    def test_composite_weights(self):
        with pytest.raises(ParameterError):
            Composite((Piece(0.0, 1.0, 0.3, LogNormal(0, 1)), Piece(1.0, math.inf, 0.3, LogNormal(0, 1))))

    def test_composite_mean(self):
        d = scenario4_substitute()
        ref = integrate.quad(lambda x: 1.0 - d.cdf(x), 0, 1) [0] + integrate.quad(
            lambda x: d.sf(x), 1, math.inf, limit=400)[0]
        assert d.mean == pytest.approx(ref, rel=1e-7)

    def test_dict_round_trip(self):
        for sc in builtin_scenarios().values():
            for d in (sc.pop1, sc.pop2):
                assert distribution_from_dict(d.to_dict()) == d


class TestUnitMeanScale:
    def test_concentrates_near_b(self):
        assert gb2_unit_mean_scale(50.0, 1.0, 1.0) == pytest.approx(1.0, rel=0.05)

    @pytest.mark.parametrize("a,p,q", [(2.0, 0.8, 1.5), (9.0, 0.1, 7.0)])
    def test_mean_one_by_quadrature(self, a, p, q):
        d = GB2.unit_mean(a, p, q)
        assert gb2_mean_by_quadrature(d) == pytest.approx(1.0, abs=1e-10)

    def test_infinite_mean(self):
        with pytest.raises(ParameterError, match="infinite mean"):
            gb2_unit_mean_scale(2.0, 1.0, 0.5)


class TestOracle:
    def test_degenerate(self):
        r = oracle_index(LogNormal(1, 1), LogNormal(1, 1), "first")
        assert r.degenerate and r.abs == 0.0

    @pytest.mark.parametrize("key", ["1", "2", "3"])
    def test_published_values(self, key):
        eps = scenario_oracle(get_scenario(key)).epsilon0
        assert eps == pytest.approx(REFERENCE[key], abs=1e-4)
        assert eps == pytest.approx(INDEPENDENT[key], abs=5e-7)

    @pytest.mark.parametrize("key", ["1", "2", "3"])
    def test_direction_selection(self, key):
        sc = get_scenario(key)
        a, b = sc.oriented()
        assert abs(oracle_mvr(b, a, sc.order) - REFERENCE[key]) > 0.5

    @pytest.mark.parametrize("key", ["1", "2", "3", "4sub"])
    def test_reversal_identity(self, key):
        sc = get_scenario(key)
        a, b = sc.oriented()
        assert oracle_mvr(a, b, sc.order) + oracle_mvr(b, a, sc.order) == pytest.approx(1.0, abs=1e-6)

    def test_first_order_signed_is_mean_gap(self):
        d1, d2 = LogNormal(2.0, 1.0), LogNormal(1.0, 1.5)
        r = oracle_index(d1, d2, "first")
        assert r.signed == pytest.approx(d2.mean - d1.mean, abs=1e-8)

    def test_substitute_regression(self):
        r = scenario_oracle(get_scenario("4sub"))
        assert r.epsilon0 == pytest.approx(SUBSTITUTE_MVR, abs=1e-9)
        assert len(r.crossings) == 1

    def test_substitute_contact_set(self):
        sc = get_scenario("4sub")
        for x in np.linspace(1e-6, 1.0, 2001):
            assert sc.pop1.cdf(x) == pytest.approx(sc.pop2.cdf(x), abs=1e-15)
        assert sc.pop1.cdf(2.0) != pytest.approx(sc.pop2.cdf(2.0), abs=1e-6)

    def test_equal_means_second_equals_stop_loss(self):
        d1 = LogNormal(1.0, 1.0)
        d2 = LogNormal(1.0 + 0.5 - 0.5 * 1.2 ** 2, 1.2)
        s = oracle_index(d1, d2, "second")
        t = oracle_index(d1, d2, "stop_loss")
        assert s.epsilon0 == pytest.approx(t.epsilon0, abs=1e-6)

    def test_lorenz_against_gini_identity(self):
        # signed Lorenz component equals (G2 - G1) / 2; lognormal Gini is 2 Phi(sigma/sqrt 2) - 1
        d1, d2 = LogNormal(0.0, 0.5), LogNormal(0.0, 1.0)
        g = lambda s: 2 * stats.norm.cdf(s / math.sqrt(2)) - 1
        r = oracle_index(d1, d2, "lorenz")
        assert r.signed == pytest.approx((g(1.0) - g(0.5)) / 2, abs=1e-8)
        assert r.epsilon0 == pytest.approx(0.0, abs=1e-9)


class TestScenarioIO:
    def test_file_round_trip(self, tmp_path):
        sc = get_scenario("3")
        path = tmp_path / "s.json"
        path.write_text(json.dumps(sc.to_dict()))
        loaded = get_scenario(str(path))
        assert loaded.pop1 == sc.pop1 and loaded.order is OrderKind.LORENZ and loaded.direction == "21"

    def test_unknown(self):
        with pytest.raises(ParameterError):
            get_scenario("nope")

    def test_simulate_pair_deterministic(self):
        sc = get_scenario("2")
        a1, b1 = simulate_pair(sc, 50, 3, 7)
        a2, b2 = simulate_pair(sc, 50, 3, 7)
        np.testing.assert_array_equal(a1.support, a2.support)
        assert not np.array_equal(a1.support, simulate_pair(sc, 50, 3, 8)[0].support)


class TestPowerCurve:
    def test_epsilon_above_half(self):
        pc = power_curve(get_scenario("2"), 300, 5, 50, 0.05, [0.6, 0.9], seed=1)
        np.testing.assert_array_equal(pc.rejection_rate, [1.0, 1.0])

    def test_rates_in_unit_interval_and_rows(self):
        pc = power_curve(get_scenario("4sub"), 200, 4, 30, 0.05, [0.0, 0.1, 0.3], method="case2", c=0.01)
        assert np.all((pc.rejection_rate >= 0) & (pc.rejection_rate <= 1))
        assert [r["epsilon"] for r in pc.to_rows()] == [0.0, 0.1, 0.3]

    def test_case2_needs_c(self):
        with pytest.raises(ParameterError):
            power_curve(get_scenario("4sub"), 100, 2, 10, method="case2")

    def test_worker_invariance(self):
        sc = get_scenario("2")
        a = power_curve(sc, 300, 6, 40, 0.05, [0.02, 0.05, 0.1], seed=4, workers=1)
        b = power_curve(sc, 300, 6, 40, 0.05, [0.02, 0.05, 0.1], seed=4, workers=3)
        np.testing.assert_array_equal(a.rejection_rate, b.rejection_rate)
        np.testing.assert_array_equal(a.epsilon_hat0, b.epsilon_hat0)

    @pytest.mark.slow
    def test_power_grows_with_n(self):
        sc = get_scenario("1")
        small = power_curve(sc, 1000, 60, 200, 0.05, [0.15], seed=31, workers="auto")
        large = power_curve(sc, 20_000, 60, 200, 0.05, [0.15], seed=31, workers="auto")
        assert large.rejection_rate[0] >= small.rejection_rate[0]
