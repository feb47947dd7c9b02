import numpy as np
import pytest

from boundlab import rng
from boundlab.problems import (BoxLinearProblem, LossSample, ReddiProblem,
                               RegretLedger, expected_suboptimality,
                               ledger_update, sample_loss)


class TestReddiProblem:
    def test_slope_probability(self):
        assert ReddiProblem(C=3.0, delta=1.0).p == 0.5
        assert ReddiProblem(C=2.0, delta=1.0).p == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_sampling_branches(self):
        prob = ReddiProblem(C=3.0, delta=1.0)
        assert sample_loss(prob, 0.25).slope[0] == 3.0
        assert sample_loss(prob, 0.75).slope[0] == -1.0
        assert sample_loss(prob, 0.5).slope[0] == -1.0  # p = 0.5, strict u < p

    def test_vectorized_sampling_matches_scalar(self):
        prob = ReddiProblem(C=5.0, delta=0.5)
        key = rng.trial_key(3, 1)
        u = rng.uniforms(key, 0, 500).reshape(-1, 1)
        vec = prob.slopes_from_uniforms(u)
        scal = np.array([prob.sample(float(ui)).slope for ui in u[:, 0]])
        assert np.array_equal(vec, scal)

    def test_expected_suboptimality(self):
        assert ReddiProblem(C=3.0, delta=1.0).expected_suboptimality(0.0) == 1.0
        assert ReddiProblem(C=3.0, delta=0.7).expected_suboptimality(-1.0) == 0.0
        assert ReddiProblem(C=3.0, delta=0.5).expected_suboptimality(1.0) == 1.0

    def test_suboptimality_nonnegative_and_zero_only_at_optimum(self):
        prob = ReddiProblem(C=2.0, delta=1.0)
        for x in np.linspace(-1, 1, 41):
            s = prob.expected_suboptimality(x)
            assert s >= 0.0
            assert (s == 0.0) == (x == -1.0)

    def test_mean_slope_estimates_delta(self):
        # E[slope] = p*C - (1-p) = delta; 4 standard errors at 10^6 draws
        prob = ReddiProblem(C=6.0, delta=1.5)
        u = rng.uniforms(rng.trial_key(0, 0), 0, 1_000_000).reshape(-1, 1)
        slopes = prob.slopes_from_uniforms(u)[:, 0]
        se = slopes.std(ddof=1) / np.sqrt(len(slopes))
        assert abs(slopes.mean() - prob.delta) < 4 * se

    def test_gradient_bound(self):
        prob = ReddiProblem(C=4.0, delta=1.0)
        u = rng.uniforms(rng.trial_key(1, 0), 0, 10_000).reshape(-1, 1)
        slopes = prob.slopes_from_uniforms(u)
        assert np.all(np.abs(slopes) <= prob.G2)

    def test_geometry(self):
        prob = ReddiProblem(C=2.0)
        assert prob.d == 1
        assert prob.D_inf == 2.0
        assert prob.x_star.tolist() == [-1.0]
        assert prob.initial_x.tolist() == [0.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            ReddiProblem(C=1.0)           # needs C > 1
        with pytest.raises(ValueError):
            ReddiProblem(C=2.0, delta=3.0)  # p would exceed 1
        with pytest.raises(ValueError):
            ReddiProblem(C=2.0, x1=-0.5)  # construction needs x1 >= 0


class TestBoxLinearProblem:
    def test_slopes_in_interval(self):
        prob = BoxLinearProblem(d=3, slope_lo=-0.5, slope_hi=1.5)
        u = rng.uniforms(rng.trial_key(2, 0), 0, 3000).reshape(-1, 3)
        slopes = prob.slopes_from_uniforms(u)
        assert slopes.min() >= -0.5
        assert slopes.max() < 1.5
        assert np.all(np.linalg.norm(slopes, axis=1) <= prob.G2)

    def test_expected_suboptimality(self):
        prob = BoxLinearProblem(d=2, slope_lo=0.0, slope_hi=1.0)
        # mean slope 0.5; subopt = 0.5 * sum(x + 1)
        assert prob.expected_suboptimality(np.array([-1.0, -1.0])) == 0.0
        assert prob.expected_suboptimality(np.array([0.0, 1.0])) == pytest.approx(1.5)

    def test_degenerate_interval_allowed(self):
        prob = BoxLinearProblem(d=1, slope_lo=0.0, slope_hi=0.0)
        u = np.array([[0.3]])
        assert prob.slopes_from_uniforms(u)[0, 0] == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            BoxLinearProblem(d=0)
        with pytest.raises(ValueError):
            BoxLinearProblem(slope_lo=1.0, slope_hi=0.0)
        with pytest.raises(ValueError):
            BoxLinearProblem(slope_lo=-2.0, slope_hi=1.0)  # negative mean


class TestLossSample:
    def test_value_and_gradient(self):
        s = LossSample(np.array([2.0, -1.0]))
        x = np.array([0.5, 0.5])
        assert s.value(x) == 0.5
        assert np.array_equal(s.gradient(x), np.array([2.0, -1.0]))


class TestRegretLedger:
    def test_small_slope_step(self):
        led = RegretLedger()
        led.update(LossSample(np.array([-1.0])), np.array([0.0]),
                   np.array([-1.0]), np.array([1.0]), 0.0)
        assert led.regret == -1.0

    def test_large_slope_step(self):
        led = RegretLedger()
        ledger_update(led, LossSample(np.array([2.0])), np.array([0.0]),
                      np.array([-1.0]), np.array([1.0]), 0.0)
        assert led.regret == 2.0

    def test_empty_ledger(self):
        led = RegretLedger()
        assert led.regret == 0.0
        assert led.steps == 0

    def test_statistics_accumulate(self):
        led = RegretLedger()
        led.update(LossSample(np.array([1.0])), np.array([0.5]),
                   np.array([-1.0]), np.array([4.0]), 0.9)
        led.update(LossSample(np.array([1.0])), np.array([0.5]),
                   np.array([-1.0]), np.array([6.0]), 0.45)
        assert led.steps == 2
        assert led.eta1_inv.tolist() == [4.0]
        assert led.sum_beta1t_eta_inv[0] == pytest.approx(0.9 * 4.0 + 0.45 * 6.0)
        assert led.last_etahat_inv[0] == pytest.approx(6.0 / np.sqrt(2.0))

    def test_additivity_over_concatenation(self):
        # folding a stream through one ledger equals summing two half-ledgers
        gen = np.random.default_rng(4)
        samples = [LossSample(gen.normal(size=2)) for _ in range(50)]
        xs = [gen.uniform(-1, 1, size=2) for _ in range(50)]
        x_star = np.array([-1.0, -1.0])
        full = RegretLedger()
        first = RegretLedger()
        second = RegretLedger()
        for i in range(50):
            eta_inv = np.abs(gen.normal(size=2)) + 0.1
            full.update(samples[i], xs[i], x_star, eta_inv, 0.5)
            (first if i < 25 else second).update(samples[i], xs[i], x_star,
                                                 eta_inv, 0.5)
        assert full.regret == pytest.approx(first.regret + second.regret, rel=1e-12)
        assert np.allclose(full.sum_beta1t_eta_inv,
                           first.sum_beta1t_eta_inv + second.sum_beta1t_eta_inv)

    def test_module_level_alias(self):
        prob = ReddiProblem(C=2.0)
        assert expected_suboptimality(prob, 0.0) == 1.0
