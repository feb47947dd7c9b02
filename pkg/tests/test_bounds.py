import math
from fractions import Fraction

import numpy as np
import pytest

from boundlab import bounds as bd


def exact_gamma_drift_term(gamma: Fraction, t: int) -> Fraction:
    """Independent rational-arithmetic oracle for the drift term."""
    lower = 1 - 1 / (gamma * t + 1)
    if t == 1:
        return 1 / lower
    upper_prev = 1 + 1 / (gamma * (t - 1))
    return t / lower - (t - 1) / upper_prev


class TestGammaBounds:
    def test_eval_at_one(self):
        assert bd.eval_bounds(bd.GammaBounds(1.0), 1) == (0.5, 2.0)

    def test_monotone_and_converging(self):
        spec = bd.GammaBounds(0.05)
        ts = np.arange(1, 1_000_001, dtype=np.float64)
        lo = spec.lower(ts)
        hi = spec.upper(ts)
        assert np.all(np.diff(lo) >= 0)
        assert np.all(np.diff(hi) <= 0)
        assert np.all(lo > 0)
        assert np.all(lo <= hi)
        # both envelopes approach the common limit 1 at rate O(1/(gamma*t))
        assert np.all(np.abs(lo - 1.0) < 10.0 / (0.05 * ts))
        assert np.all(np.abs(hi - 1.0) < 10.0 / (0.05 * ts))

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            bd.GammaBounds(0.0)
        with pytest.raises(ValueError):
            bd.GammaBounds(-1.0)


class TestStepBounds:
    def test_inside_window(self):
        spec = bd.StepBounds(K=100, alpha=0.1, beta2=0.99, C=2.0)
        lo, hi = bd.eval_bounds(spec, 50)
        assert lo == pytest.approx(0.05, abs=0.0)
        assert hi == pytest.approx(1.0, rel=1e-12)

    def test_collapse_after_window(self):
        spec = bd.StepBounds(K=100, alpha=0.1, beta2=0.99, C=2.0)
        lo, hi = bd.eval_bounds(spec, 101)
        assert lo == hi == pytest.approx(0.05, abs=0.0)

    def test_hypotheses_scan(self):
        # lower positive non-decreasing, upper non-increasing, limits equal
        spec = bd.StepBounds(K=500, alpha=0.1, beta2=0.99, C=2.0)
        ts = np.arange(1, 1001, dtype=np.float64)
        lo = spec.lower(ts)
        hi = spec.upper(ts)
        assert np.all(lo > 0)
        assert np.all(np.diff(lo) >= 0)
        assert np.all(np.diff(hi) <= 0)
        assert np.all(lo <= hi)
        assert lo[-1] == hi[-1]

    def test_rejects_small_C(self):
        with pytest.raises(ValueError):
            bd.StepBounds(K=10, alpha=0.1, beta2=0.99, C=1.0)
        with pytest.raises(ValueError):
            bd.StepBounds(K=10, alpha=3.0, beta2=0.99, C=2.0)


class TestConstantBounds:
    def test_eval(self):
        spec = bd.ConstantBounds(0.1)
        assert bd.eval_bounds(spec, 1) == (0.1, 0.1)
        assert bd.eval_bounds(spec, 10**6) == (0.1, 0.1)

    def test_accessors(self):
        spec = bd.ConstantBounds(0.25)
        assert bd.l_inf(spec) == 0.25
        assert bd.r_inf(spec) == 0.25


def test_eval_rejects_bad_step():
    with pytest.raises(ValueError):
        bd.eval_bounds(bd.GammaBounds(1.0), 0)


def test_first_step_accessors():
    spec = bd.GammaBounds(1.0)
    assert bd.l_inf(spec) == 0.5
    assert bd.r_inf(spec) == 2.0


class TestDrift:
    def test_first_term_is_inverse_lower(self):
        assert bd.drift_max(bd.GammaBounds(1.0), 1) == 2.0
        assert bd.drift_term(bd.GammaBounds(1.0), 1) == 2.0

    def test_gamma_one_closed_form(self):
        # for gamma = 1 the term is (3t - 1)/t, increasing, so max sits at T
        spec = bd.GammaBounds(1.0)
        got = bd.drift_max(spec, 1000)
        assert got == pytest.approx(2.999, rel=1e-12)
        exact = exact_gamma_drift_term(Fraction(1), 1000)
        assert got == pytest.approx(float(exact), rel=1e-12)

    def test_against_rational_oracle(self):
        for gamma, t in [(Fraction(1, 10), 10**6), (Fraction(3, 7), 12345),
                         (Fraction(100), 17)]:
            spec = bd.GammaBounds(float(gamma))
            exact = float(exact_gamma_drift_term(gamma, t))
            assert bd.drift_term(spec, t) == pytest.approx(exact, rel=1e-9)

    def test_small_gamma_long_horizon(self):
        got = bd.drift_max(bd.GammaBounds(0.1), 10**6)
        assert 20.9 < got < 21.0  # limit is 1 + 2/gamma = 21, approached from below

    def test_chunked_scan_matches_single_scan(self):
        spec = bd.GammaBounds(0.3)
        assert bd.drift_max(spec, 5000, chunk=128) == bd.drift_max(spec, 5000)

    def test_constant_family_drift(self):
        # t/a - (t-1)/a = 1/a identically
        spec = bd.ConstantBounds(0.2)
        assert bd.drift_max(spec, 1000) == pytest.approx(5.0, rel=1e-12)

    def test_running_max_matches_pointwise(self):
        spec = bd.GammaBounds(0.5)
        cps = np.array([1, 2, 3, 10, 77, 1000])
        running = bd.drift_running_max(spec, cps)
        expected = [bd.drift_max(spec, int(t)) for t in cps]
        assert np.allclose(running, expected, rtol=1e-13)

    def test_running_max_rejects_unsorted(self):
        with pytest.raises(ValueError):
            bd.drift_running_max(bd.GammaBounds(1.0), np.array([3, 2]))


class TestGammaDriftBound:
    def test_values(self):
        assert bd.gamma_drift_bound(1.0) == 5.0
        assert bd.gamma_drift_bound(2.0) == 4.0
        assert bd.gamma_drift_bound(0.001) == 2003.0

    def test_certifies_drift(self):
        # light version; the acceptance suite scans to 10^6
        for gamma in (0.001, 0.01, 0.1, 1.0, 10.0, 100.0):
            assert bd.drift_max(bd.GammaBounds(gamma), 10_000) <= bd.gamma_drift_bound(gamma)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            bd.gamma_drift_bound(0.0)


class TestInactiveClipGamma:
    def test_reference_value(self):
        got = bd.inactive_clip_gamma(100, 0.1, 2.0, 0.99)
        assert got == pytest.approx(min(0.1 / 1.9, math.sqrt(0.01) / 0.1) / 100, rel=1e-12)
        assert got == pytest.approx(5.26316e-4, rel=1e-5)

    def test_tight_at_K(self):
        gamma = bd.inactive_clip_gamma(100, 0.1, 2.0, 0.99)
        spec = bd.GammaBounds(gamma)
        assert float(spec.lower(100)) == pytest.approx(0.05, rel=1e-9)

    def test_K_one_scaling(self):
        assert bd.inactive_clip_gamma(1, 0.1, 2.0, 0.99) == pytest.approx(0.0526316, rel=1e-5)

    def test_envelope_contains_rate_interval(self):
        # equality holds at t = K in real arithmetic, so allow 1-ulp wobble
        K, alpha, C, beta2 = 250, 0.1, 8.0, 0.95
        gamma = bd.inactive_clip_gamma(K, alpha, C, beta2)
        spec = bd.GammaBounds(gamma)
        ts = np.arange(1, K + 1, dtype=np.float64)
        assert np.all(spec.lower(ts) <= (alpha / C) * (1.0 + 1e-12))
        assert np.all(spec.upper(ts) >= alpha / math.sqrt(1.0 - beta2))

    def test_rejects_C_below_alpha(self):
        with pytest.raises(ValueError):
            bd.inactive_clip_gamma(10, 0.5, 0.4, 0.99)


def test_envelope_order_holds_everywhere():
    ts = np.arange(1, 1_000_001, dtype=np.float64)
    for spec in (bd.GammaBounds(0.01), bd.StepBounds(K=10**5, alpha=0.1, beta2=0.999, C=4.0),
                 bd.ConstantBounds(0.1)):
        lo = np.broadcast_to(spec.lower(ts), ts.shape)
        hi = np.broadcast_to(spec.upper(ts), ts.shape)
        assert np.all(lo > 0)
        assert np.all(lo <= hi)


def test_serialization_round_trip():
    specs = [bd.GammaBounds(0.25), bd.StepBounds(K=10, alpha=0.1, beta2=0.9, C=3.0),
             bd.ConstantBounds(0.7)]
    for spec in specs:
        assert bd.spec_from_dict(bd.spec_to_dict(spec)) == spec
    with pytest.raises(ValueError):
        bd.spec_from_dict({"family": "nope"})
