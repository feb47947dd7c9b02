import math

import numpy as np
import pytest

from boundlab import analysis as an


def inputs(T=1, d=1, D_inf=2.0, G2=1.0, R_inf=2.0, beta1=0.0, M=math.nan,
           eta1_inv=None, sums=None, ehat=None):
    return an.BoundInputs(T=T, d=d, D_inf=D_inf, G2=G2, R_inf=R_inf,
                          beta1=beta1, M=M,
                          eta1_inv=None if eta1_inv is None else np.asarray(eta1_inv, float),
                          sum_beta1t_eta_inv=None if sums is None else np.asarray(sums, float),
                          etahat_T_inv=None if ehat is None else np.asarray(ehat, float))


class TestClaimedBound:
    def test_single_step_value(self):
        # (4*1/2)*(1/0.1) + 0 + 1*2*1 = 22
        got = an.claimed_regret_bound(inputs(ehat=[1.0 / 0.1], sums=[0.0]))
        assert got == pytest.approx(22.0, rel=1e-12)

    def test_diverges_as_momentum_approaches_one(self):
        lo = an.claimed_regret_bound(inputs(beta1=0.9, ehat=[10.0], sums=[0.0]))
        hi = an.claimed_regret_bound(inputs(beta1=0.999999, ehat=[10.0], sums=[0.0]))
        assert hi > lo
        assert hi > 1e6

    def test_requires_ledger_statistics(self):
        with pytest.raises(ValueError):
            an.claimed_regret_bound(inputs())


class TestDriftBound:
    def test_single_step_kills_drift_term(self):
        got = an.drift_regret_bound(inputs(M=123.0, eta1_inv=[10.0], sums=[0.0]))
        assert got == pytest.approx(22.0, rel=1e-12)

    def test_four_step_value(self):
        got = an.drift_regret_bound(inputs(T=4, M=5.0, R_inf=1.0,
                                           eta1_inv=[1.0], sums=[0.0]))
        # (4/2)*(2*1*5*(2-1) + 1) + 3*1*1 = 25
        assert got == pytest.approx(25.0, rel=1e-12)

    def test_diverges_as_momentum_approaches_one(self):
        hi = an.drift_regret_bound(inputs(beta1=0.999999, M=1.0,
                                          eta1_inv=[1.0], sums=[0.0]))
        assert hi > 1e6

    def test_needs_drift_cap(self):
        with pytest.raises(ValueError):
            an.drift_regret_bound(inputs(eta1_inv=[1.0], sums=[0.0]))

    def test_monotone_in_scale_parameters(self):
        base = dict(M=2.0, eta1_inv=[1.0], sums=[3.0])
        b0 = an.drift_regret_bound(inputs(T=100, **base))
        assert an.drift_regret_bound(inputs(T=400, **base)) >= b0
        assert an.drift_regret_bound(inputs(T=100, D_inf=4.0, **base)) >= b0
        assert an.drift_regret_bound(inputs(T=100, G2=3.0, **base)) >= b0
        assert (an.drift_regret_bound(inputs(T=100, eta1_inv=[1.0], sums=[3.0], M=9.0))
                >= b0)


class TestClosedFormBound:
    def test_reference_values(self):
        assert an.closed_form_regret_bound(10_000, 0.9, 1.0, 1, 2.0, 1.0) == pytest.approx(
            50_000.0, rel=1e-12)
        assert an.closed_form_regret_bound(1, 0.0, 1.0, 1, 1.0, 1.0) == pytest.approx(
            20.0, rel=1e-12)

    def test_large_gamma_limit(self):
        limit = 5.0 * math.sqrt(100.0) / 0.1 * (1 * 4.0 + 1.0)
        got = an.closed_form_regret_bound(100, 0.9, 1e12, 1, 2.0, 1.0)
        assert got == pytest.approx(limit, rel=1e-9)

    def test_monotone_in_horizon(self):
        a = an.closed_form_regret_bound(100, 0.5, 1.0, 2, 2.0, 3.0)
        b = an.closed_form_regret_bound(400, 0.5, 1.0, 2, 2.0, 3.0)
        assert b == pytest.approx(2 * a, rel=1e-12)  # scales as sqrt(T)

    def test_validation(self):
        with pytest.raises(ValueError):
            an.closed_form_regret_bound(10, 0.5, 0.0, 1, 1.0, 1.0)


class TestCounterexampleClaimedBound:
    def test_reference_point(self):
        K = 23_040_000  # sqrt(K) = 4800
        got = an.counterexample_claimed_bound(K, 1, 2.0, 0.1, 0.99)
        assert got == pytest.approx(230_396.0, rel=1e-9)
        assert got < K / 100.0

    def test_K_one_collapse(self):
        got = an.counterexample_claimed_bound(1, 1, 2.0, 0.1, 0.99)
        want = 2 * 2.0 / 0.1 + 0.1 * 4.0 / math.sqrt(0.01)
        assert got == pytest.approx(want, rel=1e-12)

    def test_mid_horizon(self):
        got = an.counterexample_claimed_bound(10**4, 1, 2.0, 0.1, 0.99)
        assert got == pytest.approx(4796.0, rel=1e-9)


class TestFindContradictionHorizon:
    def brute_force(self, d, C, alpha, beta2, s_max=10_000):
        for s in range(1, s_max):
            K = s * s
            if an.counterexample_claimed_bound(K, d, C, alpha, beta2) < K / 100.0:
                return K
        raise AssertionError("no horizon found in brute-force range")

    def test_reference_instance(self):
        K = an.find_contradiction_horizon(1, 2.0, 0.1, 0.99)
        assert K == 23_040_000
        assert K == self.brute_force(1, 2.0, 0.1, 0.99)

    def test_matches_brute_force_on_varied_inputs(self):
        for d, C, alpha, beta2 in [(1, 2.0, 0.5, 0.9), (2, 3.0, 1.0, 0.5),
                                   (4, 2.0, 0.1, 0.99), (1, 1.5, 2.0, 0.0)]:
            got = an.find_contradiction_horizon(d, C, alpha, beta2)
            assert got == self.brute_force(d, C, alpha, beta2, s_max=200_000)

    def test_postcondition_always_holds(self):
        for d, C, alpha, beta2 in [(1, 512.0, 0.1, 0.99), (3, 10.0, 0.01, 0.999)]:
            K = an.find_contradiction_horizon(d, C, alpha, beta2)
            assert an.counterexample_claimed_bound(K, d, C, alpha, beta2) < K / 100.0
            s = math.isqrt(K)
            assert s * s == K
            if s > 1:
                K_prev = (s - 1) ** 2
                assert not (an.counterexample_claimed_bound(K_prev, d, C, alpha, beta2)
                            < K_prev / 100.0)

    def test_dimension_scaling_direction(self):
        k1 = an.find_contradiction_horizon(1, 2.0, 0.1, 0.99)
        k4 = an.find_contradiction_horizon(4, 2.0, 0.1, 0.99)
        assert k4 > k1


class TestFamilyConsistency:
    def test_counterexample_bound_specializes_the_claimed_bound(self):
        # beta1 = 0, 1/etahat = C/alpha, R = alpha/sqrt(1-beta2), D = 2, G = C
        for d, C, alpha, beta2, K in [(1, 2.0, 0.1, 0.99, 10_000),
                                      (3, 7.0, 0.4, 0.9, 529)]:
            general = an.claimed_regret_bound(an.BoundInputs(
                T=K, d=d, D_inf=2.0, G2=C, R_inf=alpha / math.sqrt(1 - beta2),
                beta1=0.0,
                eta1_inv=np.zeros(d),
                sum_beta1t_eta_inv=np.zeros(d),
                etahat_T_inv=np.full(d, C / alpha),
            ))
            special = an.counterexample_claimed_bound(K, d, C, alpha, beta2)
            assert general == pytest.approx(special, rel=1e-12)


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        an.BoundInputs(T=0, d=1, D_inf=1.0, G2=1.0, R_inf=1.0, beta1=0.0)
    with pytest.raises(ValueError):
        an.BoundInputs(T=1, d=1, D_inf=0.0, G2=1.0, R_inf=1.0, beta1=0.0)
    with pytest.raises(ValueError):
        an.BoundInputs(T=1, d=1, D_inf=1.0, G2=1.0, R_inf=1.0, beta1=1.0)
