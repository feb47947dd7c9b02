"""Closed-form regret expressions: the refuted guarantee, the corrected
drift-based guarantee, and the contradiction arithmetic.

Two theoretical regret bounds are evaluated against realized runs:

claimed_regret_bound
    The original O(sqrt(T)) guarantee published for the bounded adaptive
    method. It is provably too strong: on the rare-large-slope stream with a
    suitable horizon its time average drops below 1/100 while the per-step
    expected suboptimality stays >= 1. We compute it in order to exhibit
    that contradiction, not to certify runs.

drift_regret_bound
    The corrected guarantee, which replaces monotonicity/limit assumptions
    on the envelopes by a cap M on the drift term
    t/lower(t) - (t-1)/upper(t-1). It does hold, and the harness checks
    realized regret against it.

closed_form_regret_bound
    The fully explicit 5*sqrt(T)/(1-beta1) * (1 + 1/gamma) * (d*D^2 + G^2)
    form obtained from the drift bound for the gamma envelope family under
    the beta1/t momentum schedule.

All inverse-rate statistics are taken from the realized run (the bounds are
statements about the realized sequences), bundled in BoundInputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundInputs:
    """Realized-run statistics feeding the closed-form bounds.

    eta1_inv, sum_beta1t_eta_inv and etahat_T_inv are per-coordinate vectors
    straight out of the regret ledger: 1/eta at step 1, the accumulated
    beta1_t/eta_t, and 1/etahat at the final step.
    """

    T: int
    d: int
    D_inf: float
    G2: float
    R_inf: float
    beta1: float
    M: float = math.nan
    eta1_inv: np.ndarray | None = None
    sum_beta1t_eta_inv: np.ndarray | None = None
    etahat_T_inv: np.ndarray | None = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError(f"horizon must be >= 1, got {self.T}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        for name in ("D_inf", "G2", "R_inf"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.beta1 < 1.0:
            raise ValueError(f"beta1 must lie in [0, 1), got {self.beta1}")


def claimed_regret_bound(inputs: BoundInputs) -> float:
    """The refuted guarantee:

        D^2 sqrt(T)/(2(1-b1)) * sum_i 1/etahat_{T,i}
      + D^2/(2(1-b1)) * sum_t sum_i beta1_t/eta_{t,i}
      + (2 sqrt(T) - 1) * R G^2/(1-b1)
    """
    if inputs.etahat_T_inv is None or inputs.sum_beta1t_eta_inv is None:
        raise ValueError("claimed_regret_bound needs etahat_T_inv and sum_beta1t_eta_inv")
    sqrt_T = math.sqrt(inputs.T)
    lead = inputs.D_inf**2 * sqrt_T / (2.0 * (1.0 - inputs.beta1))
    mid = inputs.D_inf**2 / (2.0 * (1.0 - inputs.beta1))
    tail = (2.0 * sqrt_T - 1.0) * inputs.R_inf * inputs.G2**2 / (1.0 - inputs.beta1)
    return (lead * float(np.sum(inputs.etahat_T_inv))
            + mid * float(np.sum(inputs.sum_beta1t_eta_inv))
            + tail)


def drift_regret_bound(inputs: BoundInputs) -> float:
    """The corrected guarantee:

        D^2/(2(1-b1)) * [ 2 d M (sqrt(T) - 1)
                          + sum_i (1/eta_{1,i} + sum_t beta1_t/eta_{t,i}) ]
      + (2 sqrt(T) - 1) * R G^2/(1-b1)
    """
    if inputs.eta1_inv is None or inputs.sum_beta1t_eta_inv is None:
        raise ValueError("drift_regret_bound needs eta1_inv and sum_beta1t_eta_inv")
    if math.isnan(inputs.M):
        raise ValueError("drift_regret_bound needs the drift cap M")
    sqrt_T = math.sqrt(inputs.T)
    bracket = (2.0 * inputs.d * inputs.M * (sqrt_T - 1.0)
               + float(np.sum(inputs.eta1_inv))
               + float(np.sum(inputs.sum_beta1t_eta_inv)))
    head = inputs.D_inf**2 / (2.0 * (1.0 - inputs.beta1)) * bracket
    tail = (2.0 * sqrt_T - 1.0) * inputs.R_inf * inputs.G2**2 / (1.0 - inputs.beta1)
    return head + tail


def closed_form_regret_bound(T: int, beta1: float, gamma: float, d: int,
                             D_inf: float, G2: float) -> float:
    """5 sqrt(T)/(1-b1) * (1 + 1/gamma) * (d D^2 + G^2): the explicit form of
    the drift bound for gamma envelopes with the beta1/t momentum schedule."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not 0.0 <= beta1 < 1.0:
        raise ValueError(f"beta1 must lie in [0, 1), got {beta1}")
    return (5.0 * math.sqrt(T) / (1.0 - beta1)
            * (1.0 + 1.0 / gamma)
            * (d * D_inf**2 + G2**2))


def counterexample_claimed_bound(K: int, d: int, C: float, alpha: float,
                                 beta2: float) -> float:
    """The refuted guarantee specialized to the rare-large-slope stream with
    step envelopes and zero momentum:

        2 d C sqrt(K) / alpha + (2 sqrt(K) - 1) * alpha C^2 / sqrt(1 - beta2)

    obtained by plugging D = 2, G = C, R = alpha/sqrt(1-beta2) and the cap
    1/etahat_{K,i} <= C/alpha into claimed_regret_bound.
    """
    if not 0.0 <= beta2 < 1.0:
        raise ValueError(f"beta2 must lie in [0, 1), got {beta2}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    sqrt_K = math.sqrt(K)
    return (2.0 * d * C * sqrt_K / alpha
            + (2.0 * sqrt_K - 1.0) * alpha * C**2 / math.sqrt(1.0 - beta2))


def find_contradiction_horizon(d: int, C: float, alpha: float,
                               beta2: float) -> int:
    """Smallest perfect-square horizon K = s^2 (s integer) with

        counterexample_claimed_bound(K) < K / 100.

    The bound is affine in s = sqrt(K), so the threshold is the larger root
    of s^2 - 100(A + 2B)s + 100B with A = 2dC/alpha and
    B = alpha C^2/sqrt(1-beta2); the root is then refined by direct checks,
    making the search exact and O(1). Such K always exists because the bound
    is O(sqrt(K)).
    """

    def satisfied(s: int) -> bool:
        K = s * s
        return counterexample_claimed_bound(K, d, C, alpha, beta2) < K / 100.0

    A = 2.0 * d * C / alpha
    B = alpha * C**2 / math.sqrt(1.0 - beta2)
    half = 50.0 * (A + 2.0 * B)
    disc = half * half - 100.0 * B
    s = max(1, math.ceil(half + math.sqrt(max(disc, 0.0))))
    while not satisfied(s):  # float slack in the root estimate
        s += 1
    while s > 1 and satisfied(s - 1):
        s -= 1
    return s * s
