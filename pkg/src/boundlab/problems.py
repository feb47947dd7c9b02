"""Stochastic linear-loss problems and regret bookkeeping.

The central object is the rare-large-slope problem on [-1, 1] (the classic
construction on which unbounded adaptive methods drift away from the
optimum): losses are chosen i.i.d. as

    f_t(x) = C * x   with probability p = (1 + delta) / (C + 1)
    f_t(x) = -x      otherwise

so the expected loss is delta * x, the minimizer is x* = -1, and any iterate
at x has expected suboptimality delta * (x + 1). Gradients square to either
1 or C^2, which sandwiches the second-moment accumulator into
[1 - beta2^t, C^2 (1 - beta2^t)] and is what makes step-shaped rate
envelopes invisible to the clip.

A second, synthetic family (BoxLinearProblem) draws each slope coordinate
uniformly from an interval with positive mean, giving a multi-dimensional
linear-loss stream with known comparator x* = -1; it exists purely to
exercise the regret machinery in d > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import FeasibleBox, symmetric_box


@dataclass(frozen=True)
class LossSample:
    """One drawn linear loss f_t(x) = <slope, x>; the gradient is `slope`
    everywhere."""

    slope: np.ndarray

    def value(self, x: np.ndarray) -> float:
        # Sequential accumulation; the compiled trial runner sums in the
        # same order, keeping paired bookkeeping bit-identical.
        total = 0.0
        for s, xi in zip(self.slope, x):
            total += float(s) * float(xi)
        return total

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.slope, dtype=np.float64)


@dataclass(frozen=True)
class ReddiProblem:
    """Rare-large-slope stream over [-1, 1] with minimizer x* = -1."""

    C: float
    delta: float = 1.0
    x1: float = 0.0

    def __post_init__(self):
        if not self.C > 1.0:
            raise ValueError(f"C must exceed 1, got {self.C}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.C < self.delta:
            raise ValueError(
                f"need C >= delta for a valid slope probability, got C={self.C}, delta={self.delta}"
            )
        if not 0.0 <= self.x1 <= 1.0:
            raise ValueError(f"x1 must start in [0, 1], got {self.x1}")

    @property
    def d(self) -> int:
        return 1

    @property
    def p(self) -> float:
        """Probability of the large slope C."""
        return (1.0 + self.delta) / (self.C + 1.0)

    @property
    def box(self) -> FeasibleBox:
        return symmetric_box(1)

    @property
    def x_star(self) -> np.ndarray:
        return np.array([-1.0])

    @property
    def initial_x(self) -> np.ndarray:
        return np.array([self.x1])

    @property
    def G2(self) -> float:
        """Bound on the gradient norm: |slope| <= C."""
        return self.C

    @property
    def D_inf(self) -> float:
        return 2.0

    @property
    def draws_per_step(self) -> int:
        return 1

    def sample(self, u: float) -> LossSample:
        """Map one uniform in [0, 1) to a loss draw."""
        slope = self.C if u < self.p else -1.0
        return LossSample(np.array([slope]))

    def slopes_from_uniforms(self, u: np.ndarray) -> np.ndarray:
        """Vectorized sample(): (n, 1) uniforms to (n, 1) slopes."""
        return np.where(u < self.p, self.C, -1.0)

    def expected_suboptimality(self, x) -> float:
        """E[f(x)] - f(x*) = delta * (x + 1); nonnegative on the box."""
        x0 = float(np.asarray(x).reshape(-1)[0])
        return self.delta * (x0 + 1.0)


@dataclass(frozen=True)
class BoxLinearProblem:
    """Synthetic d-dimensional linear losses with uniform slopes.

    Each slope coordinate is drawn uniformly from [slope_lo, slope_hi] with
    nonnegative mean, so x* = (-1, ..., -1) minimizes the expected loss over
    the [-1, 1]^d box (uniquely when the mean is positive). A degenerate
    interval (slope_lo == slope_hi) gives a deterministic gradient stream.
    Not derived from any construction above; plumbing for multi-dimensional
    regret checks.
    """

    d: int = 4
    slope_lo: float = -0.5
    slope_hi: float = 1.5

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.slope_hi < self.slope_lo:
            raise ValueError("slope interval must satisfy slope_lo <= slope_hi")
        if (self.slope_lo + self.slope_hi) / 2.0 < 0:
            raise ValueError("mean slope must be >= 0 so x* = -1 minimizes the expected loss")

    @property
    def box(self) -> FeasibleBox:
        return symmetric_box(self.d)

    @property
    def x_star(self) -> np.ndarray:
        return np.full(self.d, -1.0)

    @property
    def initial_x(self) -> np.ndarray:
        return np.zeros(self.d)

    @property
    def G2(self) -> float:
        """max ||slope||_2 = sqrt(d) * max(|slope_lo|, |slope_hi|)."""
        return math.sqrt(self.d) * max(abs(self.slope_lo), abs(self.slope_hi))

    @property
    def D_inf(self) -> float:
        return 2.0

    @property
    def draws_per_step(self) -> int:
        return self.d

    def sample(self, u: np.ndarray) -> LossSample:
        u = np.asarray(u, dtype=np.float64).reshape(self.d)
        return LossSample(self.slope_lo + u * (self.slope_hi - self.slope_lo))

    def slopes_from_uniforms(self, u: np.ndarray) -> np.ndarray:
        return self.slope_lo + u * (self.slope_hi - self.slope_lo)

    def expected_suboptimality(self, x) -> float:
        mean_slope = (self.slope_lo + self.slope_hi) / 2.0
        x = np.asarray(x, dtype=np.float64).reshape(self.d)
        return float(mean_slope * np.sum(x + 1.0))


def sample_loss(problem, u) -> LossSample:
    """Draw one loss from `problem` using the uniform(s) `u`."""
    return problem.sample(u)


def expected_suboptimality(problem, x) -> float:
    return problem.expected_suboptimality(x)


@dataclass
class RegretLedger:
    """Running regret and the inverse-rate statistics the theoretical bounds
    consume.

    regret accumulates f_t(x_t) - f_t(x*); sum_beta1t_eta_inv accumulates
    beta1_t / eta_{t,i} per coordinate; eta1_inv snapshots 1/eta_{1,i}; and
    last_etahat_inv holds 1/etahat at the most recent step (the final-step
    value feeds the refuted bound's leading term).
    """

    steps: int = 0
    regret: float = 0.0
    sum_beta1t_eta_inv: np.ndarray | None = None
    eta1_inv: np.ndarray | None = None
    last_etahat_inv: np.ndarray | None = None

    def update(self, sample: LossSample, x_t: np.ndarray, x_star: np.ndarray,
               eta_t_inv: np.ndarray, beta1t: float) -> "RegretLedger":
        eta_t_inv = np.asarray(eta_t_inv, dtype=np.float64)
        if self.sum_beta1t_eta_inv is None:
            self.sum_beta1t_eta_inv = np.zeros_like(eta_t_inv)
        self.regret += sample.value(x_t) - sample.value(x_star)
        self.sum_beta1t_eta_inv = self.sum_beta1t_eta_inv + beta1t * eta_t_inv
        t = self.steps + 1
        if t == 1:
            self.eta1_inv = eta_t_inv.copy()
        self.last_etahat_inv = eta_t_inv / math.sqrt(t)
        self.steps = t
        return self


def ledger_update(ledger: RegretLedger, sample: LossSample, x_t, x_star,
                  eta_t_inv, beta1t: float) -> RegretLedger:
    """Fold one step into the ledger (mutates and returns it)."""
    return ledger.update(sample, x_t, x_star, eta_t_inv, beta1t)
