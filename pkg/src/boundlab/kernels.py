"""Pure single-step update kernels.

All kernels are value transformers: they never mutate their inputs and the
output is a deterministic function of the arguments, so they are safe to call
from any number of workers, each owning its own state record.

Update rule shared by the adaptive kernels (per-coordinate, step t):

    m_t = beta1t * m_{t-1} + (1 - beta1t) * g_t
    v_t = beta2  * v_{t-1} + (1 - beta2)  * g_t^2
    etahat_t = alpha / (sqrt(v_t) + eps)           # clipped for bounded variants
    eta_t    = etahat_t / sqrt(t)
    x_{t+1}  = project(x_t - eta_t * m_t)

The bounded variants pass etahat_t through an element-wise clip into
[lower(t), upper(t)]; the running-max variants substitute max_s<=t v_s for
v_t inside the rate. There is no first/second-moment bias correction in the
adaptive kernels; bias correction exists only as an option of the momentum
SGD kernel, where it divides the learning rate at step t by 1 - beta1^t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundFamily, eval_bounds

BETA1_CONST = "const"
BETA1_OVER_T = "over-t"


def _vector(a, name: str) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    if out.ndim == 0:
        out = out.reshape(1)
    if out.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {out.shape}")
    return out


@dataclass(frozen=True)
class HyperParams:
    """Optimizer hyperparameters.

    kappa is the momentum dampening of the SGD kernel: m_t = beta1 m_{t-1}
    + (1 - kappa) g_t. kappa = 0 is the classical heavy-ball accumulation,
    kappa = beta1 matches the adaptive kernels' momentum. bias_correction
    applies to the SGD kernel only. epsilon guards the adaptive denominator
    and defaults to 0: the bounded kernels are well defined without it
    (an infinite raw rate clips to the upper envelope), while the unbounded
    adaptive kernels reject a zero denominator.
    """

    alpha: float
    beta1: float = 0.9
    beta2: float = 0.999
    beta1_schedule: str = BETA1_CONST
    kappa: float = 0.0
    bias_correction: bool = False
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.beta1 < 1.0:
            raise ValueError(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not 0.0 <= self.beta2 < 1.0:
            raise ValueError(f"beta2 must lie in [0, 1), got {self.beta2}")
        if self.beta1 > 0.0 and (
            self.beta2 == 0.0 or self.beta1 / math.sqrt(self.beta2) >= 1.0
        ):
            raise ValueError(
                f"require beta1/sqrt(beta2) < 1, got beta1={self.beta1}, beta2={self.beta2}"
            )
        if self.beta1_schedule not in (BETA1_CONST, BETA1_OVER_T):
            raise ValueError(f"unknown beta1 schedule {self.beta1_schedule!r}")
        if not 0.0 <= self.kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {self.kappa}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")

    def beta1_at(self, t: int) -> float:
        """beta1 under the active schedule; beta1_at(t) <= beta1 for all t."""
        if self.beta1_schedule == BETA1_OVER_T:
            return self.beta1 / t
        return self.beta1


@dataclass(frozen=True)
class FeasibleBox:
    """Axis-aligned feasible region [lo_1, hi_1] x ... x [lo_d, hi_d]."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _vector(self.lo, "lo"))
        object.__setattr__(self, "hi", _vector(self.hi, "hi"))
        if self.lo.shape != self.hi.shape:
            raise ValueError("lo and hi must have the same dimension")
        if np.any(self.lo > self.hi):
            raise ValueError("box requires lo <= hi in every coordinate")

    @property
    def d(self) -> int:
        return self.lo.shape[0]

    @property
    def diameter_inf(self) -> float:
        return float(np.max(self.hi - self.lo))

    def contains(self, x: np.ndarray, slack: float = 0.0) -> bool:
        return bool(np.all(x >= self.lo - slack) and np.all(x <= self.hi + slack))


def symmetric_box(d: int, radius: float = 1.0) -> FeasibleBox:
    return FeasibleBox(np.full(d, -radius), np.full(d, radius))


@dataclass
class OptimizerState:
    """Per-run mutable record: iterate, moments, running max, step counter."""

    x: np.ndarray
    m: np.ndarray
    v: np.ndarray
    v_hat: np.ndarray
    t: int = 1

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            self.x.copy(), self.m.copy(), self.v.copy(), self.v_hat.copy(), self.t
        )


def initial_state(x0) -> OptimizerState:
    """Fresh state at step 1 with zero moments."""
    x = _vector(x0, "x0").copy()
    return OptimizerState(x=x, m=np.zeros_like(x), v=np.zeros_like(x),
                          v_hat=np.zeros_like(x), t=1)


def clip_elementwise(raw: np.ndarray, lower: float, upper: float) -> np.ndarray:
    """Element-wise max(min(raw, upper), lower).

    Components already inside [lower, upper] pass through unchanged; +inf
    components (a zero denominator with no epsilon guard) map to upper.
    """
    if lower > upper:
        raise ValueError(f"malformed clip range: lower {lower} > upper {upper}")
    return np.maximum(np.minimum(raw, upper), lower)


def project_box_weighted(x: np.ndarray, box: FeasibleBox,
                         weights: np.ndarray) -> np.ndarray:
    """Projection onto the box under the diagonal metric diag(weights).

    For a diagonal metric the squared distance separates per coordinate and
    each coordinate of the box is an independent interval, so the minimizer
    is the plain clamp regardless of the (positive) weights. The weights
    argument is kept so the call mirrors the update rule's notation.
    """
    x = _vector(x, "x")
    w = _vector(weights, "weights")
    if np.any(w <= 0):
        raise ValueError("projection weights must be strictly positive")
    return np.minimum(np.maximum(x, box.lo), box.hi)


def _raw_rate(v: np.ndarray, alpha: float, eps: float) -> np.ndarray:
    denom = np.sqrt(v) + eps
    with np.errstate(divide="ignore"):
        return alpha / denom


def _adaptive_rates(v: np.ndarray, hp: HyperParams, t: int,
                    bounds: BoundFamily | None) -> tuple[np.ndarray, np.ndarray]:
    """(etahat_t, eta_t) from the rate accumulator at step t."""
    raw = _raw_rate(v, hp.alpha, hp.epsilon)
    if bounds is None:
        if np.any(np.isinf(raw)):
            raise ZeroDivisionError(
                "zero second moment with epsilon = 0; set epsilon > 0 or use "
                "a bounded kernel (its clip absorbs the infinite rate)"
            )
        etahat = raw
    else:
        lo, hi = eval_bounds(bounds, t)
        etahat = clip_elementwise(raw, lo, hi)
    return etahat, etahat / math.sqrt(t)


def effective_rates(state: OptimizerState, hp: HyperParams,
                    bounds: BoundFamily | None = None,
                    use_max: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Recompute (etahat_t, eta_t) implied by a post-step state.

    The kernels return only the new state; the rates they used at step t are
    a pure function of (state_after.v or .v_hat, hp, bounds, t), so ledgers
    and tests can recover them exactly with this helper.
    """
    if state.t < 2:
        raise ValueError("effective_rates expects a post-step state (t >= 2)")
    v = state.v_hat if use_max else state.v
    return _adaptive_rates(v, hp, state.t - 1, bounds)


def sgdm_step(state: OptimizerState, g, lr_t: float, hp: HyperParams,
              box: FeasibleBox) -> OptimizerState:
    """Dampened momentum SGD step at explicit rate lr_t.

    m_t = beta1 m_{t-1} + (1 - kappa) g_t, then x moves by
    lr_t/(1 - beta1^t) * m_t when bias correction is on, lr_t * m_t
    otherwise, and is clamped to the box.
    """
    if lr_t <= 0:
        raise ValueError(f"lr_t must be positive, got {lr_t}")
    g = _vector(g, "g")
    t = state.t
    m = hp.beta1 * state.m + (1.0 - hp.kappa) * g
    rate = lr_t / (1.0 - hp.beta1**t) if hp.bias_correction else lr_t
    x = np.minimum(np.maximum(state.x - rate * m, box.lo), box.hi)
    return OptimizerState(x=x, m=m, v=state.v.copy(), v_hat=state.v_hat.copy(), t=t + 1)


def _moment_updates(state: OptimizerState, g: np.ndarray,
                    hp: HyperParams) -> tuple[np.ndarray, np.ndarray]:
    b1t = hp.beta1_at(state.t)
    m = b1t * state.m + (1.0 - b1t) * g
    v = hp.beta2 * state.v + (1.0 - hp.beta2) * g * g
    return m, v


def adam_step(state: OptimizerState, g, hp: HyperParams,
              box: FeasibleBox) -> OptimizerState:
    """Unbounded adaptive step with the same 1/sqrt(t) decay as the bounded
    kernels, so that trajectories coincide exactly whenever the clip is
    inactive. Raises ZeroDivisionError if some v_{t,i} = 0 and epsilon = 0."""
    g = _vector(g, "g")
    m, v = _moment_updates(state, g, hp)
    _, eta = _adaptive_rates(v, hp, state.t, None)
    x = project_box_weighted(state.x - eta * m, box, 1.0 / eta)
    return OptimizerState(x=x, m=m, v=v, v_hat=state.v_hat.copy(), t=state.t + 1)


def amsgrad_step(state: OptimizerState, g, hp: HyperParams,
                 box: FeasibleBox) -> OptimizerState:
    """Adaptive step whose rate uses the running maximum of v."""
    g = _vector(g, "g")
    m, v = _moment_updates(state, g, hp)
    v_hat = np.maximum(state.v_hat, v)
    _, eta = _adaptive_rates(v_hat, hp, state.t, None)
    x = project_box_weighted(state.x - eta * m, box, 1.0 / eta)
    return OptimizerState(x=x, m=m, v=v, v_hat=v_hat, t=state.t + 1)


def adabound_step(state: OptimizerState, g, hp: HyperParams,
                  bounds: BoundFamily, box: FeasibleBox) -> OptimizerState:
    """Bounded adaptive step: the raw rate is clipped into
    [lower(t), upper(t)] before the 1/sqrt(t) decay."""
    g = _vector(g, "g")
    m, v = _moment_updates(state, g, hp)
    _, eta = _adaptive_rates(v, hp, state.t, bounds)
    x = project_box_weighted(state.x - eta * m, box, 1.0 / eta)
    return OptimizerState(x=x, m=m, v=v, v_hat=state.v_hat.copy(), t=state.t + 1)


def amsbound_step(state: OptimizerState, g, hp: HyperParams,
                  bounds: BoundFamily, box: FeasibleBox) -> OptimizerState:
    """Bounded adaptive step with the running-max rate accumulator."""
    g = _vector(g, "g")
    m, v = _moment_updates(state, g, hp)
    v_hat = np.maximum(state.v_hat, v)
    _, eta = _adaptive_rates(v_hat, hp, state.t, bounds)
    x = project_box_weighted(state.x - eta * m, box, 1.0 / eta)
    return OptimizerState(x=x, m=m, v=v, v_hat=v_hat, t=state.t + 1)
