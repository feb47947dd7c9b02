"""Rate-envelope families for bounded adaptive gradient methods.

A bound family supplies time-indexed envelopes (lower(t), upper(t)) that the
raw per-coordinate rate alpha/sqrt(v_t) is clipped into before the global
1/sqrt(t) decay is applied. Three families are implemented:

GammaBounds
    lower(t) = 1 - 1/(gamma*t + 1), upper(t) = 1 + 1/(gamma*t). The lower
    envelope is non-decreasing, the upper non-increasing, and both converge
    to 1, so the bounded method degenerates to plain momentum SGD over time.

StepBounds
    lower(t) = alpha/C throughout; upper(t) = alpha/sqrt(1 - beta2) up to
    step K and alpha/C afterwards. On any gradient stream with
    g_t^2 in [1, C^2] the raw rate already sits inside the envelope for all
    t <= K, so the clip is inactive there by construction.

ConstantBounds
    lower(t) = upper(t) = alpha_star; the clip pins the rate, reducing the
    method to dampened momentum SGD at rate alpha_star/sqrt(t).

The module also evaluates the drift statistic

    max over t <= T of  t/lower(t) - (t-1)/upper(t-1)

(the t = 1 term is just 1/lower(1)), which controls how fast inverse rates
can grow and is the quantity the corrected regret guarantee is stated in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Union

import numpy as np

ArrayLike = Union[int, float, np.ndarray]


@dataclass(frozen=True)
class GammaBounds:
    """Envelopes 1 - 1/(gamma*t + 1) and 1 + 1/(gamma*t)."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def lower(self, t: ArrayLike) -> ArrayLike:
        return 1.0 - 1.0 / (self.gamma * t + 1.0)

    def upper(self, t: ArrayLike) -> ArrayLike:
        return 1.0 + 1.0 / (self.gamma * t)


@dataclass(frozen=True)
class StepBounds:
    """Constant lower envelope with an upper envelope that collapses after K.

    Requires C > max(1, alpha) so that alpha/C < alpha/sqrt(1 - beta2) and the
    envelope sandwiches alpha/sqrt(v_t) on streams with g_t^2 in [1, C^2].
    """

    K: int
    alpha: float
    beta2: float
    C: float

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.beta2 < 1.0:
            raise ValueError(f"beta2 must lie in [0, 1), got {self.beta2}")
        if not self.C > max(1.0, self.alpha):
            raise ValueError(
                f"C must exceed max(1, alpha) = {max(1.0, self.alpha)}, got {self.C}"
            )

    def lower(self, t: ArrayLike) -> ArrayLike:
        if isinstance(t, np.ndarray):
            return np.full(t.shape, self.alpha / self.C)
        return self.alpha / self.C

    def upper(self, t: ArrayLike) -> ArrayLike:
        high = self.alpha / math.sqrt(1.0 - self.beta2)
        low = self.alpha / self.C
        if isinstance(t, np.ndarray):
            return np.where(t <= self.K, high, low)
        return high if t <= self.K else low


@dataclass(frozen=True)
class ConstantBounds:
    """Degenerate envelope lower(t) = upper(t) = alpha_star."""

    alpha_star: float

    def __post_init__(self):
        if not self.alpha_star > 0:
            raise ValueError(f"alpha_star must be positive, got {self.alpha_star}")

    def lower(self, t: ArrayLike) -> ArrayLike:
        if isinstance(t, np.ndarray):
            return np.full(t.shape, self.alpha_star)
        return self.alpha_star

    def upper(self, t: ArrayLike) -> ArrayLike:
        if isinstance(t, np.ndarray):
            return np.full(t.shape, self.alpha_star)
        return self.alpha_star


BoundFamily = Union[GammaBounds, StepBounds, ConstantBounds]


def eval_bounds(spec: BoundFamily, t: int) -> tuple[float, float]:
    """Evaluate (lower(t), upper(t)) at a positive integer step."""
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    lo = float(spec.lower(t))
    hi = float(spec.upper(t))
    if lo > hi:
        raise ValueError(f"malformed envelope at t={t}: lower {lo} > upper {hi}")
    return lo, hi


def l_inf(spec: BoundFamily) -> float:
    """First-step lower envelope, lower(1)."""
    return float(spec.lower(1))


def r_inf(spec: BoundFamily) -> float:
    """First-step upper envelope, upper(1); also a global cap when
    the upper envelope is non-increasing."""
    return float(spec.upper(1))


def drift_term(spec: BoundFamily, t: int) -> float:
    """Single drift term t/lower(t) - (t-1)/upper(t-1); 1/lower(1) at t = 1."""
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    if t == 1:
        return 1.0 / float(spec.lower(1))
    return t / float(spec.lower(t)) - (t - 1) / float(spec.upper(t - 1))


def drift_max(spec: BoundFamily, T: int, chunk: int = 1 << 20) -> float:
    """Max of the drift term over t in [1, T], by exhaustive vectorized scan.

    The scan is chunked so horizons in the tens of millions stay cheap on
    memory. Closed-form limits (e.g. 1 + 2/gamma for GammaBounds) are used as
    cross-checks in tests, never as the implementation.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    best = 1.0 / float(spec.lower(1))
    for a in range(2, T + 1, chunk):
        b = min(a + chunk, T + 1)
        ts = np.arange(a, b, dtype=np.float64)
        terms = ts / spec.lower(ts) - (ts - 1.0) / spec.upper(ts - 1.0)
        best = max(best, float(terms.max()))
    return best


def drift_running_max(spec: BoundFamily, ts: np.ndarray) -> np.ndarray:
    """drift_max(spec, t) for each t in the sorted positive array `ts`.

    One scan to max(ts) with a cumulative maximum, so evaluating the drift
    bound at every checkpoint of a run costs the same as a single scan.
    """
    ts = np.asarray(ts, dtype=np.int64)
    if ts.size == 0:
        return np.zeros(0)
    if ts[0] < 1 or np.any(np.diff(ts) <= 0):
        raise ValueError("checkpoint steps must be sorted, unique and >= 1")
    T = int(ts[-1])
    grid = np.arange(1, T + 1, dtype=np.float64)
    terms = grid / spec.lower(grid)
    terms[1:] -= grid[:-1] / spec.upper(grid[:-1])
    terms[0] = 1.0 / float(spec.lower(1))
    return np.maximum.accumulate(terms)[ts - 1]


def gamma_drift_bound(gamma: float) -> float:
    """Analytic cap 3 + 2/gamma on the drift term for GammaBounds."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 3.0 + 2.0 / gamma


def inactive_clip_gamma(K: int, alpha: float, C: float, beta2: float) -> float:
    """Gamma making GammaBounds clipping inactive through step K on streams
    with g_t^2 in [1, C^2]: the envelope then contains [alpha/C,
    alpha/sqrt(1 - beta2)] for all t <= K."""
    if K < 1:
        raise ValueError(f"K must be a positive integer, got {K}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not C > alpha:
        raise ValueError(f"C must exceed alpha = {alpha}, got {C}")
    if not 0.0 <= beta2 < 1.0:
        raise ValueError(f"beta2 must lie in [0, 1), got {beta2}")
    return min(alpha / (C - alpha), math.sqrt(1.0 - beta2) / alpha) / K


_FAMILY_TAGS = {GammaBounds: "gamma", StepBounds: "step", ConstantBounds: "constant"}


def family_tag(spec: BoundFamily) -> str:
    return _FAMILY_TAGS[type(spec)]


def spec_to_dict(spec: BoundFamily) -> dict:
    """Serialize for config echoes; round-trips through spec_from_dict."""
    d = {"family": family_tag(spec)}
    d.update(asdict(spec))
    return d


def spec_from_dict(d: dict) -> BoundFamily:
    kind = d.get("family")
    params = {k: v for k, v in d.items() if k != "family"}
    if kind == "gamma":
        return GammaBounds(**params)
    if kind == "step":
        return StepBounds(**params)
    if kind == "constant":
        return ConstantBounds(**params)
    raise ValueError(f"unknown bound family {kind!r}")
