"""Deterministic Monte Carlo harness.

Experiments are pure functions of an ExperimentConfig: trial k of an
experiment consumes the counter-based uniform stream keyed by
(config.seed, k), trials aggregate in index order, and the parallelism
degree never changes any output. Two execution paths exist for every trial:

* run_trial       -- the chunked compiled runner (used everywhere),
* reference_trial -- a plain loop over the public kernels.

The two are bit-identical by construction and by test; the reference path is
the oracle that keeps the fast path honest.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _fastpath as fp
from . import rng
from .analysis import (BoundInputs, claimed_regret_bound,
                       closed_form_regret_bound,
                       counterexample_claimed_bound, drift_regret_bound,
                       find_contradiction_horizon)
from .bounds import (BoundFamily, ConstantBounds, GammaBounds, StepBounds,
                     drift_max, drift_running_max, inactive_clip_gamma, r_inf)
from .kernels import (BETA1_OVER_T, HyperParams, adabound_step, adam_step,
                      amsbound_step, amsgrad_step, effective_rates,
                      initial_state, sgdm_step)
from .problems import BoxLinearProblem, ReddiProblem, RegretLedger

OPTIMIZERS = ("sgdm", "adam", "amsgrad", "adabound", "amsbound")
_BOUNDED = ("adabound", "amsbound")

_OPT_IDS = {
    "sgdm": fp.OPT_SGDM,
    "adam": fp.OPT_ADAM,
    "amsgrad": fp.OPT_AMSGRAD,
    "adabound": fp.OPT_ADABOUND,
    "amsbound": fp.OPT_AMSBOUND,
}

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


class CalibrationError(RuntimeError):
    """No probed slope magnitude produced certified upward drift."""


def default_checkpoints(T: int) -> tuple[int, ...]:
    """Powers of two up to T, plus T itself (log-spaced trajectory log)."""
    if T < 1:
        return ()
    cps = []
    p = 1
    while p <= T:
        cps.append(p)
        p *= 2
    if cps[-1] != T:
        cps.append(T)
    return tuple(cps)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment depends on; the seed fully determines all
    randomness."""

    optimizer: str
    hp: HyperParams
    problem: ReddiProblem | BoxLinearProblem
    bounds: BoundFamily | None = None
    T: int = 10_000
    trials: int = 1
    seed: int = 0
    checkpoints: tuple[int, ...] | None = None
    out_dir: str | None = None

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.optimizer in _BOUNDED and self.bounds is None:
            raise ValueError(f"{self.optimizer} requires a bound family")
        if self.T < 0:
            raise ValueError(f"horizon must be >= 0, got {self.T}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.checkpoints is not None:
            cps = tuple(self.checkpoints)
            if any(c < 1 or c > self.T for c in cps):
                raise ValueError("checkpoints must lie in [1, T]")
            if list(cps) != sorted(set(cps)):
                raise ValueError("checkpoints must be sorted and unique")

    def resolved_checkpoints(self) -> np.ndarray:
        cps = self.checkpoints if self.checkpoints is not None else default_checkpoints(self.T)
        return np.asarray(cps, dtype=np.int64)


@dataclass(frozen=True)
class BoundValues:
    """Theoretical bound RHS values evaluated at the final step."""

    claimed: float
    drift: float
    closed_form: float


@dataclass
class TrialResult:
    """One trial's outputs; bit-for-bit reproducible from
    (config, trial_index)."""

    final_x: np.ndarray
    regret: float
    ledger: RegretLedger
    checkpoint_ts: np.ndarray
    checkpoint_xs: np.ndarray
    checkpoint_regret: np.ndarray
    checkpoint_sum_beta1t_eta_inv: np.ndarray
    checkpoint_etahat_inv: np.ndarray
    trajectory: np.ndarray | None = None
    bound_values: BoundValues | None = None
    free_drift: float = 0.0  # unclamped-increment sum over the drift window


def _family_code(bounds: BoundFamily | None):
    if bounds is None:
        return fp.FAM_NONE, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    if isinstance(bounds, GammaBounds):
        return fp.FAM_GAMMA, bounds.gamma, 0.0, 0.0, 0.0, 0.0, 0.0
    if isinstance(bounds, StepBounds):
        return (fp.FAM_STEP, 0.0, bounds.alpha, bounds.beta2, bounds.C,
                float(bounds.K), 0.0)
    if isinstance(bounds, ConstantBounds):
        return fp.FAM_CONST, 0.0, 0.0, 0.0, 0.0, 0.0, bounds.alpha_star
    raise TypeError(f"unknown bound family {type(bounds).__name__}")


def _bound_values(config: ExperimentConfig, ledger: RegretLedger) -> BoundValues | None:
    if config.optimizer not in _BOUNDED or config.T < 1 or config.problem.G2 <= 0:
        return None
    bounds = config.bounds
    problem = config.problem
    inputs = BoundInputs(
        T=config.T, d=problem.d, D_inf=problem.D_inf, G2=problem.G2,
        R_inf=r_inf(bounds), beta1=config.hp.beta1,
        M=drift_max(bounds, config.T),
        eta1_inv=ledger.eta1_inv,
        sum_beta1t_eta_inv=ledger.sum_beta1t_eta_inv,
        etahat_T_inv=ledger.last_etahat_inv,
    )
    if isinstance(bounds, GammaBounds) and config.hp.beta1_schedule == BETA1_OVER_T:
        cor2 = closed_form_regret_bound(config.T, config.hp.beta1, bounds.gamma,
                                        problem.d, problem.D_inf, problem.G2)
    else:
        cor2 = math.nan
    return BoundValues(claimed=claimed_regret_bound(inputs),
                       drift=drift_regret_bound(inputs),
                       closed_form=cor2)


def run_trial(config: ExperimentConfig, trial_index: int,
              record_trajectory: bool = False, compute_bounds: bool = True,
              chunk_steps: int = 1 << 20,
              drift_window_start: int | None = None) -> TrialResult:
    """Run one trial on the compiled path.

    drift_window_start, when given, accumulates the sum of unclamped
    per-step increments over t >= drift_window_start into
    TrialResult.free_drift (calibration uses this: the box projection
    censors drift at the faces, while the increments of a linear-loss run
    are exogenous).

    Raises ZeroDivisionError when an unbounded adaptive kernel meets a zero
    second moment with epsilon = 0 (the bounded kernels absorb that case in
    the clip).
    """
    problem = config.problem
    d = problem.d
    T = config.T
    cps = config.resolved_checkpoints()
    hp = config.hp

    x = problem.initial_x.astype(np.float64)
    m = np.zeros(d)
    v = np.zeros(d)
    vhat = np.zeros(d)
    eta_buf = np.zeros(d)
    sums = np.zeros((3, d))
    acc = np.zeros(4)
    n_cp = len(cps)
    cp_x = np.zeros((n_cp, d))
    cp_regret = np.zeros(n_cp)
    cp_sums = np.zeros((n_cp, d))
    cp_ehat = np.zeros((n_cp, d))
    rec = np.zeros((T + 1, d)) if record_trajectory else np.zeros((1, 1))

    box = problem.box
    fam, f_gamma, f_alpha, f_beta2, f_C, f_K, f_alpha_star = _family_code(config.bounds)
    opt = _OPT_IDS[config.optimizer]
    sched = fp.SCHED_OVER_T if hp.beta1_schedule == BETA1_OVER_T else fp.SCHED_CONST
    key = rng.trial_key(config.seed, trial_index)
    dps = problem.draws_per_step

    drift_from = drift_window_start if drift_window_start is not None else T + 1
    cp_ptr = 0
    for a in range(0, T, chunk_steps):
        b = min(a + chunk_steps, T)
        u = rng.uniforms(key, a * dps, b * dps).reshape(b - a, dps)
        slopes = np.ascontiguousarray(problem.slopes_from_uniforms(u), dtype=np.float64)
        cp_ptr = int(fp.run_chunk(
            a + 1, slopes,
            opt, sched, hp.alpha, hp.beta1, hp.beta2, hp.kappa, hp.epsilon,
            hp.bias_correction,
            fam, f_gamma, f_alpha, f_beta2, f_C, f_K, f_alpha_star,
            box.lo, box.hi, problem.x_star,
            x, m, v, vhat, eta_buf, sums, acc,
            cps, cp_ptr, cp_x, cp_regret, cp_sums, cp_ehat,
            rec, record_trajectory, drift_from,
        ))
        if acc[1] != 0.0:
            raise ZeroDivisionError(
                f"zero second moment at step {int(acc[2])} with epsilon = 0; "
                f"set epsilon > 0 or use a bounded optimizer"
            )
    if record_trajectory:
        rec[T] = x

    ledger = RegretLedger(
        steps=T, regret=float(acc[0]),
        sum_beta1t_eta_inv=sums[0].copy(),
        eta1_inv=sums[1].copy() if T >= 1 else None,
        last_etahat_inv=sums[2].copy() if T >= 1 else None,
    )
    return TrialResult(
        final_x=x.copy(), regret=float(acc[0]), ledger=ledger,
        checkpoint_ts=cps, checkpoint_xs=cp_x, checkpoint_regret=cp_regret,
        checkpoint_sum_beta1t_eta_inv=cp_sums, checkpoint_etahat_inv=cp_ehat,
        trajectory=rec if record_trajectory else None,
        bound_values=_bound_values(config, ledger) if compute_bounds else None,
        free_drift=float(acc[3]),
    )


def reference_trial(config: ExperimentConfig, trial_index: int,
                    record_trajectory: bool = False,
                    drift_window_start: int | None = None) -> TrialResult:
    """The same trial via the public single-step kernels (the oracle path).

    Orders of magnitude slower than run_trial; meant for tests and modest
    horizons.
    """
    problem = config.problem
    d = problem.d
    T = config.T
    hp = config.hp
    box = problem.box
    bounds = config.bounds
    cps = config.resolved_checkpoints()
    x_star = problem.x_star
    key = rng.trial_key(config.seed, trial_index)
    dps = problem.draws_per_step

    state = initial_state(problem.initial_x)
    ledger = RegretLedger()
    n_cp = len(cps)
    cp_x = np.zeros((n_cp, d))
    cp_regret = np.zeros(n_cp)
    cp_sums = np.zeros((n_cp, d))
    cp_ehat = np.zeros((n_cp, d))
    rec = np.zeros((T + 1, d)) if record_trajectory else None
    cp_ptr = 0
    drift_from = drift_window_start if drift_window_start is not None else T + 1
    free_drift = 0.0

    for t in range(1, T + 1):
        if dps == 1:
            sample = problem.sample(rng.uniform(key, t - 1))
        else:
            draws = np.array([rng.uniform(key, (t - 1) * dps + j) for j in range(dps)])
            sample = problem.sample(draws)
        x_t = state.x.copy()
        g = sample.gradient(x_t)
        if config.optimizer == "sgdm":
            lr_t = hp.alpha / math.sqrt(t)
            state = sgdm_step(state, g, lr_t, hp, box)
            rate = lr_t / (1.0 - hp.beta1**t) if hp.bias_correction else lr_t
            eta = np.full(d, rate)
        elif config.optimizer == "adam":
            state = adam_step(state, g, hp, box)
            _, eta = effective_rates(state, hp)
        elif config.optimizer == "amsgrad":
            state = amsgrad_step(state, g, hp, box)
            _, eta = effective_rates(state, hp, use_max=True)
        elif config.optimizer == "adabound":
            state = adabound_step(state, g, hp, bounds, box)
            _, eta = effective_rates(state, hp, bounds)
        else:
            state = amsbound_step(state, g, hp, bounds, box)
            _, eta = effective_rates(state, hp, bounds, use_max=True)
        ledger.update(sample, x_t, x_star, 1.0 / eta, hp.beta1_at(t))
        if t >= drift_from:
            for i in range(d):
                free_drift -= float(eta[i]) * float(state.m[i])
        if record_trajectory:
            rec[t - 1] = x_t
        if cp_ptr < n_cp and t == cps[cp_ptr]:
            cp_x[cp_ptr] = x_t
            cp_regret[cp_ptr] = ledger.regret
            cp_sums[cp_ptr] = ledger.sum_beta1t_eta_inv
            cp_ehat[cp_ptr] = ledger.last_etahat_inv
            cp_ptr += 1
    if record_trajectory:
        rec[T] = state.x

    if ledger.sum_beta1t_eta_inv is None:
        ledger.sum_beta1t_eta_inv = np.zeros(d)
    return TrialResult(
        final_x=state.x.copy(), regret=ledger.regret, ledger=ledger,
        checkpoint_ts=cps, checkpoint_xs=cp_x, checkpoint_regret=cp_regret,
        checkpoint_sum_beta1t_eta_inv=cp_sums, checkpoint_etahat_inv=cp_ehat,
        trajectory=rec,
        bound_values=_bound_values(config, ledger),
        free_drift=free_drift,
    )


def _run_trials(config: ExperimentConfig, threads: int = 1,
                **kwargs) -> list[TrialResult]:
    """All trials, aggregated in trial-index order whatever the parallelism."""
    kwargs.setdefault("compute_bounds", False)
    indices = range(config.trials)
    if threads <= 1:
        return [run_trial(config, k, **kwargs) for k in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(run_trial, config, k, **kwargs) for k in indices]
        return [f.result() for f in futures]


def _mean_ci(values: np.ndarray, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Normal-approximation mean and 95% half-width; nan half-width for a
    single sample."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[axis]
    mean = values.mean(axis=axis)
    if n < 2:
        return mean, np.full_like(np.asarray(mean, dtype=np.float64), np.nan)
    half = _Z95 * values.std(axis=axis, ddof=1) / math.sqrt(n)
    return mean, half


def monotone_within_ci(mean: np.ndarray, ci: np.ndarray, factor: float = 2.0) -> bool:
    """True when consecutive means never drop by more than `factor` combined
    confidence half-widths (vacuously true when the CI is suppressed)."""
    mean = np.asarray(mean, dtype=np.float64)
    ci = np.asarray(ci, dtype=np.float64)
    if mean.size < 2 or np.any(np.isnan(ci)):
        return True
    slack = factor * np.sqrt(ci[:-1] ** 2 + ci[1:] ** 2)
    return bool(np.all(np.diff(mean) >= -slack))


@dataclass
class MonteCarloReport:
    """Per-checkpoint trial aggregates of one experiment."""

    config: ExperimentConfig
    ts: np.ndarray
    mean_x: np.ndarray          # (n_cp, d)
    ci95_x: np.ndarray
    mean_subopt: np.ndarray     # (n_cp,)
    ci95_subopt: np.ndarray
    regret_mean: np.ndarray     # (n_cp,)
    regret_ci95: np.ndarray
    final_regret_mean: float
    final_regret_ci95: float
    trials: int

    csv_header = ("t", "mean_x", "ci95_x", "mean_subopt", "ci95_subopt", "trials")

    def csv_rows(self):
        if self.mean_x.shape[1] != 1:
            raise ValueError("the counterexample CSV layout is one-dimensional")
        for j, t in enumerate(self.ts):
            yield (int(t), self.mean_x[j, 0], self.ci95_x[j, 0],
                   self.mean_subopt[j], self.ci95_subopt[j], self.trials)


def monte_carlo(config: ExperimentConfig, threads: int = 1) -> MonteCarloReport:
    """Run config.trials independent trials and aggregate the checkpoints."""
    results = _run_trials(config, threads=threads)
    xs = np.stack([r.checkpoint_xs for r in results])           # (trials, n_cp, d)
    regrets = np.stack([r.checkpoint_regret for r in results])  # (trials, n_cp)
    finals = np.array([r.regret for r in results])
    subopt = np.array([[config.problem.expected_suboptimality(x) for x in r.checkpoint_xs]
                       for r in results])                        # (trials, n_cp)
    mean_x, ci_x = _mean_ci(xs)
    mean_s, ci_s = _mean_ci(subopt)
    mean_r, ci_r = _mean_ci(regrets)
    mean_f, ci_f = _mean_ci(finals)
    return MonteCarloReport(
        config=config, ts=config.resolved_checkpoints(),
        mean_x=mean_x, ci95_x=ci_x,
        mean_subopt=mean_s, ci95_subopt=ci_s,
        regret_mean=mean_r, regret_ci95=ci_r,
        final_regret_mean=float(mean_f), final_regret_ci95=float(ci_f),
        trials=config.trials,
    )


@dataclass
class CalibrationResult:
    C: float
    mean_drift: float
    se_drift: float
    z_score: float
    probes: list = field(default_factory=list)  # (C, mean, se) per probed C


def calibrate_c(alpha: float, beta1: float, beta2: float, delta: float = 1.0,
                probe_T: int = 2000, trials: int = 64, seed: int = 0,
                z_threshold: float = 3.0, c_max: float = 65536.0,
                threads: int = 1) -> CalibrationResult:
    """Find a slope magnitude C in the upward-drift regime by doubling search.

    For each probed C the per-trial statistic is the mean unclamped
    per-step increment of an unbounded adaptive run over the second half of
    the probe horizon; the first C whose Monte Carlo mean is positive by at
    least z_threshold standard errors wins. Two reasons for that statistic
    rather than the raw telescoped displacement: the box projection censors
    drift once iterates pin to a face (linear-loss increments are exogenous,
    so dropping the clamp is exact), and with zero or small momentum the very
    first step is an O(1) jump that would otherwise dominate the probe. The
    returned C is certified by simulation, not a closed-form quantity.
    """
    if probe_T < 1000:
        raise ValueError(f"probe horizon must be >= 1000, got {probe_T}")
    hp = HyperParams(alpha=alpha, beta1=beta1, beta2=beta2)
    window_start = probe_T // 2 + 1
    window = probe_T - window_start + 1
    C = max(2.0, 2.0 * alpha, delta)
    probes = []
    while C <= c_max:
        problem = ReddiProblem(C=C, delta=delta)
        config = ExperimentConfig("adam", hp, problem, T=probe_T,
                                  trials=trials, seed=seed, checkpoints=())
        results = _run_trials(config, threads=threads,
                              drift_window_start=window_start)
        drifts = np.array([r.free_drift / window for r in results])
        mean = float(drifts.mean())
        se = float(drifts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
        probes.append((C, mean, se))
        if mean > 0.0 and (se == 0.0 or mean >= z_threshold * se):
            z = math.inf if se == 0.0 else mean / se
            return CalibrationResult(C=C, mean_drift=mean, se_drift=se,
                                     z_score=z, probes=probes)
        C *= 2.0
    raise CalibrationError(
        f"no C <= {c_max} produced certified upward drift "
        f"(alpha={alpha}, beta1={beta1}, beta2={beta2}, delta={delta}); "
        f"probes: {[(c, f'{m:.2e}') for c, m, _ in probes]}"
    )


@dataclass
class EquivalenceReport:
    """Paired-stream trajectory comparison of two optimizers."""

    ts: np.ndarray
    running_max: np.ndarray   # max over s <= t (and trials) of |x_s^A - x_s^B|_inf
    max_abs_diff: float
    trials: int

    csv_header = ("t", "max_abs_diff")

    def csv_rows(self):
        for j, t in enumerate(self.ts):
            yield (int(t), self.running_max[j])


def equivalence_check(config_a: ExperimentConfig, config_b: ExperimentConfig,
                      T: int, seed: int, trials: int = 1) -> EquivalenceReport:
    """Run both optimizers on identical loss streams; report the worst
    iterate discrepancy up to each checkpoint."""
    if config_a.problem != config_b.problem:
        raise ValueError("equivalence_check requires both configs to share the problem")
    a = replace(config_a, T=T, seed=seed, trials=1, checkpoints=None)
    b = replace(config_b, T=T, seed=seed, trials=1, checkpoints=None)
    cps = a.resolved_checkpoints()
    running = np.zeros(len(cps))
    overall = 0.0
    for k in range(trials):
        ra = run_trial(a, k, record_trajectory=True, compute_bounds=False)
        rb = run_trial(b, k, record_trajectory=True, compute_bounds=False)
        diff = np.abs(ra.trajectory - rb.trajectory).max(axis=1)  # (T+1,)
        run_max = np.maximum.accumulate(diff)
        running = np.maximum(running, run_max[cps - 1])
        overall = max(overall, float(run_max[-1]))
    return EquivalenceReport(ts=cps, running_max=running,
                             max_abs_diff=overall, trials=trials)


@dataclass
class RegretExperimentReport:
    """Realized regret against the theoretical bounds at every checkpoint.

    Per-trial matrices are kept so certificates can be asserted trial by
    trial; CSV rows carry the trial means.
    """

    config: ExperimentConfig
    ts: np.ndarray
    regret: np.ndarray        # (trials, n_cp) realized
    drift_bound: np.ndarray   # (trials, n_cp)
    claimed_bound: np.ndarray
    closed_form_bound: np.ndarray  # (n_cp,), nan unless gamma family + beta1/t
    drift_violations: int
    closed_form_violations: int

    csv_header = ("t", "regret_mean", "thm3_rhs", "cor2_rhs", "thm1_rhs")

    def csv_rows(self):
        for j, t in enumerate(self.ts):
            yield (int(t), self.regret[:, j].mean(), self.drift_bound[:, j].mean(),
                   self.closed_form_bound[j], self.claimed_bound[:, j].mean())


def regret_experiment(config: ExperimentConfig, threads: int = 1) -> RegretExperimentReport:
    """Run trials of a bounded optimizer and evaluate both theoretical bounds
    at every checkpoint from the realized inverse-rate statistics."""
    if config.optimizer not in _BOUNDED:
        raise ValueError("regret_experiment needs a bounded optimizer")
    problem = config.problem
    bounds = config.bounds
    results = _run_trials(config, threads=threads)
    cps = config.resolved_checkpoints()
    n_cp = len(cps)
    M_at = drift_running_max(bounds, cps)
    R = r_inf(bounds)
    use_cor2 = isinstance(bounds, GammaBounds) and config.hp.beta1_schedule == BETA1_OVER_T

    regret = np.stack([r.checkpoint_regret for r in results])
    drift_b = np.zeros((config.trials, n_cp))
    claimed_b = np.zeros((config.trials, n_cp))
    cor2_b = np.full(n_cp, np.nan)
    if use_cor2:
        for j, t in enumerate(cps):
            cor2_b[j] = closed_form_regret_bound(int(t), config.hp.beta1,
                                                 bounds.gamma, problem.d,
                                                 problem.D_inf, problem.G2)
    for k, res in enumerate(results):
        for j, t in enumerate(cps):
            inputs = BoundInputs(
                T=int(t), d=problem.d, D_inf=problem.D_inf, G2=problem.G2,
                R_inf=R, beta1=config.hp.beta1, M=float(M_at[j]),
                eta1_inv=res.ledger.eta1_inv,
                sum_beta1t_eta_inv=res.checkpoint_sum_beta1t_eta_inv[j],
                etahat_T_inv=res.checkpoint_etahat_inv[j],
            )
            drift_b[k, j] = drift_regret_bound(inputs)
            claimed_b[k, j] = claimed_regret_bound(inputs)
    drift_viol = int(np.sum(regret > drift_b))
    cor2_viol = int(np.sum(regret > cor2_b[None, :])) if use_cor2 else 0
    return RegretExperimentReport(
        config=config, ts=cps, regret=regret, drift_bound=drift_b,
        claimed_bound=claimed_b, closed_form_bound=cor2_b,
        drift_violations=drift_viol, closed_form_violations=cor2_viol,
    )


@dataclass
class ContradictionReport:
    """Side-by-side of the refuted bound's prediction and the Monte Carlo
    reality on the same instance.

    rhs_over_K is the refuted guarantee's average per-step regret at horizon
    K (< 1/100 by choice of K). mc_avg_regret_per_step is the simulated
    average over the first simulated_steps steps; the per-step expected
    suboptimality on this instance is non-decreasing, so when K exceeds the
    simulation budget the prefix average is a conservative stand-in for the
    full-horizon average. The demo succeeds when the prefix average's lower
    confidence edge still exceeds rhs_over_K.
    """

    K: int
    C: float
    rhs_over_K: float
    simulated_steps: int
    trials: int
    family: str
    mc_avg_regret_per_step: float
    ci95: float
    mean_x_ts: np.ndarray
    mean_x: np.ndarray
    success: bool

    csv_header = ("K", "rhs_over_K", "mc_avg_regret_per_step", "ci95",
                  "trials", "C", "gamma_or_step")

    def csv_rows(self):
        yield (self.K, self.rhs_over_K, self.mc_avg_regret_per_step,
               self.ci95, self.trials, self.C, self.family)


def contradiction_demo(d: int = 1, alpha: float = 0.1, beta2: float = 0.99,
                       delta: float = 1.0, trials: int = 20, seed: int = 0,
                       family: str = "step", threads: int = 1,
                       max_sim_steps: int = 20_000_000,
                       calibration_kwargs: dict | None = None) -> ContradictionReport:
    """Exhibit the instance on which the claimed guarantee fails.

    Calibrates C, picks the horizon K where the claimed bound forces average
    per-step regret below 1/100, then measures the actual average by Monte
    Carlo with zero momentum and the K-step envelope (or the equivalent
    gamma envelope). Simulation is capped at max_sim_steps steps per trial;
    K itself is reported alongside the simulated prefix length.
    """
    if d != 1:
        raise ValueError("the counterexample stream is one-dimensional")
    if family not in ("step", "gamma"):
        raise ValueError(f"family must be 'step' or 'gamma', got {family!r}")
    cal = calibrate_c(alpha=alpha, beta1=0.0, beta2=beta2, delta=delta,
                      seed=seed, threads=threads,
                      **(calibration_kwargs or {}))
    C = cal.C
    K = find_contradiction_horizon(d, C, alpha, beta2)
    rhs_over_K = counterexample_claimed_bound(K, d, C, alpha, beta2) / K
    sim_T = min(K, max_sim_steps)
    if family == "step":
        bounds: BoundFamily = StepBounds(K=K, alpha=alpha, beta2=beta2, C=C)
    else:
        bounds = GammaBounds(gamma=inactive_clip_gamma(K, alpha, C, beta2))
    hp = HyperParams(alpha=alpha, beta1=0.0, beta2=beta2)
    problem = ReddiProblem(C=C, delta=delta)
    config = ExperimentConfig("adabound", hp, problem, bounds, T=sim_T,
                              trials=trials, seed=seed)
    results = _run_trials(config, threads=threads)
    per_trial = np.array([r.regret / sim_T for r in results])
    mean, ci = _mean_ci(per_trial)
    xs = np.stack([r.checkpoint_xs[:, 0] for r in results])
    mean_x = xs.mean(axis=0)
    lower_edge = mean - ci if trials > 1 else mean
    return ContradictionReport(
        K=K, C=C, rhs_over_K=rhs_over_K, simulated_steps=sim_T,
        trials=trials, family=family,
        mc_avg_regret_per_step=float(mean), ci95=float(ci),
        mean_x_ts=config.resolved_checkpoints(), mean_x=mean_x,
        success=bool(lower_edge > rhs_over_K),
    )


def write_csv(report, path) -> None:
    """Write a report to CSV: UTF-8, LF endings, '.' decimals, header row,
    fixed column order. Floats use shortest round-trip formatting."""

    def fmt(value):
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return repr(float(value))
        return str(value)

    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(report.csv_header)
            for row in report.csv_rows():
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc
