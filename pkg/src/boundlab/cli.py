"""Command-line entry point.

Subcommands map one-to-one onto the harness scenarios:

    counterexample   Monte Carlo of the rare-large-slope stream; writes
                     counterexample.csv. Exit 1 if the drift certificate
                     (suboptimality floor + monotone mean iterate) fails.
    contradiction    The claimed-bound contradiction demo; writes
                     contradiction.csv. Exit 1 if the demo inequality fails.
    regret           Realized regret vs the theoretical bounds at log-spaced
                     checkpoints; writes regret.csv. Exit 1 on any violation
                     of the drift bound (or its closed form, when active).
    equivalence      Paired-stream trajectory comparison of two optimizers;
                     writes equivalence.csv. Exit 1 if the max difference
                     exceeds --tol.
    validate-bounds  Envelope certificates (drift cap, monotonicity, limits).
    calibrate-c      Doubling search for the upward-drift slope magnitude.

Every run writes a config.echo JSON with all resolved parameters into the
output directory. Exit codes: 0 success, 1 certificate failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .bounds import (ConstantBounds, GammaBounds, StepBounds, drift_max,
                     drift_term, eval_bounds, gamma_drift_bound,
                     inactive_clip_gamma)
from .harness import (CalibrationError, ExperimentConfig, calibrate_c,
                      contradiction_demo, equivalence_check, monte_carlo,
                      monotone_within_ci, regret_experiment, write_csv)
from .kernels import BETA1_CONST, BETA1_OVER_T, HyperParams
from .problems import BoxLinearProblem, ReddiProblem

_SCHEDULES = {"const": BETA1_CONST, "over-t": BETA1_OVER_T}


def _add_common(p: argparse.ArgumentParser, *, alpha=0.001, beta1=0.9,
                beta2=0.999, trials=100) -> None:
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--beta1", type=float, default=beta1)
    p.add_argument("--beta2", type=float, default=beta2)
    p.add_argument("--beta1-schedule", choices=("const", "over-t"),
                   default="const", dest="beta1_schedule")
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--bias-correction", action="store_true",
                   dest="bias_correction")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", type=str, default="runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundlab",
        description="Desk-scale laboratory for bounded adaptive gradient methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counterexample",
                       help="Monte Carlo of the rare-large-slope stream")
    _add_common(p, trials=1000)
    p.add_argument("--K", type=int, default=10_000,
                   help="horizon; also the envelope switch step")
    p.add_argument("--C", type=float, default=None,
                   help="slope magnitude (omit to calibrate)")
    p.add_argument("--calibrate", action="store_true",
                   help="force calibration of C even if --C is given")
    p.add_argument("--optimizer", choices=("adabound", "amsbound"),
                   default="adabound")
    p.add_argument("--family", choices=("step", "gamma"), default="step")

    p = sub.add_parser("contradiction",
                       help="claimed-bound contradiction demo")
    _add_common(p, alpha=0.1, beta2=0.99, trials=20)
    p.add_argument("--family", choices=("step", "gamma"), default="step")
    p.add_argument("--max-sim-steps", type=int, default=20_000_000,
                   dest="max_sim_steps")

    p = sub.add_parser("regret",
                       help="realized regret vs theoretical bounds")
    _add_common(p, trials=20)
    p.add_argument("--T", type=int, default=10_000)
    p.add_argument("--family", choices=("gamma", "step", "constant"),
                   default="gamma")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--K", type=int, default=None,
                   help="step-family switch (defaults to T)")
    p.add_argument("--alpha-star", type=float, default=0.1, dest="alpha_star")
    p.add_argument("--C", type=float, default=2.0, help="problem slope magnitude")
    p.add_argument("--problem", choices=("reddi", "linear"), default="reddi")
    p.add_argument("--d", type=int, default=4, help="dimension of the linear problem")
    p.add_argument("--optimizer", choices=("adabound", "amsbound"),
                   default="adabound")

    p = sub.add_parser("equivalence",
                       help="paired-stream comparison of two optimizers")
    _add_common(p, trials=1)
    p.add_argument("--a", type=str, required=True, help="optimizer spec")
    p.add_argument("--b", type=str, required=True, help="optimizer spec")
    p.add_argument("--T", type=int, default=10_000)
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("validate-bounds", help="envelope certificates")
    p.add_argument("--family", choices=("gamma", "step", "constant"),
                   default="gamma")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--K", type=int, default=10_000)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--C", type=float, default=2.0)
    p.add_argument("--alpha-star", type=float, default=0.1, dest="alpha_star")
    p.add_argument("--horizon", type=int, default=1_000_000)
    p.add_argument("--out", type=str, default="runs")

    p = sub.add_parser("calibrate-c",
                       help="doubling search for the drift slope magnitude")
    _add_common(p, alpha=0.1, beta2=0.99, trials=64)
    p.add_argument("--probe-T", type=int, default=2000, dest="probe_T")

    return parser


def _write_echo(args: argparse.Namespace) -> None:
    os.makedirs(args.out, exist_ok=True)
    payload = {k: v for k, v in sorted(vars(args).items())}
    with open(os.path.join(args.out, "config.echo"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _hp(args, beta1=None, kappa=None, bias=None) -> HyperParams:
    return HyperParams(
        alpha=args.alpha,
        beta1=args.beta1 if beta1 is None else beta1,
        beta2=args.beta2,
        beta1_schedule=_SCHEDULES[args.beta1_schedule],
        kappa=args.kappa if kappa is None else kappa,
        bias_correction=args.bias_correction if bias is None else bias,
    )


def _cmd_counterexample(args) -> int:
    if args.C is None or args.calibrate:
        cal = calibrate_c(alpha=args.alpha, beta1=args.beta1, beta2=args.beta2,
                          delta=args.delta, seed=args.seed, threads=args.threads)
        C = cal.C
        print(f"calibrated C = {C:g} (drift z-score {cal.z_score:.1f})")
    else:
        C = args.C
    if args.family == "step":
        bounds = StepBounds(K=args.K, alpha=args.alpha, beta2=args.beta2, C=C)
    else:
        bounds = GammaBounds(inactive_clip_gamma(args.K, args.alpha, C, args.beta2))
    problem = ReddiProblem(C=C, delta=args.delta)
    config = ExperimentConfig(args.optimizer, _hp(args), problem, bounds,
                              T=args.K, trials=args.trials, seed=args.seed)
    report = monte_carlo(config, threads=args.threads)
    out = os.path.join(args.out, "counterexample.csv")
    write_csv(report, out)
    floor = float(report.mean_subopt.min()) if len(report.mean_subopt) else math.nan
    mono = monotone_within_ci(report.mean_x[:, 0], report.ci95_x[:, 0])
    print(f"wrote {out}")
    print(f"mean suboptimality floor over checkpoints: {floor:.4f}")
    print(f"mean iterate non-decreasing within 2*CI: {mono}")
    ok = floor >= 0.5 and mono
    print(f"counterexample certificate: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_contradiction(args) -> int:
    try:
        report = contradiction_demo(
            d=1, alpha=args.alpha, beta2=args.beta2, delta=args.delta,
            trials=args.trials, seed=args.seed, family=args.family,
            threads=args.threads, max_sim_steps=args.max_sim_steps,
        )
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 1
    out = os.path.join(args.out, "contradiction.csv")
    write_csv(report, out)
    print(f"wrote {out}")
    print(f"C = {report.C:g}, K = {report.K}, simulated prefix = {report.simulated_steps}")
    print(f"claimed-bound average per step at K: {report.rhs_over_K:.6f}")
    print(f"Monte Carlo average per step: {report.mc_avg_regret_per_step:.4f} "
          f"(95% CI +/- {report.ci95:.4f}, {report.trials} trials)")
    print(f"contradiction demo: {'PASS' if report.success else 'FAIL'}")
    return 0 if report.success else 1


def _cmd_regret(args) -> int:
    if args.problem == "reddi":
        problem = ReddiProblem(C=args.C, delta=args.delta)
    else:
        problem = BoxLinearProblem(d=args.d)
    if args.family == "gamma":
        bounds = GammaBounds(args.gamma)
    elif args.family == "step":
        bounds = StepBounds(K=args.K if args.K is not None else args.T,
                            alpha=args.alpha, beta2=args.beta2, C=args.C)
    else:
        bounds = ConstantBounds(args.alpha_star)
    config = ExperimentConfig(args.optimizer, _hp(args), problem, bounds,
                              T=args.T, trials=args.trials, seed=args.seed)
    report = regret_experiment(config, threads=args.threads)
    out = os.path.join(args.out, "regret.csv")
    write_csv(report, out)
    print(f"wrote {out}")
    print(f"drift-bound violations: {report.drift_violations}")
    if len(report.closed_form_bound) and not math.isnan(report.closed_form_bound[-1]):
        print(f"closed-form violations: {report.closed_form_violations}")
    ok = report.drift_violations == 0 and report.closed_form_violations == 0
    print(f"regret certificate: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _parse_opt_spec(spec: str, args) -> tuple[str, HyperParams, object]:
    """Parse an optimizer spec string.

    Grammar: adam | amsgrad | sgdm[:kappa=<x>|kappa=beta1][:bias]
           | (adabound|amsbound):(gamma:<g> | step[:<K>] | constant:<a*>)
    """
    parts = spec.split(":")
    name = parts[0]
    if name in ("adam", "amsgrad"):
        if len(parts) > 1:
            raise ValueError(f"{name} takes no spec options: {spec!r}")
        return name, _hp(args), None
    if name == "sgdm":
        kappa = args.kappa
        bias = args.bias_correction
        for token in parts[1:]:
            if token == "bias":
                bias = True
            elif token.startswith("kappa="):
                value = token.split("=", 1)[1]
                kappa = args.beta1 if value == "beta1" else float(value)
            else:
                raise ValueError(f"unknown sgdm option {token!r} in {spec!r}")
        return name, _hp(args, kappa=kappa, bias=bias), None
    if name in ("adabound", "amsbound"):
        if len(parts) < 2:
            raise ValueError(f"{name} needs a bound family: {spec!r}")
        fam = parts[1]
        if fam == "gamma":
            if len(parts) != 3:
                raise ValueError(f"gamma family needs a value: {spec!r}")
            return name, _hp(args), GammaBounds(float(parts[2]))
        if fam == "step":
            K = int(parts[2]) if len(parts) == 3 else args.T
            return name, _hp(args), StepBounds(K=K, alpha=args.alpha,
                                               beta2=args.beta2, C=args.C)
        if fam == "constant":
            if len(parts) != 3:
                raise ValueError(f"constant family needs a value: {spec!r}")
            return name, _hp(args), ConstantBounds(float(parts[2]))
        raise ValueError(f"unknown bound family {fam!r} in {spec!r}")
    raise ValueError(f"unknown optimizer {name!r} in {spec!r}")


def _cmd_equivalence(args) -> int:
    problem = ReddiProblem(C=args.C, delta=args.delta)
    try:
        name_a, hp_a, bounds_a = _parse_opt_spec(args.a, args)
        name_b, hp_b, bounds_b = _parse_opt_spec(args.b, args)
    except ValueError as exc:
        print(f"bad optimizer spec: {exc}", file=sys.stderr)
        return 2
    config_a = ExperimentConfig(name_a, hp_a, problem, bounds_a, T=args.T,
                                seed=args.seed)
    config_b = ExperimentConfig(name_b, hp_b, problem, bounds_b, T=args.T,
                                seed=args.seed)
    report = equivalence_check(config_a, config_b, T=args.T, seed=args.seed,
                               trials=args.trials)
    out = os.path.join(args.out, "equivalence.csv")
    write_csv(report, out)
    print(f"wrote {out}")
    print(f"max iterate difference over t <= {args.T}: {report.max_abs_diff:.3e}")
    ok = report.max_abs_diff <= args.tol
    print(f"equivalence (tol {args.tol:g}): {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_validate_bounds(args) -> int:
    if args.family == "gamma":
        spec = GammaBounds(args.gamma)
        drift = drift_max(spec, args.horizon)
        cap = gamma_drift_bound(args.gamma)
        print(f"drift max over [1, {args.horizon}]: {drift:.6f}")
        print(f"analytic cap 3 + 2/gamma:          {cap:.6f}")
        ok = drift <= cap
    elif args.family == "step":
        spec = StepBounds(K=args.K, alpha=args.alpha, beta2=args.beta2, C=args.C)
        horizon = max(args.horizon, 2 * args.K)
        ts = np.arange(1, horizon + 1)
        lo = spec.lower(ts)
        hi = spec.upper(ts)
        ok = (bool(np.all(lo > 0))
              and bool(np.all(np.diff(lo) >= 0))
              and bool(np.all(np.diff(hi) <= 0))
              and bool(np.all(lo <= hi))
              and float(lo[-1]) == float(hi[-1]))
        print(f"drift max over [1, {horizon}]: {drift_max(spec, horizon):.6f}")
        print(f"envelope hypotheses (monotone, positive, equal limits): {ok}")
    else:
        spec = ConstantBounds(args.alpha_star)
        print(f"constant envelope at {args.alpha_star:g}; "
              f"drift term is identically {drift_term(spec, 2):.6f}")
        lo, hi = eval_bounds(spec, 1)
        ok = lo == hi == args.alpha_star
    print(f"validate-bounds: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_calibrate_c(args) -> int:
    try:
        cal = calibrate_c(alpha=args.alpha, beta1=args.beta1, beta2=args.beta2,
                          delta=args.delta, probe_T=args.probe_T,
                          trials=args.trials, seed=args.seed,
                          threads=args.threads)
    except CalibrationError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 1
    for C, mean, se in cal.probes:
        print(f"probe C={C:8g}  mean drift {mean:+.3e}  se {se:.2e}")
    print(f"calibrated C = {cal.C:g} (z-score {cal.z_score:.1f})")
    return 0


_COMMANDS = {
    "counterexample": _cmd_counterexample,
    "contradiction": _cmd_contradiction,
    "regret": _cmd_regret,
    "equivalence": _cmd_equivalence,
    "validate-bounds": _cmd_validate_bounds,
    "calibrate-c": _cmd_calibrate_c,
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    _write_echo(args)
    return _COMMANDS[args.command](args)


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
