"""boundlab: a desk-scale laboratory for bounded adaptive gradient methods.

Single-step optimizer kernels (momentum SGD through the bounded adaptive
variants), rate-envelope families, the rare-large-slope stochastic stream on
which unbounded adaptive methods drift away from the optimum, closed-form
regret expressions (the refuted guarantee and its drift-based correction),
and a deterministic Monte Carlo harness that certifies or refutes them at
desk scale.
"""

from .analysis import (BoundInputs, claimed_regret_bound,
                       closed_form_regret_bound,
                       counterexample_claimed_bound, drift_regret_bound,
                       find_contradiction_horizon)
from .bounds import (ConstantBounds, GammaBounds, StepBounds, drift_max,
                     drift_running_max, drift_term, eval_bounds,
                     gamma_drift_bound, inactive_clip_gamma, l_inf, r_inf)
from .harness import (CalibrationError, CalibrationResult, ContradictionReport,
                      EquivalenceReport, ExperimentConfig, MonteCarloReport,
                      RegretExperimentReport, TrialResult, calibrate_c,
                      contradiction_demo, default_checkpoints,
                      equivalence_check, monte_carlo, monotone_within_ci,
                      reference_trial, regret_experiment, run_trial,
                      write_csv)
from .kernels import (BETA1_CONST, BETA1_OVER_T, FeasibleBox, HyperParams,
                      OptimizerState, adabound_step, adam_step, amsbound_step,
                      amsgrad_step, clip_elementwise, effective_rates,
                      initial_state, project_box_weighted, sgdm_step,
                      symmetric_box)
from .problems import (BoxLinearProblem, LossSample, ReddiProblem,
                       RegretLedger, expected_suboptimality, ledger_update,
                       sample_loss)

__version__ = "0.1.0"
